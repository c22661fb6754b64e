import json
import math

import numpy as np
import pytest

from rmcflab.convexgeom import Ball, Cylinder, Ellipsoid
from rmcflab.dynamics import run_orbit
from rmcflab.expio import (ConfigError, ExperimentConfig, build_shape, emit_energy_plot,
                           load_config, parse_config, read_trace_csv, save_config, shape_spec,
                           write_trace_csv)
from rmcflab.expio.cli import main
from rmcflab.expio.csvio import HEADER
from rmcflab.trace import OrbitTrace, TraceSample

ORBIT = {"kind": "orbit", "shape": {"type": "ball", "radius": 1.0, "dim": 3},
         "solver": {"tau_end": 1.0}}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


# --- config ---------------------------------------------------------------------

def test_minimal_orbit_config(tmp_path):
    cfg = load_config(_write(tmp_path, ORBIT))
    assert cfg.kind == "orbit" and cfg.shape["type"] == "ball"


def test_negative_tolerance_names_key():
    doc = dict(ORBIT, solver={"tol": -1.0})
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(doc))
    assert any(e.startswith("solver/tol") for e in err.value.errors)


def test_all_violations_reported():
    doc = {"kind": "orbit", "shape": {"type": "ball", "radius": -1, "dim": 1},
           "solver": {"cfl": 0, "unknown": 1}}
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps(doc))
    assert len(err.value.errors) == 4


def test_parse_error_has_line_and_column():
    with pytest.raises(ConfigError) as err:
        parse_config('{"kind": "orbit",\n  "shape": }', "x.json")
    assert err.value.errors[0].startswith("x.json:2:")


def test_kind_specific_params():
    with pytest.raises(ConfigError) as err:
        parse_config(json.dumps({"kind": "edge", "params": {"edge": [1, 2]}}))
    assert any("alpha" in e for e in err.value.errors)
    with pytest.raises(ConfigError):
        parse_config(json.dumps({"kind": "flow"}))
    with pytest.raises(ConfigError):
        parse_config(json.dumps({"kind": "sweep", "runs": [{"kind": "sweep", "runs": []}]}))


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig(kind="edge", params={"edge": [1, 2], "alpha": 0.1}, seed=3,
                           solver={"resolution": 0.02})
    p = tmp_path / "c.json"
    save_config(cfg, p)
    assert load_config(p) == cfg


def test_shape_spec_round_trip():
    for s in (Ball(1.5, 3), Ellipsoid((1.0, 1.0, 0.1, 0.0)), Cylinder(1, Ball(2.0, 2))):
        assert build_shape(shape_spec(s)) == s


# --- csv ------------------------------------------------------------------------

def test_empty_trace_header_only(tmp_path):
    p = tmp_path / "t.csv"
    write_trace_csv(OrbitTrace("RMCF", []), p)
    assert p.read_text() == ",".join(HEADER) + "\n"
    assert len(read_trace_csv(p)) == 0


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((20, 6)) * 10.0 ** rng.integers(-20, 20, (20, 6))
    tr = OrbitTrace("RMCF", [TraceSample(*v, event="e" if i % 3 == 0 else "")
                             for i, v in enumerate(vals)])
    p = tmp_path / "t.csv"
    write_trace_csv(tr, p)
    back = read_trace_csv(p)
    for name in ("tau", "t", "energy", "mass", "inradius", "circumradius"):
        assert np.array_equal(back.column(name), tr.column(name))
    assert [s.event for s in back.samples] == [s.event for s in tr.samples]


def test_fixed_point_trace_constant_energy_column(tmp_path):
    from rmcflab.solitons import soliton_template
    tr = run_orbit(soliton_template(2, 2), 1.0, normalize=False)
    p = tmp_path / "t.csv"
    write_trace_csv(tr, p)
    H = read_trace_csv(p).energies
    assert np.ptp(H) < 1e-13 and H[0] == pytest.approx(4 / math.e, abs=1e-12)


def test_csv_rejects_wrong_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_trace_csv(p)


# --- plot -----------------------------------------------------------------------

def test_plot_deterministic(tmp_path):
    tau = np.linspace(0, 2, 21)
    tr = OrbitTrace("RMCF", [TraceSample(t, t, 4 / math.e, 1.0, 2.0, 2.0) for t in tau], n=2)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_energy_plot([tr], a)
    emit_energy_plot([tr], b)
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()
    with pytest.raises(ValueError):
        emit_energy_plot([], tmp_path / "c.svg")


# --- cli ------------------------------------------------------------------------

def _run(capsys, *args):
    code = main(list(args))
    line = capsys.readouterr().out.strip().splitlines()[-1]
    return code, json.loads(line)


def test_cli_orbit_ok_and_deterministic(tmp_path, capsys):
    cfg = _write(tmp_path, ORBIT)
    code, summary = _run(capsys, "orbit", "--config", str(cfg), "--out", str(tmp_path / "a"))
    assert code == 0 and summary["status"] == "ok" and summary["limit"] == "Sigma^2"
    _run(capsys, "orbit", "--config", str(cfg), "--out", str(tmp_path / "b"))
    assert (tmp_path / "a/orbit.csv").read_bytes() == (tmp_path / "b/orbit.csv").read_bytes()


def test_cli_validation_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path, dict(ORBIT, solver={"tol": -2}))
    code, summary = _run(capsys, "orbit", "--config", str(cfg))
    assert code == 1 and summary["status"] == "invalid"
    code, _ = _run(capsys, "flow", "--config", str(_write(tmp_path, ORBIT, "o.json")))
    assert code == 1
    code, _ = _run(capsys, "orbit", "--config", str(tmp_path / "missing.json"))
    assert code == 1


def test_cli_numerical_failure_exit_2(tmp_path, capsys):
    bad = {"kind": "flow", "shape": {"type": "ball", "radius": 1.0, "dim": 3},
           "solver": {"horizon": 1.0, "max_steps": 10}}
    code, summary = _run(capsys, "flow", "--config", str(_write(tmp_path, bad)),
                         "--out", str(tmp_path))
    assert code == 2 and summary["status"] == "numerical-failure"


def test_cli_check_flags_violations(tmp_path, capsys):
    tr = OrbitTrace("RMCF", [TraceSample(t, t, 1.4 + 0.01 * t, 1.0, 1.0, 1.0) for t in range(5)])
    write_trace_csv(tr, tmp_path / "up.csv")
    cfg = _write(tmp_path, {"kind": "check", "params": {"trace": str(tmp_path / "up.csv")}})
    code, summary = _run(capsys, "check", "--config", str(cfg))
    assert code == 2 and summary["monotone"]["violations"] == 4


def test_cli_sweep_and_seed(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RMCFLAB_THREADS", "1")
    doc = {"kind": "sweep", "runs": [
        {"kind": "simplex", "params": {"a": [0.5, 0.5], "taus": [0.0, math.log(2)]}},
        {"kind": "energy", "params": {"samples": 5, "probe_n": 2}},
        {"kind": "expander", "params": {"a": 1.0, "n": 2}}]}
    code, summary = _run(capsys, "sweep", "--config", str(_write(tmp_path, doc)),
                         "--out", str(tmp_path), "--seed", "11")
    assert code == 0 and summary["workers"] == 1
    assert [r["seed"] for r in summary["runs"]] == [11, 12, 13]
    rows = (tmp_path / "run_000/simplex.csv").read_text().splitlines()
    assert [float(v) for v in rows[2].split(",")[1:]] == pytest.approx([1 / 3, 2 / 3], abs=1e-15)
    assert summary["runs"][2]["residual"] < 1e-8
