"""Command-line interface: ``rmcflab <kind> --config <path> [--out <dir>] [--seed <u64>]``.

Every subcommand prints one JSON summary line and exits 0 on success, 1 on
a validation error and 2 on a numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..convexgeom.geometry import RhoSearchError
from ..convexgeom.measures import gaussian_mass, huisken_energy
from ..dynamics import (OrbitOptions, check_mass_decay, check_monotone_energy, classify_limit,
                        detect_plateaus, edge_experiment, energy_bound_probe, run_orbit)
from ..flowcore.errors import FlowError
from ..flowcore.runner import SolverOptions, run_flow
from ..profiles import dump_snapshot
from ..solitons import ExpanderBlowup, SimplexState, expander_solve, simplex_flow
from .config import KINDS, ConfigError, ExperimentConfig, load_config
from .csvio import read_trace_csv, write_trace_csv
from .plot import emit_energy_plot
from .shapes import build_shape, shape_spec

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2
_NUMERIC = (FlowError, ExpanderBlowup, RhoSearchError, FloatingPointError, ArithmeticError)


class AuditFailure(RuntimeError):
    def __init__(self, summary):
        super().__init__("audit found violations")
        self.summary = summary


def _solver(cfg):
    s = cfg.solver
    keys = ("resolution", "remesh", "cfl", "observer_stride", "max_steps")
    return SolverOptions(**{k: s[k] for k in keys if k in s})


def _trace_outputs(trace, out, kind, cfg):
    csv_path = out / cfg.output.get("csv", f"{kind}.csv")
    svg_path = out / cfg.output.get("svg", f"{kind}.svg")
    write_trace_csv(trace, csv_path)
    if trace.samples:
        emit_energy_plot([trace], svg_path)
    if trace.samples and trace.terminal.snapshot is not None:
        (out / f"{kind}_terminal.snap").write_text(dump_snapshot(trace.terminal.snapshot))
    return dict(csv=str(csv_path), svg=str(svg_path), samples=len(trace),
                termination=trace.termination,
                energy_start=trace.samples[0].energy if trace.samples else None,
                energy_end=trace.terminal.energy if trace.samples else None)


def _orbit_summary(trace):
    return dict(limit=str(classify_limit(trace)),
                plateaus=[list(p) for p in detect_plateaus(trace)],
                tau_reached=trace.meta.get("tau_reached"),
                extinction_time=trace.meta.get("extinction_time"))


def run_energy(cfg, out):
    res = {}
    if cfg.shape is not None:
        shape = build_shape(cfg.shape)
        res.update(huisken_energy=huisken_energy(shape))
        try:
            res["gaussian_mass"] = gaussian_mass(shape)
        except ValueError:
            res["gaussian_mass"] = None
    p = cfg.params
    if "samples" in p:
        probe = energy_bound_probe(p.get("probe_n", 3), p["samples"], cfg.seed)
        path = out / "probe_argmax.json"
        path.write_text(json.dumps(dict(energy=probe.max_energy, shape=shape_spec(probe.argmax),
                                        seed=cfg.seed), indent=2, sort_keys=True) + "\n")
        res.update(probe_max=probe.max_energy, probe_argmax=str(path))
    if not res:
        raise ConfigError(["energy: give a shape or params.samples"])
    return res


def run_flow_cmd(cfg, out):
    s = cfg.solver
    trace = run_flow(build_shape(cfg.shape), s.get("mode", "MCF"), s.get("horizon", 1.0),
                     s.get("dt"), s.get("observer_stride"), _solver(cfg))
    res = _trace_outputs(trace, out, "flow", cfg)
    res.update(extinction_time=trace.meta.get("extinction_time"))
    return res


def _orbit_opts(cfg):
    kw = {}
    if "sample_dtau" in cfg.solver:
        kw["sample_dtau"] = cfg.solver["sample_dtau"]
    return OrbitOptions(solver=_solver(cfg), **kw)


def run_orbit_cmd(cfg, out):
    s = cfg.solver
    trace = run_orbit(build_shape(cfg.shape), s.get("tau_end"), _orbit_opts(cfg),
                      normalize=s.get("normalize", True))
    res = _trace_outputs(trace, out, "orbit", cfg)
    res.update(_orbit_summary(trace))
    return res


def run_edge(cfg, out):
    p = cfg.params
    trace = edge_experiment(tuple(p["edge"]), p["alpha"], _orbit_opts(cfg), n=p.get("n", 3),
                            tau_max=p.get("tau_max"))
    res = _trace_outputs(trace, out, "edge", cfg)
    res.update(_orbit_summary(trace))
    return res


def run_expander(cfg, out):
    p = cfg.params
    sol = expander_solve(p["a"], p["n"], p.get("eta_max"), p.get("rtol"), p.get("atol"))
    path = out / cfg.output.get("csv", "expander.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("eta,E,dE\n")
        for row in zip(sol.eta, sol.E, sol.dE):
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
    return dict(csv=str(path), slope=sol.slope, richardson_gap=sol.richardson_gap,
                residual=sol.residual)


def run_simplex(cfg, out):
    p = cfg.params
    state = SimplexState(tuple(p["a"]))
    path = out / cfg.output.get("csv", "simplex.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tau," + ",".join(f"a{k}" for k in range(len(state.a))) + "\n")
        for tau in p["taus"]:
            a = simplex_flow(state, tau).a
            fh.write(",".join(format(float(v), ".17g") for v in (tau, *a)) + "\n")
    return dict(csv=str(path))


def run_check(cfg, out):
    s = cfg.solver
    trace = read_trace_csv(cfg.params["trace"])
    mono = check_monotone_energy(trace, s.get("energy_tol"))
    mass = check_mass_decay(trace, s.get("mass_slack"))
    res = dict(monotone=dict(checked=mono.checked, violations=len(mono.violations)),
               mass_decay=dict(checked=mass.checked, violations=len(mass.violations)))
    if not (mono.passed and mass.passed):
        raise AuditFailure(res)
    return res


def _sweep_job(args):
    doc, out, seed = args
    return execute(ExperimentConfig(**doc), Path(out), seed)


def _workers(cfg, jobs):
    cap = cfg.workers or os.cpu_count() or 1
    env = os.environ.get("RMCFLAB_THREADS")
    if env:
        cap = min(cap, max(1, int(env)))
    return max(1, min(cap, jobs))


def run_sweep(cfg, out):
    jobs = [(run, str(out / f"run_{i:03d}"), run.get("seed", cfg.seed + i))
            for i, run in enumerate(cfg.runs)]
    workers = _workers(cfg, len(jobs))
    if workers == 1:
        results = [_sweep_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, jobs))
    code = max(c for c, _ in results)
    res = dict(workers=workers, runs=[r for _, r in results])
    if code:
        raise _SweepFailure(code, res)
    return res


class _SweepFailure(RuntimeError):
    def __init__(self, code, summary):
        super().__init__("some sweep runs failed")
        self.code, self.summary = code, summary


RUNNERS = dict(energy=run_energy, flow=run_flow_cmd, orbit=run_orbit_cmd, edge=run_edge,
               expander=run_expander, simplex=run_simplex, sweep=run_sweep, check=run_check)


def _clean(obj):
    """JSON-safe copy (non-finite floats become strings)."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def execute(cfg: ExperimentConfig, out: Path, seed=None):
    """Run one config; returns ``(exit_code, summary)`` and never raises for run failures."""
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    base = dict(kind=cfg.kind, seed=cfg.seed)
    try:
        out.mkdir(parents=True, exist_ok=True)
        res = RUNNERS[cfg.kind](cfg, out)
        return EXIT_OK, dict(base, status="ok", **res)
    except AuditFailure as err:
        return EXIT_NUMERIC, dict(base, status="numerical-failure", error=str(err), **err.summary)
    except _SweepFailure as err:
        return err.code, dict(base, status="failed", error=str(err), **err.summary)
    except ConfigError as err:
        return EXIT_INVALID, dict(base, status="invalid", errors=err.errors)
    except _NUMERIC as err:
        return EXIT_NUMERIC, dict(base, status="numerical-failure",
                                  error=f"{type(err).__name__}: {err}")
    except (ValueError, TypeError, KeyError, OSError) as err:
        return EXIT_INVALID, dict(base, status="invalid", errors=[f"{type(err).__name__}: {err}"])


def _parser():
    ap = argparse.ArgumentParser(prog="rmcflab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", help="output directory (default: config output.dir or .)")
        sp.add_argument("--seed", type=int, help="seed (overrides the config)")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if cfg.kind != args.command:
            raise ConfigError([f"kind: config is {cfg.kind!r} but the subcommand is "
                               f"{args.command!r}"])
        if args.seed is not None and not 0 <= args.seed < 2 ** 64:
            raise ConfigError(["seed: must be an unsigned 64-bit integer"])
    except ConfigError as err:
        code, summary = EXIT_INVALID, dict(kind=args.command, status="invalid", errors=err.errors)
    except OSError as err:
        code, summary = EXIT_INVALID, dict(kind=args.command, status="invalid", errors=[str(err)])
    else:
        out = Path(args.out or cfg.output.get("dir", "."))
        code, summary = execute(cfg, out, args.seed)
    print(json.dumps(_clean(summary), sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
