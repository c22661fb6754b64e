"""Acceptance criteria 1-11, one printed PASS/FAIL line each (see the terminal summary)."""

import math

import numpy as np
import pytest

from rmcflab.convexgeom import (Ball, Ellipsoid, QuadrantCurveShape, Translated, contains,
                                epsilon_core, hausdorff_distance, huisken_energy, set_gap)
from rmcflab.defaults import DEFAULTS
from rmcflab.dynamics import (check_mass_decay, check_monotone_energy, classify_limit,
                              detect_plateaus, edge_experiment, plateau_length, run_orbit,
                              template_distance)
from rmcflab.flowcore import SolverOptions, make_integrator, run_flow, state_shape, to_flow_state
from rmcflab.rescale import extinction_time
from rmcflab.solitons import (FixedPointId, SimplexState, clearing_out_certificate,
                              critical_value, expander_solve, simplex_flow, soliton_template)

RESULTS = {}


def report(num, ok, detail):
    line = f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[num] = line
    print(line)
    return ok


# shared expensive traces ------------------------------------------------------

_CACHE = {}


def edge_trace(edge, alpha, n=3):
    key = (edge, alpha, n)
    if key not in _CACHE:
        _CACHE[key] = edge_experiment(edge, alpha, n=n)
    return _CACHE[key]


def template_traces():
    if "templates" not in _CACHE:
        out = {}
        for n in (2, 3):
            for k in range(1, n + 1):
                out[(n, k)] = run_orbit(soliton_template(k, n), 5.0, normalize=False)
        _CACHE["templates"] = out
    return _CACHE["templates"]


# 1 --------------------------------------------------------------------------

def test_criterion_01_critical_values():
    errs = []
    for k in range(1, 6):
        H = huisken_energy(soliton_template(k, k))
        errs.append(abs(H - critical_value(k)))
        # products carry the same energy
        errs.append(abs(huisken_energy(soliton_template(k, 5)) - critical_value(k)))
    printed = {1: 1.520350, 2: 4 / math.e}
    paper_ok = all(abs(critical_value(k) - v) < 5e-6 for k, v in printed.items())
    order_ok = all(1 < critical_value(n) and
                   all(critical_value(k + 1) < critical_value(k) for k in range(1, n)) and
                   critical_value(1) < 2 for n in range(1, 11))
    ok = max(errs) < 1e-8 and paper_ok and order_ok
    report(1, ok, f"max |H(template)-critical_value| = {max(errs):.2e} (tol 1e-8); "
                  f"ordering n<=10 {order_ok}; printed values {paper_ok}")
    assert ok


# 2 --------------------------------------------------------------------------

def test_criterion_02_clearing_out():
    v = clearing_out_certificate(2.0)
    ok = abs(v - 2.337) <= 1e-3 and v > 1
    report(2, ok, f"certificate(2) = {v:.6f} (2.337 +- 0.001)")
    assert ok


# 3 --------------------------------------------------------------------------

def _radius_law_error(delta, c=0.1, horizon=0.2):
    """Max deviation from sqrt(1 - 4t) over t <= horizon at dt = c delta^2 on a fixed mesh."""
    opts = SolverOptions(resolution=delta, remesh="fixed", observer_stride=10)
    h = 2 * math.sin(0.25 * math.pi / math.ceil(0.5 * math.pi / delta))
    tr = run_flow(Ball(1.0, 3), "MCF", horizon, dt=c * h * h, options=opts)
    R = np.sqrt(1 - 4 * tr.column("t"))
    return max(np.abs(tr.column("inradius") - R).max(), np.abs(tr.column("circumradius") - R).max())


def test_criterion_03_ball_extinction_and_convergence():
    tr = run_flow(Ball(1.0, 3), "MCF", 1.0)
    T = tr.meta["extinction_time"]
    e1, e2 = _radius_law_error(0.04), _radius_law_error(0.02)
    ok = tr.termination == "near-extinct" and abs(T - 0.25) <= 2.5e-3 and e1 / e2 >= 3
    report(3, ok, f"T = {T:.7f} (|T-0.25| = {abs(T - 0.25):.1e} <= 2.5e-3); radius-law error "
                  f"{e1:.2e} -> {e2:.2e}, ratio {e1 / e2:.2f} (>= 3)")
    assert ok


# 4 --------------------------------------------------------------------------

def test_criterion_04_fixed_point_templates():
    worst, detail = 0.0, []
    for (n, k), tr in template_traces().items():
        d = max(template_distance(s.snapshot)[0] for s in tr.samples)
        if k == n:  # independent check on the terminal snapshot
            shape = QuadrantCurveShape(tr.terminal.snapshot)
            d = max(d, hausdorff_distance(shape, Ball(math.sqrt(2 * k), k + 1)))
        ok_tau = tr.taus[-1] >= 5.0 - 1e-12
        worst = max(worst, d if ok_tau else math.inf)
        detail.append(f"(n={n},k={k}) {d:.1e}")
    ok = worst <= 1e-4
    report(4, ok, f"max Hausdorff drift over tau in [0,5] = {worst:.2e} (tol 1e-4): "
                  + ", ".join(detail))
    assert ok


# 5 --------------------------------------------------------------------------

def test_criterion_05_parabolic_scaling():
    C = Ellipsoid((1.0, 1.0, 0.5))
    T1, T2 = extinction_time(C).T, extinction_time(C.scaled(2.0)).T
    rel = abs(T2 - 4 * T1) / (4 * T1)
    ok = rel <= 3e-3
    report(5, ok, f"T(C) = {T1:.6f}, T(2C) = {T2:.6f}, |T(2C)-4T(C)|/4T(C) = {rel:.1e} (<= 3e-3)")
    assert ok


# 6 --------------------------------------------------------------------------

def test_criterion_06_edge_12():
    tr = edge_trace((1, 2), 0.1)
    H0, H1 = tr.energies[0], tr.terminal.energy
    limit = classify_limit(tr)
    lengths = {a: plateau_length(detect_plateaus(edge_trace((1, 2), a)), 1)
               for a in (0.2, 0.1, 0.05)}
    grow = lengths[0.2] < lengths[0.1] < lengths[0.05]
    ok = (abs(H0 - critical_value(1)) <= 5e-2 and limit == FixedPointId(2, 3)
          and abs(H1 - 4 / math.e) <= 5e-3 and grow)
    report(6, ok, f"H0-H(S1) = {H0 - critical_value(1):+.1e}, limit {limit}, "
                  f"H_end-4/e = {H1 - 4 / math.e:+.1e}; k=1 plateau lengths "
                  + ", ".join(f"a={a}: {v:.2f}" for a, v in lengths.items()))
    assert ok


# 7 --------------------------------------------------------------------------

def test_criterion_07_edges_in_R4():
    t23, t13 = edge_trace((2, 3), 0.1), edge_trace((1, 3), 0.1)
    l23, l13 = classify_limit(t23), classify_limit(t13)
    d23 = t23.energies[0] - critical_value(2)
    d13 = t13.energies[0] - critical_value(1)
    ok = (l23 == FixedPointId(3, 3) and abs(d23) <= 5e-2
          and l13 == FixedPointId(3, 3) and abs(d13) <= 5e-2)
    report(7, ok, f"E(1,1,1,0.1): limit {l23}, H0-H(S2) = {d23:+.1e}; "
                  f"E(1,1,0.1,0.1): limit {l13}, H0-H(S1) = {d13:+.1e}")
    assert ok


# 8 --------------------------------------------------------------------------

def test_criterion_08_audits():
    traces = list(template_traces().values())
    traces += [edge_trace((1, 2), a) for a in (0.2, 0.1, 0.05)]
    traces += [edge_trace((2, 3), 0.1), edge_trace((1, 3), 0.1)]
    mono = [check_monotone_energy(t) for t in traces]
    mass = [check_mass_decay(t) for t in traces]
    nv_m = sum(len(r.violations) for r in mono)
    nv_d = sum(len(r.violations) for r in mass)
    ok = nv_m == 0 and nv_d == 0
    report(8, ok, f"{len(traces)} traces: monotone-energy violations {nv_m} "
                  f"(tol {DEFAULTS.dynamics.energy_tol:g}) over {sum(r.checked for r in mono)} "
                  f"steps; mass-decay violations {nv_d} (slack {DEFAULTS.dynamics.mass_slack:g}) "
                  f"over {sum(r.checked for r in mass)} pairs")
    assert ok


# 9 --------------------------------------------------------------------------

def _flow_states(shape, times, opts):
    state, flat = to_flow_state(shape, opts)
    integ = make_integrator(state, "MCF", opts)
    out = []
    for t in times:
        while t - integ.t > 1e-15:
            integ.advance(opts.remesh_every, t - integ.t)
        out.append(state_shape(integ.state, flat))
    return out


def _random_pair(rng, nested):
    a, b = rng.uniform(0.6, 1.6, 2)
    outer = Ellipsoid((a, a, b))
    s = rng.uniform(0.55, 0.9)
    if nested:
        # shrink the semi-axes by independent factors <= s
        f = s * rng.uniform(0.8, 1.0, 2)
        inner = Ellipsoid((a / f[0], a / f[0], b / f[1]))
        return outer, inner, None
    inner = Ellipsoid((a / s, a / s, b / s))
    gap = rng.uniform(0.05, 0.5)
    off = 1 / b + s / b + gap
    return outer, inner, (0.0, 0.0, off)


def test_criterion_09_comparison_and_cores():
    rng = np.random.default_rng(20240917)
    opts = SolverOptions()
    bad, worst = [], math.inf
    for i in range(20):
        nested = i % 2 == 0
        outer, inner, off = _random_pair(rng, nested)
        r_in = min(inner.semi_axes)
        times = np.linspace(0.0, 0.8 * r_in ** 2 / 4, 5)
        A = _flow_states(outer, times, opts)
        B = _flow_states(inner, times, opts)
        tol = 2 * opts.resolution * min(inner.semi_axes)  # 2x the initial inner node spacing
        prev = 0.0
        for t, a, b in zip(times, A, B):
            if nested:
                ok = contains(a, b, tol)
            else:
                gap = set_gap(Translated(a, (0.0, 0.0, 0.0)), Translated(b, off))
                worst = min(worst, gap)
                # disjoint flows stay apart and their distance does not shrink
                ok = gap >= prev - tol
                prev = gap
            if not ok:
                bad.append((i, float(t)))
    eps, core_bad = 0.2, []
    for C0 in (Ellipsoid((1.0, 1.0, 0.5)), Ellipsoid((0.8, 0.8, 0.8)), Ellipsoid((1.0, 0.6))):
        n = C0.ambient_dim - 1
        s = eps ** 2 / (2 * n)
        K = epsilon_core(C0, eps)
        Cs = _flow_states(C0, [s], opts)[0]
        tol = 2 * opts.resolution * min(C0.semi_axes)
        if not (contains(Cs, K, tol) and contains(C0, Cs, tol)):
            core_bad.append(C0.alpha)
    ok = not bad and not core_bad
    report(9, ok, f"20 pairs (10 nested, 10 disjoint): {len(bad)} violations at 2x node "
                  f"spacing, smallest disjoint gap {worst:.3f}; epsilon-core inclusion "
                  f"(eps=0.2, s=eps^2/2n) failures: {len(core_bad)}")
    assert ok


# 10 -------------------------------------------------------------------------

def test_criterion_10_simplex():
    rng = np.random.default_rng(5)
    semi = 0.0
    for _ in range(50):
        v = rng.dirichlet(np.ones(4))
        s = SimplexState(tuple(v))
        t1, t2 = rng.uniform(0, 30, 2)
        semi = max(semi, np.abs(simplex_flow(simplex_flow(s, t1), t2).array()
                                - simplex_flow(s, t1 + t2).array()).max())
    vert = all(np.array_equal(simplex_flow(SimplexState(tuple(np.eye(4)[k])), 13.0).array(),
                              np.eye(4)[k]) for k in range(4))
    a = simplex_flow(SimplexState(tuple(rng.dirichlet(np.ones(4)))), 60.0).array()
    dist = np.abs(a - np.eye(4)[3]).max()
    ok = semi <= 1e-12 and vert and dist <= 1e-9
    report(10, ok, f"semigroup defect {semi:.1e} (<= 1e-12); vertices fixed {vert}; "
                   f"|a(60) - e_3| = {dist:.1e} (<= 1e-9)")
    assert ok


# 11 -------------------------------------------------------------------------

def test_criterion_11_expanders():
    rows, ok = [], True
    for a in (0.5, 1.0, 2.0):
        for n in (2, 3):
            s = expander_solve(a, n)
            inc = bool(np.all(np.diff(s.E) > 0) and np.all(s.dE[1:] > 0))
            good = s.residual < 1e-8 and inc and s.richardson_gap < 1e-4
            ok &= good
            rows.append(f"(a={a},n={n}) A={s.slope:.6f} res={s.residual:.1e} "
                        f"gap={s.richardson_gap:.1e}")
    report(11, ok, "; ".join(rows))
    assert ok
