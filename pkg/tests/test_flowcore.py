import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmcflab.convexgeom import Ball, Ellipsoid
from rmcflab.flowcore import (FlowError, FlowInstability, SolverOptions, curve_geometry,
                              cylinder_profile, ellipse_arc, extinction_run, mcf_step_curve,
                              mcf_step_radial, mean_curvature, normal_velocity, quarter_circle,
                              remesh_curve, rmcf_step_curve, rmcf_step_radial, run_flow,
                              sphere_profile, vertical_stub)
from rmcflab.flowcore import _kernels
from rmcflab.flowcore.curve import _advance
from rmcflab.profiles import (QuadrantCurve, RadialProfile, SnapshotFormatError, dump_snapshot,
                              load_snapshot)
from rmcflab.solitons import soliton_template


def _uniform_radius(curve):
    r = np.hypot(*curve.points.T)
    return r.min(), r.max()


# --- discrete geometry -------------------------------------------------------

@pytest.mark.parametrize("p,q", [(1, 1), (2, 1), (3, 1), (2, 2)])
def test_inscribed_polygon_curvature_exact(p, q):
    R = 1.7
    c = quarter_circle(p, q, R, nodes=40)
    H, _ = mean_curvature(c.points, p, q)
    # the circle through three nodes of an inscribed polygon is the circle itself
    assert np.allclose(H, (p + q - 1) / R, rtol=0, atol=1e-12)


def test_tangent_and_normal_of_circle():
    c = quarter_circle(2, 1, 1.0, nodes=30)
    kappa, nrm, _ = curve_geometry(c.points)
    assert np.allclose(nrm, c.points, atol=1e-12)
    assert np.allclose(kappa, 1.0, atol=1e-12)


@given(st.floats(0.5, 3.0), st.integers(1, 3), st.integers(1, 2))
def test_polygon_is_exact_discrete_mcf_solution(R, p, q):
    n = p + q - 1
    c = quarter_circle(p, q, R, nodes=32)
    dt = 0.1 * (R * math.pi / 64) ** 2
    new = mcf_step_curve(c, dt)
    lo, hi = _uniform_radius(new)
    assert hi - lo < 1e-12 * R
    assert hi == pytest.approx(R - dt * n / R, abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_template_rmcf_residual(k):
    """One RMCF step leaves the Sigma^k template in place (residual < 1e-8)."""
    t = soliton_template(k, 3)
    curve = (t.cross if hasattr(t, "cross") else t).curve
    dtau = 1e-4
    new = rmcf_step_curve(curve, dtau)
    assert np.abs(new.points - curve.points).max() / dtau < 1e-8


def test_kernel_matches_numpy_reference():
    rng = np.random.default_rng(0)
    for p, q, mode in [(2, 1, "MCF"), (3, 1, "RMCF"), (2, 2, "MCF"), (1, 1, "RMCF")]:
        c = remesh_curve(ellipse_arc(p, q, 2.0, 0.7), 0.05)
        pts = c.points.copy()
        pts[1:-1] *= 1 + 1e-3 * rng.standard_normal((len(pts) - 2, 1))
        dt = 1e-5
        ref = _advance(pts, p, q, "axis", dt, mode)
        out = np.empty_like(pts)
        _kernels.advance(pts, p, q, False, dt, mode == "RMCF", out)
        assert np.allclose(out, ref, rtol=0, atol=1e-14)


def test_kernel_matches_reference_on_mirror_stub():
    c = vertical_stub(3, 1.5, top=2.0, nodes=10)
    ref = _advance(c.points, 3, 1, "mirror", 1e-3, "RMCF")
    out = np.empty_like(ref)
    _kernels.advance(np.array(c.points), 3, 1, True, 1e-3, True, out)
    assert np.allclose(out, ref, atol=1e-14)
    assert np.allclose(normal_velocity(c.points, 3, 1, "mirror", "MCF")[:, 0], -2 / 1.5)


def test_step_validation():
    c = quarter_circle(2, 1, 1.0, nodes=20)
    assert mcf_step_curve(c, 0.0) is c
    with pytest.raises(ValueError):
        mcf_step_curve(c, -1.0)
    with pytest.raises(FlowInstability):
        mcf_step_curve(c, 10.0)


# --- radial solver -----------------------------------------------------------

def test_cylinder_profile_follows_radius_law():
    n, r0, dt = 3, 2.0, 1e-3
    prof = cylinder_profile(n, r0)
    for _ in range(100):
        prof = mcf_step_radial(prof, dt)
    # explicit Euler on r' = -(n-1)/r
    r = r0
    for _ in range(100):
        r -= dt * (n - 1) / r
    assert np.allclose(prof.r, r, atol=1e-12)


def test_cylinder_fixed_point_radial():
    prof = cylinder_profile(2, math.sqrt(2.0))
    new = rmcf_step_radial(prof, 1e-3)
    assert np.abs(new.r - prof.r).max() < 1e-13


def test_sphere_profile_shrinks_like_sphere():
    prof = sphere_profile(2, 1.0, nodes=201)
    t = 0.0
    while t < 0.05:
        dt = min(2e-6, 0.05 - t)
        prof = mcf_step_radial(prof, dt)
        t += dt
    assert prof.r.max() == pytest.approx(math.sqrt(1 - 4 * 0.05), abs=5e-3)


# --- runs -------------------------------------------------------------------

def test_ball_extinction_time():
    T, info = extinction_run(Ball(1.0, 3))
    assert abs(T - 0.25) < 2.5e-3
    assert info["steps"] > 0


def test_run_flow_trace_invariants():
    tr = run_flow(Ellipsoid((1.0, 1.0, 0.5)), "MCF", horizon=0.05, observer_stride=200)
    tau = tr.taus
    assert np.all(np.diff(tau) > 0)
    assert tau[-1] == pytest.approx(0.05, rel=1e-12)
    assert np.all(np.isfinite(tr.energies)) and np.all(np.isfinite(tr.masses))
    assert tr.termination == "horizon"


def test_run_flow_to_extinction_records_estimate():
    tr = run_flow(Ball(1.0, 3), "MCF", horizon=1.0)
    assert tr.termination == "near-extinct"
    assert tr.meta["extinction_time"] == pytest.approx(0.25, abs=2.5e-3)


def test_step_budget():
    with pytest.raises(FlowError):
        run_flow(Ball(1.0, 3), "MCF", 1.0, options=SolverOptions(max_steps=50))


def test_solver_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(remesh="sometimes")
    with pytest.raises(ValueError):
        SolverOptions(resolution=0)


def test_remesh_keeps_shape():
    c = ellipse_arc(2, 1, 2.0, 1.0)
    m = remesh_curve(c, 0.05)
    x, y = m.points.T
    assert np.abs((x / 2) ** 2 + y ** 2 - 1).max() < 1e-6
    assert m.points[0, 1] == 0.0 and m.points[-1, 0] == 0.0


# --- snapshots --------------------------------------------------------------

def test_snapshot_round_trip_bit_exact():
    rng = np.random.default_rng(1)
    c = quarter_circle(2, 2, math.pi, nodes=17)
    c = c.with_points(c.points * (1 + 1e-9 * rng.random((18, 1))))
    back = load_snapshot(dump_snapshot(c))
    assert isinstance(back, QuadrantCurve)
    assert np.array_equal(back.points, c.points) and back.h == c.h
    prof = sphere_profile(3, 1.3, nodes=31)
    back = load_snapshot(dump_snapshot(prof))
    assert isinstance(back, RadialProfile)
    assert np.array_equal(back.r, prof.r) and np.array_equal(back.y, prof.y)


def test_snapshot_bad_header():
    with pytest.raises(SnapshotFormatError):
        load_snapshot("NOT-A-SNAPSHOT\n1 2\n")
