import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmcflab.convexgeom import Ball, Cylinder, Ellipsoid, HalfSpace
from rmcflab.rescale import (ExtinctionEstimate, extinction_time, mcf_time_to_rmcf,
                             normalize_to_Zs, parabolic_rescale, rescale_snapshot,
                             rmcf_time_to_mcf, tau_max)


@given(st.floats(0.0, 0.999999))
def test_time_maps_inverse(t):
    assert rmcf_time_to_mcf(mcf_time_to_rmcf(t)) == pytest.approx(t, abs=1e-12)


@given(st.floats(0.0, 30.0), st.floats(0.1, 5.0))
def test_time_maps_with_T(tau, T):
    t = rmcf_time_to_mcf(tau, T)
    assert 0 <= t < T
    # d tau = dt / (T - t): rounding of t near T is amplified by e^tau
    assert mcf_time_to_rmcf(t, T) == pytest.approx(tau, abs=4e-16 * math.exp(tau) + 1e-14)


def test_time_map_domain():
    with pytest.raises(ValueError):
        mcf_time_to_rmcf(1.0)
    with pytest.raises(ValueError):
        rmcf_time_to_mcf(-0.1)


def test_tau_max():
    assert tau_max(1.0) == math.inf and tau_max(2.0) == math.inf
    assert tau_max(0.5) == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        tau_max(0.0)


def test_parabolic_rescale():
    b = Ball(1.0, 3)
    assert parabolic_rescale(b, 1.0) is b
    assert parabolic_rescale(b, 2.0) == Ball(2.0, 3)
    with pytest.raises(ValueError):
        parabolic_rescale(b, 0.0)


def test_rescale_snapshot_of_sphere_is_fixed():
    # the MCF sphere of radius sqrt(2n(1-t)) maps to the fixed point of radius sqrt(2n)
    n, t = 2, 0.7
    snap = Ball(math.sqrt(2 * n * (1 - t)), 3)
    assert rescale_snapshot(snap, t).radius == pytest.approx(math.sqrt(2 * n))


def test_ball_extinction_estimate():
    est = extinction_time(Ball(1.0, 3))
    assert isinstance(est, ExtinctionEstimate)
    assert abs(est.T - 0.25) <= max(3 * est.error, 1e-4)
    assert est.error <= 1e-3 * est.T


def test_bisection_agrees_with_direct_run():
    E = Ellipsoid((1.0, 1.0, 0.5))
    direct = extinction_time(E)
    bis = extinction_time(E, method="scale-bisection")
    assert abs(direct.T - bis.T) <= direct.error + bis.error + 1e-3 * direct.T


def test_product_extinction_is_that_of_factor():
    a = extinction_time(Cylinder(1, Ball(1.0, 2)))
    assert a.T == pytest.approx(0.5, abs=1e-3)


def test_normalize_to_Zs_ball():
    out, est = normalize_to_Zs(Ball(1.0, 3), return_estimate=True)
    assert out.radius == pytest.approx(2.0, rel=1e-3)


def test_extinction_rejects_noncompact():
    with pytest.raises(ValueError):
        extinction_time(HalfSpace((0.0, 1.0), 0.0))
    with pytest.raises(ValueError):
        extinction_time(Ball(1.0, 2), method="guess")
    with pytest.raises(ValueError):
        extinction_time(Ball(1.0, 2), tol=0)


def test_extinction_estimate_validation():
    with pytest.raises(ValueError):
        ExtinctionEstimate(-1.0, 0.0, "x")
    assert np.isfinite(ExtinctionEstimate(1.0, 0.0, "x").T)
