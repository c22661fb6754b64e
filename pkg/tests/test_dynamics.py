import math

import numpy as np
import pytest

from rmcflab.convexgeom import Ball, Cylinder, Ellipsoid, huisken_energy
from rmcflab.dynamics import (UNRESOLVED, check_mass_decay, check_monotone_energy,
                              classify_limit, detect_plateaus, edge_experiment, edge_shape,
                              energy_bound_probe, family_member, plateau_length, run_orbit,
                              template_distance)
from rmcflab.flowcore import cylinder_profile, quarter_circle
from rmcflab.solitons import FixedPointId, critical_value, soliton_template
from rmcflab.trace import OrbitTrace, TraceSample


def synthetic(taus, energies, masses=None):
    masses = masses if masses is not None else [1.0] * len(taus)
    return OrbitTrace("RMCF", [TraceSample(t, t, h, m, 1.0, 1.0)
                               for t, h, m in zip(taus, energies, masses)], n=2)


# --- fixed points --------------------------------------------------------------

def test_sphere_template_orbit_is_constant():
    tr = run_orbit(soliton_template(2, 2), 2.0, normalize=False)
    assert np.ptp(tr.energies) < 1e-13
    assert tr.energies[0] == pytest.approx(4 / math.e, abs=1e-12)
    assert classify_limit(tr) == FixedPointId(2, 2)
    assert check_monotone_energy(tr).passed and check_mass_decay(tr).passed


def test_cylinder_profile_classified_sigma_n_minus_1():
    n = 3
    prof = cylinder_profile(n, math.sqrt(2 * (n - 1)))
    tr = run_orbit(prof, 0.5, normalize=False)
    assert classify_limit(tr) == FixedPointId(n - 1, n)


def test_unnormalized_ball_is_normalized():
    tr = run_orbit(Ball(1.0, 3), 3.0)
    assert np.abs(tr.energies - 4 / math.e).max() < 1e-7
    assert tr.meta["extinction_time"] == pytest.approx(0.25, abs=1e-3)
    assert classify_limit(tr) == FixedPointId(2, 2)


def test_template_distance():
    c = quarter_circle(2, 1, 2.1, nodes=30)
    d, k = template_distance(c)
    assert k == 2 and d == pytest.approx(0.1, abs=1e-12)


def test_wrong_energy_unresolved():
    tr = run_orbit(Ball(1.0, 3), 0.2, normalize=False)  # dies: radius 1 < 2
    assert classify_limit(tr) == UNRESOLVED


# --- plateaus ------------------------------------------------------------------

def test_plateau_constant_trace():
    tau = np.linspace(0, 4, 81)
    tr = synthetic(tau, np.full_like(tau, critical_value(2)))
    pl = detect_plateaus(tr)
    assert len(pl) == 1 and tuple(pl[0]) == (2, 0.0, 4.0)


def test_plateau_between_critical_values_empty():
    tau = np.linspace(0, 4, 81)
    mid = 0.5 * (critical_value(1) + critical_value(2))
    assert detect_plateaus(synthetic(tau, np.full_like(tau, mid))) == []


def test_plateau_sequence_and_transients():
    tau = np.linspace(0, 10, 201)
    H = np.where(tau < 4, critical_value(1), critical_value(2))
    H[(tau > 6.0) & (tau < 6.3)] = 1.5  # a short excursion is not a plateau
    pl = detect_plateaus(synthetic(tau, H))
    assert [p.k for p in pl] == [1, 2, 2]
    assert plateau_length(pl, 1) == pytest.approx(3.95)
    with pytest.raises(ValueError):
        detect_plateaus(synthetic(tau, H), band=0)


# --- audits --------------------------------------------------------------------

def test_audits_flag_reversed_trace():
    tau = np.linspace(0, 3, 31)
    H = 1.5 - 0.01 * tau
    M = 1.5 - 0.01 * tau
    good = synthetic(tau, H, M)
    assert check_monotone_energy(good).passed
    bad = synthetic(tau, H[::-1], M)
    rep = check_monotone_energy(bad)
    assert not rep.passed and len(rep.violations) == 30
    crash = synthetic(tau, H, 1.5 - 2.0 * tau)
    assert not check_mass_decay(crash).passed


def test_mass_decay_bound_is_tight_for_linear_loss():
    # gvol(t1) = gvol(t0) - H sqrt(dt/2) at equality on the first pair only
    tau = np.array([0.0, 0.5])
    H = np.array([1.0, 1.0])
    M = np.array([2.0, 2.0 - math.sqrt(0.25)])
    assert check_mass_decay(synthetic(tau, H, M)).passed
    M[1] -= 1e-3
    assert not check_mass_decay(synthetic(tau, H, M)).passed


# --- edges and probe -------------------------------------------------------------

def test_family_member_rejects_interior_theta():
    assert family_member(0.1, 1) == Ellipsoid((1.0, 1.0, 0.1, 0.1))
    assert family_member(0.1, 0) == Ellipsoid((1.0, 1.0, 0.1, 0.0))
    with pytest.raises(ValueError):
        family_member(0.1, 0.5)
    with pytest.raises(ValueError):
        edge_shape((2, 3), 0.1, n=2)
    with pytest.raises(ValueError):
        edge_shape((1, 2), 0.0)


def test_edge_13_alpha_one_is_sphere():
    tr = edge_experiment((1, 3), 1.0)
    assert tr.meta["limit"] == "Sigma^3"
    assert abs(tr.energies[0] - critical_value(3)) < 1e-6


@pytest.mark.slow
def test_cigar_orbit_sigma1_to_sigma2():
    tr = edge_experiment((1, 2), 0.2, n=2)
    assert tr.termination == "converged"
    assert classify_limit(tr) == FixedPointId(2, 2)
    assert abs(tr.energies[0] - critical_value(1)) < 5e-2
    assert check_monotone_energy(tr).passed and check_mass_decay(tr).passed


def test_probe_single_sphere_sample(monkeypatch):
    import rmcflab.dynamics as dyn
    monkeypatch.setattr(dyn, "_probe_shape", lambda rng, n: Ball(1.3, n + 1))
    res = energy_bound_probe(2, 1, seed=0)
    assert res.max_energy == pytest.approx(huisken_energy(Ball(1.3, 3)), abs=1e-15)


def test_probe_cylinder_samples_give_critical_values(monkeypatch):
    import rmcflab.dynamics as dyn
    shapes = iter([Cylinder(2, Ball(math.sqrt(2), 2)), Cylinder(1, Ball(2.0, 3))])
    monkeypatch.setattr(dyn, "_probe_shape", lambda rng, n: next(shapes))
    res = energy_bound_probe(3, 2)
    assert res.energies == pytest.approx([critical_value(1), critical_value(2)], abs=1e-12)


def test_probe_deterministic_and_below_two():
    a = energy_bound_probe(3, 200, seed=7)
    b = energy_bound_probe(3, 200, seed=7)
    assert np.array_equal(a.energies, b.energies) and a.argmax == b.argmax
    assert a.max_energy == a.energies.max() < 2.0
    with pytest.raises(ValueError):
        energy_bound_probe(3, 0)
