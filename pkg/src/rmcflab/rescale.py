"""Extinction time, parabolic scaling and the MCF <-> RMCF change of variables.

The rescaled flow of a compact body with extinction time 1 is

    C_tau = e^{tau/2} C^_{1 - e^{-tau}},      tau = -ln(1 - t),

and for extinction time T the same formula with t/T in place of t and an
extra factor T^{-1/2}: ``C_tau = (T - t)^{-1/2} C^_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .convexgeom.measures import inradius_circumradius
from .convexgeom.shapes import (ConvexShape, Cylinder, FullSpace, HalfSpace, RadialProfileShape)
from .defaults import DEFAULTS
from .flowcore.errors import NearExtinction
from .flowcore.runner import (SolverOptions, compact_dim, extinction_run, make_integrator,
                              state_shape, to_flow_state)
from .profiles import RadialProfile

_R = DEFAULTS.rescale


@dataclass(frozen=True)
class ExtinctionEstimate:
    T: float
    error: float
    method: str
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.T > 0 or not self.error >= 0:
            raise ValueError("extinction estimate must have T > 0 and error >= 0")


def _check_extinguishes(shape):
    base = shape.compact_factor()[0] if isinstance(shape, Cylinder) else shape
    if isinstance(base, (HalfSpace, FullSpace)) or not base.compact:
        raise ValueError(f"{type(shape).__name__} has no compact factor; extinction is not defined")


def _coarsen(profile: RadialProfile):
    return RadialProfile(profile.n, profile.y[::2], profile.r[::2], profile.tip,
                         profile.period, profile.tips)


def extinction_time(shape: ConvexShape, tol=None, method="direct-run", options=None):
    """Extinction time of the MCF starting at ``shape`` (of its compact factor for products).

    ``direct-run`` flows to near-extinction, adds the sphere-law remainder and
    Richardson-extrapolates over successively halved resolutions until the
    error estimate is at most ``tol * T``.  ``scale-bisection`` bisects on
    whether the rescaled flow of ``shape / sqrt(T_guess)`` dies or escapes.
    """
    tol = _R.tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_extinguishes(shape)
    if method == "scale-bisection":
        return _bisection_estimate(shape, tol, options)
    if method != "direct-run":
        raise ValueError(f"unknown method {method!r}")
    opts = options or SolverOptions()
    if isinstance(shape, RadialProfileShape):
        fine = shape.profile
        T2, info = extinction_run(fine, opts)
        T1, _ = extinction_run(_coarsen(fine), opts)
        err = abs(T2 - T1) / 3.0
        return ExtinctionEstimate(T2 + (T2 - T1) / 3.0, err, "direct-run",
                                  dict(levels=[(fine.dy * 2, T1), (fine.dy, T2)], **info))
    res = list(_R.resolutions)
    runs = [(r, extinction_run(shape, replace(opts, resolution=r))) for r in res]
    while True:
        (h1, (T1, _)), (h2, (T2, info)) = runs[-2], runs[-1]
        ratio = (h1 / h2) ** 2
        T = T2 + (T2 - T1) / (ratio - 1.0)
        err = abs(T2 - T1) / (ratio - 1.0)
        if err <= tol * T or len(runs) >= _R.max_levels:
            levels = [(h, Tv) for h, (Tv, _) in runs]
            return ExtinctionEstimate(T, err, "direct-run", dict(levels=levels, **info))
        h = h2 / 2.0
        runs.append((h, extinction_run(shape, replace(opts, resolution=h))))


def _fate(shape, opts, n_c, tau_max=40.0):
    """+1 if the rescaled flow of ``shape`` escapes, -1 if it dies, 0 if undecided by tau_max."""
    state, _ = to_flow_state(shape, opts)
    integ = make_integrator(state, "RMCF", opts)
    r_star = math.sqrt(2.0 * n_c)
    while integ.t < tau_max:
        try:
            integ.advance(opts.remesh_every)
        except NearExtinction:
            return -1
        r_in, r_out = integ.radii()
        # comparison with the stationary sphere of radius sqrt(2 n_c)
        if r_out < 0.99 * r_star or integ.near_extinct():
            return -1
        if r_in > 1.01 * r_star:
            return 1
    return 0


def _bisection_estimate(shape, tol, options):
    opts = options or SolverOptions(resolution=_R.resolutions[0])
    state, _ = to_flow_state(shape, opts)
    n_c = compact_dim(state)
    r_in, r_out = inradius_circumradius(state_shape(state))
    lo, hi = r_in ** 2 / (2 * n_c), r_out ** 2 / (2 * n_c)
    runs = 0
    while hi - lo > tol * lo:
        mid = math.sqrt(lo * hi)
        fate = _fate(shape.scaled(1.0 / math.sqrt(mid)), opts, n_c)
        runs += 1
        if fate > 0:
            lo = mid
        elif fate < 0:
            hi = mid
        else:
            break
    T = 0.5 * (lo + hi)
    return ExtinctionEstimate(T, 0.5 * (hi - lo), "scale-bisection",
                              dict(bracket=(lo, hi), runs=runs, resolution=opts.resolution))


def parabolic_rescale(shape, kappa):
    """Dilate all lengths by ``kappa``; extinction time scales by ``kappa**2``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return shape if kappa == 1 else shape.scaled(kappa)


def normalize_to_Zs(shape, tol=None, options=None, return_estimate=False):
    """Scale ``shape`` by ``T^{-1/2}`` so that its extinction time becomes 1."""
    est = extinction_time(shape, tol, options=options)
    out = parabolic_rescale(shape, 1.0 / math.sqrt(est.T))
    return (out, est) if return_estimate else out


def mcf_time_to_rmcf(t, T=1.0):
    """``tau = -ln(1 - t/T)`` for ``0 <= t < T``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t >= T):
        raise ValueError("MCF time must satisfy 0 <= t < T")
    out = -np.log1p(-t / T)
    return float(out) if out.ndim == 0 else out


def rmcf_time_to_mcf(tau, T=1.0):
    """``t = T (1 - e^{-tau})``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be nonnegative")
    out = -T * np.expm1(-tau)
    return float(out) if out.ndim == 0 else out


def rescale_snapshot(shape, t, T=1.0):
    """The MCF snapshot at time t, viewed at rescaled time ``tau(t)``: scaled by ``(T - t)^{-1/2}``."""
    if not 0 <= t < T:
        raise ValueError("snapshot time must satisfy 0 <= t < T")
    return shape.scaled(1.0 / math.sqrt(T - t))


def tau_max(T):
    """Maximal existence time of the rescaled flow of a body with extinction time T."""
    if not T > 0:
        raise ValueError("T must be positive")
    return math.inf if T >= 1 else -math.log1p(-T)
