"""Fixed points of the rescaled flow, the expanding-soliton ODE and the simplex model flow."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.special import gammaln, logsumexp

from .convexgeom.shapes import Cylinder, HalfSpace, QuadrantCurveShape
from .defaults import DEFAULTS
from .flowcore.exact import quarter_circle

H_PLANE = 1.0
H_SIGMA0 = 2.0


def critical_value(k):
    """Huisken energy of the self-shrinking k-sphere, ``sqrt(4 pi) (k/2e)^{k/2} / Gamma((k+1)/2)``.

    ``critical_value(0) == 2`` (a pair of points, i.e. a slab).
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    if k == 0:
        return H_SIGMA0
    log = 0.5 * math.log(4 * math.pi) + 0.5 * k * math.log(k / (2 * math.e)) - gammaln((k + 1) / 2)
    return math.exp(log)


@dataclass(frozen=True)
class FixedPointId:
    """Sigma^k = S^k x R^{n-k} in R^{n+1} (``k`` in 1..n), or the half-space Pi (``k=None``)."""

    k: int | None
    n: int

    def __post_init__(self):
        if self.k is not None and not 1 <= self.k <= self.n:
            raise ValueError("k must satisfy 1 <= k <= n")

    @property
    def is_plane(self):
        return self.k is None

    @property
    def energy(self):
        return H_PLANE if self.k is None else critical_value(self.k)

    @property
    def radius(self):
        return None if self.k is None else math.sqrt(2.0 * self.k)

    def __str__(self):
        return "Pi" if self.k is None else f"Sigma^{self.k}"


def soliton_template(fp, n=None, resolution=None):
    """Discretized fixed point: the quarter circle of radius sqrt(2k) times R^{n-k}."""
    if not isinstance(fp, FixedPointId):
        fp = FixedPointId(fp, n)
    if fp.is_plane:
        normal = np.zeros(fp.n + 1)
        normal[-1] = 1.0
        return HalfSpace(tuple(normal), 0.0)
    res = DEFAULTS.flow.resolution if resolution is None else resolution
    R = fp.radius
    factor = QuadrantCurveShape(quarter_circle(fp.k, 1, R, h=res * R))
    return factor if fp.k == fp.n else Cylinder(fp.n - fp.k, factor)


# ---------------------------------------------------------------------------
# expanders

@dataclass(frozen=True)
class ExpanderSolution:
    a: float
    n: int
    eta: np.ndarray = field(repr=False)
    E: np.ndarray = field(repr=False)
    dE: np.ndarray = field(repr=False)
    slope: float
    richardson_gap: float
    residual: float

    def mirrored(self):
        """The even extension to eta < 0."""
        eta = np.concatenate([-self.eta[:0:-1], self.eta])
        E = np.concatenate([self.E[:0:-1], self.E])
        dE = np.concatenate([-self.dE[:0:-1], self.dE])
        return eta, E, dE


class ExpanderBlowup(RuntimeError):
    pass


def _expander_rhs(n):
    def rhs(eta, y):
        E, dE = y
        return (dE, (1.0 + dE * dE) * (0.5 * E + (n - 1) / E - 0.5 * eta * dE))
    return rhs


def _integrate(n, a, eta_end, rtol, atol):
    """RK45 stepping that keeps each step's embedded local error estimate."""
    solver = RK45(_expander_rhs(n), 0.0, np.array([a, 0.0]), eta_end, rtol=rtol, atol=atol)
    ts, ys, errs, pieces = [0.0], [solver.y.copy()], [0.0], []
    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed" or not np.all(np.isfinite(solver.y)):
            raise ExpanderBlowup(f"integration failed at eta={solver.t:.6g} (E={solver.y[0]:.6g}, "
                                 f"E'={solver.y[1]:.6g}): {msg}")
        h = solver.step_size
        errs.append(float(np.abs(h * (solver.K.T @ solver.E)).max()))
        ts.append(solver.t)
        ys.append(solver.y.copy())
        pieces.append(solver.dense_output())
    return np.array(ts), np.array(ys).T, np.array(errs), OdeSolution(ts, pieces)


def expander_solve(a, n, eta_max=None, rtol=None, atol=None):
    """Integrate the expanding-soliton ODE from ``E(0) = a, E'(0) = 0``.

    The asymptotic slope uses ``E/eta = A - (n-1)/(A eta^2) + ...``; two
    Richardson estimates from (eta_max/2, eta_max) and (eta_max, 2 eta_max)
    give the slope and their difference is reported as the Richardson gap.
    ``residual`` is the largest embedded local error estimate over accepted steps.
    """
    S = DEFAULTS.solitons
    eta_max = S.expander_eta_max if eta_max is None else eta_max
    rtol = S.expander_rtol if rtol is None else rtol
    atol = S.expander_atol if atol is None else atol
    if not a > 0:
        raise ValueError("a must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not eta_max > 0:
        raise ValueError("eta_max must be positive")
    ts, ys, errs, dense = _integrate(n, a, 2.0 * eta_max + 0.01, rtol, atol)
    keep = ts <= eta_max

    def ratio(x):
        return dense(x)[0] / x

    def rich(x):
        return (4.0 * ratio(2 * x) - ratio(x)) / 3.0

    A_low, A_high = rich(0.5 * eta_max), rich(eta_max)
    return ExpanderSolution(a, n, ts[keep], ys[0, keep], ys[1, keep], float(A_high),
                            float(abs(A_high - A_low)), float(errs[keep].max()))


def clearing_out_certificate(tau):
    """``2 sqrt(e^tau - 1) - e^{tau/2}``; the clearing-out conclusion holds when it exceeds 1."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return 2.0 * math.sqrt(math.expm1(tau)) - math.exp(0.5 * tau)


# ---------------------------------------------------------------------------
# simplex model

@dataclass(frozen=True)
class SimplexState:
    a: tuple

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("barycentric vector must be 1-D and nonempty")
        if (a < 0).any() or abs(a.sum() - 1.0) > 1e-12 * a.size:
            raise ValueError("barycentric coordinates must be >= 0 and sum to 1")
        object.__setattr__(self, "a", tuple(a))

    @property
    def n(self):
        return len(self.a) - 1

    def array(self):
        return np.array(self.a)


def simplex_flow(state: SimplexState, tau):
    """``a_k e^{k tau}`` renormalized to sum 1, computed in log space."""
    a = state.array()
    with np.errstate(divide="ignore"):
        logs = np.log(a) + tau * np.arange(a.size)
    w = np.exp(logs - logsumexp(logs))
    return SimplexState(tuple(w / w.sum()))
