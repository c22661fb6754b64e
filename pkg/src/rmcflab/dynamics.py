"""Orbit-level analysis of the rescaled flow: runs, classification, plateaus, edges and audits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .convexgeom.measures import huisken_energy
from .convexgeom.shapes import ConvexShape, Ellipsoid
from .defaults import DEFAULTS
from .flowcore.errors import FlowError, NearExtinction
from .flowcore.runner import (SolverOptions, compact_dim, make_integrator, measure, run_flow,
                              state_shape, to_flow_state)
from .profiles import QuadrantCurve, RadialProfile
from .solitons import FixedPointId, critical_value
from .trace import OrbitTrace, TraceSample

_D = DEFAULTS.dynamics
_F = DEFAULTS.flow

UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class OrbitOptions:
    """Settings of an orbit run.

    ``sample_dtau`` is the target spacing of samples in rescaled time and
    ``margin`` the extra rescaled time the MCF run continues past ``tau_end``
    so that the run's own extinction time is known well enough to rescale
    the last samples.
    """

    solver: SolverOptions = field(default_factory=SolverOptions)
    sample_dtau: float = _D.sample_dtau
    margin: float = _D.orbit_margin
    keep_snapshots: bool = True


def _rescaled_sample(state, flat, t, log_factor, tau, event=""):
    """Sample of the state dilated by ``exp(log_factor)``."""
    return measure(state.scaled(math.exp(log_factor)), flat, tau, t, event)


def _is_round(integ, tol):
    if not _is_compact(integ.state):
        return False
    r_in, r_out = integ.radii()
    return r_out <= (1.0 + tol) * r_in


def _is_compact(state):
    if isinstance(state, QuadrantCurve):
        return state.end == "axis"
    return state.tip != "periodic"


def run_orbit(initial, tau_end=None, opts: OrbitOptions | None = None, normalize=True,
              stop_when_round=None):
    """Rescaled-flow orbit of ``initial``.

    With ``normalize`` (the default) the body is rescaled to extinction time
    1 using the extinction time of this very run: the MCF is integrated until
    the rescaled time exceeds ``tau_end + margin`` and every recorded
    snapshot ``C_t`` becomes ``(T - t)^{-1/2} C_t`` at ``tau = ln(T/(T - t))``.
    The sample at ``tau = 0`` is therefore ``T^{-1/2} C``.

    The body is blown up by exact powers of two whenever it has shrunk by
    half and time is kept as a list of per-interval durations, so ``T - t``
    is a sum of positive terms and keeps full relative precision deep into
    the extinction.

    ``stop_when_round=r`` ends the run (termination ``converged``) once
    ``r_out/r_in - 1 <= r`` has held for ``2 margin`` units of rescaled time.
    Without normalization the rescaled flow is integrated directly and may
    die or escape.
    """
    opts = opts or OrbitOptions()
    tau_end = _D.tau_end if tau_end is None else float(tau_end)
    if not tau_end > 0:
        raise ValueError("tau_end must be positive")
    if not normalize:
        return run_flow(initial, "RMCF", tau_end, options=opts.solver)
    sopts = opts.solver
    state, flat = (initial, 0) if isinstance(initial, (QuadrantCurve, RadialProfile)) \
        else to_flow_state(initial, sopts)
    integ = make_integrator(state, "MCF", sopts)
    n_c = max(compact_dim(state), 1)
    ln2 = math.log(2.0)
    K = 0                       # true body = integrator body * 2**-K
    snaps = [(0, integ.state)]  # (K at the snapshot, state)
    gaps = []                   # true time between consecutive snapshots
    pending = 0.0               # true time since the last snapshot
    total = 0.0                 # true time since the start

    def flush():
        nonlocal pending, total
        d = math.ldexp(integ.clock.value, -2 * K)
        pending += d
        total += d
        integ.clock.state[:] = 0.0

    def log_left(rem):
        return math.log(rem) - 2 * K * ln2

    last = log_left(integ.remaining_time())
    goal = tau_end + opts.margin
    round_since = None
    termination = "horizon"
    while True:
        if integ.steps >= sopts.max_steps:
            raise FlowError("step budget exhausted", total)
        try:
            integ.advance(sopts.remesh_every)
        except NearExtinction:
            termination = "near-extinct"
            break
        flush()
        cur = log_left(integ.remaining_time())
        if last - cur >= opts.sample_dtau:
            snaps.append((K, integ.state))
            gaps.append(pending)
            pending = 0.0
            last = cur
        r_out = integ.radii()[1]
        tau_lo = math.log(total) - log_left(r_out * r_out / (2.0 * n_c))
        if tau_lo >= goal:
            break
        if stop_when_round is not None:
            if _is_round(integ, stop_when_round):
                tau_est = math.log(total + math.exp(cur)) - cur
                round_since = tau_est if round_since is None else round_since
                if tau_est - round_since >= 2.0 * opts.margin:
                    termination = "converged"
                    break
            else:
                round_since = None
        w = integ.width()
        if w < 0.5:
            k = -math.floor(math.log2(w))
            integ.dilate(k)
            K += k
    gaps.append(pending)
    rem = math.ldexp(integ.remaining_time(), -2 * K)
    # left[i] = T - t_i, summed from the end
    left = np.empty(len(snaps))
    acc = rem
    for i in range(len(snaps) - 1, -1, -1):
        acc += gaps[i]
        left[i] = acc
    T = float(left[0])
    reached = math.log(T / rem)
    if termination == "converged":
        tau_end = min(tau_end, reached - opts.margin)
    samples = []
    for i, (k, st) in enumerate(snaps):
        tau = math.log(T / left[i])
        if tau > tau_end + 1e-12:
            break
        sample = _rescaled_sample(st, flat, T - left[i], -k * ln2 - 0.5 * math.log(left[i]),
                                  tau, "start" if i == 0 else "")
        if not opts.keep_snapshots:
            sample = _drop_snapshot(sample)
        samples.append(sample)
    if reached < tau_end and termination == "horizon":
        termination = "near-extinct"
    meta = dict(extinction_time=T, tau_reached=reached, steps=integ.steps,
                remeshes=integ.remeshes, dilations=K, normalized=True)
    return OrbitTrace("RMCF", samples, termination, n=integ.n, flat_dims=flat, meta=meta)


def _drop_snapshot(sample):
    return TraceSample(sample.tau, sample.t, sample.energy, sample.mass, sample.inradius,
                       sample.circumradius, sample.event, None)


# ---------------------------------------------------------------------------
# classification and plateaus

def _centred_radii(state):
    """Extremal distances from the origin (or from the axis for cylinder-like states)."""
    if isinstance(state, QuadrantCurve):
        pts = state.points
        r = pts[:, 0] if state.end == "mirror" else np.hypot(pts[:, 0], pts[:, 1])
    elif state.tip == "periodic":
        r = state.r
    else:
        r = np.hypot(state.r, state.y)
    return float(r.min()), float(r.max())


def template_distance(state):
    """Hausdorff distance between a snapshot and the Sigma^k template of the same symmetry type.

    For a compact state the template is the round sphere of radius
    ``sqrt(2k)``, k the dimension of the compact factor; for a cylinder-like
    state it is the cylinder of that radius.  For star-shaped convex bodies
    this is ``max(r_out - R, R - r_in)``.
    """
    k = compact_dim(state)
    R = math.sqrt(2.0 * k)
    r_in, r_out = _centred_radii(state)
    return max(r_out - R, R - r_in), k


def _ambient_n(trace):
    s = trace.terminal.snapshot if trace.samples else None
    if s is not None:
        return state_shape(s, trace.flat_dims).ambient_dim - 1
    return (trace.n or 0) + trace.flat_dims


def classify_limit(trace: OrbitTrace, tol=None, hausdorff_rel=None):
    """``FixedPointId`` of the limit of a trace, or ``UNRESOLVED``.

    Sigma^k is returned when the terminal snapshot is within
    ``hausdorff_rel * sqrt(2k)`` of the Sigma^k template and its energy is
    within ``tol`` of ``critical_value(k)``.
    """
    tol = _D.classify_energy if tol is None else tol
    rel = _D.classify_hausdorff_rel if hausdorff_rel is None else hausdorff_rel
    last = trace.terminal
    if last is None or last.snapshot is None:
        return UNRESOLVED
    dist, k = template_distance(last.snapshot)
    if k < 1:
        return UNRESOLVED
    if dist <= rel * math.sqrt(2.0 * k) and abs(last.energy - critical_value(k)) < tol:
        return FixedPointId(k, _ambient_n(trace))
    return UNRESOLVED


@dataclass(frozen=True)
class Plateau:
    k: int
    tau_start: float
    tau_end: float

    @property
    def length(self):
        return self.tau_end - self.tau_start

    def __iter__(self):
        return iter((self.k, self.tau_start, self.tau_end))


def detect_plateaus(trace: OrbitTrace, band=None, min_length=None, n=None):
    """Maximal tau-intervals with ``|H - critical_value(k)| <= band``, ordered by start.

    Intervals shorter than ``min_length`` are discarded as transients.
    """
    band = _D.plateau_band if band is None else band
    min_length = _D.plateau_min_length if min_length is None else min_length
    if not band > 0:
        raise ValueError("band must be positive")
    if not trace.samples:
        return []
    n = _ambient_n(trace) if n is None else n
    tau, H = trace.taus, trace.energies
    out = []
    for k in range(1, n + 1):
        inside = np.abs(H - critical_value(k)) <= band
        edges = np.flatnonzero(np.diff(np.concatenate([[0], inside.astype(int), [0]])))
        for a, b in zip(edges[::2], edges[1::2]):
            p = Plateau(k, float(tau[a]), float(tau[b - 1]))
            if p.length >= min_length:
                out.append(p)
    return sorted(out, key=lambda p: (p.tau_start, p.k))


def plateau_length(plateaus, k):
    """Total length of the plateaus at Sigma^k."""
    return sum(p.length for p in plateaus if p.k == k)


# ---------------------------------------------------------------------------
# edge experiments

EDGES = {3: ((1, 2), (2, 3), (1, 3)), 2: ((1, 2),)}


def family_member(eps, theta, n=3):
    """``D(eps, theta) = E(1, 1, eps, theta*eps)`` in R^4 for theta in {0, 1}.

    Interior theta gives a cohomogeneity-two body that the solvers do not cover.
    """
    if n != 3:
        raise ValueError("the two-parameter family lives in R^4")
    if theta not in (0, 1):
        raise ValueError("0 < theta < 1 gives a cohomogeneity-two ellipsoid (not supported)")
    return Ellipsoid((1.0, 1.0, eps, theta * eps))


def edge_shape(edge, alpha, n=3):
    """Family member approximating the edge from Sigma^i to Sigma^j."""
    edge = tuple(edge)
    if n not in EDGES or edge not in EDGES[n]:
        raise ValueError(f"edge {edge} is not available in R^{n + 1}")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if n == 2:
        return Ellipsoid((1.0, 1.0, alpha))
    return {(1, 2): Ellipsoid((1.0, 1.0, alpha, 0.0)),
            (2, 3): Ellipsoid((1.0, 1.0, 1.0, alpha)),
            (1, 3): Ellipsoid((1.0, 1.0, alpha, alpha))}[edge]


def edge_experiment(edge, alpha, opts: OrbitOptions | None = None, n=3, tau_max=None,
                    round_tol=1e-3):
    """Normalized orbit of the edge family member, run until it is round or ``tau_max``.

    The limit classification is stored in ``meta["limit"]``.
    """
    shape = edge_shape(edge, alpha, n)
    tau_max = _D.edge_tau_max if tau_max is None else tau_max
    if opts is None:
        opts = OrbitOptions(solver=SolverOptions(max_steps=_D.edge_max_steps))
    trace = run_orbit(shape, tau_max, opts, stop_when_round=round_tol)
    meta = dict(trace.meta, edge=tuple(edge), alpha=alpha)
    trace = trace.replace(meta=meta)
    meta["limit"] = str(classify_limit(trace))
    return trace


# ---------------------------------------------------------------------------
# audits

@dataclass(frozen=True)
class AuditReport:
    name: str
    checked: int
    tolerance: float
    violations: tuple = ()

    @property
    def passed(self):
        return not self.violations

    def __str__(self):
        state = "ok" if self.passed else f"{len(self.violations)} violations"
        return f"{self.name}: {self.checked} checks, tol {self.tolerance:g}, {state}"


def check_monotone_energy(trace: OrbitTrace, tol=None):
    """Flag consecutive samples whose energy rises by more than ``tol``.

    Violations are ``(i, tau_i, rise)`` for the step from sample i to i+1.
    """
    tol = _D.energy_tol if tol is None else tol
    H, tau = trace.energies, trace.taus
    rise = np.diff(H)
    bad = np.flatnonzero(rise > tol)
    return AuditReport("monotone-energy", max(len(H) - 1, 0), tol,
                       tuple((int(i), float(tau[i]), float(rise[i])) for i in bad))


def check_mass_decay(trace: OrbitTrace, slack=None):
    """Audit ``gvol(tau1) >= gvol(tau0) - H(tau0) sqrt((tau1 - tau0)/2)`` on all sampled pairs.

    Violations are ``(i, j, deficit)``.
    """
    slack = _D.mass_slack if slack is None else slack
    tau, H, M = trace.taus, trace.energies, trace.masses
    i, j = np.triu_indices(len(tau), 1)
    bound = M[i] - H[i] * np.sqrt(np.maximum(tau[j] - tau[i], 0.0) / 2.0)
    deficit = bound - M[j]
    bad = np.flatnonzero(deficit > slack)
    return AuditReport("mass-decay", len(i), slack,
                       tuple((int(i[b]), int(j[b]), float(deficit[b])) for b in bad))


# ---------------------------------------------------------------------------
# energy probe

@dataclass(frozen=True)
class ProbeResult:
    max_energy: float
    argmax: ConvexShape
    energies: np.ndarray = field(repr=False)
    seed: int = 0


def _probe_shape(rng, n):
    """A random cohomogeneity-one ellipsoid (possibly with flat directions) in R^{n+1}."""
    d = n + 1
    flat = int(rng.integers(0, d - 1))
    p = int(rng.integers(1, d - flat + 1))
    q = d - flat - p
    a, b = np.exp(rng.uniform(np.log(0.05), 0.0, size=2))
    alpha = (1.0,) * p + (float(b / a),) * q + (0.0,) * flat
    if sum(v > 0 for v in alpha) < 2:
        alpha = (1.0,) * (d - flat) + (0.0,) * flat
    scale = float(np.exp(rng.uniform(np.log(0.25), np.log(4.0)))) * math.sqrt(2.0 * n)
    return Ellipsoid(alpha).scaled(scale)


def energy_bound_probe(n, samples, seed=0):
    """Largest Huisken energy over random ellipsoids and cylinders in R^{n+1}.

    Deterministic for a given seed; the maximizing shape is returned for
    persistence.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    best, best_shape = -math.inf, None
    energies = np.empty(samples)
    for i in range(samples):
        shape = _probe_shape(rng, n)
        H = huisken_energy(shape)
        energies[i] = H
        if H > best:
            best, best_shape = H, shape
    return ProbeResult(float(best), best_shape, energies, seed)
