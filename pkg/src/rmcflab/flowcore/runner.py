"""Adaptive time stepping and flow runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..convexgeom.measures import gaussian_mass, huisken_energy, inradius_circumradius
from ..convexgeom.shapes import (Ball, ConvexShape, Cylinder, Ellipsoid, QuadrantCurveShape,
                                 RadialProfileShape)
from ..defaults import DEFAULTS
from ..profiles import QuadrantCurve, RadialProfile
from ..trace import OrbitTrace, TraceSample
from . import _kernels
from .curve import needs_remesh, remesh_curve
from .errors import FlowError, FlowInstability, NearExtinction
from .exact import ellipse_arc, quarter_circle
from .radial import _step as _radial_step
from .radial import radial_dt_limit

_F = DEFAULTS.flow


@dataclass(frozen=True)
class SolverOptions:
    """Numerical settings of a run.

    ``resolution`` is the node spacing relative to the current width of the
    curve (``remesh="relative"``) or relative to the initial width
    (``remesh="fixed"``).  Radial profiles keep their own grid.
    """

    resolution: float = _F.resolution
    remesh: str = "relative"
    cfl: float = _F.cfl
    remesh_every: int = _F.remesh_every
    max_steps: int = _F.max_steps
    observer_stride: int = 100
    dt_growth: float = _F.dt_growth
    max_rejections: int = _F.max_rejections

    def __post_init__(self):
        if self.remesh not in ("relative", "fixed"):
            raise ValueError("remesh must be 'relative' or 'fixed'")
        if not self.resolution > 0 or not self.cfl > 0:
            raise ValueError("resolution and cfl must be positive")


class _Clock:
    """Compensated (Kahan) accumulation of time; state kept in a 2-array for the kernels."""

    def __init__(self):
        self.state = np.zeros(2)

    @property
    def value(self):
        return float(self.state[0])

    def add(self, dt):
        y = dt - self.state[1]
        s = self.state[0] + y
        self.state[1] = (s - self.state[0]) - y
        self.state[0] = s


# ---------------------------------------------------------------------------
# conversion of analytic shapes

def to_flow_state(shape: ConvexShape, options: SolverOptions | None = None):
    """Discretize a shape for the flow solvers.

    Returns ``(state, flat_dims)`` where ``state`` is a QuadrantCurve or a
    RadialProfile and ``flat_dims`` the number of flat directions of a product.
    """
    opts = options or SolverOptions()
    if isinstance(shape, Cylinder):
        cross, m = shape.compact_factor()
        if isinstance(cross, Cylinder):
            raise ValueError("nested cylinders without a compact factor")
        state, mm = to_flow_state(cross, opts)
        return state, m + mm
    if isinstance(shape, QuadrantCurveShape):
        return shape.curve, 0
    if isinstance(shape, RadialProfileShape):
        return shape.profile, 0
    if isinstance(shape, Ball):
        if shape.center is not None:
            raise ValueError("only origin-centred balls can be flowed")
        R = shape.radius
        return quarter_circle(shape.ambient_dim - 1, 1, R, h=opts.resolution * R), 0
    if isinstance(shape, Ellipsoid):
        sa, p, sb, q, m = shape.cohomogeneity_form()
        if sb is None:
            return quarter_circle(p - 1, 1, sa, h=opts.resolution * sa), m
        dense = ellipse_arc(p, q, sa, sb)
        return remesh_curve(dense, opts.resolution * min(sa, sb)), m
    raise TypeError(f"cannot flow {type(shape).__name__}")


def state_shape(state, flat_dims=0):
    if isinstance(state, QuadrantCurve):
        s = QuadrantCurveShape(state)
    else:
        s = RadialProfileShape(state)
    return Cylinder(flat_dims, s) if flat_dims else s


def compact_dim(state):
    """Boundary dimension of the compact factor represented by a state."""
    if isinstance(state, QuadrantCurve):
        if state.end == "mirror":
            return state.p - 1
        return state.n
    if state.tip == "periodic":
        return state.n - 1
    return state.n


# ---------------------------------------------------------------------------
# integrators

class CurveIntegrator:
    """Stateful explicit integrator for a quadrant curve."""

    def __init__(self, curve: QuadrantCurve, mode="MCF", options: SolverOptions | None = None):
        if mode not in ("MCF", "RMCF"):
            raise ValueError(f"unknown mode {mode!r}")
        self.opts = options or SolverOptions()
        self.mode = mode
        self.p, self.q, self.end = curve.p, curve.q, curve.end
        self.pts = np.array(curve.points, dtype=float)
        self.width0 = curve.width()
        self.h_fixed = self.opts.resolution * self.width0
        self.clock = _Clock()
        self.dt = None
        self.steps = 0
        self.remeshes = 0

    @property
    def t(self):
        return self.clock.value

    @property
    def n(self):
        return self.p - 1 if self.end == "mirror" else self.p + self.q - 1

    @property
    def state(self):
        return QuadrantCurve(self.p, self.q, self.pts, self.h_base(), self.end)

    def width(self):
        if self.end == "mirror":
            return float(self.pts[:, 0].min())
        return float(min(self.pts[0, 0], self.pts[-1, 1]))

    def h_base(self):
        if self.opts.remesh == "relative":
            return self.opts.resolution * self.width()
        return self.h_fixed

    def radii(self):
        if self.end == "mirror":
            x = self.pts[:, 0]
            return float(x.min()), float(x.max())
        r = np.hypot(self.pts[:, 0], self.pts[:, 1])
        return float(r.min()), float(r.max())

    def roundness(self):
        r_in, r_out = self.radii()
        return r_out / r_in - 1.0

    def mean_radius(self):
        """Area-weighted mean distance to the origin."""
        mid = 0.5 * (self.pts[1:] + self.pts[:-1])
        ds = np.hypot(*np.diff(self.pts, axis=0).T)
        w = mid[:, 0] ** (self.p - 1) * mid[:, 1] ** (self.q - 1) * ds
        return float((np.hypot(mid[:, 0], mid[:, 1]) * w).sum() / w.sum())

    def remaining_time(self):
        """Sphere-law estimate of the time left until extinction, clipped to the bracket."""
        if self.end == "mirror":
            return self.width() ** 2 / (2.0 * max(self.n, 1))
        lo, hi = self.extinction_bracket()
        return min(max(self.mean_radius() ** 2 / (2.0 * self.n), lo), hi)

    def extinction_bracket(self):
        """Certified remaining-time bounds from the centred in- and circumscribed balls."""
        r_in, r_out = self.radii()
        n = max(self.n, 1)
        return r_in * r_in / (2.0 * n), r_out * r_out / (2.0 * n)

    def near_extinct(self):
        w = self.width()
        if self.opts.remesh == "fixed":
            return w < _F.near_extinct_factor * self.h_fixed
        if w < _F.hard_extinction_ratio * self.width0:
            return True
        if w >= _F.extinction_ratio * self.width0 or self.end == "mirror":
            return False
        lo, hi = self.extinction_bracket()
        return hi - lo <= _F.extinction_bracket * self.t

    def dt_cap(self):
        h = _kernels.min_segment(self.pts)
        return self.opts.cfl * h * h / max(self.p, self.q)

    def step(self, dt_limit=math.inf, dt_max=math.inf):
        """One adaptive step; returns the step size taken."""
        t0 = self.t
        self.advance(1, dt_limit, dt_max)
        return self.t - t0

    def advance(self, nsteps, dt_limit=math.inf, dt_max=math.inf):
        """Up to ``nsteps`` steps (never past ``dt_limit``), then the periodic remesh check.

        Returns the number of accepted steps.
        """
        until_check = self.opts.remesh_every - self.steps % self.opts.remesh_every
        nsteps = min(nsteps, until_check)
        pts, dt_prev, done, _, status = _kernels.multi_step(
            self.pts, self.p, self.q, self.end == "mirror", self.mode == "RMCF", self.opts.cfl,
            self.opts.dt_growth, -1.0 if self.dt is None else self.dt, dt_max, dt_limit, nsteps,
            self.opts.max_rejections, _F.convexity_tol, self.clock.state)
        self.pts = pts
        self.dt = dt_prev if dt_prev > 0 else None
        self.steps += done
        if status != 0:
            raise FlowInstability("step rejected repeatedly", self.t)
        if done and self.steps % self.opts.remesh_every == 0:
            self.maybe_remesh()
        return done

    def dilate(self, k):
        """Scale the body by ``2**k`` (exact in floating point); time scales by ``4**k``.

        The clock is left alone; callers that dilate keep their own time bookkeeping.
        """
        f = math.ldexp(1.0, k)
        self.pts = self.pts * f
        self.width0 *= f
        self.h_fixed *= f
        if self.dt is not None:
            self.dt *= f * f

    def maybe_remesh(self):
        h = self.h_base()
        if needs_remesh(self.pts, self.end, h):
            self.pts = np.array(remesh_curve(self.state, h).points)
            self.remeshes += 1
            return True
        return False


class RadialIntegrator:
    """Stateful explicit integrator for a radial profile on a fixed grid."""

    def __init__(self, profile: RadialProfile, mode="MCF", options: SolverOptions | None = None):
        if mode not in ("MCF", "RMCF"):
            raise ValueError(f"unknown mode {mode!r}")
        self.opts = options or SolverOptions()
        self.mode = mode
        self.profile = profile
        self.width0 = self.width()
        self.clock = _Clock()
        self.dt = None
        self.steps = 0
        self.remeshes = 0

    @property
    def t(self):
        return self.clock.value

    @property
    def n(self):
        return compact_dim(self.profile)

    @property
    def state(self):
        return self.profile

    def width(self):
        r = self.profile.r
        return float(r.min()) if self.profile.tip == "periodic" else float(r.max())

    def radii(self):
        if self.profile.tip == "periodic":
            return float(self.profile.r.min()), float(self.profile.r.max())
        return inradius_circumradius(RadialProfileShape(self.profile))

    def roundness(self):
        r_in, r_out = self.radii()
        return r_out / r_in - 1.0

    def remaining_time(self):
        if self.profile.tip == "periodic":
            return self.width() ** 2 / (2.0 * max(self.n, 1))
        r_in, r_out = self.radii()
        return (0.5 * (r_in + r_out)) ** 2 / (2.0 * self.n)

    def near_extinct(self):
        return self.width() < _F.near_extinct_factor * self.profile.dy

    def dilate(self, k):
        """Scale the body by ``2**k`` (exact in floating point); time scales by ``4**k``."""
        f = math.ldexp(1.0, k)
        self.profile = self.profile.scaled(f)
        self.width0 *= f
        if self.dt is not None:
            self.dt *= f * f

    def dt_cap(self):
        return radial_dt_limit(self.profile, self.opts.cfl)

    def step(self, dt_limit=math.inf, dt_max=math.inf):
        cap = min(self.dt_cap(), dt_max)
        dt = cap if self.dt is None else min(self.dt * self.opts.dt_growth, cap)
        clipped = dt_limit < dt
        dt = min(dt, dt_limit)
        for _ in range(self.opts.max_rejections):
            try:
                new = _radial_step(self.profile, dt, self.mode)
            except FlowInstability:
                dt *= 0.5
                clipped = False
                continue
            self.profile = new
            self.clock.add(dt)
            if not clipped:
                self.dt = dt
            self.steps += 1
            return dt
        raise FlowInstability("step rejected repeatedly", self.t)

    def advance(self, nsteps, dt_limit=math.inf, dt_max=math.inf):
        t_end = self.t + dt_limit
        done = 0
        while done < nsteps and t_end - self.t > 1e-15 * abs(t_end):
            self.step(t_end - self.t, dt_max)
            done += 1
        return done


def make_integrator(state, mode="MCF", options=None):
    if isinstance(state, QuadrantCurve):
        return CurveIntegrator(state, mode, options)
    if isinstance(state, RadialProfile):
        return RadialIntegrator(state, mode, options)
    raise TypeError(f"no integrator for {type(state).__name__}")


# ---------------------------------------------------------------------------
# runs

def measure(state, flat_dims=0, tau=0.0, t=0.0, event="", keep_snapshot=True):
    """Trace sample with energy, mass and centred radii of a state."""
    shape = state_shape(state)
    r_in, r_out = inradius_circumradius(shape)
    return TraceSample(tau=float(tau), t=float(t), energy=huisken_energy(shape),
                       mass=_mass_or_nan(shape), inradius=r_in, circumradius=r_out,
                       event=event, snapshot=state if keep_snapshot else None)


def _mass_or_nan(shape):
    try:
        return gaussian_mass(shape)
    except ValueError:
        return math.nan


def run_flow(shape, mode="MCF", horizon=1.0, dt=None, observer_stride=None, options=None):
    """Run MCF or RMCF from ``shape`` up to ``horizon`` and return the trace.

    ``dt`` caps the step size (the CFL limit still applies).  A sample is
    recorded every ``observer_stride`` accepted steps and at the end.  MCF
    runs stop at near-extinction and store the sphere-law extinction
    estimate in ``meta["extinction_time"]``.
    """
    opts = options or SolverOptions()
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    stride = observer_stride or opts.observer_stride
    state, flat = (shape, 0) if isinstance(shape, (QuadrantCurve, RadialProfile)) \
        else to_flow_state(shape, opts)
    integ = make_integrator(state, mode, opts)
    dt_max = math.inf if dt is None else float(dt)
    samples = [measure(integ.state, flat, event="start")]
    termination = "horizon"
    meta = {}
    while horizon - integ.t > 1e-13 * horizon:
        if integ.steps >= opts.max_steps:
            raise FlowError("step budget exhausted", integ.t)
        try:
            integ.advance(stride - integ.steps % stride, horizon - integ.t, dt_max)
        except NearExtinction:
            termination = "near-extinct"
            break
        except FlowError as err:
            err.time = integ.t
            raise
        if integ.near_extinct():
            termination = "near-extinct"
            break
        if integ.steps % stride == 0:
            samples.append(measure(integ.state, flat, integ.t, integ.t))
    if termination == "near-extinct":
        meta["extinction_time"] = integ.t + integ.remaining_time()
    if samples[-1].t != integ.t:
        samples.append(measure(integ.state, flat, integ.t, integ.t, event=termination))
    meta.update(steps=integ.steps, remeshes=integ.remeshes)
    return OrbitTrace(mode, samples, termination, n=integ.n, flat_dims=flat, meta=meta)


def extinction_run(shape, options=None):
    """MCF to near-extinction without sampling; returns ``(T, info)``."""
    opts = options or SolverOptions()
    state, flat = (shape, 0) if isinstance(shape, (QuadrantCurve, RadialProfile)) \
        else to_flow_state(shape, opts)
    integ = make_integrator(state, "MCF", opts)
    while True:
        if integ.steps >= opts.max_steps:
            raise FlowError("step budget exhausted", integ.t)
        try:
            integ.advance(opts.remesh_every)
        except NearExtinction:
            break
        if integ.near_extinct():
            break
    T = integ.t + integ.remaining_time()
    return T, dict(steps=integ.steps, remeshes=integ.remeshes, stop_time=integ.t,
                   resolution=opts.resolution, flat_dims=flat)


def with_resolution(options, resolution):
    return replace(options or SolverOptions(), resolution=resolution)
