"""Metric structure on closed convex sets: distance, ρ-metric, Hausdorff, ε-core, containment."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize
from shapely.geometry import Polygon, box

from ..defaults import DEFAULTS
from ..profiles import QuadrantCurve, RadialProfile
from .shapes import (Ball, ConvexShape, Cylinder, Ellipsoid, FlatDisk, FullSpace, HalfSpace,
                     QuadrantCurveShape, RadialProfileShape, Translated, meridian_dense)


class RhoSearchError(RuntimeError):
    """Search radius reached the cap before the tail bound certified the supremum."""

    def __init__(self, lower, upper, radius):
        super().__init__(f"rho search did not converge by radius {radius:g}: "
                         f"value in [{lower:.6g}, {upper:.6g}]")
        self.bracket = (lower, upper)
        self.radius = radius


def distance_to_set(shape: ConvexShape, x):
    """Euclidean distance from ``x`` (shape (..., d)) to the closed set."""
    return shape.distance(x)


def _common_split(a, b):
    sa, sb = a.meridian_split(), b.meridian_split()
    if sa is None or sb is None:
        return None
    d = a.ambient_dim
    if sa == "any" and sb == "any":
        return (d - 1, 1)
    if sa == "any":
        return sb
    if sb == "any" or sa == sb:
        return sa
    return None


def _circumradius(shape):
    if not shape.compact:
        return math.inf
    if isinstance(shape, Ball):
        return float(np.linalg.norm(shape.c)) + shape.radius
    if isinstance(shape, Translated):
        return _circumradius(shape.shape) + float(np.linalg.norm(shape.offset))
    if isinstance(shape, Ellipsoid):
        return float(shape.semi_axes.max())
    if isinstance(shape, FlatDisk):
        return shape.radius
    if isinstance(shape, QuadrantCurveShape):
        return float(np.hypot(*shape.curve.dense(4).T).max())
    if isinstance(shape, RadialProfileShape):
        return float(np.hypot(*shape.profile.meridian().T).max())
    return math.inf


def _unit_directions(d, count, seed=0):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((count, d))
    eye = np.eye(d)
    u = np.vstack([eye, -eye, u])
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _radii(r0, r1, count):
    """Grid with density adapted to the 1/(1+r^2) weight."""
    return np.tan(np.linspace(math.atan(r0), math.atan(r1), count))


def rho_metric(a: ConvexShape, b: ConvexShape, tol=None):
    """``sup_x |d_a(x) - d_b(x)| / (1 + |x|^2)`` with a certified tail bound.

    The search ball grows until the bound ``(K + 2R) / (1 + R^2)`` on the ratio
    outside radius R (K = d_a(0) + d_b(0)) is below the best interior value
    plus ``tol``.  For two compact sets the tighter bound
    ``(R_a + R_b) / (1 + R^2)`` from the circumradii is also used.
    """
    g = DEFAULTS.geometry
    tol = g.rho_tol if tol is None else tol
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("shapes live in different dimensions")
    if a is b or (type(a) is type(b) and a == b):
        return 0.0
    d = a.ambient_dim
    split = _common_split(a, b)
    origin = np.zeros((1, d))
    K = float(a.distance(origin)[0] + b.distance(origin)[0])
    D = _circumradius(a) + _circumradius(b)

    def tail(R):
        return min((K + 2.0 * R) / (1.0 + R * R), D / (1.0 + R * R))

    if split is not None:
        p, q = split

        def ratio(pts):
            ra = a.meridian_distance(pts[:, 0], pts[:, 1], p, q)
            rb = b.meridian_distance(pts[:, 0], pts[:, 1], p, q)
            return np.abs(ra - rb) / (1.0 + (pts ** 2).sum(axis=1))

        ang = np.linspace(0.0, 0.5 * math.pi, 97)
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])

        def clip(x):
            return np.abs(x)
    else:
        def ratio(pts):
            return np.abs(a.distance(pts) - b.distance(pts)) / (1.0 + (pts ** 2).sum(axis=1))

        dirs = _unit_directions(d, g.rho_directions)

        def clip(x):
            return x

    best = 0.0
    r_lo, R = 0.0, max(4.0, 2.0 * math.sqrt(K + 1.0))
    while True:
        rs = _radii(r_lo, R, 160)
        pts = (rs[:, None, None] * dirs[None, :, :]).reshape(-1, dirs.shape[1])
        vals = ratio(pts)
        top = np.argsort(vals)[-4:]
        for i in top:
            res = optimize.minimize(lambda z: -ratio(clip(z)[None, :])[0], pts[i],
                                    method="Nelder-Mead",
                                    options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 4000})
            best = max(best, -res.fun)
        best = max(best, float(vals.max()))
        if tail(R) <= best + tol:
            return float(best)
        if R >= g.rho_radius_cap:
            raise RhoSearchError(best, max(best, tail(R)), R)
        r_lo, R = R, min(2.0 * R, g.rho_radius_cap)


# ---------------------------------------------------------------------------
# Hausdorff distance

def _require_compact(*shapes):
    for s in shapes:
        if not s.compact:
            raise ValueError(f"{type(s).__name__} is unbounded; use rho_metric instead")


def hausdorff_distance(a: ConvexShape, b: ConvexShape):
    """Hausdorff distance of compact convex sets, ``sup_u |h_a(u) - h_b(u)|``."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("shapes live in different dimensions")
    _require_compact(a, b)
    if isinstance(a, Ball) and isinstance(b, Ball):
        return float(np.linalg.norm(a.c - b.c) + abs(a.radius - b.radius))
    if isinstance(a, Translated) and isinstance(b, Translated) and a.shape == b.shape:
        return float(np.linalg.norm(np.subtract(a.offset, b.offset)))
    split = _common_split(a, b)
    if split is not None:
        p, q = split
        d = a.ambient_dim

        def lift(phi):
            u = np.zeros((np.size(phi), d))
            u[:, 0] = np.cos(phi)
            u[:, p] = np.sin(phi)
            return u

        def gap(phi):
            u = lift(np.atleast_1d(phi))
            return np.abs(a.support(u) - b.support(u))

        phis = np.linspace(0.0, 0.5 * math.pi, 2001)
        vals = gap(phis)
        i = int(vals.argmax())
        lo, hi = phis[max(i - 1, 0)], phis[min(i + 1, len(phis) - 1)]
        res = optimize.minimize_scalar(lambda t: -gap(t)[0], bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        return float(max(vals.max(), -res.fun))
    dirs = _unit_directions(a.ambient_dim, DEFAULTS.geometry.hausdorff_directions)

    def gapd(u):
        u = np.atleast_2d(u)
        u = u / np.linalg.norm(u, axis=1, keepdims=True)
        return np.abs(a.support(u) - b.support(u))

    vals = gapd(dirs)
    best = float(vals.max())
    for i in np.argsort(vals)[-4:]:
        res = optimize.minimize(lambda z: -gapd(z)[0], dirs[i], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14})
        best = max(best, -res.fun)
    return float(best)


# ---------------------------------------------------------------------------
# epsilon core

def _quadrant_arc(poly):
    """First-quadrant boundary arc (x-axis to y-axis) of a symmetric planar region."""
    q1 = poly.intersection(box(0.0, 0.0, 1e9, 1e9))
    xy = np.asarray(q1.exterior.coords)[:-1]
    scale = max(1.0, np.abs(xy).max())
    eps = 1e-12 * scale
    xmax = xy[np.abs(xy[:, 1]) <= eps, 0].max()
    ymax = xy[np.abs(xy[:, 0]) <= eps, 1].max()
    inner = xy[(xy[:, 0] > eps) & (xy[:, 1] > eps)]
    arc = np.vstack([[xmax, 0.0], inner, [0.0, ymax]])
    order = np.argsort(np.arctan2(arc[:, 1], arc[:, 0]), kind="stable")
    return arc[order]


def _resample(chain, count):
    seg = np.linalg.norm(np.diff(chain, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    t = np.linspace(0.0, s[-1], count)
    return np.column_stack([np.interp(t, s, chain[:, 0]), np.interp(t, s, chain[:, 1])])


def _core_polygon(full, eps):
    core = Polygon(full).buffer(-eps, join_style="round", quad_segs=32)
    if core.is_empty or core.area <= 0:
        return None
    if core.geom_type != "Polygon":
        core = max(core.geoms, key=lambda g: g.area)
    return core


def _quadrant_core(chain, p, q, eps, nodes):
    q2 = chain[::-1] * np.array([-1.0, 1.0])
    q3 = chain * np.array([-1.0, -1.0])
    q4 = chain[::-1] * np.array([1.0, -1.0])
    full = np.vstack([chain, q2[1:], q3[1:], q4[1:-1]])
    core = _core_polygon(full, eps)
    if core is None:
        return None
    arc = _resample(_quadrant_arc(core), nodes)
    spacing = float(np.linalg.norm(np.diff(arc, axis=0), axis=1).mean())
    return QuadrantCurveShape(QuadrantCurve(p, q, arc, spacing))


def _radial_core(profile, eps):
    if profile.tip == "periodic":
        P = profile.period
        yg = np.concatenate([profile.y - P, profile.y, profile.y + P])
        rg = np.tile(profile.r, 3)
        right = np.column_stack([rg, yg])
        left = (right * np.array([-1.0, 1.0]))[::-1]
        core = _core_polygon(np.vstack([right, left]), eps)
    else:
        right = profile.meridian()
        left = (right * np.array([-1.0, 1.0]))[::-1][1:-1]
        core = _core_polygon(np.vstack([right, left]), eps)
    if core is None:
        return None
    xy = np.asarray(core.exterior.coords)[:-1]
    half = xy[xy[:, 0] >= 0]
    half = half[np.argsort(half[:, 1])]
    ylo, yhi = half[:, 1].min(), half[:, 1].max()
    r = np.interp(profile.y, half[:, 1], half[:, 0], left=0.0, right=0.0)
    r[(profile.y <= ylo) | (profile.y >= yhi)] = 0.0
    r = np.maximum(r, 0.0)
    if profile.tip == "periodic":
        return RadialProfileShape(RadialProfile(profile.n, profile.y, r, "periodic", profile.period))
    if not (r > 0).any():
        return None
    return RadialProfileShape(RadialProfile(profile.n, profile.y, r, "capped",
                                            tips=(float(ylo), float(yhi))))


def epsilon_core(shape: ConvexShape, eps):
    """Inner parallel body ``{x : B_eps(x) ⊂ shape}``; ``None`` if it has empty interior."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0:
        return shape
    if isinstance(shape, FullSpace):
        return shape
    if isinstance(shape, HalfSpace):
        return HalfSpace(shape.normal, shape.offset - eps)
    if isinstance(shape, FlatDisk):
        return None
    if isinstance(shape, Ball):
        if shape.radius <= eps:
            return None
        return Ball(shape.radius - eps, shape.ambient_dim, shape.center)
    if isinstance(shape, Translated):
        inner = epsilon_core(shape.shape, eps)
        return None if inner is None else Translated(inner, shape.offset)
    if isinstance(shape, Cylinder):
        inner = epsilon_core(shape.cross, eps)
        return None if inner is None else Cylinder(shape.flat_dims, inner)
    if isinstance(shape, Ellipsoid):
        if not shape.compact:
            cross, m = Cylinder(0, shape).compact_factor()
            if shape.alpha[-m:] != tuple([0.0] * m):
                raise ValueError("flat directions must be the last coordinates")
            inner = epsilon_core(cross, eps)
            return None if inner is None else Cylinder(m, inner)
        if shape.meridian_split() is None:
            raise ValueError("epsilon core requires a cohomogeneity-one layout")
        chain, (p, q) = meridian_dense(shape, count=4001)
        return _quadrant_core(chain, p, q, eps, 401)
    if isinstance(shape, QuadrantCurveShape):
        c = shape.curve
        if c.end == "mirror":
            raise ValueError("epsilon core of mirror stubs is not supported")
        return _quadrant_core(c.dense(8), c.p, c.q, eps, len(c.points))
    if isinstance(shape, RadialProfileShape):
        return _radial_core(shape.profile, eps)
    raise TypeError(f"no epsilon-core rule for {type(shape).__name__}")


# ---------------------------------------------------------------------------
# containment and gaps

def _sphere_points(d, count, seed=0):
    return _unit_directions(d, count, seed)


def _lift(chain, p, q, count, seed=0):
    """Points of R^{p+q} on the orbits of meridian points ``chain``."""
    rng = np.random.default_rng(seed)
    idx = np.concatenate([np.arange(len(chain)), rng.integers(0, len(chain), count)])
    up = rng.standard_normal((len(idx), p))
    uq = rng.standard_normal((len(idx), q))
    up[:len(chain)] = np.eye(p)[0]
    uq[:len(chain)] = np.eye(q)[0]
    up /= np.linalg.norm(up, axis=1, keepdims=True)
    uq /= np.linalg.norm(uq, axis=1, keepdims=True)
    pts = chain[idx]
    return np.hstack([pts[:, :1] * up, pts[:, 1:] * uq])


def boundary_samples(shape: ConvexShape, count=None, seed=0):
    """Deterministic sample of boundary points of a compact shape, shape (M, d)."""
    _require_compact(shape)
    count = DEFAULTS.geometry.boundary_samples if count is None else count
    d = shape.ambient_dim
    if isinstance(shape, Ball):
        return shape.c + shape.radius * _sphere_points(d, count, seed)
    if isinstance(shape, Translated):
        return boundary_samples(shape.shape, count, seed) + np.array(shape.offset)
    if isinstance(shape, Ellipsoid):
        u = _sphere_points(d, count, seed)
        return u / np.sqrt(((u * np.array(shape.alpha)) ** 2).sum(axis=1))[:, None]
    if isinstance(shape, FlatDisk):
        u = _sphere_points(d - 1, count, seed)
        return np.hstack([shape.radius * u, np.zeros((len(u), 1))])
    if isinstance(shape, QuadrantCurveShape):
        c = shape.curve
        return _lift(c.dense(8), c.p, c.q, count, seed)
    if isinstance(shape, RadialProfileShape):
        m = shape.profile.meridian()
        rng = np.random.default_rng(seed)
        idx = np.concatenate([np.arange(len(m)), rng.integers(0, len(m), count)])
        u = rng.standard_normal((len(idx), d - 1))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return np.hstack([m[idx, :1] * u, m[idx, 1:]])
    raise TypeError(f"no boundary sampler for {type(shape).__name__}")


def _meridian_boundary(shape):
    if isinstance(shape, RadialProfileShape):
        return None
    try:
        chain, split = meridian_dense(shape, per_segment=8)
    except ValueError:
        return None
    return chain, split


def contains(outer: ConvexShape, inner: ConvexShape, tol=None):
    """Whether ``inner ⊂ outer`` up to ``tol`` (sampled boundary test, exact for ball pairs)."""
    tol = DEFAULTS.geometry.contains_tol if tol is None else tol
    if outer.ambient_dim != inner.ambient_dim:
        raise ValueError("shapes live in different dimensions")
    if isinstance(outer, FullSpace):
        return True
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        return bool(np.linalg.norm(outer.c - inner.c) + inner.radius <= outer.radius + tol)
    if isinstance(outer, HalfSpace) and isinstance(inner, HalfSpace):
        return bool(np.allclose(outer.normal, inner.normal) and inner.offset <= outer.offset + tol)
    if isinstance(outer, Cylinder) and isinstance(inner, Cylinder) \
            and outer.flat_dims == inner.flat_dims:
        return contains(outer.cross, inner.cross, tol)
    if not inner.compact:
        raise ValueError("containment of unbounded sets is supported for matching products only")
    split = _common_split(outer, inner)
    mb = _meridian_boundary(inner) if split is not None else None
    if mb is not None and (mb[1] == split or inner.meridian_split() == "any"):
        chain = mb[0]
        p, q = split
        dist = outer.meridian_distance(chain[:, 0], chain[:, 1], p, q)
    else:
        dist = outer.distance(boundary_samples(inner))
    return bool(dist.max() <= tol)


def set_gap(a: ConvexShape, b: ConvexShape):
    """Distance between the sets (0 when they meet), sampled over the boundary of ``b``."""
    return float(a.distance(boundary_samples(b)).min())
