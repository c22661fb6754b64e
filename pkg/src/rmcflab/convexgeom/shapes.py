"""Closed convex sets of R^d used as points of the phase space.

Every shape knows its ambient dimension, its (vectorized) distance function,
and, when bounded, its support function.  Shapes are immutable.

Coordinate conventions
----------------------
* ``Cylinder(m, cross)`` puts the flat factor R^m in the *last* m coordinates.
* An O(p) x O(q)-symmetric body in R^{p+q} rotates the first p coordinates
  and the last q coordinates separately; its meridian point is
  ``(|x[:p]|, |x[p:]|)``.
* ``RadialProfileShape`` lives in R^{n+1}: radial coordinates first, the
  axial coordinate ``y`` last.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..profiles import QuadrantCurve, RadialProfile


def _as_points(x, dim):
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != dim:
        raise ValueError(f"point dimension {pts.shape[-1]} does not match ambient dimension {dim}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts


class ConvexShape:
    """Base class; subclasses are frozen dataclasses."""

    ambient_dim: int

    @property
    def n(self):
        """Dimension of the boundary hypersurface."""
        return self.ambient_dim - 1

    compact = True
    has_interior = True

    def distance(self, x):
        pts = _as_points(x, self.ambient_dim)
        flat = pts.reshape(-1, self.ambient_dim)
        return self._distance(flat).reshape(pts.shape[:-1])

    def _distance(self, pts):
        raise NotImplementedError

    def support(self, u):
        """Support function for unit directions ``u`` of shape (..., d)."""
        if not self.compact:
            raise ValueError(f"{type(self).__name__} is unbounded")
        u = _as_points(u, self.ambient_dim)
        return self._support(u.reshape(-1, self.ambient_dim)).reshape(u.shape[:-1])

    def _support(self, u):
        raise NotImplementedError

    def scaled(self, factor):
        raise NotImplementedError

    def meridian_split(self):
        """``(p, q)`` when the distance depends only on the meridian point, else None."""
        return None

    def meridian_distance(self, a, b, p, q):
        """Distance as a function of meridian coordinates for a compatible split."""
        pts = np.zeros((len(a), self.ambient_dim))
        pts[:, 0] = a
        pts[:, p] = b
        return self._distance(pts)


# ---------------------------------------------------------------------------
# planar helpers

def _segment_distance(pts, chain, chunk=400_000):
    """Distance from planar points (M,2) to a polyline chain (S+1,2)."""
    a = chain[:-1]
    ab = np.diff(chain, axis=0)
    ab2 = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    out = np.empty(len(pts))
    step = max(1, chunk // max(1, len(a)))
    for i in range(0, len(pts), step):
        p = pts[i:i + step, None, :]
        t = np.clip(np.einsum("mij,ij->mi", p - a[None], ab) / ab2, 0.0, 1.0)
        proj = a[None] + t[..., None] * ab[None]
        out[i:i + step] = np.sqrt(((p - proj) ** 2).sum(-1).min(axis=1))
    return out


def _inside_convex(pts, poly, tol=1e-12, chunk=400_000):
    """Membership in a counterclockwise convex polygon."""
    e = np.roll(poly, -1, axis=0) - poly
    scale = np.linalg.norm(e, axis=1)
    keep = scale > 0
    a, e, scale = poly[keep], e[keep], scale[keep]
    out = np.empty(len(pts), dtype=bool)
    step = max(1, chunk // max(1, len(a)))
    for i in range(0, len(pts), step):
        p = pts[i:i + step]
        cross = (e[None, :, 0] * (p[:, None, 1] - a[None, :, 1])
                 - e[None, :, 1] * (p[:, None, 0] - a[None, :, 0]))
        slack = tol * scale[None, :] * (1.0 + np.abs(p).max(axis=1))[:, None]
        out[i:i + step] = (cross >= -slack).all(axis=1)
    return out


def _meridian(pts, p):
    return np.linalg.norm(pts[:, :p], axis=1), np.linalg.norm(pts[:, p:], axis=1)


# ---------------------------------------------------------------------------
# analytic shapes

@dataclass(frozen=True)
class Ball(ConvexShape):
    radius: float
    ambient_dim: int
    center: tuple | None = None

    def __post_init__(self):
        if self.ambient_dim < 2:
            raise ValueError("ambient dimension must be >= 2")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.center is not None:
            c = tuple(float(v) for v in self.center)
            if len(c) != self.ambient_dim:
                raise ValueError("center has wrong dimension")
            object.__setattr__(self, "center", None if not any(c) else c)

    @property
    def c(self):
        return np.zeros(self.ambient_dim) if self.center is None else np.array(self.center)

    def _distance(self, pts):
        return np.maximum(np.linalg.norm(pts - self.c, axis=1) - self.radius, 0.0)

    def _support(self, u):
        return u @ self.c + self.radius * np.linalg.norm(u, axis=1)

    def scaled(self, factor):
        center = None if self.center is None else tuple(factor * np.array(self.center))
        return Ball(self.radius * factor, self.ambient_dim, center)

    def meridian_split(self):
        return "any" if self.center is None else None

    def meridian_distance(self, a, b, p, q):
        return np.maximum(np.hypot(a, b) - self.radius, 0.0)


def _ellipsoid_project_distance(semi, pts, iters=200):
    """Distance from points to the solid ellipsoid with the given semi-axes."""
    a2 = semi ** 2
    val = ((pts / semi) ** 2).sum(axis=1)
    out = np.zeros(len(pts))
    outside = val > 1.0
    if not outside.any():
        return out
    x = pts[outside]
    t = np.zeros(len(x))
    ax2 = a2 * x ** 2
    for _ in range(iters):
        den = a2 + t[:, None]
        f = (ax2 / den ** 2).sum(axis=1) - 1.0
        fp = -2.0 * (ax2 / den ** 3).sum(axis=1)
        step = f / fp
        t = t - step
        if np.all(np.abs(step) <= 1e-15 * (1.0 + t)):
            break
    y = a2 * x / (a2 + t[:, None])
    out[outside] = np.linalg.norm(x - y, axis=1)
    return out


@dataclass(frozen=True)
class Ellipsoid(ConvexShape):
    """``{x : sum alpha_i^2 x_i^2 <= 1}``; alpha_i = 0 gives a flat direction."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        if len(a) < 2:
            raise ValueError("ellipsoid needs ambient dimension >= 2")
        if any(v < 0 for v in a):
            raise ValueError("reciprocal semi-axes must be nonnegative")
        if sum(v > 0 for v in a) < 2:
            raise ValueError("at least two reciprocals must be positive")
        object.__setattr__(self, "alpha", a)

    @property
    def ambient_dim(self):
        return len(self.alpha)

    @property
    def compact(self):
        return all(v > 0 for v in self.alpha)

    @property
    def _mask(self):
        return np.array(self.alpha) > 0

    @property
    def semi_axes(self):
        a = np.array(self.alpha)
        return 1.0 / a[a > 0]

    def _distance(self, pts):
        return _ellipsoid_project_distance(self.semi_axes, pts[:, self._mask])

    def _support(self, u):
        return np.sqrt(((u[:, self._mask] * self.semi_axes) ** 2).sum(axis=1))

    def scaled(self, factor):
        return Ellipsoid(tuple(v / factor for v in self.alpha))

    def groups(self):
        """Distinct positive reciprocals with multiplicities, and the flat count."""
        pos = [v for v in self.alpha if v > 0]
        vals = []
        for v in pos:
            for g in vals:
                if abs(g[0] - v) <= 1e-12 * max(g[0], v):
                    g[1] += 1
                    break
            else:
                vals.append([v, 1])
        return [(v, k) for v, k in vals], len(self.alpha) - len(pos)

    def cohomogeneity_form(self):
        """``(semi_p, p, semi_q, q, m)`` for O(p) x O(q) x R^m-symmetric members.

        A single distinct reciprocal gives ``q = 0`` (a ball times R^m).
        """
        groups, m = self.groups()
        if len(groups) > 2:
            raise ValueError(f"ellipsoid {self.alpha} is not of cohomogeneity one")
        (a, p), *rest = groups
        if rest:
            (b, q), = rest
            return 1.0 / a, p, 1.0 / b, q, m
        return 1.0 / a, p, None, 0, m

    def meridian_split(self):
        groups, m = self.groups()
        if m or len(groups) > 2:
            return None
        if len(groups) == 1:
            return "any"
        p = groups[0][1]
        a = np.array(self.alpha)
        if np.allclose(a[:p], a[0], rtol=1e-12) and np.allclose(a[p:], a[p], rtol=1e-12):
            return (p, len(a) - p)
        return None

    def meridian_distance(self, a, b, p, q):
        sa, sp, sb, sq, _ = self.cohomogeneity_form()
        if sb is None:
            return np.maximum(np.hypot(a, b) - sa, 0.0)
        return _ellipsoid_project_distance(np.array([sa, sb]), np.column_stack([a, b]))


@dataclass(frozen=True)
class Cylinder(ConvexShape):
    """Product ``cross x R^m`` with the flat factor in the last coordinates."""

    flat_dims: int
    cross: ConvexShape

    def __post_init__(self):
        if self.flat_dims < 0:
            raise ValueError("flat_dims must be >= 0")

    @property
    def ambient_dim(self):
        return self.cross.ambient_dim + self.flat_dims

    compact = False

    def _distance(self, pts):
        return self.cross._distance(pts[:, :self.cross.ambient_dim])

    def scaled(self, factor):
        return Cylinder(self.flat_dims, self.cross.scaled(factor))

    def compact_factor(self):
        """Innermost compact factor and the total number of flat directions."""
        shape, m = self, 0
        while isinstance(shape, Cylinder):
            m += shape.flat_dims
            shape = shape.cross
        if isinstance(shape, Ellipsoid) and not shape.compact:
            sa, p, sb, q, mm = shape.cohomogeneity_form()
            alpha = [1.0 / sa] * p + ([1.0 / sb] * q if sb else [])
            shape = Ball(sa, p) if sb is None else Ellipsoid(tuple(alpha))
            m += mm
        return shape, m


@dataclass(frozen=True)
class HalfSpace(ConvexShape):
    """``{x : <normal, x> <= offset}`` with unit outward ``normal``."""

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        nrm = np.asarray(self.normal, dtype=float)
        length = np.linalg.norm(nrm)
        if length == 0:
            raise ValueError("normal must be nonzero")
        object.__setattr__(self, "normal", tuple(nrm / length))

    @property
    def ambient_dim(self):
        return len(self.normal)

    compact = False

    def _distance(self, pts):
        return np.maximum(pts @ np.array(self.normal) - self.offset, 0.0)

    def scaled(self, factor):
        return HalfSpace(self.normal, self.offset * factor)


@dataclass(frozen=True)
class FlatDisk(ConvexShape):
    """Closed disk of radius ``radius`` in the hyperplane ``x_d = 0`` (empty interior)."""

    radius: float
    ambient_dim: int

    has_interior = False

    @property
    def compact(self):
        return np.isfinite(self.radius)

    def _distance(self, pts):
        planar = np.linalg.norm(pts[:, :-1], axis=1)
        return np.hypot(np.maximum(planar - self.radius, 0.0), pts[:, -1])

    def _support(self, u):
        return self.radius * np.linalg.norm(u[:, :-1], axis=1)

    def scaled(self, factor):
        return FlatDisk(self.radius * factor, self.ambient_dim)


@dataclass(frozen=True)
class FullSpace(ConvexShape):
    """All of R^d; a degenerate test hook for the Gaussian mass."""

    ambient_dim: int

    compact = False

    def _distance(self, pts):
        return np.zeros(len(pts))

    def scaled(self, factor):
        return self


@dataclass(frozen=True)
class Translated(ConvexShape):
    shape: ConvexShape
    offset: tuple

    def __post_init__(self):
        off = tuple(float(v) for v in self.offset)
        if len(off) != self.shape.ambient_dim:
            raise ValueError("offset has wrong dimension")
        object.__setattr__(self, "offset", off)

    @property
    def ambient_dim(self):
        return self.shape.ambient_dim

    @property
    def compact(self):
        return self.shape.compact

    def _distance(self, pts):
        return self.shape._distance(pts - np.array(self.offset))

    def _support(self, u):
        return self.shape._support(u) + u @ np.array(self.offset)

    def scaled(self, factor):
        return Translated(self.shape.scaled(factor), tuple(factor * np.array(self.offset)))


# ---------------------------------------------------------------------------
# discretized symmetric shapes

@dataclass(frozen=True, eq=False)
class QuadrantCurveShape(ConvexShape):
    """O(p) x O(q)-symmetric body generated by a ``QuadrantCurve``."""

    curve: QuadrantCurve
    per_segment: int = 4

    @property
    def ambient_dim(self):
        return self.curve.ambient_dim

    @property
    def compact(self):
        return self.curve.end == "axis"

    def scaled(self, factor):
        return QuadrantCurveShape(self.curve.scaled(factor), self.per_segment)

    def meridian_split(self):
        return (self.curve.p, self.curve.q)

    def _chain(self):
        return self.curve.dense(self.per_segment)

    def meridian_distance(self, a, b, p=None, q=None):
        chain = self._chain()
        pts = np.column_stack([a, b])
        if self.curve.end == "mirror":
            return self._stub_distance(pts, chain)
        region = np.vstack([[0.0, 0.0], chain])
        inside = _inside_convex(pts, region)
        out = np.zeros(len(pts))
        if (~inside).any():
            out[~inside] = _segment_distance(pts[~inside], chain)
        return out

    def _stub_distance(self, pts, chain):
        top = chain[-1, 1]
        period = 2.0 * top
        yy = np.mod(pts[:, 1], period)
        yy = np.where(yy > top, period - yy, yy)
        folded = np.column_stack([pts[:, 0], yy])
        xb = np.interp(yy, chain[:, 1], chain[:, 0])
        inside = folded[:, 0] <= xb
        copies = np.vstack([chain[::-1] * [1, -1], chain[1:], (chain * [1, -1] + [0, period])[::-1][1:]])
        out = np.zeros(len(pts))
        if (~inside).any():
            out[~inside] = _segment_distance(folded[~inside], copies)
        return out

    def _distance(self, pts):
        a, b = _meridian(pts, self.curve.p)
        return self.meridian_distance(a, b)

    def _support(self, u):
        a, b = _meridian(u, self.curve.p)
        chain = self._chain()
        return (np.outer(a, chain[:, 0]) + np.outer(b, chain[:, 1])).max(axis=1)


@dataclass(frozen=True, eq=False)
class RadialProfileShape(ConvexShape):
    """O(n) x O(1)-symmetric body ``{(x, y) : |x| <= r(y)}`` from a ``RadialProfile``."""

    profile: RadialProfile

    @property
    def ambient_dim(self):
        return self.profile.n + 1

    @property
    def compact(self):
        return self.profile.tip != "periodic"

    def scaled(self, factor):
        return RadialProfileShape(self.profile.scaled(factor))

    def meridian_split(self):
        return None

    def _distance(self, pts):
        prof = self.profile
        rho = np.linalg.norm(pts[:, :-1], axis=1)
        y = pts[:, -1]
        mp = np.column_stack([rho, y])
        out = np.zeros(len(pts))
        if prof.tip == "periodic":
            P = prof.period
            yy = np.mod(y - prof.y[0], P) + prof.y[0]
            yg = np.append(prof.y, prof.y[0] + P)
            rg = np.append(prof.r, prof.r[0])
            inside = rho <= np.interp(yy, yg, rg)
            base = np.column_stack([rg, yg])
            chain = np.vstack([base[:-1] + [0, -P], base[:-1], base + [0, P]])
            local = np.column_stack([rho, yy])
            if (~inside).any():
                out[~inside] = _segment_distance(local[~inside], chain)
            return out
        chain = prof.meridian()
        inside = _inside_convex(mp, chain)
        if (~inside).any():
            out[~inside] = _segment_distance(mp[~inside], chain)
        return out

    def _support(self, u):
        chain = self.profile.meridian()
        a = np.linalg.norm(u[:, :-1], axis=1)
        return (np.outer(a, chain[:, 0]) + np.outer(u[:, -1], chain[:, 1])).max(axis=1)


def meridian_dense(shape, per_segment=8, count=2001):
    """Dense first-quadrant boundary samples ``(x, y)`` and the split ``(p, q)``.

    Works for origin-centred balls, cohomogeneity-one compact ellipsoids and
    quadrant-curve shapes.
    """
    if isinstance(shape, QuadrantCurveShape):
        return shape.curve.dense(per_segment), (shape.curve.p, shape.curve.q)
    th = np.linspace(0.0, np.pi / 2, count)
    if isinstance(shape, Ball) and shape.center is None:
        r = shape.radius
        return np.column_stack([r * np.cos(th), r * np.sin(th)]), (shape.ambient_dim - 1, 1)
    if isinstance(shape, Ellipsoid) and shape.compact:
        sa, p, sb, q, _ = shape.cohomogeneity_form()
        if sb is None:
            return np.column_stack([sa * np.cos(th), sa * np.sin(th)]), (p - 1, 1)
        return np.column_stack([sa * np.cos(th), sb * np.sin(th)]), (p, q)
    raise ValueError(f"no meridian representation for {type(shape).__name__}")
