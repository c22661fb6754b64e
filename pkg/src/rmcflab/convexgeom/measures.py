"""Gaussian-weighted functionals: Huisken energy, Gaussian mass, tail bounds.

All integrals are reduced by symmetry to one-dimensional quadratures:
boundary integrals run along the meridian curve with the weight
``omega_{p-1} omega_{q-1} x^{p-1} y^{q-1}``, volume integrals use polar
coordinates in the meridian quadrant with the radial part in closed form
(regularized incomplete gamma function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special, stats

from ..defaults import DEFAULTS
from .shapes import (Ball, ConvexShape, Cylinder, Ellipsoid, FlatDisk, FullSpace, HalfSpace,
                     QuadrantCurveShape, RadialProfileShape, Translated)

SQRT_4PI = math.sqrt(4.0 * math.pi)


class QuadratureError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved error bound {achieved:.3e})")
        self.achieved = achieved


def sphere_area(k):
    """Measure of the unit k-sphere; ``sphere_area(0) == 2``."""
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def _norm(n):
    return (4.0 * math.pi) ** (-n / 2)


# ---------------------------------------------------------------------------
# tail bound

def _tail_bound_raw(R, n):
    ball = math.pi ** (n / 2) * R ** n / math.gamma(n / 2 + 1)
    tail = (4.0 * math.pi) ** (n / 2) * special.gammaincc(n / 2, R * R / 4)
    # 2(n+1) graph pieces, area factor sqrt(1 + |grad h|^2) <= 2
    return 4.0 * (n + 1) * _norm(n) * (math.exp(-R * R / 4) * ball + tail)


@lru_cache(maxsize=None)
def tail_constant(n):
    """Constructive constant C_n with tail <= C_n R^n e^{-R^2/4} for R >= 1.

    Bounds the normalized Huisken mass of any convex boundary outside B_R.
    """
    Rs = np.linspace(1.0, 40.0, 3901)
    ratios = [_tail_bound_raw(R, n) / (R ** n * math.exp(-R * R / 4)) for R in Rs]
    return float(max(ratios))


def tail_bound(R, n):
    return tail_constant(n) * R ** n * math.exp(-R * R / 4)


def truncation_radius(tol, n, step=0.01):
    """Smallest grid radius R >= max(1, sqrt(2n)) with ``tail_bound(R, n) <= tol``."""
    if not 0 < tol <= 1:
        raise ValueError("tol must lie in (0, 1]")
    R = max(1.0, math.sqrt(2.0 * n))
    R = math.ceil(R / step) * step
    while tail_bound(R, n) > tol:
        R += step
    return round(R, 10)


@dataclass(frozen=True)
class HuiskenQuadratureSpec:
    truncation_radius: float
    nodes_per_unit: float
    rule: str = "gauss-legendre"

    @classmethod
    def default(cls, n, tol=None):
        q = DEFAULTS.quadrature
        tol = q.truncation_tol if tol is None else tol
        return cls(truncation_radius(tol, n), q.nodes_per_panel / q.panel_width)

    @property
    def panel_width(self):
        return DEFAULTS.quadrature.nodes_per_panel / self.nodes_per_unit


# ---------------------------------------------------------------------------
# quadrature helpers

@lru_cache(maxsize=None)
def _gauss(k):
    return np.polynomial.legendre.leggauss(k)


def _panels(a, b, panels, k=8):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _gauss(k)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _meridian_weight(x, y, p, q):
    return x ** (p - 1) * y ** (q - 1) * np.exp(-(x * x + y * y) / 4.0)


def _panel_count(length, spec):
    return max(4, int(math.ceil(length / spec.panel_width)))


def _ellipse_energy(A, B, p, q, spec, k=8):
    """Energy of the O(p) x O(q) body whose meridian is the ellipse with semi-axes A, B."""
    n = p + q - 1
    arc = 0.5 * math.pi * max(A, B)
    th, w = _panels(0.0, 0.5 * math.pi, _panel_count(arc, spec), k)
    x, y = A * np.cos(th), B * np.sin(th)
    ds = np.sqrt((A * np.sin(th)) ** 2 + (B * np.cos(th)) ** 2)
    val = (_meridian_weight(x, y, p, q) * ds * w).sum()
    return _norm(n) * sphere_area(p - 1) * sphere_area(q - 1) * val


def _offcenter_ball_energy(R, c, d, spec, k=8):
    n = d - 1
    th, w = _panels(0.0, math.pi, _panel_count(math.pi * R, spec), k)
    r2 = c * c + R * R + 2.0 * c * R * np.cos(th)
    val = (np.exp(-r2 / 4.0) * np.sin(th) ** (n - 1) * w).sum()
    return _norm(n) * sphere_area(n - 1) * R ** n * val


def _ball_energy(shape, spec, k=8):
    d = shape.ambient_dim
    if shape.center is None:
        return _ellipse_energy(shape.radius, shape.radius, d - 1, 1, spec, k)
    return _offcenter_ball_energy(shape.radius, float(np.linalg.norm(shape.c)), d, spec, k)


def _spline_gauss(curve, k):
    """Gauss nodes along the spline interpolant: points (M,2) and arc weights (M,)."""
    spl, knots = curve.spline
    x, w = _gauss(k)
    half = 0.5 * np.diff(knots)
    mid = 0.5 * (knots[1:] + knots[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    pts = spl(u)
    speed = np.linalg.norm(spl(u, 1), axis=1)
    return np.maximum(pts, 0.0), wt * speed, np.repeat(np.arange(len(half)), k)


def _quadrant_energy(curve, spec, k):
    p, q, n = curve.p, curve.q, curve.n
    pts, wt, seg = _spline_gauss(curve, k)
    R = spec.truncation_radius
    if curve.end == "mirror":
        if q != 1:
            raise ValueError("mirror-ended stubs are supported for q = 1 only")
        top = curve.points[-1, 1]
        x, y = pts[:, 0], pts[:, 1]
        total = 0.0
        shift = 0.0
        while shift - top <= R:
            for yy in (shift + y, shift + 2.0 * top - y) if shift else (y, 2.0 * top - y):
                total += (_meridian_weight(x, yy, p, q) * wt).sum()
            shift += 2.0 * top
        return _norm(n) * sphere_area(p - 1) * sphere_area(q - 1) * total, tail_bound(R, n)
    r = np.hypot(pts[:, 0], pts[:, 1])
    keep = r <= R
    skipped = not keep.all()
    val = (_meridian_weight(pts[keep, 0], pts[keep, 1], p, q) * wt[keep]).sum()
    energy = _norm(n) * sphere_area(p - 1) * sphere_area(q - 1) * val
    return energy, tail_bound(R, n) if skipped else 0.0


def _radial_energy(profile, spec, k):
    n = profile.n
    R = spec.truncation_radius
    x, w = _gauss(k)
    if profile.tip == "periodic":
        P = profile.period
        y0 = profile.y[0]
        start = y0 + P * math.floor((-R - y0) / P)
        reps = int(math.ceil((R - start) / P)) + 1
        yg = np.concatenate([profile.y + start + j * P for j in range(reps)] + [[start + reps * P]])
        rg = np.concatenate([np.tile(profile.r, reps), [profile.r[0]]])
        chain = np.column_stack([rg, yg])
    else:
        chain = profile.meridian()
    a, b = chain[:-1], chain[1:]
    seg = b - a
    L = np.linalg.norm(seg, axis=1)
    t = 0.5 * (x + 1.0)
    pts = a[:, None, :] + t[None, :, None] * seg[:, None, :]
    wt = 0.5 * L[:, None] * w[None, :]
    rho, y = pts[..., 0], pts[..., 1]
    val = (rho ** (n - 1) * np.exp(-(rho * rho + y * y) / 4.0) * wt).sum()
    return _norm(n) * sphere_area(n - 1) * val, 0.0


def huisken_energy(shape: ConvexShape, spec: HuiskenQuadratureSpec | None = None,
                   return_error=False):
    """Normalized Gaussian area ``(4 pi)^{-n/2} int_{dC} exp(-|x|^2/4) dH^n``.

    Products reduce to their compact factor, and sets with empty interior
    count their area twice.  With ``return_error`` a pair ``(value, bound)``
    is returned where ``bound`` combines the quadrature and truncation errors.
    """
    if isinstance(shape, Cylinder):
        return huisken_energy(shape.cross, spec, return_error)
    if spec is None:
        spec = HuiskenQuadratureSpec.default(shape.n)
    k = DEFAULTS.quadrature.nodes_per_panel
    kc = DEFAULTS.quadrature.curve_gauss_nodes
    err = 0.0
    if isinstance(shape, HalfSpace):
        val = math.exp(-shape.offset ** 2 / 4.0)
    elif isinstance(shape, FullSpace):
        val = 0.0
    elif isinstance(shape, FlatDisk):
        val = 2.0 * special.gammainc(shape.n / 2, shape.radius ** 2 / 4.0)
    elif isinstance(shape, Translated):
        if not isinstance(shape.shape, Ball):
            raise ValueError("energy of translated shapes is available for balls only")
        b = shape.shape
        center = b.c + np.array(shape.offset)
        return huisken_energy(Ball(b.radius, b.ambient_dim, tuple(center)), spec, return_error)
    elif isinstance(shape, Ball):
        val = _ball_energy(shape, spec, k)
        err = abs(val - _ball_energy(shape, spec, k - 2))
    elif isinstance(shape, Ellipsoid):
        sa, p, sb, q, _ = shape.cohomogeneity_form()
        if sb is None:
            val = _ellipse_energy(sa, sa, p - 1, 1, spec, k) if p > 1 else None
            if val is None:
                raise ValueError("degenerate ellipsoid")
            err = abs(val - _ellipse_energy(sa, sa, p - 1, 1, spec, k - 2))
        else:
            val = _ellipse_energy(sa, sb, p, q, spec, k)
            err = abs(val - _ellipse_energy(sa, sb, p, q, spec, k - 2))
    elif isinstance(shape, QuadrantCurveShape):
        val, err = _quadrant_energy(shape.curve, spec, kc)
        val2, _ = _quadrant_energy(shape.curve, spec, kc - 1)
        err += abs(val - val2)
    elif isinstance(shape, RadialProfileShape):
        val, err = _radial_energy(shape.profile, spec, kc)
    else:
        raise TypeError(f"no energy rule for {type(shape).__name__}")
    val = float(val)
    return (val, float(err)) if return_error else val


# ---------------------------------------------------------------------------
# Gaussian mass

def _radial_part(R, m):
    """``int_0^R rho^{m-1} exp(-rho^2/4) d rho``."""
    return 2.0 ** (m - 1) * math.gamma(m / 2) * special.gammainc(m / 2, np.asarray(R) ** 2 / 4.0)


def _polar_mass(phi, w, R, p, q):
    n = p + q - 1
    ang = np.cos(phi) ** (p - 1) * np.sin(phi) ** (q - 1)
    val = (ang * _radial_part(R, p + q) * w).sum()
    return _norm(n) * sphere_area(p - 1) * sphere_area(q - 1) * val


def _ellipse_mass(A, B, p, q, k=8, panels=64):
    phi, w = _panels(0.0, 0.5 * math.pi, panels, k)
    R = 1.0 / np.sqrt((np.cos(phi) / A) ** 2 + (np.sin(phi) / B) ** 2)
    return _polar_mass(phi, w, R, p, q)


def _spline_mass(curve, k):
    """Polar mass with the angle measure ``(x y' - y x') / rho^2 du`` along the spline."""
    spl, knots = curve.spline
    x, w = _gauss(k)
    half = 0.5 * np.diff(knots)
    mid = 0.5 * (knots[1:] + knots[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    P, dP = spl(u), spl(u, 1)
    rho2 = (P ** 2).sum(axis=1)
    dphi = (P[:, 0] * dP[:, 1] - P[:, 1] * dP[:, 0]) / rho2
    phi = np.arctan2(P[:, 1], P[:, 0])
    return _polar_mass(phi, wt * dphi, np.sqrt(rho2), curve.p, curve.q)


def gaussian_mass(shape: ConvexShape):
    """Normalized Gaussian volume ``(4 pi)^{-n/2} int_C exp(-|x|^2/4) dx``."""
    if isinstance(shape, Cylinder):
        return gaussian_mass(shape.cross)
    d = shape.ambient_dim
    if isinstance(shape, FullSpace):
        return SQRT_4PI
    if isinstance(shape, HalfSpace):
        return SQRT_4PI * float(special.ndtr(shape.offset / math.sqrt(2.0)))
    if isinstance(shape, FlatDisk):
        return 0.0
    if isinstance(shape, Translated):
        if not isinstance(shape.shape, Ball):
            raise ValueError("mass of translated shapes is available for balls only")
        b = shape.shape
        return gaussian_mass(Ball(b.radius, d, tuple(b.c + np.array(shape.offset))))
    if isinstance(shape, Ball):
        if shape.center is None:
            return SQRT_4PI * float(special.gammainc(d / 2, shape.radius ** 2 / 4.0))
        lam = float(shape.c @ shape.c) / 2.0
        return SQRT_4PI * float(stats.ncx2.cdf(shape.radius ** 2 / 2.0, d, lam))
    if isinstance(shape, Ellipsoid):
        sa, p, sb, q, _ = shape.cohomogeneity_form()
        if sb is None:
            return SQRT_4PI * float(special.gammainc(p / 2, sa ** 2 / 4.0))
        return float(_ellipse_mass(sa, sb, p, q))
    if isinstance(shape, QuadrantCurveShape):
        c = shape.curve
        if c.end != "axis":
            raise ValueError("mass of mirror-ended stubs is not defined")
        return float(_spline_mass(c, DEFAULTS.quadrature.nodes_per_panel))
    if isinstance(shape, RadialProfileShape):
        return float(_radial_mass(shape.profile))
    raise TypeError(f"no mass rule for {type(shape).__name__}")


def _radial_mass(profile, k=8):
    n = profile.n
    if profile.tip == "periodic":
        R = truncation_radius(DEFAULTS.quadrature.truncation_tol, n)
        P = profile.period
        reps = int(math.ceil(2 * R / P)) + 2
        start = profile.y[0] + P * math.floor((-R - profile.y[0]) / P)
        yg = np.concatenate([profile.y + start + j * P for j in range(reps)] + [[start + reps * P]])
        rg = np.concatenate([np.tile(profile.r, reps), [profile.r[0]]])
        chain = np.column_stack([rg, yg])
    else:
        chain = profile.meridian()
    a, b = chain[:-1], chain[1:]
    x, w = _gauss(k)
    t = 0.5 * (x + 1.0)
    y = a[:, 1, None] + t[None, :] * (b[:, 1] - a[:, 1])[:, None]
    rho = a[:, 0, None] + t[None, :] * (b[:, 0] - a[:, 0])[:, None]
    wt = 0.5 * (b[:, 1] - a[:, 1])[:, None] * w[None, :]
    return (np.exp(-y * y / 4.0) * special.gammainc(n / 2, rho * rho / 4.0) * wt).sum()


def inradius_circumradius(shape):
    """Radii of the largest centred ball inside and smallest centred ball around the body.

    Products report the values of their compact factor.
    """
    if isinstance(shape, Cylinder):
        shape, _ = shape.compact_factor()
    if isinstance(shape, Ball) and shape.center is None:
        return shape.radius, shape.radius
    if isinstance(shape, Ellipsoid) and shape.compact:
        ax = shape.semi_axes
        return float(ax.min()), float(ax.max())
    if isinstance(shape, QuadrantCurveShape):
        pts = shape.curve.dense(8)
        if shape.curve.end == "mirror":
            return float(pts[:, 0].min()), float(pts[:, 0].max())
        r = np.hypot(pts[:, 0], pts[:, 1])
        return float(r.min()), float(r.max())
    if isinstance(shape, RadialProfileShape):
        if shape.profile.tip == "periodic":
            return shape.profile.min_radius(), float(shape.profile.r.max())
        m = shape.profile.meridian()
        r = np.hypot(m[:, 0], m[:, 1])
        from .shapes import _segment_distance
        return float(_segment_distance(np.zeros((1, 2)), m)[0]), float(r.max())
    raise TypeError(f"no radii rule for {type(shape).__name__}")
