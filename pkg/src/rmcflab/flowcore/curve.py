"""Explicit steppers for O(p) x O(q)-symmetric hypersurfaces given by quadrant curves.

With the curve traversed counterclockwise from the x-axis node to the y-axis
node, the outward normal is the tangent rotated clockwise and

    H = kappa + (p - 1) nu_x / x + (q - 1) nu_y / y.

At the axis nodes the singular quotient tends to kappa.  MCF moves each node
with normal speed -H, RMCF with -H + <X, nu>/2.  Curvature is the
circumscribed-circle (Menger) curvature and the discrete tangent is the
tangent of that circle, so a uniform polygon inscribed in a centred circle is
an exact discrete solution.
"""

from __future__ import annotations

import numpy as np

from ..defaults import DEFAULTS
from ..profiles import QuadrantCurve
from .errors import FlowInstability

MODES = ("MCF", "RMCF")


def _extended(pts, end):
    ext = np.empty((len(pts) + 2, 2))
    ext[1:-1] = pts
    ext[0, 0], ext[0, 1] = pts[1, 0], -pts[1, 1]
    if end == "axis":
        ext[-1, 0], ext[-1, 1] = -pts[-2, 0], pts[-2, 1]
    else:
        ext[-1, 0], ext[-1, 1] = pts[-2, 0], 2.0 * pts[-1, 1] - pts[-2, 1]
    return ext


def curve_geometry(pts, end="axis"):
    """Discrete curvature ``kappa`` (N+1,), outward normals (N+1, 2) and turning cross products."""
    ext = _extended(pts, end)
    d1 = ext[1:-1] - ext[:-2]
    d2 = ext[2:] - ext[1:-1]
    l1 = np.hypot(d1[:, 0], d1[:, 1])
    l2 = np.hypot(d2[:, 0], d2[:, 1])
    l3 = np.hypot(ext[2:, 0] - ext[:-2, 0], ext[2:, 1] - ext[:-2, 1])
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    kappa = 2.0 * cross / (l1 * l2 * l3)
    t = d1 * (l2 / l1)[:, None] + d2 * (l1 / l2)[:, None]
    t /= np.hypot(t[:, 0], t[:, 1])[:, None]
    nu = np.column_stack([t[:, 1], -t[:, 0]])
    nu[0] = (1.0, 0.0)
    if end == "axis":
        nu[-1] = (0.0, 1.0)
    else:
        nu[-1] = (1.0, 0.0)
    return kappa, nu, cross / (l1 * l2)


def mean_curvature(pts, p, q, end="axis"):
    """Mean curvature H at every node together with the outward normals."""
    kappa, nu, _ = curve_geometry(pts, end)
    H = kappa.copy()
    x, y = pts[:, 0], pts[:, 1]
    inner = slice(1, -1) if end == "axis" else slice(1, None)
    if p > 1:
        sx = np.empty_like(kappa)
        sx[0] = nu[0, 0] / x[0]
        sx[inner] = nu[inner, 0] / x[inner]
        if end == "axis":
            sx[-1] = kappa[-1]
        H += (p - 1) * sx
    if q > 1:
        sy = np.empty_like(kappa)
        sy[0] = kappa[0]
        sy[1:] = nu[1:, 1] / y[1:]
        H += (q - 1) * sy
    return H, nu


def normal_velocity(pts, p, q, end="axis", mode="MCF"):
    """Node velocities ``V nu`` for the chosen flow."""
    H, nu = mean_curvature(pts, p, q, end)
    V = -H
    if mode == "RMCF":
        V = V + 0.5 * (pts * nu).sum(axis=1)
    elif mode != "MCF":
        raise ValueError(f"unknown mode {mode!r}")
    return V[:, None] * nu


def check_curve(pts, end="axis", tol=None):
    """Raise ``FlowInstability`` if the polygon is not a convex quadrant arc."""
    tol = DEFAULTS.flow.convexity_tol if tol is None else tol
    if not np.all(np.isfinite(pts)):
        raise FlowInstability("non-finite node coordinates")
    x, y = pts[:, 0], pts[:, 1]
    if end == "axis":
        bad = (x < 0).any() or (x[:-1] <= 0).any() or (y[1:] <= 0).any()
    else:
        bad = (x <= 0).any() or (y[1:] <= 0).any()
    if bad:
        raise FlowInstability("node left the open quadrant")
    _, _, turn = curve_geometry(pts, end)
    if (turn < -tol).any():
        raise FlowInstability("discrete turning angle changed sign (convexity lost)")
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    if end == "axis" and (np.diff(ang) <= 0).any():
        raise FlowInstability("curve folded back (nodes out of angular order)")


def curve_dt_limit(pts, p, q, cfl=None):
    cfl = DEFAULTS.flow.cfl if cfl is None else cfl
    seg = np.diff(pts, axis=0)
    hmin = float(np.hypot(seg[:, 0], seg[:, 1]).min())
    return cfl * hmin * hmin / max(p, q)


def _advance(pts, p, q, end, dt, mode):
    new = pts + dt * normal_velocity(pts, p, q, end, mode)
    new[0, 1] = 0.0
    if end == "axis":
        new[-1, 0] = 0.0
    else:
        new[-1, 1] = pts[-1, 1]
    return new


def _step(curve, dt, mode):
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if dt == 0:
        return curve
    new = _advance(curve.points, curve.p, curve.q, curve.end, dt, mode)
    check_curve(new, curve.end)
    return curve.with_points(new)


def mcf_step_curve(curve: QuadrantCurve, dt) -> QuadrantCurve:
    """One explicit Euler step of MCF."""
    return _step(curve, dt, "MCF")


def rmcf_step_curve(curve: QuadrantCurve, dtau) -> QuadrantCurve:
    """One explicit Euler step of rescaled MCF."""
    return _step(curve, dtau, "RMCF")


# ---------------------------------------------------------------------------
# remeshing

def spacing_target(pts, end, h_base, theta_max=None, grading=0.3):
    """Graded node spacing ``min(h_base, theta_max / |kappa|)`` at every node."""
    theta_max = DEFAULTS.flow.theta_max if theta_max is None else theta_max
    kappa, _, _ = curve_geometry(pts, end)
    with np.errstate(divide="ignore"):
        h = np.minimum(h_base, theta_max / np.abs(kappa))
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    for i in range(1, len(h)):
        h[i] = min(h[i], h[i - 1] + grading * (s[i] - s[i - 1]))
    for i in range(len(h) - 2, -1, -1):
        h[i] = min(h[i], h[i + 1] + grading * (s[i + 1] - s[i]))
    return h, s


def needs_remesh(pts, end, h_base, band=None):
    band = DEFAULTS.flow.spacing_band if band is None else band
    h, _ = spacing_target(pts, end, h_base)
    seg = np.hypot(*np.diff(pts, axis=0).T)
    ratio = seg / (0.5 * (h[1:] + h[:-1]))
    return bool((ratio < band[0]).any() or (ratio > band[1]).any())


def remesh_curve(curve: QuadrantCurve, h_base, min_nodes=None) -> QuadrantCurve:
    """Redistribute nodes along the spline interpolant with the graded target spacing."""
    min_nodes = DEFAULTS.flow.min_nodes if min_nodes is None else min_nodes
    pts = curve.points
    h, s = spacing_target(pts, curve.end, h_base)
    rho = 1.0 / h
    phi = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(s))])
    m = max(min_nodes, int(np.ceil(phi[-1])))
    s_new = np.interp(np.linspace(0.0, phi[-1], m + 1), phi, s)
    spl, knots = curve.spline
    # chord-length knots coincide with s at the nodes
    u = np.interp(s_new, s, knots)
    new = spl(u)
    new[0] = (pts[0, 0], 0.0)
    if curve.end == "axis":
        new[-1] = (0.0, pts[-1, 1])
    else:
        new[-1] = pts[-1]
    new = np.maximum(new, 0.0)
    return curve.with_points(new, h=float(h_base))
