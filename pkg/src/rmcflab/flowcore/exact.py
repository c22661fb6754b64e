"""Exact solutions and discretized templates used as oracles."""

from __future__ import annotations

import math

import numpy as np

from ..profiles import QuadrantCurve, RadialProfile


def sphere_radius(R0, n, t):
    """Radius at time t of the MCF of a round n-sphere of initial radius R0."""
    return math.sqrt(max(R0 * R0 - 2.0 * n * t, 0.0))


def sphere_extinction(R0, n):
    return R0 * R0 / (2.0 * n)


def quarter_circle(p, q, R, h=None, nodes=None):
    """Uniform polygon inscribed in the quarter circle of radius R."""
    if nodes is None:
        nodes = max(8, int(math.ceil(0.5 * math.pi * R / h)))
    th = np.linspace(0.0, 0.5 * math.pi, nodes + 1)
    pts = np.column_stack([R * np.cos(th), R * np.sin(th)])
    pts[-1, 0] = 0.0
    spacing = 2.0 * R * math.sin(0.25 * math.pi / nodes)
    return QuadrantCurve(p, q, pts, spacing)


def vertical_stub(p, r0, top=1.0, nodes=20, q=1):
    """Mirror-ended segment ``x = r0``, the generating curve of S^{p-1} x R^q."""
    y = np.linspace(0.0, top, nodes + 1)
    return QuadrantCurve(p, q, np.column_stack([np.full_like(y, r0), y]), top / nodes, end="mirror")


def ellipse_arc(p, q, A, B, count=4001):
    """Dense uniform-angle samples of the quarter ellipse with semi-axes A (x) and B (y)."""
    th = np.linspace(0.0, 0.5 * math.pi, count)
    pts = np.column_stack([A * np.cos(th), B * np.sin(th)])
    pts[-1, 0] = 0.0
    pts[0, 1] = 0.0
    return QuadrantCurve(p, q, pts, float(np.hypot(*np.diff(pts, axis=0).T).max()))


def sphere_profile(n, R, dy=None, nodes=None, margin=1.2):
    """Capped radial profile of the round sphere of radius R on a symmetric grid."""
    Y = margin * R
    if nodes is None:
        nodes = 2 * int(math.ceil(Y / dy)) + 1
    y = np.linspace(-Y, Y, nodes)
    r = np.sqrt(np.maximum(R * R - y * y, 0.0))
    return RadialProfile(n, y, r, "capped", tips=(-R, R))


def cylinder_profile(n, r0, period=2.0, nodes=41):
    y = np.linspace(-0.5 * period, 0.5 * period, nodes, endpoint=False)
    return RadialProfile(n, y, np.full(nodes, float(r0)), "periodic", period)


def ellipsoid_profile(n, a, b, dy=None, nodes=None, margin=1.2):
    """Capped profile of the O(n) x O(1) ellipsoid with radial semi-axis a and axial semi-axis b."""
    Y = margin * b
    if nodes is None:
        nodes = 2 * int(math.ceil(Y / dy)) + 1
    y = np.linspace(-Y, Y, nodes)
    r = a * np.sqrt(np.maximum(1.0 - (y / b) ** 2, 0.0))
    return RadialProfile(n, y, r, "capped", tips=(-b, b))
