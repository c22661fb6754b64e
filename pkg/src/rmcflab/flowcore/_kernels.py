"""Compiled inner loop of the quadrant-curve integrator.

Mirrors ``curve.normal_velocity`` + ``curve.check_curve`` node by node; the
numpy versions remain the reference implementation and are tested against it.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _node(pts, i, mirror):
    n1 = pts.shape[0]
    bx, by = pts[i, 0], pts[i, 1]
    if i == 0:
        ax, ay = pts[1, 0], -pts[1, 1]
    else:
        ax, ay = pts[i - 1, 0], pts[i - 1, 1]
    if i == n1 - 1:
        if mirror:
            cx, cy = pts[n1 - 2, 0], 2.0 * pts[n1 - 1, 1] - pts[n1 - 2, 1]
        else:
            cx, cy = -pts[n1 - 2, 0], pts[n1 - 2, 1]
    else:
        cx, cy = pts[i + 1, 0], pts[i + 1, 1]
    d1x, d1y = bx - ax, by - ay
    d2x, d2y = cx - bx, cy - by
    l1 = math.hypot(d1x, d1y)
    l2 = math.hypot(d2x, d2y)
    l3 = math.hypot(cx - ax, cy - ay)
    cross = d1x * d2y - d1y * d2x
    kappa = 2.0 * cross / (l1 * l2 * l3)
    tx = d1x * (l2 / l1) + d2x * (l1 / l2)
    ty = d1y * (l2 / l1) + d2y * (l1 / l2)
    tn = math.hypot(tx, ty)
    return kappa, ty / tn, -tx / tn, cross / (l1 * l2)


@njit(cache=True)
def advance(pts, p, q, mirror, dt, rescaled, out):
    n1 = pts.shape[0]
    for i in range(n1):
        kappa, nx, ny, _ = _node(pts, i, mirror)
        x, y = pts[i, 0], pts[i, 1]
        if i == 0:
            nx, ny = 1.0, 0.0
        elif i == n1 - 1:
            if mirror:
                nx, ny = 1.0, 0.0
            else:
                nx, ny = 0.0, 1.0
        H = kappa
        if p > 1:
            if i == n1 - 1 and not mirror:
                H += (p - 1) * kappa
            else:
                H += (p - 1) * nx / x
        if q > 1:
            if i == 0:
                H += (q - 1) * kappa
            else:
                H += (q - 1) * ny / y
        V = -H
        if rescaled:
            V += 0.5 * (x * nx + y * ny)
        out[i, 0] = x + dt * V * nx
        out[i, 1] = y + dt * V * ny
    out[0, 1] = 0.0
    if mirror:
        out[n1 - 1, 1] = pts[n1 - 1, 1]
    else:
        out[n1 - 1, 0] = 0.0


@njit(cache=True)
def valid(pts, mirror, tol):
    n1 = pts.shape[0]
    for i in range(n1):
        x, y = pts[i, 0], pts[i, 1]
        if not (math.isfinite(x) and math.isfinite(y)):
            return False
        if mirror:
            if x <= 0.0:
                return False
        else:
            if x < 0.0 or (i < n1 - 1 and x <= 0.0):
                return False
        if i > 0 and y <= 0.0:
            return False
    for i in range(n1):
        _, _, _, turn = _node(pts, i, mirror)
        if turn < -tol:
            return False
        # nodes must advance counterclockwise around the origin
        if not mirror and i > 0:
            if pts[i - 1, 0] * pts[i, 1] - pts[i - 1, 1] * pts[i, 0] <= 0.0:
                return False
    return True


@njit(cache=True)
def min_segment(pts):
    h = np.inf
    for i in range(pts.shape[0] - 1):
        h = min(h, math.hypot(pts[i + 1, 0] - pts[i, 0], pts[i + 1, 1] - pts[i, 1]))
    return h


@njit(cache=True)
def multi_step(pts, p, q, mirror, rescaled, cfl, growth, dt_prev, dt_max, remaining, nsteps,
               max_rejections, tol, clock):
    """Up to ``nsteps`` adaptive Euler steps, stopping exactly at ``remaining``.

    ``clock`` is the (value, compensation) pair of a Kahan sum, updated in place.
    Returns ``(pts, dt_prev, steps, advanced, status)`` with status 0 on
    success and -1 after ``max_rejections`` consecutive rejections.
    """
    cur = pts.copy()
    new = np.empty_like(pts)
    scale = max(p, q)
    steps = 0
    advanced = 0.0
    rejections = 0
    finite = not math.isinf(remaining)
    while steps < nsteps and (not finite or remaining - advanced > 1e-15 * remaining):
        h = min_segment(cur)
        cap = min(cfl * h * h / scale, dt_max)
        dt = cap if dt_prev <= 0.0 else min(dt_prev * growth, cap)
        left = remaining - advanced
        clipped = left < dt
        if clipped:
            dt = left
        while True:
            advance(cur, p, q, mirror, dt, rescaled, new)
            if valid(new, mirror, tol):
                break
            dt *= 0.5
            clipped = False
            rejections += 1
            if rejections > max_rejections:
                return cur, dt_prev, steps, advanced, -1
        rejections = 0
        cur, new = new, cur
        if clipped:
            advanced = remaining
        else:
            advanced += dt
            dt_prev = dt
        y = dt - clock[1]
        s = clock[0] + y
        clock[1] = (s - clock[0]) - y
        clock[0] = s
        steps += 1
    return cur, dt_prev, steps, advanced, 0
