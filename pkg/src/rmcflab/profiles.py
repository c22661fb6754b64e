"""Discretized generating curves of cohomogeneity-one hypersurfaces.

Two representations are used throughout the package:

``QuadrantCurve``
    a convex arc in the closed first quadrant from the x-axis to the y-axis.
    Rotating ``x`` by O(p) and ``y`` by O(q) sweeps out a hypersurface in
    R^{p+q}.  Node 0 lies on the x-axis, the last node on the y-axis.

``RadialProfile``
    a graph ``|x| = r(y)`` over a uniform y-grid, sweeping out an
    O(n) x O(1)-symmetric hypersurface in R^{n+1}.

Both are immutable value objects; steppers return new instances.  The text
snapshot format at the end of the module round-trips both bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

SNAPSHOT_MAGIC = "RMCFLAB-SNAP"
SNAPSHOT_VERSION = "v1"


class SnapshotFormatError(ValueError):
    pass


def _mirror_ghosts(pts, end, count):
    """Reflected neighbours used to close the curve smoothly at its ends."""
    count = min(count, len(pts) - 1)
    head = pts[1:count + 1][::-1] * np.array([1.0, -1.0])
    if end == "axis":
        tail = pts[-count - 1:-1][::-1] * np.array([-1.0, 1.0])
    else:
        top = pts[-1, 1]
        tail = pts[-count - 1:-1][::-1].copy()
        tail[:, 1] = 2.0 * top - tail[:, 1]
    return head, tail


@dataclass(frozen=True, eq=False)
class QuadrantCurve:
    """Generating curve of an O(p) x O(q)-symmetric convex body.

    ``end="mirror"`` marks a stub whose top node is a mirror line of the
    body (a cylinder-like continuation) instead of a point on the y-axis.
    """

    p: int
    q: int
    points: np.ndarray
    h: float
    end: str = "axis"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise ValueError("points must be an (N+1, 2) array with N >= 2")
        if self.p < 1 or self.q < 1:
            raise ValueError("ranks p, q must be >= 1")
        if self.end not in ("axis", "mirror"):
            raise ValueError(f"unknown end condition {self.end!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __repr__(self):
        return (f"QuadrantCurve(p={self.p}, q={self.q}, nodes={len(self.points)}, "
                f"h={self.h:.4g}, end={self.end!r})")

    @property
    def ambient_dim(self):
        return self.p + self.q

    @property
    def n(self):
        return self.p + self.q - 1

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def width(self):
        """Smaller of the two axis intercepts (the radius for stubs)."""
        if self.end == "mirror":
            return float(self.points[:, 0].min())
        return float(min(self.points[0, 0], self.points[-1, 1]))

    def segment_lengths(self):
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    def length(self):
        return float(self.segment_lengths().sum())

    def scaled(self, factor):
        return QuadrantCurve(self.p, self.q, self.points * factor, self.h * factor, self.end)

    def with_points(self, points, h=None):
        return QuadrantCurve(self.p, self.q, points, self.h if h is None else h, self.end)

    @cached_property
    def spline(self):
        """Chord-length cubic spline through the nodes and their mirror images."""
        head, tail = _mirror_ghosts(self.points, self.end, 3)
        ext = np.vstack([head, self.points, tail])
        u = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(ext, axis=0), axis=1))])
        u0 = u[len(head)]
        u = u - u0
        spl = CubicSpline(u, ext, axis=0)
        knots = u[len(head):len(head) + len(self.points)]
        return spl, knots

    def dense(self, per_segment=8):
        """Points sampled along the spline, ``per_segment`` per original segment."""
        spl, knots = self.spline
        t = np.linspace(0.0, 1.0, per_segment, endpoint=False)
        u = (knots[:-1, None] + t[None, :] * np.diff(knots)[:, None]).ravel()
        u = np.append(u, knots[-1])
        pts = spl(u)
        pts[0, 1] = 0.0
        if self.end == "axis":
            pts[-1, 0] = 0.0
        return np.maximum(pts, 0.0)

    def full_polygon(self, per_segment=8):
        """Closed polygon of the planar region swept by the four axis reflections."""
        if self.end != "axis":
            raise ValueError("mirror-ended stubs do not bound a compact region")
        q1 = self.dense(per_segment)
        q2 = q1[::-1] * np.array([-1.0, 1.0])
        q3 = q1 * np.array([-1.0, -1.0])
        q4 = q1[::-1] * np.array([1.0, -1.0])
        poly = np.vstack([q1, q2[1:], q3[1:], q4[1:-1]])
        return poly


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Graph ``|x| = r(y)`` of an O(n) x O(1)-symmetric hypersurface.

    ``tip`` is one of ``"capped"`` (r vanishes at two moving tips, nodes past
    a tip carry r = 0), ``"periodic"`` (y-periodic with period ``period``) or
    ``"clamped"`` (end values held fixed, body closed by flat end caps).
    """

    n: int
    y: np.ndarray
    r: np.ndarray
    tip: str = "capped"
    period: float | None = None
    tips: tuple | None = field(default=None)

    def __post_init__(self):
        y = np.array(self.y, dtype=float)
        r = np.array(self.r, dtype=float)
        if y.shape != r.shape or y.ndim != 1 or len(y) < 5:
            raise ValueError("y and r must be equal-length 1-D arrays (>= 5 nodes)")
        if self.tip not in ("capped", "periodic", "clamped"):
            raise ValueError(f"unknown tip flag {self.tip!r}")
        dy = np.diff(y)
        if not np.allclose(dy, dy[0], rtol=1e-9, atol=0):
            raise ValueError("y-grid must be uniform")
        if self.tip == "periodic" and self.period is None:
            object.__setattr__(self, "period", float(dy[0] * len(y)))
        if np.any(r < 0):
            raise ValueError("radii must be nonnegative")
        y.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "r", r)
        if self.tip == "capped" and self.tips is None:
            object.__setattr__(self, "tips", _tip_positions(y, r))

    def __repr__(self):
        return (f"RadialProfile(n={self.n}, nodes={len(self.y)}, "
                f"y=[{self.y[0]:.4g}, {self.y[-1]:.4g}], tip={self.tip!r})")

    @property
    def dy(self):
        return float(self.y[1] - self.y[0])

    @property
    def ambient_dim(self):
        return self.n + 1

    def active(self):
        return self.r > 0

    def min_radius(self):
        act = self.r[self.active()]
        return float(act.min()) if act.size else 0.0

    def scaled(self, factor):
        tips = None if self.tips is None else (self.tips[0] * factor, self.tips[1] * factor)
        period = None if self.period is None else self.period * factor
        return RadialProfile(self.n, self.y * factor, self.r * factor, self.tip, period, tips)

    def is_even(self, tol=0.0):
        return bool(np.allclose(self.r, self.r[::-1], rtol=0, atol=tol)
                    and np.allclose(self.y, -self.y[::-1], rtol=0, atol=1e-12 * np.abs(self.y).max()))

    def meridian(self):
        """Boundary curve ``(rho, y)`` with rho >= 0, ordered by increasing y."""
        if self.tip == "periodic":
            raise ValueError("periodic profiles have no closed meridian")
        act = self.active()
        pts = np.column_stack([self.r[act], self.y[act]])
        if self.tip == "capped":
            lo, hi = self.tips
        else:
            lo, hi = self.y[0], self.y[-1]
        return np.vstack([[0.0, lo], pts, [0.0, hi]])


def _tip_positions(y, r):
    act = np.nonzero(r > 0)[0]
    if act.size == 0:
        return (0.0, 0.0)
    dy = y[1] - y[0]
    i0, i1 = act[0], act[-1]
    lo = y[i0] - dy if i0 > 0 else y[0]
    hi = y[i1] + dy if i1 < len(y) - 1 else y[-1]
    return (float(lo), float(hi))


# ---------------------------------------------------------------------------
# snapshot text format

def _fmt(v):
    return format(float(v), ".17g")


def _kind_token(base, **attrs):
    parts = [base] + [f"{k}={v}" for k, v in attrs.items() if v is not None]
    return ";".join(parts)


def dump_snapshot(obj) -> str:
    """Serialize a QuadrantCurve or RadialProfile to the versioned text block."""
    if isinstance(obj, QuadrantCurve):
        kind = _kind_token("quadrant", end=obj.end, h=_fmt(obj.h))
        dims = f"{obj.p},{obj.q}"
        rows = obj.points
    elif isinstance(obj, RadialProfile):
        tips = None if obj.tips is None else f"{_fmt(obj.tips[0])},{_fmt(obj.tips[1])}"
        period = None if obj.period is None else _fmt(obj.period)
        kind = _kind_token("radial", tip=obj.tip, period=period, tips=tips)
        dims = str(obj.n)
        rows = np.column_stack([obj.y, obj.r])
    else:
        raise TypeError(f"cannot snapshot {type(obj).__name__}")
    lines = [f"{SNAPSHOT_MAGIC} {SNAPSHOT_VERSION} {kind} {dims} {len(rows)}"]
    lines += [f"{_fmt(a)} {_fmt(b)}" for a, b in rows]
    return "\n".join(lines) + "\n"


def load_snapshot(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SnapshotFormatError("empty snapshot")
    head = lines[0].split()
    if len(head) != 5 or head[0] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"bad header: {lines[0]!r}")
    if head[1] != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {head[1]}")
    base, *attr_parts = head[2].split(";")
    attrs = dict(a.split("=", 1) for a in attr_parts)
    count = int(head[4])
    body = lines[1:]
    if len(body) != count:
        raise SnapshotFormatError(f"expected {count} samples, found {len(body)}")
    rows = np.array([[float(v) for v in ln.split()] for ln in body])
    if base == "quadrant":
        p, q = (int(v) for v in head[3].split(","))
        return QuadrantCurve(p, q, rows, float(attrs["h"]), attrs.get("end", "axis"))
    if base == "radial":
        tips = attrs.get("tips")
        if tips is not None:
            tips = tuple(float(v) for v in tips.split(","))
        period = float(attrs["period"]) if "period" in attrs else None
        return RadialProfile(int(head[3]), rows[:, 0], rows[:, 1], attrs.get("tip", "capped"),
                             period, tips)
    raise SnapshotFormatError(f"unknown snapshot kind {base!r}")
