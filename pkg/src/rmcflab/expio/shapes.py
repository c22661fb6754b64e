"""JSON shape specifications <-> ConvexShape."""

from __future__ import annotations

from ..convexgeom.shapes import (Ball, ConvexShape, Cylinder, Ellipsoid, HalfSpace,
                                 QuadrantCurveShape, RadialProfileShape, Translated)
from ..profiles import load_snapshot
from ..solitons import FixedPointId, soliton_template


def build_shape(spec: dict) -> ConvexShape:
    """Construct a shape from a validated spec (see ``SHAPE_SCHEMA``)."""
    kind = spec["type"]
    if kind == "ball":
        center = spec.get("center")
        return Ball(float(spec["radius"]), int(spec["dim"]), None if center is None else tuple(center))
    if kind == "ellipsoid":
        return Ellipsoid(tuple(spec["alpha"]))
    if kind == "cylinder":
        return Cylinder(int(spec["flat"]), build_shape(spec["cross"]))
    if kind == "halfspace":
        return HalfSpace(tuple(spec["normal"]), float(spec.get("offset", 0.0)))
    if kind == "translated":
        return Translated(build_shape(spec["shape"]), tuple(spec["offset"]))
    if kind == "template":
        return soliton_template(FixedPointId(spec.get("k"), int(spec["n"])))
    if kind == "snapshot":
        with open(spec["path"], encoding="utf-8") as fh:
            state = load_snapshot(fh.read())
        return QuadrantCurveShape(state) if hasattr(state, "points") else RadialProfileShape(state)
    raise ValueError(f"unknown shape type {kind!r}")


def shape_spec(shape: ConvexShape) -> dict:
    """Inverse of ``build_shape`` for the analytic shapes."""
    if isinstance(shape, Ball):
        out = dict(type="ball", radius=shape.radius, dim=shape.ambient_dim)
        if shape.center is not None:
            out["center"] = list(shape.center)
        return out
    if isinstance(shape, Ellipsoid):
        return dict(type="ellipsoid", alpha=list(shape.alpha))
    if isinstance(shape, Cylinder):
        return dict(type="cylinder", flat=shape.flat_dims, cross=shape_spec(shape.cross))
    if isinstance(shape, HalfSpace):
        return dict(type="halfspace", normal=list(shape.normal), offset=shape.offset)
    if isinstance(shape, Translated):
        return dict(type="translated", shape=shape_spec(shape.shape), offset=list(shape.offset))
    raise TypeError(f"no spec for {type(shape).__name__}")
