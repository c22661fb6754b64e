"""Rescaled mean curvature flow of convex bodies: geometry, solvers and orbit experiments."""

from . import convexgeom, dynamics, expio, flowcore, rescale, solitons
from .defaults import DEFAULTS
from .trace import OrbitTrace, TraceSample

__version__ = "0.1.0"

__all__ = ["convexgeom", "dynamics", "expio", "flowcore", "rescale", "solitons", "DEFAULTS",
           "OrbitTrace", "TraceSample"]
