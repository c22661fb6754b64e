"""Closed convex sets, their metrics, and Gaussian-weighted functionals."""

from .geometry import (RhoSearchError, boundary_samples, contains, distance_to_set, epsilon_core,
                       hausdorff_distance, rho_metric, set_gap)
from .measures import (SQRT_4PI, HuiskenQuadratureSpec, QuadratureError, gaussian_mass,
                       huisken_energy, inradius_circumradius, sphere_area, tail_bound,
                       tail_constant, truncation_radius)
from .shapes import (Ball, ConvexShape, Cylinder, Ellipsoid, FlatDisk, FullSpace, HalfSpace,
                     QuadrantCurveShape, RadialProfileShape, Translated, meridian_dense)

__all__ = [
    "Ball", "ConvexShape", "Cylinder", "Ellipsoid", "FlatDisk", "FullSpace", "HalfSpace",
    "QuadrantCurveShape", "RadialProfileShape", "Translated", "meridian_dense",
    "RhoSearchError", "boundary_samples", "contains", "distance_to_set", "epsilon_core",
    "hausdorff_distance", "rho_metric", "set_gap",
    "SQRT_4PI", "HuiskenQuadratureSpec", "QuadratureError", "gaussian_mass", "huisken_energy",
    "inradius_circumradius", "sphere_area", "tail_bound", "tail_constant", "truncation_radius",
]
