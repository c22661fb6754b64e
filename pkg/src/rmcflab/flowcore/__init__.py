"""Explicit MCF/RMCF integrators for cohomogeneity-one convex hypersurfaces."""

from .curve import (check_curve, curve_dt_limit, curve_geometry, mcf_step_curve, mean_curvature,
                    needs_remesh, normal_velocity, remesh_curve, rmcf_step_curve)
from .errors import DomainError, FlowError, FlowInstability, NearExtinction
from .exact import (cylinder_profile, ellipse_arc, ellipsoid_profile, quarter_circle,
                    sphere_extinction, sphere_profile, sphere_radius, vertical_stub)
from .radial import check_profile, mcf_step_radial, radial_dt_limit, radial_rhs, rmcf_step_radial
from .runner import (CurveIntegrator, RadialIntegrator, SolverOptions, compact_dim, extinction_run,
                     make_integrator, measure, run_flow, state_shape, to_flow_state,
                     with_resolution)

__all__ = [
    "check_curve", "curve_dt_limit", "curve_geometry", "mcf_step_curve", "mean_curvature",
    "needs_remesh", "normal_velocity", "remesh_curve", "rmcf_step_curve",
    "DomainError", "FlowError", "FlowInstability", "NearExtinction",
    "cylinder_profile", "ellipse_arc", "ellipsoid_profile", "quarter_circle", "sphere_extinction",
    "sphere_profile", "sphere_radius", "vertical_stub",
    "check_profile", "mcf_step_radial", "radial_dt_limit", "radial_rhs", "rmcf_step_radial",
    "CurveIntegrator", "RadialIntegrator", "SolverOptions", "compact_dim", "extinction_run",
    "make_integrator", "measure", "run_flow", "state_shape", "to_flow_state", "with_resolution",
]
