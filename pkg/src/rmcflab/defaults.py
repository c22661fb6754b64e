"""Single table of default numerical settings.

Every tolerance used by the library and by the acceptance runs is defined
here so that a run is reproducible from the repository alone.
"""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class QuadratureDefaults:
    panel_width: float = 0.25
    nodes_per_panel: int = 8
    truncation_tol: float = 1e-12
    # dense spline samples per segment when integrating along discretized curves
    curve_gauss_nodes: int = 4


@dataclass(frozen=True)
class GeometryDefaults:
    rho_tol: float = 1e-6
    rho_radius_cap: float = 1e4
    rho_directions: int = 256
    hausdorff_directions: int = 512
    contains_tol: float = 1e-9
    boundary_samples: int = 2000


@dataclass(frozen=True)
class FlowDefaults:
    # target spacing relative to the current width of the curve
    resolution: float = 0.02
    cfl: float = 0.4
    # maximal turning angle per segment (curvature-limited spacing)
    theta_max: float = 0.1
    remesh_every: int = 20
    spacing_band: tuple = (0.5, 2.0)
    min_nodes: int = 16
    near_extinct_factor: float = 10.0
    # extinction runs stop once the width fell below this fraction of the initial
    # width and the in/circumscribed-ball bracket on the remaining time is
    # narrower than extinction_bracket * t
    extinction_ratio: float = 0.05
    extinction_bracket: float = 1e-6
    hard_extinction_ratio: float = 1e-4
    convexity_tol: float = 1e-7
    dt_growth: float = 1.2
    max_rejections: int = 30
    max_steps: int = 5_000_000
    radial_slope_max: float = 2.0


@dataclass(frozen=True)
class RescaleDefaults:
    tol: float = 1e-3
    resolutions: tuple = (0.04, 0.02)
    max_levels: int = 3


@dataclass(frozen=True)
class DynamicsDefaults:
    classify_hausdorff_rel: float = 1e-2
    classify_energy: float = 5e-3
    plateau_band: float = 1e-2
    plateau_min_length: float = 0.5
    # uphill energy change tolerated between consecutive samples
    energy_tol: float = 2e-6
    mass_slack: float = 1e-6
    sample_dtau: float = 0.05
    orbit_margin: float = 3.0
    tau_end: float = 12.0
    # cap on rescaled time for edge runs; long cigars stay near Sigma^1 for ~ 1/alpha^2
    edge_tau_max: float = 1000.0
    # step count grows linearly in rescaled time, so edge runs need a larger budget
    edge_max_steps: int = 100_000_000


@dataclass(frozen=True)
class SolitonDefaults:
    expander_rtol: float = 1e-11
    expander_atol: float = 1e-10
    expander_eta_max: float = 50.0
    expander_residual_tol: float = 1e-8
    richardson_gate: float = 1e-4


@dataclass(frozen=True)
class Defaults:
    quadrature: QuadratureDefaults = field(default_factory=QuadratureDefaults)
    geometry: GeometryDefaults = field(default_factory=GeometryDefaults)
    flow: FlowDefaults = field(default_factory=FlowDefaults)
    rescale: RescaleDefaults = field(default_factory=RescaleDefaults)
    dynamics: DynamicsDefaults = field(default_factory=DynamicsDefaults)
    solitons: SolitonDefaults = field(default_factory=SolitonDefaults)


DEFAULTS = Defaults()
