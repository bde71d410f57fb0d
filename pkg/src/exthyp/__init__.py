"""Volumes of domains crossing the hyperbolic-space boundary.

The hyperbolic volume element in the Klein ball blows up at the unit sphere,
so a domain reaching past it has no classical volume.  This package assigns
it a finite complex value by three independent routes: deforming the radial
integration contour around the singularity, taking the limit of integrals
against a regularized density, and (where the integrand is absolutely
convergent) direct integration.  Divergent cases are classified instead of
summed.
"""

__version__ = "0.1.0"

from .contour import (
    Arc,
    Contour,
    DeformationCheck,
    Line,
    TrackedPower,
    build_contour,
    deformation_check,
    integrate_path,
    tracked_power_integrand,
)
from .densities import (
    DensityVariant,
    density,
    flattened_eps_denominator_roots,
    klein_eps_radial,
    klein_radial,
    lower_edge_power,
    poles_in_xn,
)
from .domains import (
    Ball3D,
    Box3D,
    Cone3D,
    HolderGraph2D,
    HolderGraph3D,
    Polygon2D,
    Sector2D,
    Wedge3D,
)
from .engine import (
    AdditivityCheck,
    InvarianceCheck,
    additivity_check,
    cone_reduced_volume,
    invariance_check,
    mu_contour,
    mu_direct,
    mu_eps,
    slice_integral,
    transform_domain,
)
from .errors import (
    ConfigError,
    ContourError,
    DimensionError,
    DomainError,
    ExtHypError,
    GeometryError,
    QuadratureError,
    SingularEvaluationError,
)
from .experiments import EXPERIMENTS, resolve_parameters, run_experiment
from .extrapolate import EpsSchedule, eps_limit, richardson_table, truncation_limit
from .geometry import (
    Isometry,
    IsometryKind,
    Model,
    ModelPoint,
    Region,
    apply_isometry,
    apply_isometry_coords,
    boost,
    cayley,
    cayley_coords,
    cayley_jacobian_factor,
    classify,
    lorentz_isometry,
    minkowski_inner,
    reflection_isometry,
    rotation,
)
from .profiles import (
    DivergenceProfile,
    ProfileClass,
    classify_increments,
    divergence_profile,
    log_reduced_integrand,
    profile_increments,
)
from .quadrature import QuadratureResult, integrate_batch, integrate_interval
from .reports import (
    Report,
    ReportRow,
    checked_row,
    complex_to_pair,
    emit_plot_data,
    flag_row,
    info_row,
    to_csv,
    to_json,
    window_row,
)

__all__ = [
    "__version__",
    # errors
    "ExtHypError", "ConfigError", "ContourError", "DimensionError",
    "DomainError", "GeometryError", "QuadratureError",
    "SingularEvaluationError",
    # geometry
    "Model", "Region", "ModelPoint", "minkowski_inner", "classify",
    "cayley", "cayley_coords", "cayley_jacobian_factor",
    "IsometryKind", "Isometry", "lorentz_isometry", "boost", "rotation",
    "reflection_isometry", "apply_isometry", "apply_isometry_coords",
    # quadrature
    "QuadratureResult", "integrate_interval", "integrate_batch",
    # contour
    "Line", "Arc", "Contour", "build_contour", "integrate_path",
    "TrackedPower", "tracked_power_integrand",
    "DeformationCheck", "deformation_check",
    # densities
    "DensityVariant", "lower_edge_power", "klein_radial", "klein_eps_radial",
    "density", "poles_in_xn", "flattened_eps_denominator_roots",
    # extrapolation
    "EpsSchedule", "richardson_table", "eps_limit", "truncation_limit",
    # domains
    "Sector2D", "Polygon2D", "Ball3D", "Box3D", "Wedge3D", "Cone3D",
    "HolderGraph2D", "HolderGraph3D",
    # engine
    "slice_integral", "mu_contour", "mu_eps", "mu_direct",
    "cone_reduced_volume", "transform_domain", "InvarianceCheck",
    "invariance_check", "AdditivityCheck", "additivity_check",
    # profiles
    "ProfileClass", "DivergenceProfile", "profile_increments",
    "classify_increments", "divergence_profile", "log_reduced_integrand",
    # reports and experiments
    "Report", "ReportRow", "checked_row", "window_row", "flag_row",
    "info_row", "complex_to_pair", "to_json", "to_csv", "emit_plot_data",
    "EXPERIMENTS", "resolve_parameters", "run_experiment",
]
