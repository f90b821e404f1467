"""Helicoidal CMC surfaces in the Bianchi-Cartan-Vranceanu spaces.

Construct the two-parameter isometry family of helicoidal surfaces sharing a
metric profile U(u), solve for the profiles of constant mean curvature, and
verify everything against an independent extrinsic-curvature oracle.
"""

from .errors import (
    BcvHelixError,
    ConfigError,
    DegenerateFamily,
    DegenerateImmersion,
    DegenerateOrbit,
    DegenerateRadius,
    DomainError,
    EmptyDomain,
    InconsistentCurve,
    NegativeDiscriminant,
    NegativeRadicand,
    NoBracket,
    NoRealFamily,
    ParameterOutOfRange,
    QuadratureFailure,
    StencilOutOfDomain,
)
from .numerics import (
    DEFAULT_TOL,
    CumulativeQuadrature,
    QuadResult,
    SmoothFunction,
    Tolerances,
    bracket_root,
    diff_central,
    quad_adaptive,
)
from .spaces import (
    AmbientPoint,
    BcvSpace,
    CylPoint,
    SpaceClass,
    christoffels,
    classify,
    killing_basis,
    killing_residual,
    metric_cartesian,
    metric_cylindrical,
    orthonormal_frame,
    scaling_factor,
)
from .orbit import (
    HelicoidalAction,
    ProfileCurve,
    arclength_residual,
    geodesic_curvature,
    induced_metric,
    mean_curvature_reduced,
    normal_derivative_log_omega,
    orbital_metric,
    sigma_angle,
    volume_omega,
)
from .bour import (
    BourSeed,
    NaturalChart,
    build_chart,
    delta,
    domain_of_validity,
    natural_from_helicoidal,
    rotation_chart,
    theta0_integrand,
    xi1_from_seed,
    xi2_integrand,
)
from .cmc import (
    CmcCase,
    CmcConstants,
    cmc_U,
    cmc_constants,
    cmc_residual,
    first_integral_check,
    minimal_U,
    select_case,
    sqrt_delta_ode_residual,
    z_ode_residual,
)
from .oracle import (
    MeshGrid,
    SurfaceChart,
    embed,
    first_form_numeric,
    gauss_intrinsic,
    gauss_numeric,
    isometry_deviation,
    mean_curvature_extrinsic,
    sample_mesh,
)

__version__ = "0.1.0"
