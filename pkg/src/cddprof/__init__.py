"""Isoperimetric, concentration and functional-inequality profiles for CD(rho, N),
including generalized dimensions N < 1."""

from .errors import CddError, DIVERGENT_CODES
from .numerics import Bracket, CumulativeTable, Endpoint, Quadrature, find_root, integrate
from .model_density import (
    CDParams,
    ModelDensity,
    SupportRoots,
    cd1d_residual,
    critical_point,
    eval_J,
    integrability,
    log_J,
    named_density,
    support_roots,
)
from .profile1d import (
    ProfileCurve,
    TabulatedDensity,
    WeightedDensity1D,
    brute_force_flat,
    brute_force_interval_profile,
    concentration_from_profile,
    flat_profile,
    normalize,
    quantile,
)
from .cdd_profiles import (
    DiameterSplit,
    case_model_profile,
    case_models,
    equal_value_H,
    equality_range,
    finite_mass_exists,
    flat_cdd_profile,
    gl_profile,
    half_masses,
    profile_curve,
    profile_equality_check,
)
from .functionals import (
    CHEEGER_C,
    SANDWICH_C,
    TWO_LEVEL_C,
    CheegerReport,
    ConcentrationCurve,
    ball_certificate,
    cheeger_N,
    cheeger_lower_bound,
    concentration_to_cheeger,
    cosh_estimates,
    cosh_integral,
    cosh_model_cheeger,
    cosh_model_concentration,
    cosh_model_density,
    fm_bound,
    lorentz_norm,
    nash_constant,
    poincare_bounds,
    poly_concentration,
    profile_curve_of,
    sobolev_constants,
    sobolev_transfer,
    stability_w1,
    two_level_bound,
    two_level_constant,
)
from .comparison import (
    JacobianSample,
    cauchy_schwarz_split,
    jac_cd_check,
    jac_cd_residuals,
    model_sample,
    sturm_compare,
)

__version__ = "0.1.0"
