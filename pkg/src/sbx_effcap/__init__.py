"""Effective capacity of the shadowed Beaulieu-Xie (SBX) fading channel."""

from .channel import (
    LinkBudget,
    SbxParams,
    derived_constants,
    moment1,
    moment2,
    normalization_c,
    pdf_envelope,
    pdf_snr,
    sample_snr,
    validate,
)
from .effcap import (
    DelaySpec,
    EcResult,
    LowSnrChar,
    certified_truncation_bound,
    ec_low_snr_approx,
    effective_capacity_exact,
    effective_capacity_high_snr,
    low_snr_characterization,
    series_term,
    truncation_bound,
)
from .errors import (
    DegenerateError,
    DomainError,
    InapplicableBoundError,
    NonConvergenceError,
    ParameterDomainError,
    SbxError,
)
from .oracle import McEstimate, ec_monte_carlo, ec_quadrature, ergodic_capacity_mc
from .specfun import DEFAULT_CONTROL, EvalControl

__version__ = "0.1.0"

__all__ = [
    "SbxParams", "LinkBudget", "DelaySpec", "EvalControl", "DEFAULT_CONTROL",
    "EcResult", "LowSnrChar", "McEstimate",
    "validate", "derived_constants", "normalization_c", "pdf_envelope", "pdf_snr",
    "moment1", "moment2", "sample_snr",
    "series_term", "truncation_bound", "certified_truncation_bound",
    "effective_capacity_exact", "effective_capacity_high_snr",
    "low_snr_characterization", "ec_low_snr_approx",
    "ec_quadrature", "ec_monte_carlo", "ergodic_capacity_mc",
    "SbxError", "DomainError", "ParameterDomainError", "NonConvergenceError",
    "InapplicableBoundError", "DegenerateError",
]
