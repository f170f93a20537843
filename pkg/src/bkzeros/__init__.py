"""bkzeros: exact eigenpolynomials of admissible differential operators and
certified numerics for the asymptotic distribution of their zeros."""

from .classical import (
    BadParameters,
    Family,
    InsufficientMoments,
    MomentFunctional,
    NotPositiveDefinite,
    RecurrenceOPS,
    bochner_operator,
    classical_monic,
    example_operator_path,
    gram_schmidt_ops,
    hankel_determinant,
    inner_product,
    parse_family,
    verify_bks,
)
from .measures import (
    ArcsineLaw,
    LeadingDegreeTooLow,
    NonRealAtoms,
    ProbeTooCloseToRoot,
    RootMeasure,
    arcsine_cdf,
    cdf_overlay_csv,
    empirical_cauchy,
    growth_exponent,
    ks_distance,
    ks_two_sample,
    moment,
    rescale,
    root_measure,
    cauchy_power_residual,
)
from .operator import (
    AdmissibilityReport,
    DegenerateSpectrum,
    DiffOperator,
    EigenResult,
    InadmissibleOperator,
    apply,
    eigenpolynomial,
    eigenpolynomial_info,
    eigenvalue,
    validate,
)
from .polycore import Poly, Rat, falling_factorial, format_rational, parse_rational
from .roots import (
    DEFAULT_PRECISION_CEILING,
    PRECISION_CEILING_ENV,
    NoConvergence,
    RootSet,
    find_roots,
    max_radius,
    realness,
)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityReport",
    "ArcsineLaw",
    "BadParameters",
    "DegenerateSpectrum",
    "DiffOperator",
    "EigenResult",
    "Family",
    "InadmissibleOperator",
    "InsufficientMoments",
    "LeadingDegreeTooLow",
    "MomentFunctional",
    "NoConvergence",
    "DEFAULT_PRECISION_CEILING",
    "PRECISION_CEILING_ENV",
    "NonRealAtoms",
    "NotPositiveDefinite",
    "Poly",
    "ProbeTooCloseToRoot",
    "Rat",
    "RecurrenceOPS",
    "RootMeasure",
    "RootSet",
    "apply",
    "arcsine_cdf",
    "bochner_operator",
    "cdf_overlay_csv",
    "classical_monic",
    "eigenpolynomial",
    "eigenpolynomial_info",
    "eigenvalue",
    "empirical_cauchy",
    "example_operator_path",
    "falling_factorial",
    "find_roots",
    "format_rational",
    "gram_schmidt_ops",
    "growth_exponent",
    "hankel_determinant",
    "inner_product",
    "ks_distance",
    "ks_two_sample",
    "max_radius",
    "moment",
    "parse_family",
    "parse_rational",
    "realness",
    "rescale",
    "root_measure",
    "cauchy_power_residual",
    "validate",
    "verify_bks",
]
