"""Numerical toolkit for Laguerre expansions, their multipliers and square functions."""

from .errors import (
    AccuracyError,
    ConvergenceError,
    DomainError,
    InvalidParamsError,
    QuadratureError,
    TruncationError,
)
from .expansion import (
    Expansion,
    MultiplierSpaceParams,
    analyze,
    apply_multiplier,
    projection_formula_check,
    space_arithmetic,
    synthesize,
    transplant,
)
from .probe import ExperimentReport, ProbeConfig, operator_norm_lower_bound
from .quadrature import DecayCertificate, NormSpec, QuadRule, gauss_laguerre_rule, hardy_check, weighted_norm
from .semigroup import PoissonState, g_lambda_star, g_sigma, poisson_kernel, poisson_means, twisted_convolve
from .sequences import MultiplierSeq, WbvSpec, cesaro_seq, frac_diff, wbv_norm
from .special import SystemTag, bessel_normalized, binom_A, laguerre_fn, laguerre_poly

__all__ = [
    "AccuracyError",
    "analyze",
    "apply_multiplier",
    "bessel_normalized",
    "binom_A",
    "cesaro_seq",
    "ConvergenceError",
    "DecayCertificate",
    "DomainError",
    "Expansion",
    "ExperimentReport",
    "frac_diff",
    "g_lambda_star",
    "g_sigma",
    "gauss_laguerre_rule",
    "hardy_check",
    "InvalidParamsError",
    "laguerre_fn",
    "laguerre_poly",
    "MultiplierSeq",
    "MultiplierSpaceParams",
    "NormSpec",
    "operator_norm_lower_bound",
    "poisson_kernel",
    "poisson_means",
    "PoissonState",
    "ProbeConfig",
    "projection_formula_check",
    "QuadratureError",
    "QuadRule",
    "space_arithmetic",
    "synthesize",
    "SystemTag",
    "transplant",
    "TruncationError",
    "twisted_convolve",
    "wbv_norm",
    "WbvSpec",
    "weighted_norm",
]

__version__ = "0.1.0"
