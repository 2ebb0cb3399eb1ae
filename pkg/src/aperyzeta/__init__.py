"""Apery-like series for odd zeta values, with exact identity checks and relation search."""

from .exceptions import (
    AperyZetaError,
    ConjectureViolation,
    DivergenceError,
    NonConvergenceError,
    NonTerminatingError,
    PoleError,
    PrecisionError,
    QuadratureError,
)
from .precision import GaussianRational, HPComplex, HPReal, zeta_reference
from .series import LambdaSpec, TruncationPlan, lambda_sum, zeta_fast

__version__ = "0.1.0"

__all__ = [
    "AperyZetaError",
    "ConjectureViolation",
    "DivergenceError",
    "NonConvergenceError",
    "NonTerminatingError",
    "PoleError",
    "PrecisionError",
    "QuadratureError",
    "GaussianRational",
    "HPComplex",
    "HPReal",
    "zeta_reference",
    "LambdaSpec",
    "TruncationPlan",
    "lambda_sum",
    "zeta_fast",
]
