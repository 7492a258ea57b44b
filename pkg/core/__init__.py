"""
core package

Foundational types and numerics: hypothesis spaces, finite distributions,
log-domain arithmetic, KL divergence and simplex validation.
"""

from core.numerics import (
    INPUT_SIMPLEX_TOL,
    OUTPUT_SIMPLEX_TOL,
    TIE_TOL,
    log_normalizer,
    safe_log,
    validate_simplex,
    weighted_log_sum,
)
from core.operations import kl_divergence, normalize_log
from core.types import (
    FeatureModel,
    FiniteDistribution,
    HypothesisSpace,
    NuisancePrior,
    WeightMatrix,
)

__all__ = [
    "FeatureModel",
    "FiniteDistribution",
    "HypothesisSpace",
    "NuisancePrior",
    "WeightMatrix",
    "INPUT_SIMPLEX_TOL",
    "OUTPUT_SIMPLEX_TOL",
    "TIE_TOL",
    "kl_divergence",
    "log_normalizer",
    "normalize_log",
    "safe_log",
    "validate_simplex",
    "weighted_log_sum",
]
