"""
nuisance package

Nuisance parameters on a finite grid: composite evidence, super composite
evidence, their posteriors and nuisance-averaged weight optimization.
"""

from core.types import NuisancePrior
from nuisance.evidence import (
    composite_evidence_log,
    composite_evidence_posterior,
    naive_bayes_evidence_posterior,
    nuisance_posterior,
    super_composite_evidence_log,
    super_composite_evidence_vector,
)
from nuisance.optimizer import (
    nuisance_utility_from_models,
    nuisance_utility_matrix,
    optimize_weights_nuisance,
)

__all__ = [
    "NuisancePrior",
    "composite_evidence_log",
    "composite_evidence_posterior",
    "naive_bayes_evidence_posterior",
    "nuisance_posterior",
    "nuisance_utility_from_models",
    "nuisance_utility_matrix",
    "optimize_weights_nuisance",
    "super_composite_evidence_log",
    "super_composite_evidence_vector",
]
