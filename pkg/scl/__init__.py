"""
scl package

Super composite likelihood: hypothesis-dependent clue weights relative to
a reference hypothesis, its posterior, the PDF-projection special case and
the population-code constructions behind it.
"""

from scl.population import (
    PopulationCode,
    code_marginals,
    factorization_gap,
    population_code_posterior,
    scl_code_joint,
    scl_posterior_by_code,
)
from scl.super_composite import (
    check_weight_matrix,
    column_log_ratios,
    pdf_projection_matrix,
    posterior_from_log_odds,
    scl_log,
    scl_log_vector,
    scl_posterior,
    scl_posterior_prior_folded,
)

__all__ = [
    "PopulationCode",
    "check_weight_matrix",
    "code_marginals",
    "column_log_ratios",
    "factorization_gap",
    "pdf_projection_matrix",
    "population_code_posterior",
    "posterior_from_log_odds",
    "scl_code_joint",
    "scl_log",
    "scl_log_vector",
    "scl_posterior",
    "scl_posterior_by_code",
    "scl_posterior_prior_folded",
]
