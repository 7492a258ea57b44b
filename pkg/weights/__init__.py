"""
weights package

KL utilities of clues per hypothesis, expected and empirical utility of a
weight matrix, and the optimal-weight rules.
"""

from weights.optimizer import (
    consistency_envelope,
    optimal_constant_weights,
    optimal_weights,
    tie_sets,
)
from weights.utility import (
    UtilityMatrix,
    dataset_scl_log,
    empirical_utility,
    expected_utility,
    oracle_utility_matrix,
    utility_matrix,
)

__all__ = [
    "UtilityMatrix",
    "consistency_envelope",
    "dataset_scl_log",
    "empirical_utility",
    "expected_utility",
    "optimal_constant_weights",
    "optimal_weights",
    "oracle_utility_matrix",
    "tie_sets",
    "utility_matrix",
]
