"""
pool package

Standard composite likelihood as a log-linear opinion pool and its
Bayes-rule posterior.
"""

from pool.composite import (
    agent_posteriors,
    average_kl_objective,
    check_prior,
    check_weights,
    composite_log_likelihood,
    feature_log_likelihood,
    feature_log_likelihood_matrix,
    log_linear_pool,
    naive_bayes_posterior,
    pool_opinions,
)
from pool.minimizer import AverageKLMinimizer
from pool.observation import CluesObservation

__all__ = [
    "AverageKLMinimizer",
    "CluesObservation",
    "agent_posteriors",
    "average_kl_objective",
    "check_prior",
    "check_weights",
    "composite_log_likelihood",
    "feature_log_likelihood",
    "feature_log_likelihood_matrix",
    "log_linear_pool",
    "naive_bayes_posterior",
    "pool_opinions",
]
