"""
composite.py

Composite likelihood as a log-linear opinion pool.

Every clue acts as an agent holding the posterior pi(theta) l_i(theta);
the pool multiplies their opinions raised to unit-sum weights.
"""

from typing import List, Optional, Sequence

import numpy as np

from core.errors import (
    AlphabetMismatchError,
    InvalidWeightsError,
    WeightDimensionMismatchError,
)
from core.numerics import INPUT_SIMPLEX_TOL, validate_simplex, weighted_log_sum
from core.operations import kl_divergence, normalize_log
from core.types import FeatureModel, FiniteDistribution
from pool.observation import CluesObservation


def check_weights(w: Sequence[float], n: int) -> np.ndarray:
    """Validate a clue weight vector against the feature count and the simplex."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.shape != (n,):
        raise WeightDimensionMismatchError(f"Expected {n} weights, got {arr.shape}")
    if not validate_simplex(arr, INPUT_SIMPLEX_TOL):
        raise InvalidWeightsError(f"Weights are not on the simplex: {arr.tolist()}")
    return arr


def check_prior(prior: FiniteDistribution, models: Sequence[FeatureModel]) -> None:
    for model in models:
        if model.hypothesis_space.labels != prior.alphabet:
            raise AlphabetMismatchError(
                f"Prior is over {prior.alphabet}, feature '{model.name}' over "
                f"{model.hypothesis_space.labels}"
            )


def feature_log_likelihood(
    model: FeatureModel,
    theta: int,
    obs: CluesObservation,
    psi: Optional[int] = None,
) -> float:
    """log p(z_i | theta [, psi][, z_i^c]) at the observed clue; -inf allowed."""
    model.hypothesis_space.check_index(theta)
    logs = model.log_likelihoods(obs.value(model.name), psi, obs.conditioner(model.name))
    return float(logs[theta])


def feature_log_likelihood_matrix(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    psi: Optional[int] = None,
) -> np.ndarray:
    """(n, |Theta|) array of log l_i(theta [, psi]) at the observation."""
    return np.array([
        model.log_likelihoods(obs.value(model.name), psi, obs.conditioner(model.name))
        for model in models
    ])


def composite_log_likelihood(
    models: Sequence[FeatureModel],
    theta: int,
    obs: CluesObservation,
    w: Sequence[float],
    psi: Optional[int] = None,
) -> float:
    """sum_i w_i log l_i(theta); zero-weight clues are ignored entirely."""
    weights = check_weights(w, len(models))
    logs = [feature_log_likelihood(model, theta, obs, psi) for model in models]
    return weighted_log_sum(weights, np.array(logs))


def _pooled_log_mass(prior_logs: np.ndarray, loglik: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return np.array([
        prior_logs[theta] + weighted_log_sum(weights, loglik[:, theta])
        if prior_logs[theta] > -np.inf else -np.inf
        for theta in range(prior_logs.size)
    ])


def log_linear_pool(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    w: Sequence[float],
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """p*(theta) proportional to pi(theta) prod_i l_i(theta)^w_i."""
    check_prior(prior, models)
    weights = check_weights(w, len(models))
    loglik = feature_log_likelihood_matrix(models, obs, psi)
    return normalize_log(_pooled_log_mass(prior.log_probs, loglik, weights), prior.alphabet)


def naive_bayes_posterior(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """Unit-weight product rule, i.e. the pool under assumed clue independence."""
    check_prior(prior, models)
    loglik = feature_log_likelihood_matrix(models, obs, psi)
    return normalize_log(_pooled_log_mass(prior.log_probs, loglik, np.ones(len(models))), prior.alphabet)


def agent_posteriors(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    psi: Optional[int] = None,
) -> List[FiniteDistribution]:
    """Each clue's own opinion p_i(theta) proportional to pi(theta) l_i(theta)."""
    check_prior(prior, models)
    loglik = feature_log_likelihood_matrix(models, obs, psi)
    return [normalize_log(prior.log_probs + row, prior.alphabet) for row in loglik]


def pool_opinions(
    opinions: Sequence[FiniteDistribution],
    w: Sequence[float],
    reference: Optional[FiniteDistribution] = None,
) -> FiniteDistribution:
    """
    Generalized logarithmic pool of arbitrary opinions:
    reference(theta) prod_i p_i(theta)^w_i, normalized. A missing reference
    is the uniform measure.
    """
    if not opinions:
        raise WeightDimensionMismatchError("Pooling needs at least one opinion")
    alphabet = opinions[0].alphabet
    for p in opinions[1:]:
        if p.alphabet != alphabet:
            raise AlphabetMismatchError("Opinions disagree on the hypothesis alphabet")
    weights = check_weights(w, len(opinions))
    ref_logs = np.zeros(len(alphabet)) if reference is None else reference.log_probs
    if reference is not None and reference.alphabet != alphabet:
        raise AlphabetMismatchError("Reference measure disagrees with the opinions")
    stacked = np.array([p.log_probs for p in opinions])
    return normalize_log(_pooled_log_mass(ref_logs, stacked, weights), alphabet)


def average_kl_objective(
    candidate: FiniteDistribution,
    agent_posteriors: Sequence[FiniteDistribution],
    w: Sequence[float],
) -> float:
    """
    sum_i w_i D(candidate || p_i).

    Weights need not be normalized here; a zero weight drops its agent even
    when the divergence is infinite.
    """
    weights = np.asarray(w, dtype=np.float64)
    if weights.shape != (len(agent_posteriors),):
        raise WeightDimensionMismatchError(
            f"Expected {len(agent_posteriors)} weights, got {weights.shape}"
        )
    total = 0.0
    for weight, agent in zip(weights, agent_posteriors):
        if weight == 0:
            continue
        total += weight * kl_divergence(candidate, agent)
    return float(total)
