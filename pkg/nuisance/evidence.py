"""
evidence.py

Composite evidence: the composite likelihood integrated over a finite
nuisance grid, and its reference-normalized super composite form. Each
hypothesis column integrates psi on its own.
"""

from typing import Sequence

import numpy as np

from core.errors import AllZeroMassError, AlphabetMismatchError, ReferenceEvidenceZeroError
from core.numerics import log_normalizer
from core.operations import normalize_log
from core.types import FeatureModel, FiniteDistribution, NuisancePrior, WeightMatrix
from pool.composite import check_prior, check_weights, feature_log_likelihood_matrix
from pool.observation import CluesObservation
from scl.super_composite import check_weight_matrix, posterior_from_log_odds


def _check_grid(models: Sequence[FeatureModel], prior_psi: NuisancePrior) -> None:
    for model in models:
        if model.is_parametric and model.nuisance_grid != prior_psi.grid:
            raise AlphabetMismatchError(
                f"Feature '{model.name}' is indexed by {model.nuisance_grid}, "
                f"the nuisance prior by {prior_psi.grid}"
            )


def _grid_log_likelihoods(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    prior_psi: NuisancePrior,
) -> np.ndarray:
    """(|Psi|, n, |Theta|) clue log-likelihoods at every grid point."""
    _check_grid(models, prior_psi)
    return np.array([
        feature_log_likelihood_matrix(models, obs, psi=s) for s in range(prior_psi.size)
    ])


def _evidence_logs(grid_logs: np.ndarray, weights: np.ndarray, prior_psi: NuisancePrior) -> np.ndarray:
    """log sum_psi pi(psi) prod_i l_i(theta, psi)^w_i for every theta; -inf allowed."""
    active = weights > 0
    # (|Psi|, |Theta|); no +inf can occur in log-likelihoods, so the sum is well defined
    integrand = np.einsum("i,sit->st", weights[active], np.where(
        np.isneginf(grid_logs[:, active, :]), -1.0, grid_logs[:, active, :]
    ))
    impossible = np.any(np.isneginf(grid_logs[:, active, :]), axis=1)
    integrand[impossible] = -np.inf
    psi_logs = prior_psi.log_probs
    seen = psi_logs > -np.inf
    return np.array([
        log_normalizer(psi_logs[seen] + integrand[seen, t]) for t in range(grid_logs.shape[2])
    ])


def composite_evidence_log(
    models: Sequence[FeatureModel],
    theta: int,
    obs: CluesObservation,
    w: Sequence[float],
    prior_psi: NuisancePrior,
) -> float:
    """log sum_psi pi(psi) exp(sum_i w_i log l_i(theta, psi)), by log-sum-exp."""
    weights = check_weights(w, len(models))
    models[0].hypothesis_space.check_index(theta)
    value = _evidence_logs(_grid_log_likelihoods(models, obs, prior_psi), weights, prior_psi)[theta]
    if value == -np.inf:
        raise AllZeroMassError(
            f"Composite evidence of {models[0].hypothesis_space.labels[theta]} vanishes on the whole grid"
        )
    return float(value)


def super_composite_evidence_vector(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    prior_psi: NuisancePrior,
) -> np.ndarray:
    """log[Lbar_c(theta_j, w_j) / Lbar_c(theta_0, w_j)] for every hypothesis; 0 at the reference."""
    check_weight_matrix(W, models)
    grid_logs = _grid_log_likelihoods(models, obs, prior_psi)
    labels = models[0].hypothesis_space.labels
    out = np.zeros(len(labels))
    for j in range(1, len(labels)):
        logs = _evidence_logs(grid_logs, W.column(j), prior_psi)
        if logs[0] == -np.inf:
            raise ReferenceEvidenceZeroError(
                f"Reference evidence vanishes under the weights of '{labels[j]}'"
            )
        out[j] = logs[j] - logs[0]
    return out


def super_composite_evidence_log(
    models: Sequence[FeatureModel],
    theta: int,
    obs: CluesObservation,
    W: WeightMatrix,
    prior_psi: NuisancePrior,
) -> float:
    models[0].hypothesis_space.check_index(theta)
    if theta == 0:
        return 0.0
    return float(super_composite_evidence_vector(models, obs, W, prior_psi)[theta])


def nuisance_posterior(
    prior_theta: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    prior_psi: NuisancePrior,
) -> FiniteDistribution:
    """p5(theta | y) proportional to pi(theta) times the super composite evidence."""
    check_prior(prior_theta, models)
    return posterior_from_log_odds(
        prior_theta, super_composite_evidence_vector(models, obs, W, prior_psi)
    )


def composite_evidence_posterior(
    prior_theta: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    w: Sequence[float],
    prior_psi: NuisancePrior,
) -> FiniteDistribution:
    """p4(theta | y) proportional to pi(theta) Lbar_c(theta, w) with one shared weight vector."""
    check_prior(prior_theta, models)
    weights = check_weights(w, len(models))
    logs = _evidence_logs(_grid_log_likelihoods(models, obs, prior_psi), weights, prior_psi)
    return normalize_log(prior_theta.log_probs + logs, prior_theta.alphabet)


def naive_bayes_evidence_posterior(
    prior_theta: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    prior_psi: NuisancePrior,
) -> FiniteDistribution:
    """Unit-weight product rule with psi integrated out under its prior."""
    check_prior(prior_theta, models)
    logs = _evidence_logs(
        _grid_log_likelihoods(models, obs, prior_psi), np.ones(len(models)), prior_psi
    )
    return normalize_log(prior_theta.log_probs + logs, prior_theta.alphabet)
