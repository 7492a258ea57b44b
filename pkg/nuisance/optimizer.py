"""
optimizer.py

Nuisance-aware weight optimization. For each hypothesis column the
objective is linear in w_j with coefficients averaged over the nuisance
prior, so the optimum is again a tie-split argmax.
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import DimensionMismatchError, UnsupportedModelError
from core.operations import kl_divergence
from core.types import FeatureModel, HypothesisSpace, NuisancePrior, WeightMatrix
from oracle.expectations import expected_log_feature_ratio
from oracle.model import GenerativeOracle
from utils import app_logger
from weights.optimizer import optimal_weights
from weights.utility import UtilityMatrix


def _resolve_prior(oracle: GenerativeOracle, prior_psi: Optional[NuisancePrior]) -> NuisancePrior:
    if not oracle.is_parametric:
        raise UnsupportedModelError("The oracle has no nuisance parameter")
    prior = prior_psi if prior_psi is not None else oracle.prior_psi
    if prior.size != oracle.psi_size:
        raise DimensionMismatchError(
            f"Nuisance prior over {prior.size} points, oracle grid has {oracle.psi_size}"
        )
    return prior


def nuisance_utility_matrix(
    oracle: GenerativeOracle,
    prior_psi: Optional[NuisancePrior] = None,
) -> UtilityMatrix:
    """
    ubar_ij = sum_psi pi(psi) E_{theta_j, psi}[log p(z_i | theta_j, psi) / p(z_i | theta_0, psi)].

    Every psi slice is a KL divergence, so the average is non-negative.
    """
    prior = _resolve_prior(oracle, prior_psi)
    space = oracle.hypothesis_space
    probs = prior.distribution.probs
    entries = np.zeros((oracle.n_features, space.m))
    for i in range(oracle.n_features):
        for j in range(1, space.size):
            total = 0.0
            for s in np.flatnonzero(probs > 0):
                total += probs[s] * expected_log_feature_ratio(oracle, i, j, 0, truth=j, psi=int(s))
            entries[i, j - 1] = total
    return UtilityMatrix(entries)


def nuisance_utility_from_models(
    models: Sequence[FeatureModel],
    space: HypothesisSpace,
    prior_psi: NuisancePrior,
) -> UtilityMatrix:
    """ubar_ij from psi-indexed feature tables: sum_psi pi(psi) D(p(z_i|theta_j,psi) || p(z_i|theta_0,psi))."""
    probs = prior_psi.distribution.probs
    entries = np.zeros((len(models), space.m))
    for i, model in enumerate(models):
        if model.is_conditional:
            raise UnsupportedModelError(
                f"Feature '{model.name}' is conditional; its utilities need an oracle"
            )
        if model.is_parametric and model.nuisance_grid != prior_psi.grid:
            raise DimensionMismatchError(f"Feature '{model.name}' uses another nuisance grid")
        for j in range(1, space.size):
            total = 0.0
            for s in np.flatnonzero(probs > 0):
                psi = int(s) if model.is_parametric else None
                total += probs[s] * kl_divergence(model.distribution(j, psi), model.distribution(0, psi))
            entries[i, j - 1] = total
    return UtilityMatrix(entries)


def optimize_weights_nuisance(
    oracle: GenerativeOracle,
    prior_psi: Optional[NuisancePrior] = None,
    tie_tol: Optional[float] = None,
    mask=None,
) -> WeightMatrix:
    """Tie-split argmax of the nuisance-averaged utilities, column by column."""
    U = nuisance_utility_matrix(oracle, prior_psi)
    app_logger.debug(f"Nuisance utilities computed for {U.n} clues x {U.m} hypotheses")
    return optimal_weights(U, tie_tol, mask, labels=oracle.hypothesis_space.labels)
