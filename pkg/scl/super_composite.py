"""
super_composite.py

Super composite likelihood: each non-reference hypothesis theta_j is scored
by a composite likelihood ratio against the reference theta_0, with its own
weight column w_j.
"""

from typing import Mapping, Optional, Sequence

import numpy as np

from core.errors import (
    DimensionMismatchError,
    IndeterminateRatioError,
    IndexOutOfRangeError,
    ReferencePriorZeroError,
    WeightDimensionMismatchError,
)
from core.operations import normalize_log
from core.types import FeatureModel, FiniteDistribution, WeightMatrix
from pool.composite import check_prior, feature_log_likelihood_matrix
from pool.observation import CluesObservation
from utils import app_logger


def check_weight_matrix(W: WeightMatrix, models: Sequence[FeatureModel]) -> None:
    """W must be n x m for n clues over a hypothesis space with m alternatives."""
    if W.n != len(models):
        raise WeightDimensionMismatchError(f"W has {W.n} rows for {len(models)} clues")
    if models and W.m != models[0].hypothesis_space.m:
        raise DimensionMismatchError(
            f"W has {W.m} columns, the hypothesis space has {models[0].hypothesis_space.m} alternatives"
        )


def column_log_ratios(log_mass: np.ndarray, W: WeightMatrix) -> np.ndarray:
    """
    sum_i w_ij (log_mass[i, j] - log_mass[i, 0]) for every hypothesis j,
    with 0 at the reference.

    ``log_mass`` is (n, |Theta|). Zero weights drop their clue. A clue with
    positive weight that is impossible under both sides makes the ratio
    indeterminate; so do clues pulling to +inf and -inf at once.
    """
    n, size = log_mass.shape
    out = np.zeros(size)
    reference = log_mass[:, 0]
    for j in range(1, size):
        column = W.column(j)
        active = column > 0
        top, bottom = log_mass[active, j], reference[active]
        if np.any(np.isneginf(top) & np.isneginf(bottom)):
            raise IndeterminateRatioError(
                f"0/0 clue likelihood ratio for hypothesis {j} under a positive weight"
            )
        with np.errstate(invalid="ignore"):
            terms = column[active] * (top - bottom)
        if np.any(np.isposinf(terms)) and np.any(np.isneginf(terms)):
            raise IndeterminateRatioError(
                f"Clues disagree with infinite log-ratios for hypothesis {j}"
            )
        out[j] = float(np.sum(terms))
    return out


def scl_log_vector(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> np.ndarray:
    """log SCL(theta, W) for every hypothesis at once; entry 0 is the reference."""
    check_weight_matrix(W, models)
    values = column_log_ratios(feature_log_likelihood_matrix(models, obs, psi), W)
    if np.any(np.isposinf(values)):
        labels = models[0].hypothesis_space.labels
        flagged = [labels[j] for j in np.flatnonzero(np.isposinf(values))]
        app_logger.warning(
            f"Reference likelihood is zero for a weighted clue: SCL is +inf for {flagged}"
        )
    return values


def scl_log(
    models: Sequence[FeatureModel],
    theta: int,
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> float:
    """
    log[L_c(theta_j, w_j) / L_c(theta_0, w_j)]; zero at the reference.

    +inf is a valid answer (reference likelihood zero for a weighted clue)
    and is logged as a warning.
    """
    if not models:
        raise WeightDimensionMismatchError("SCL needs at least one clue")
    models[0].hypothesis_space.check_index(theta)
    return float(scl_log_vector(models, obs, W, psi)[theta])


def posterior_from_log_odds(prior: FiniteDistribution, log_odds: np.ndarray) -> FiniteDistribution:
    """
    pi(theta) / pi(theta_0) * exp(log_odds), normalized.

    Hypotheses with +inf odds and positive prior absorb all the mass, in
    proportion to their prior.
    """
    prior_logs = prior.log_probs
    if prior_logs[0] == -np.inf:
        raise ReferencePriorZeroError(f"Reference '{prior.alphabet[0]}' has zero prior mass")
    possible = prior_logs > -np.inf
    dominating = possible & np.isposinf(log_odds)
    if np.any(dominating):
        return normalize_log(np.where(dominating, prior_logs, -np.inf), prior.alphabet)
    logs = np.full(prior_logs.size, -np.inf)
    logs[possible] = prior_logs[possible] - prior_logs[0] + log_odds[possible]
    return normalize_log(logs, prior.alphabet)


def scl_posterior(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """p3(theta | y) proportional to (pi(theta) / pi(theta_0)) SCL(theta, W)."""
    check_prior(prior, models)
    if prior.log_probs[0] == -np.inf:
        raise ReferencePriorZeroError(f"Reference '{prior.alphabet[0]}' has zero prior mass")
    return posterior_from_log_odds(prior, scl_log_vector(models, obs, W, psi))


def scl_posterior_prior_folded(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """
    Same posterior with the prior folded into every clue ratio first:
    prod_i [pi(theta_j) l_i(theta_j) / pi(theta_0) l_i(theta_0)]^w_ij,
    normalized under a flat reference.
    """
    check_prior(prior, models)
    check_weight_matrix(W, models)
    if prior.log_probs[0] == -np.inf:
        raise ReferencePriorZeroError(f"Reference '{prior.alphabet[0]}' has zero prior mass")
    agents = prior.log_probs[np.newaxis, :] + feature_log_likelihood_matrix(models, obs, psi)
    log_odds = column_log_ratios(agents, W)
    flat = FiniteDistribution.uniform(prior.alphabet)
    return posterior_from_log_odds(flat, log_odds)


def pdf_projection_matrix(iota: Mapping[int, int], n: int) -> WeightMatrix:
    """
    One-hot W with W[iota(j), j] = 1: hypothesis j is scored by the single
    clue iota(j). Both indices are 1-based.
    """
    m = len(iota)
    if m < 1 or set(iota) != set(range(1, m + 1)):
        raise IndexOutOfRangeError(f"iota must be defined on 1..{m}, got keys {sorted(iota)}")
    entries = np.zeros((n, m))
    for j, i in iota.items():
        if not 1 <= i <= n:
            raise IndexOutOfRangeError(f"iota({j}) = {i} is outside clues 1..{n}")
        entries[i - 1, j - 1] = 1.0
    return WeightMatrix(entries, notes=("pdf-projection",))
