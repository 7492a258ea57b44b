"""
population.py

Population coding of a finite hypothesis: binary truncations t_j that
read 1 when theta = theta_j and 0 when theta = theta_0, tied back to
theta by Kronecker factors gamma_j.

These routines evaluate the code-based factor graphs literally, by
summing over t, so they can be checked against the closed forms.
"""

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from core.errors import AllZeroMassError, ReferenceLikelihoodZeroError
from core.numerics import log_normalizer, safe_log, weighted_log_sum
from core.operations import normalize_log
from core.types import FeatureModel, FiniteDistribution, HypothesisSpace, WeightMatrix
from oracle.model import GenerativeOracle
from pool.composite import check_prior, feature_log_likelihood_matrix
from pool.observation import CluesObservation
from scl.super_composite import check_weight_matrix


@dataclass(frozen=True)
class PopulationCode:
    """The m binary indicators t_1..t_m of a hypothesis space."""
    hypothesis_space: HypothesisSpace

    @property
    def binary_count(self) -> int:
        return self.hypothesis_space.m

    def code(self, theta: int) -> Tuple[int, ...]:
        """The only t with non-zero gamma product for theta."""
        self.hypothesis_space.check_index(theta)
        return tuple(int(theta == j) for j in range(1, self.binary_count + 1))

    def gamma(self, j: int, t: int, theta: int) -> float:
        """gamma_j(t_j, theta): delta(1, t_j) if theta = theta_j, else delta(0, t_j)."""
        self.hypothesis_space.check_index(theta)
        return float(t == (1 if theta == j else 0))

    def log_gamma(self, j: int, t: int, theta: int) -> float:
        return 0.0 if self.gamma(j, t, theta) else -np.inf

    def codes(self):
        """Every t in {0, 1}^m in lexicographic order."""
        return itertools.product((0, 1), repeat=self.binary_count)


def population_code_posterior(
    oracle: GenerativeOracle,
    y: str,
    prior: Optional[FiniteDistribution] = None,
) -> FiniteDistribution:
    """
    Posterior from the graph with truncated likelihood factors
    L_j(t_j) = p(y | theta_j if t_j else theta_0):

        p2(y, theta) = pi(theta) sum_t prod_j L_j(t_j) gamma_j(t_j, theta)

    For each theta the sum over t factorizes into one message per t_j.
    """
    space = oracle.hypothesis_space
    prior = prior if prior is not None else oracle.prior_theta
    code = PopulationCode(space)
    logs = oracle.log_likelihood_rows()[:, oracle.y_index(y)]
    if logs[0] == -np.inf and code.binary_count > 1:
        raise ReferenceLikelihoodZeroError(f"p(y = '{y}' | {space.reference}) is zero")

    joint = np.full(space.size, -np.inf)
    for theta in range(space.size):
        if prior.log_probs[theta] == -np.inf:
            continue
        messages = []
        for j in range(1, code.binary_count + 1):
            truncated = (logs[0], logs[j])
            messages.append(logsumexp([
                truncated[t] + code.log_gamma(j, t, theta) for t in (0, 1)
            ]))
        joint[theta] = prior.log_probs[theta] + float(np.sum(messages))
    if not np.any(np.isfinite(joint)):
        raise ReferenceLikelihoodZeroError(f"y = '{y}' has zero mass under every code")
    return normalize_log(joint, space.labels)


def _column_code_logs(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int],
) -> np.ndarray:
    """(m, 2) table of log L_cj(t_j, w_j) = sum_i log beta_ij(z_i, t_j)."""
    loglik = feature_log_likelihood_matrix(models, obs, psi)
    m = W.m
    out = np.zeros((m, 2))
    for j in range(1, m + 1):
        column = W.column(j)
        out[j - 1, 0] = weighted_log_sum(column, loglik[:, 0])
        out[j - 1, 1] = weighted_log_sum(column, loglik[:, j])
    return out


def scl_code_joint(
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> np.ndarray:
    """
    p3(t | z) for every t, built as the normalized product of all beta_ij
    factors. Returned with shape (2,) * m, indexed by (t_1, ..., t_m).
    """
    check_weight_matrix(W, models)
    factors = _column_code_logs(models, obs, W, psi)
    m = W.m
    joint = np.full((2,) * m, -np.inf)
    for t in itertools.product((0, 1), repeat=m):
        joint[t] = sum(factors[j, t_j] for j, t_j in enumerate(t))
    z = log_normalizer(joint.ravel())
    if z == -np.inf:
        raise AllZeroMassError("Every population code has zero mass given the clues")
    return np.exp(joint - z)


def code_marginals(joint: np.ndarray) -> np.ndarray:
    """(m, 2) array of p3(t_j | z) from a code joint."""
    m = joint.ndim
    return np.array([
        joint.sum(axis=tuple(k for k in range(m) if k != j)) for j in range(m)
    ])


def factorization_gap(joint: np.ndarray) -> float:
    """Max-norm distance between a code joint and the product of its marginals."""
    marginals = code_marginals(joint)
    product = marginals[0]
    for row in marginals[1:]:
        product = np.multiply.outer(product, row)
    return float(np.max(np.abs(joint - product)))


def scl_posterior_by_code(
    prior: FiniteDistribution,
    models: Sequence[FeatureModel],
    obs: CluesObservation,
    W: WeightMatrix,
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """
    p3(theta | y) proportional to pi(theta) sum_t p3(t | z) prod_j gamma_j(t_j, theta),
    summed explicitly over {0, 1}^m.
    """
    check_prior(prior, models)
    joint = scl_code_joint(models, obs, W, psi)
    code = PopulationCode(models[0].hypothesis_space)
    mass = np.zeros(prior.size)
    for theta in range(prior.size):
        for t in code.codes():
            weight = np.prod([code.gamma(j + 1, t_j, theta) for j, t_j in enumerate(t)])
            mass[theta] += joint[t] * weight
    return normalize_log(prior.log_probs + safe_log(mass), prior.alphabet)
