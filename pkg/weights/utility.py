"""
utility.py

KL utilities of clues for hypotheses, and the expected and empirical
utility of a weight matrix.

u_ij = D(p(z_i | theta_j) || p(z_i | theta_0)) is the coefficient of w_ij
in the expected log super composite likelihood, so the expected utility
is linear in W.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import (
    DimensionMismatchError,
    EmptySampleError,
    IndeterminateRatioError,
    InvalidDistributionError,
    MissingConditionerError,
    SpecValidationError,
    UnsupportedModelError,
)
from core.operations import kl_divergence
from core.types import FeatureModel, FiniteDistribution, HypothesisSpace, WeightMatrix
from oracle.expectations import expected_log_feature_ratio
from oracle.inference import Dataset
from oracle.model import GenerativeOracle
from pool.observation import CluesObservation
from scl.super_composite import check_weight_matrix, scl_log
from utils import app_logger

NEGATIVE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class UtilityMatrix:
    """n x m utilities in nats, rows = clues, columns = hypotheses theta_1..theta_m."""
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or min(entries.shape) < 1:
            raise DimensionMismatchError(f"Utility matrix must be n x m, got shape {entries.shape}")
        if np.any(np.isnan(entries)) or np.any(entries < -NEGATIVE_TOL):
            raise InvalidDistributionError("Utilities must be non-negative numbers or +inf")
        entries = np.clip(entries, 0.0, None)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j - 1]


def utility_matrix(models: Sequence[FeatureModel], space: HypothesisSpace) -> UtilityMatrix:
    """u_ij from unconditional, nuisance-free feature tables."""
    if not models:
        raise SpecValidationError("Utilities need at least one clue")
    entries = np.zeros((len(models), space.m))
    for i, model in enumerate(models):
        if model.is_conditional or model.is_parametric:
            raise UnsupportedModelError(
                f"Feature '{model.name}' is conditional or parametric; use an oracle "
                f"or the nuisance utilities"
            )
        if model.hypothesis_space.labels != space.labels:
            raise DimensionMismatchError(f"Feature '{model.name}' is over another hypothesis space")
        reference = model.distribution(0)
        for j in range(1, space.size):
            entries[i, j - 1] = kl_divergence(model.distribution(j), reference)
    return UtilityMatrix(entries)


def oracle_utility_matrix(oracle: GenerativeOracle, psi: Optional[int] = None) -> UtilityMatrix:
    """
    Exact u_ij from an oracle, E_{theta_j}[log p(z_i | theta_j [, z_i^c]) / p(z_i | theta_0 [, z_i^c])].

    Also covers conditional clues, where u_ij is a conditional KL divergence.
    """
    space = oracle.hypothesis_space
    entries = np.zeros((oracle.n_features, space.m))
    for i in range(oracle.n_features):
        for j in range(1, space.size):
            entries[i, j - 1] = expected_log_feature_ratio(oracle, i, j, 0, truth=j, psi=psi)
    return UtilityMatrix(entries)


def expected_utility(U: UtilityMatrix, W: WeightMatrix, prior: FiniteDistribution) -> float:
    """sum_{j >= 1} pi(theta_j) sum_i w_ij u_ij, with 0 * inf = 0."""
    if U.n != W.n or U.m != W.m:
        raise DimensionMismatchError(f"U is {U.n}x{U.m}, W is {W.n}x{W.m}")
    if prior.size != U.m + 1:
        raise DimensionMismatchError(f"Prior has {prior.size} hypotheses, U has {U.m} columns")
    contributions = np.where(W.entries > 0, W.entries * U.entries, 0.0)
    per_column = contributions.sum(axis=0)
    probs = prior.probs[1:]
    active = probs > 0
    return float(np.dot(probs[active], per_column[active]))


def _model_lookup(model: FeatureModel, symbols: Tuple[str, ...]) -> np.ndarray:
    return np.array([model.symbol_index(s) for s in symbols])


def dataset_scl_log(dataset: Dataset, models: Sequence[FeatureModel], W: WeightMatrix) -> np.ndarray:
    """
    log SCL(theta_k, W) at every labeled example of a sampled dataset,
    vectorized over examples. Models are matched to oracle clues by name.
    """
    check_weight_matrix(W, models)
    oracle = dataset.oracle
    names = [f.name for f in oracle.feature_maps]
    size = len(dataset)
    rows = np.arange(size)
    theta = dataset.theta
    terms = np.zeros((len(models), size))
    for i, model in enumerate(models):
        if model.is_parametric:
            raise UnsupportedModelError(f"Feature '{model.name}' needs a nuisance value")
        if model.name not in names:
            raise SpecValidationError(f"Feature '{model.name}' is not produced by the oracle")
        pos = names.index(model.name)
        symbols = _model_lookup(model, oracle.feature_maps[pos].alphabet)[dataset.features[:, pos]]
        cond = np.zeros(size, dtype=np.int64)
        if model.is_conditional:
            cmap = oracle.conditioning_maps[pos]
            if cmap is None:
                raise MissingConditionerError(f"Oracle has no conditioning map for '{model.name}'")
            lookup = np.array([model.conditioner_index(c) for c in cmap.alphabet])
            cond = lookup[dataset.conditioners[:, pos]]
        table = model.log_table[:, 0][:, cond, symbols]
        top, bottom = table[theta, rows], table[0]
        weight = np.where(theta > 0, W.entries[i, np.maximum(theta, 1) - 1], 0.0)
        active = weight > 0
        if np.any(active & np.isneginf(top) & np.isneginf(bottom)):
            raise IndeterminateRatioError(f"0/0 likelihood ratio of '{model.name}' in the sample")
        with np.errstate(invalid="ignore"):
            terms[i] = np.where(active, weight * (top - bottom), 0.0)
    if np.any(np.any(np.isposinf(terms), axis=0) & np.any(np.isneginf(terms), axis=0)):
        raise IndeterminateRatioError("Clues disagree with infinite log-ratios in the sample")
    return terms.sum(axis=0)


def empirical_utility(
    samples: Union[Dataset, Sequence[Tuple[CluesObservation, int]]],
    models: Sequence[FeatureModel],
    W: WeightMatrix,
) -> float:
    """
    (1 / N) sum_k log SCL(theta_k, W) at observation k. Examples drawn
    under the reference contribute zero.
    """
    if len(samples) == 0:
        raise EmptySampleError("Empirical utility needs at least one sample")
    if isinstance(samples, Dataset):
        values = dataset_scl_log(samples, models, W)
    else:
        values = np.array([scl_log(models, theta, obs, W) for obs, theta in samples])
    app_logger.debug(f"Empirical utility over {values.size} samples")
    return float(np.mean(values))
