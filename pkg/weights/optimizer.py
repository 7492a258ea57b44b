"""
optimizer.py

Optimal SCL weights. The expected utility is linear in each column w_j, so
its maximum over the simplex sits on the clues of largest utility; ties
share the column equally.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DimensionMismatchError, InvalidWeightsError
from core.numerics import TIE_TOL
from core.types import FiniteDistribution, WeightMatrix
from oracle.expectations import expected_log_feature_ratio
from oracle.model import GenerativeOracle
from utils import app_logger
from weights.utility import UtilityMatrix


def _winners(scores: np.ndarray, allowed: np.ndarray, tie_tol: float) -> np.ndarray:
    """Clue positions whose score is within tie_tol of the best allowed one; +inf wins outright."""
    if not np.any(allowed):
        raise InvalidWeightsError("A column mask forbids every clue")
    infinite = allowed & np.isposinf(scores)
    if np.any(infinite):
        return np.flatnonzero(infinite)
    best = np.max(scores[allowed])
    return np.flatnonzero(allowed & (scores >= best - tie_tol))


def _check_mask(mask, shape: Tuple[int, ...]) -> np.ndarray:
    if mask is None:
        return np.ones(shape, dtype=bool)
    arr = np.asarray(mask, dtype=bool)
    if arr.shape != shape:
        raise DimensionMismatchError(f"Mask shape {arr.shape}, expected {shape}")
    return arr


def tie_sets(
    U: UtilityMatrix,
    tie_tol: Optional[float] = None,
    mask=None,
) -> List[Tuple[int, ...]]:
    """
    S_j = {i : u_ij >= max_i' u_i'j - tie_tol} per column (0-based clue
    positions). ``mask[i, j - 1]`` False forces w_ij = 0.
    """
    tol = TIE_TOL if tie_tol is None else tie_tol
    allowed = _check_mask(mask, U.entries.shape)
    return [
        tuple(int(i) for i in _winners(U.column(j), allowed[:, j - 1], tol))
        for j in range(1, U.m + 1)
    ]


def optimal_weights(
    U: UtilityMatrix,
    tie_tol: Optional[float] = None,
    mask=None,
    labels: Optional[Sequence[str]] = None,
) -> WeightMatrix:
    """
    Tie-split argmax per column. A column whose allowed utilities are all
    zero is uniform over the allowed clues and carries a warning note.
    """
    allowed = _check_mask(mask, U.entries.shape)
    sets = tie_sets(U, tie_tol, allowed)
    entries = np.zeros(U.entries.shape)
    notes = []
    for j, winners in enumerate(sets, start=1):
        entries[list(winners), j - 1] = 1.0 / len(winners)
        if np.all(U.column(j)[allowed[:, j - 1]] == 0):
            name = labels[j] if labels is not None else f"theta_{j}"
            message = f"hypothesis '{name}' is indistinguishable from the reference through every clue"
            app_logger.warning(message)
            notes.append(message)
    return WeightMatrix(entries, notes=tuple(notes))


def optimal_constant_weights(
    U: UtilityMatrix,
    prior: FiniteDistribution,
    tie_tol: Optional[float] = None,
    mask=None,
) -> WeightMatrix:
    """
    Best single column shared by every hypothesis: maximizes
    sum_i w_i sum_j pi(theta_j) u_ij over the simplex.
    """
    if prior.size != U.m + 1:
        raise DimensionMismatchError(f"Prior has {prior.size} hypotheses, U has {U.m} columns")
    probs = prior.probs[1:]
    weighted = np.where(probs[np.newaxis, :] > 0, probs[np.newaxis, :] * U.entries, 0.0)
    scores = weighted.sum(axis=1)
    allowed = _check_mask(mask, (U.n,))
    tol = TIE_TOL if tie_tol is None else tie_tol
    winners = _winners(scores, allowed, tol)
    column = np.zeros(U.n)
    column[winners] = 1.0 / winners.size
    return WeightMatrix.constant(column, U.m)


def consistency_envelope(
    oracle: GenerativeOracle,
    theta: int,
    theta_star: int,
    psi: Optional[int] = None,
) -> float:
    """
    M(theta) = max over the simplex of E_{theta*}[log L_c(theta, w) / L_c(theta_0, w)],
    attained at a vertex: the best single clue's expected log-ratio.
    """
    oracle.hypothesis_space.check_index(theta)
    if theta == 0:
        return 0.0
    return max(
        expected_log_feature_ratio(oracle, i, theta, 0, truth=theta_star, psi=psi)
        for i in range(oracle.n_features)
    )
