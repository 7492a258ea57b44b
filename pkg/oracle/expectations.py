"""
expectations.py

Exact expectations under an oracle by enumeration over Y.

All expectations are taken under p(y | truth), with psi integrated out under
its prior unless a grid index is given. Data points with zero probability
under the truth contribute nothing, whatever their log-ratio.
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import IndeterminateRatioError
from core.numerics import safe_log
from core.types import WeightMatrix
from oracle.model import GenerativeOracle
from pool.composite import check_weights


def feature_log_likelihood_matrix(
    oracle: GenerativeOracle,
    feature: int,
    psi: Optional[int] = None,
) -> np.ndarray:
    """
    (|Theta|, |Y|) table of log p(z_i = f_i(y) | theta [, z_i^c = f_i^c(y)]).

    A conditioning value impossible under theta makes the clue impossible
    there as well, so the entry is -inf.
    """
    space = oracle.hypothesis_space
    joint = np.stack([oracle.joint_feature_probs(feature, t, psi) for t in range(space.size)])
    fmap = oracle.feature_maps[feature]
    cmap = oracle.conditioning_maps[feature]
    z_idx = np.asarray(fmap.assignment)
    c_idx = np.asarray(cmap.assignment) if cmap is not None else np.zeros_like(z_idx)
    numerator = joint[:, c_idx, z_idx]
    if cmap is None:
        return safe_log(numerator)
    mass = joint.sum(axis=2)[:, c_idx]
    out = np.full(numerator.shape, -np.inf)
    seen = mass > 0
    out[seen] = safe_log(numerator[seen]) - np.log(mass[seen])
    return out


def _ratio_terms(top: np.ndarray, bottom: np.ndarray, what: str) -> np.ndarray:
    both_zero = np.isneginf(top) & np.isneginf(bottom)
    if np.any(both_zero):
        raise IndeterminateRatioError(f"{what}: 0/0 likelihood ratio on a data point of positive mass")
    with np.errstate(invalid="ignore"):
        return top - bottom


def _weighted_row_sum(weights: np.ndarray, terms: np.ndarray, what: str) -> np.ndarray:
    """sum_i w_i terms[i, y] per data point, dropping zero weights."""
    active = weights > 0
    rows = weights[active, np.newaxis] * terms[active]
    has_pos = np.any(np.isposinf(rows), axis=0)
    has_neg = np.any(np.isneginf(rows), axis=0)
    if np.any(has_pos & has_neg):
        raise IndeterminateRatioError(f"{what}: clues disagree with infinite log-ratios")
    return rows.sum(axis=0)


def _expectation(probs: np.ndarray, values: np.ndarray, what: str) -> float:
    support = probs > 0
    vals = values[support]
    if np.any(np.isposinf(vals)) and np.any(np.isneginf(vals)):
        raise IndeterminateRatioError(f"{what}: expectation of +inf and -inf")
    if np.any(np.isposinf(vals)):
        return float("inf")
    if np.any(np.isneginf(vals)):
        return float("-inf")
    return float(np.dot(probs[support], vals))


def _truth_probs(oracle: GenerativeOracle, truth: int, psi: Optional[int]) -> np.ndarray:
    oracle.hypothesis_space.check_index(truth)
    return oracle.likelihood_rows(psi)[truth]


def _log_ratio_rows(
    oracle: GenerativeOracle,
    theta: int,
    reference: int,
    support: np.ndarray,
    psi: Optional[int],
) -> np.ndarray:
    """(n, |support|) clue log-ratios log p(z_i | theta) / p(z_i | reference)."""
    rows = []
    for i in range(oracle.n_features):
        table = feature_log_likelihood_matrix(oracle, i, psi)[:, support]
        rows.append(_ratio_terms(table[theta], table[reference], oracle.feature_maps[i].name))
    return np.array(rows)


def expected_log_feature_ratio(
    oracle: GenerativeOracle,
    feature: int,
    theta: int,
    reference: int,
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """E_{p(y|truth)}[log p(z_i | theta) / p(z_i | reference)]."""
    if theta == reference:
        return 0.0
    probs = _truth_probs(oracle, truth, psi)
    support = probs > 0
    table = feature_log_likelihood_matrix(oracle, feature, psi)[:, support]
    terms = _ratio_terms(table[theta], table[reference], oracle.feature_maps[feature].name)
    return _expectation(probs[support], terms, "feature log-ratio")


def expected_log_likelihood_ratio(
    oracle: GenerativeOracle,
    theta: int,
    reference: int,
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """E_{p(y|truth)}[log p(y | theta) / p(y | reference)] for the full data."""
    if theta == reference:
        return 0.0
    probs = _truth_probs(oracle, truth, psi)
    support = probs > 0
    logs = oracle.log_likelihood_rows(psi)[:, support]
    terms = _ratio_terms(logs[theta], logs[reference], "full likelihood")
    return _expectation(probs[support], terms, "full log-likelihood ratio")


def expected_log_composite_ratio(
    oracle: GenerativeOracle,
    theta: int,
    reference: int,
    w: Sequence[float],
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """E_{p(y|truth)}[log L_c(theta, w) / L_c(reference, w)]."""
    weights = check_weights(w, oracle.n_features)
    if theta == reference:
        return 0.0
    probs = _truth_probs(oracle, truth, psi)
    support = probs > 0
    terms = _log_ratio_rows(oracle, theta, reference, support, psi)
    per_y = _weighted_row_sum(weights, terms, "composite log-ratio")
    return _expectation(probs[support], per_y, "composite log-ratio")


def expected_log_composite(
    oracle: GenerativeOracle,
    theta: int,
    w: Sequence[float],
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """E_{p(y|truth)}[log L_c(theta, w)]; -inf when some active clue is impossible under theta."""
    weights = check_weights(w, oracle.n_features)
    probs = _truth_probs(oracle, truth, psi)
    support = probs > 0
    tables = np.array([
        feature_log_likelihood_matrix(oracle, i, psi)[theta, support]
        for i in range(oracle.n_features)
    ])
    per_y = _weighted_row_sum(weights, tables, "composite log-likelihood")
    return _expectation(probs[support], per_y, "composite log-likelihood")


def expected_log_scl(
    oracle: GenerativeOracle,
    theta: int,
    W: WeightMatrix,
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """E_{p(y|truth)}[log SCL(theta, W)]: zero at the reference, else the column-j CL ratio."""
    oracle.hypothesis_space.check_index(theta)
    if theta == 0:
        return 0.0
    return expected_log_composite_ratio(oracle, theta, 0, W.column(theta), truth, psi)


def variance_log_composite_ratio(
    oracle: GenerativeOracle,
    theta: int,
    reference: int,
    w: Sequence[float],
    truth: int,
    psi: Optional[int] = None,
) -> float:
    """Exact variance of sum_i w_i log p(z_i|theta)/p(z_i|reference) under p(y|truth)."""
    weights = check_weights(w, oracle.n_features)
    if theta == reference:
        return 0.0
    probs = _truth_probs(oracle, truth, psi)
    support = probs > 0
    per_y = _weighted_row_sum(
        weights, _log_ratio_rows(oracle, theta, reference, support, psi), "composite log-ratio"
    )
    if not np.all(np.isfinite(per_y)):
        return float("inf")
    p = probs[support]
    mean = float(np.dot(p, per_y))
    return float(max(np.dot(p, (per_y - mean) ** 2), 0.0))
