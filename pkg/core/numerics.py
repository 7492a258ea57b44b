"""
numerics.py

Array-level log-domain helpers and the tolerances every package shares.
All probability arithmetic in sclkit happens in natural-log space.
"""

from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from utils import config

INPUT_SIMPLEX_TOL: float = config.get_float("numerics.input_simplex_tol", 1e-9)
OUTPUT_SIMPLEX_TOL: float = config.get_float("numerics.output_simplex_tol", 1e-10)
TIE_TOL: float = config.get_float("numerics.tie_tol", 1e-9)


def safe_log(values) -> np.ndarray:
    """Elementwise natural log mapping exact zeros to -inf without warnings."""
    arr = np.asarray(values, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.log(arr)


def validate_simplex(v: Sequence[float], tol: float) -> bool:
    """
    True iff every entry is >= -tol and the entries sum to one within tol.

    Pure predicate: malformed input (empty, NaN) is simply not on the simplex.
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0 or np.any(np.isnan(arr)):
        return False
    return bool(np.all(arr >= -tol) and abs(float(arr.sum()) - 1.0) <= tol)


def log_normalizer(log_values: np.ndarray) -> float:
    """logsumexp with the max-shift done by scipy; -inf when all mass is zero."""
    arr = np.asarray(log_values, dtype=np.float64)
    if not np.any(np.isfinite(arr)):
        return float("-inf")
    return float(logsumexp(arr))


def weighted_log_sum(weights: np.ndarray, log_values: np.ndarray) -> float:
    """
    Sum of w_i * log_i with the convention 0 * (+/-inf) = 0.

    A zero weight removes the clue entirely, so an underflowing or
    impossible likelihood under a zero weight never contaminates the sum.
    Mixed +inf/-inf terms yield NaN; callers decide how to report that.
    """
    w = np.asarray(weights, dtype=np.float64)
    logs = np.asarray(log_values, dtype=np.float64)
    active = w > 0
    if not np.any(active):
        return 0.0
    terms = w[active] * logs[active]
    if np.any(np.isposinf(terms)) and np.any(np.isneginf(terms)):
        return float("nan")
    return float(np.sum(terms))
