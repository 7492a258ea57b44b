"""
operations.py

Pure operations on finite distributions: KL divergence and log-domain
normalization.
"""

from typing import Optional, Sequence

import numpy as np
from scipy.special import rel_entr

from core.errors import AllZeroMassError, AlphabetMismatchError, InvalidDistributionError
from core.numerics import log_normalizer
from core.types import FiniteDistribution


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """
    D(p || q) in nats.

    0 * log(0 / q) = 0 and p > 0 with q = 0 gives +inf; tiny negative
    rounding is clamped so the result is never below zero.
    """
    if p.alphabet != q.alphabet:
        raise AlphabetMismatchError(f"KL over different alphabets: {p.alphabet} vs {q.alphabet}")
    value = float(np.sum(rel_entr(p.probs, q.probs)))
    return max(value, 0.0)


def normalize_log(
    v: Sequence[float],
    alphabet: Optional[Sequence[str]] = None,
) -> FiniteDistribution:
    """
    exp(v - logsumexp(v)) as a FiniteDistribution.

    ``alphabet`` defaults to the positions "0", "1", ...
    """
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidDistributionError("normalize_log needs a non-empty vector")
    if np.any(np.isnan(arr)) or np.any(np.isposinf(arr)):
        raise InvalidDistributionError("normalize_log input must not contain NaN or +inf")
    if alphabet is None:
        alphabet = tuple(str(k) for k in range(arr.size))
    z = log_normalizer(arr)
    if z == -np.inf:
        raise AllZeroMassError("Every entry has zero mass")
    return FiniteDistribution(tuple(alphabet), arr - z)
