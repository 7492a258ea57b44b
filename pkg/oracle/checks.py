"""
checks.py

Exact checks of the information inequalities behind composite likelihood:
KL never grows under feature extraction, and expected CL log-ratios are
bracketed by zero and the true expected log-likelihood ratio.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

from core.errors import AlphabetMismatchError
from core.operations import kl_divergence
from core.types import FiniteDistribution
from oracle.expectations import expected_log_composite_ratio, expected_log_likelihood_ratio
from oracle.model import FeatureMap, GenerativeOracle
from utils import config

DEFAULT_SLACK = config.get_float("verification.slack", 1e-12)
EQUALITY_TOL = 1e-10


@dataclass(frozen=True)
class DataReductionCheck:
    d_reduced: float
    d_full: float
    holds: bool
    equality: bool


@dataclass(frozen=True)
class VariationBoundCheck:
    lower_ok: bool
    middle: float
    upper: float
    holds: bool


def _le(a: float, b: float, slack: float) -> bool:
    """a <= b + slack in the extended reals."""
    if b == float("inf") or a == float("-inf"):
        return True
    if a == float("inf") or b == float("-inf"):
        return False
    return a <= b + slack


def check_data_reduction(
    p: FiniteDistribution,
    pi_ref: FiniteDistribution,
    f: FeatureMap,
    slack: Optional[float] = None,
) -> DataReductionCheck:
    """
    0 <= D(p~ || pi~) <= D(p || pi_ref) with p~, pi~ pushed through f.

    ``equality`` flags the sufficient-statistic case.
    """
    slack = DEFAULT_SLACK if slack is None else slack
    if p.alphabet != pi_ref.alphabet:
        raise AlphabetMismatchError("Both distributions must live on the same Y alphabet")
    if f.y_size != p.size:
        raise AlphabetMismatchError(f"Feature map '{f.name}' covers {f.y_size} symbols, Y has {p.size}")
    d_full = kl_divergence(p, pi_ref)
    d_reduced = kl_divergence(
        FiniteDistribution.from_probs(f.alphabet, f.induce(p.probs)),
        FiniteDistribution.from_probs(f.alphabet, f.induce(pi_ref.probs)),
    )
    holds = _le(0.0, d_reduced, slack) and _le(d_reduced, d_full, slack)
    if d_reduced == d_full:
        equality = True
    else:
        equality = abs(d_reduced - d_full) < EQUALITY_TOL
    return DataReductionCheck(d_reduced, d_full, holds, equality)


def check_variation_bound(
    oracle: GenerativeOracle,
    theta: int,
    theta_star: int,
    w: Sequence[float],
    slack: Optional[float] = None,
) -> VariationBoundCheck:
    """
    0 <= E[log L_c(theta*, w) / L_c(theta, w)] <= E[log L(theta*) / L(theta)]
    with expectations under p(y | theta*).
    """
    slack = DEFAULT_SLACK if slack is None else slack
    middle = expected_log_composite_ratio(oracle, theta_star, theta, w, truth=theta_star)
    upper = expected_log_likelihood_ratio(oracle, theta_star, theta, truth=theta_star)
    lower_ok = _le(0.0, middle, slack)
    return VariationBoundCheck(lower_ok, middle, upper, lower_ok and _le(middle, upper, slack))
