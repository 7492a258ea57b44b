"""
minimizer.py

Independent numerical minimizer of the average-KL objective, used to check
that the log-linear pool is its minimizer.

Projected gradient in the entropic geometry: each step moves the
log-candidate against the gradient sum_i w_i (log q - log p_i + 1) and
projects back onto the simplex by renormalization. With unit-sum weights
and step s the error contracts by (1 - s) per iteration.
"""

from typing import Optional, Sequence

import numpy as np

from core.errors import AlphabetMismatchError, InvalidWeightsError, WeightDimensionMismatchError
from core.numerics import log_normalizer
from core.types import FiniteDistribution
from utils import app_logger, config


class AverageKLMinimizer:
    """Seeded iterative minimizer of sum_i w_i D(q || p_i) over the simplex."""

    def __init__(
        self,
        iterations: Optional[int] = None,
        step: Optional[float] = None,
        seed: Optional[int] = None,
    ) -> None:
        if iterations is None:
            iterations = config.get_int("verification.minimizer_iterations", 500)
        if step is None:
            step = config.get_float("verification.minimizer_step", 0.1)
        self.iterations = iterations
        self.step = step
        self.seed = config.get_int("verification.minimizer_seed", 0) if seed is None else seed
        self.logger = app_logger

    def minimize(
        self,
        agent_posteriors: Sequence[FiniteDistribution],
        w: Sequence[float],
    ) -> FiniteDistribution:
        if not agent_posteriors:
            raise WeightDimensionMismatchError("No agent posteriors to pool")
        alphabet = agent_posteriors[0].alphabet
        if any(p.alphabet != alphabet for p in agent_posteriors):
            raise AlphabetMismatchError("Agent posteriors disagree on the hypothesis alphabet")
        weights = np.asarray(w, dtype=np.float64)
        if weights.shape != (len(agent_posteriors),):
            raise WeightDimensionMismatchError(
                f"Expected {len(agent_posteriors)} weights, got {weights.shape}"
            )
        if np.any(weights < 0) or weights.sum() <= 0:
            raise InvalidWeightsError("Average-KL weights must be non-negative with positive sum")

        # the minimizer is invariant to the scale of the weights
        weights = weights / weights.sum()
        agents = np.array([p.log_probs for p in agent_posteriors])
        active = weights > 0

        # candidate support: hypotheses every active agent allows
        support = np.all(np.isfinite(agents[active]), axis=0)
        if not np.any(support):
            raise InvalidWeightsError("Active agents share no hypothesis with positive mass")

        rng = np.random.default_rng(self.seed)
        log_q = np.full(len(alphabet), -np.inf)
        log_q[support] = np.log(rng.dirichlet(np.ones(int(support.sum()))))

        for _ in range(self.iterations):
            gradient = weights[active] @ (log_q[support] - agents[active][:, support])
            log_q[support] = log_q[support] - self.step * gradient
            log_q[support] -= log_normalizer(log_q[support])

        self.logger.debug(f"Average-KL minimizer finished after {self.iterations} iterations")
        return FiniteDistribution(alphabet, log_q)
