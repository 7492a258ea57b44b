"""
random_instances.py

Seeded generator of random oracles and random (p, pi, f) triples for the
property suites. Likelihood rows are Dirichlet(1, ..., 1) draws and feature
maps are random surjections.
"""

from typing import Optional, Tuple

import numpy as np

from core.types import FiniteDistribution, HypothesisSpace, NuisancePrior, WeightMatrix
from oracle.model import FeatureMap, GenerativeOracle
from utils import app_logger


class RandomInstanceGenerator:
    """
    Builds reproducible random instances from one numpy Generator.

    Pass either a seed or an existing Generator; every draw advances the
    same stream, so instance k of a run depends only on the seed sequence.
    """

    def __init__(self, seed=None, rng: Optional[np.random.Generator] = None):
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.logger = app_logger

    def simplex(self, k: int) -> np.ndarray:
        return self.rng.dirichlet(np.ones(k))

    def distribution(self, alphabet) -> FiniteDistribution:
        return FiniteDistribution.from_probs(alphabet, self.simplex(len(alphabet)))

    def surjection(self, name: str, y_size: int, alphabet_size: int, prefix: str = "a") -> FeatureMap:
        """Random onto map Y -> {a0, a1, ...}; every symbol has a non-empty level set."""
        alphabet_size = min(alphabet_size, y_size)
        assignment = np.concatenate([
            np.arange(alphabet_size),
            self.rng.integers(0, alphabet_size, size=y_size - alphabet_size),
        ])
        self.rng.shuffle(assignment)
        alphabet = tuple(f"{prefix}{k}" for k in range(alphabet_size))
        return FeatureMap(name, alphabet, tuple(int(a) for a in assignment))

    def weight_matrix(self, n: int, m: int) -> WeightMatrix:
        return WeightMatrix(np.column_stack([self.simplex(n) for _ in range(m)]))

    def oracle(
        self,
        n_hypotheses: Optional[int] = None,
        y_size: Optional[int] = None,
        n_features: Optional[int] = None,
        max_alphabet: int = 3,
        psi_size: int = 0,
        conditional: bool = False,
        uniform_prior: bool = False,
    ) -> GenerativeOracle:
        """
        Random oracle; unspecified sizes are drawn from small ranges
        (2-5 hypotheses, |Y| in 4-12, 1-4 features).
        """
        rng = self.rng
        n_hypotheses = n_hypotheses or int(rng.integers(2, 6))
        y_size = y_size or int(rng.integers(4, 13))
        n_features = n_features or int(rng.integers(1, 5))

        space = HypothesisSpace(tuple(f"h{k}" for k in range(n_hypotheses)))
        y_alphabet = tuple(f"y{k}" for k in range(y_size))
        slots = max(psi_size, 1)
        likelihood = rng.dirichlet(np.ones(y_size), size=(n_hypotheses, slots))

        feature_maps = tuple(
            self.surjection(f"z{i + 1}", y_size, int(rng.integers(2, max_alphabet + 1)))
            for i in range(n_features)
        )
        conditioning_maps = ()
        if conditional:
            conditioning_maps = tuple(
                self.surjection(f"c{i + 1}", y_size, 2, prefix="c") if rng.random() < 0.5 else None
                for i in range(n_features)
            )

        if uniform_prior:
            prior = FiniteDistribution.uniform(space.labels)
        else:
            prior = self.distribution(space.labels)
        prior_psi = None
        if psi_size:
            grid = tuple(f"psi{k}" for k in range(psi_size))
            prior_psi = NuisancePrior(grid, self.distribution(grid))

        self.logger.debug(
            f"Random oracle: |Theta|={n_hypotheses}, |Y|={y_size}, n={n_features}, psi={psi_size}"
        )
        return GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=y_alphabet,
            likelihood=likelihood,
            feature_maps=feature_maps,
            prior_theta=prior,
            conditioning_maps=conditioning_maps,
            prior_psi=prior_psi,
        )

    def triple(self, max_y: int = 30) -> Tuple[FiniteDistribution, FiniteDistribution, FeatureMap]:
        """Random (p, pi_ref, f) on a shared Y with |Y| <= max_y."""
        y_size = int(self.rng.integers(2, max_y + 1))
        y_alphabet = tuple(f"y{k}" for k in range(y_size))
        f = self.surjection("f", y_size, int(self.rng.integers(1, y_size + 1)))
        return self.distribution(y_alphabet), self.distribution(y_alphabet), f
