"""
inference.py

Exact inference against a generative oracle: induced clue distributions,
derived feature tables, true posteriors, the data-level utility bound and
seeded sampling.
"""

from dataclasses import dataclass
from typing import Iterator, List, Optional

import numpy as np

from core.errors import (
    EmptyConditioningSetError,
    EmptySampleError,
    SymbolNotInAlphabetError,
    UnsupportedModelError,
    ZeroMarginalDataError,
)
from core.numerics import safe_log
from core.operations import kl_divergence, normalize_log
from core.types import FeatureModel, FiniteDistribution
from oracle.model import GenerativeOracle
from pool.observation import CluesObservation
from utils import app_logger


def induced_distribution(
    oracle: GenerativeOracle,
    feature: int,
    theta: int,
    psi: Optional[int] = None,
    conditioner: Optional[str] = None,
) -> FiniteDistribution:
    """
    p~(z) = sum over the level set Gamma(z) of p(y | theta [, psi]).

    With a conditioner the mass is renormalized within {y : f^c(y) = z^c};
    without one, the marginal over all conditioning values is returned.
    """
    joint = oracle.joint_feature_probs(feature, theta, psi)
    fmap = oracle.feature_maps[feature]
    cmap = oracle.conditioning_maps[feature]
    if conditioner is None or cmap is None:
        row = joint.sum(axis=0)
    else:
        row = joint[_symbol_position(cmap, conditioner)]
        mass = row.sum()
        if mass <= 0:
            raise EmptyConditioningSetError(
                f"Conditioning value '{conditioner}' of '{fmap.name}' has zero probability "
                f"under hypothesis {oracle.hypothesis_space.labels[theta]}"
            )
        row = row / mass
    return FiniteDistribution.from_probs(fmap.alphabet, row)


def derive_feature_models(oracle: GenerativeOracle) -> List[FeatureModel]:
    """Feature tables equal to the oracle's induced distributions."""
    space = oracle.hypothesis_space
    models = []
    for i, (fmap, cmap) in enumerate(zip(oracle.feature_maps, oracle.conditioning_maps)):
        psis = list(range(oracle.psi_size)) if oracle.is_parametric else [None]
        n_cond = len(cmap.alphabet) if cmap is not None else 1
        table = np.zeros((space.size, len(psis), n_cond, len(fmap.alphabet)))
        for theta in range(space.size):
            for s, psi in enumerate(psis):
                joint = oracle.joint_feature_probs(i, theta, psi)
                mass = joint.sum(axis=1, keepdims=True)
                if np.any(mass <= 0):
                    empty = int(np.argmin(mass[:, 0]))
                    raise EmptyConditioningSetError(
                        f"Conditioning value '{cmap.alphabet[empty]}' of '{fmap.name}' is "
                        f"impossible under {space.labels[theta]}; its table row is undefined"
                    )
                table[theta, s] = joint / mass
        models.append(FeatureModel.from_probabilities(
            name=fmap.name,
            feature_index=i + 1,
            hypothesis_space=space,
            alphabet=fmap.alphabet,
            probabilities=table.reshape(_squeezed_shape(table.shape, oracle, cmap)),
            conditioning_alphabet=cmap.alphabet if cmap is not None else None,
            nuisance_grid=oracle.prior_psi.grid if oracle.is_parametric else None,
        ))
    app_logger.debug(f"Derived {len(models)} feature models from the oracle")
    return models


def _squeezed_shape(shape, oracle: GenerativeOracle, cmap) -> tuple:
    h, s, c, a = shape
    out = [h]
    if oracle.is_parametric:
        out.append(s)
    if cmap is not None:
        out.append(c)
    out.append(a)
    return tuple(out)


def true_posterior(
    oracle: GenerativeOracle,
    y: str,
    psi: Optional[int] = None,
) -> FiniteDistribution:
    """pi(theta) p(y | theta) / sum_theta' pi(theta') p(y | theta'); psi integrated unless given."""
    logs = oracle.prior_theta.log_probs + oracle.log_likelihood_rows(psi)[:, oracle.y_index(y)]
    if not np.any(np.isfinite(logs)):
        raise ZeroMarginalDataError(f"y = '{y}' has zero probability under the prior mixture")
    return normalize_log(logs, oracle.hypothesis_space.labels)


def _symbol_position(fmap, symbol: str) -> int:
    try:
        return fmap.alphabet.index(symbol)
    except ValueError:
        raise SymbolNotInAlphabetError(f"'{symbol}' not in alphabet of '{fmap.name}': {fmap.alphabet}")


def clue_posterior(oracle: GenerativeOracle, obs: CluesObservation) -> FiniteDistribution:
    """
    Exact posterior given the observed clue values only: the likelihood of
    the clues is the oracle mass of the set of y reproducing all of them.
    """
    consistent = np.ones(len(oracle.y_alphabet), dtype=bool)
    for fmap, cmap in zip(oracle.feature_maps, oracle.conditioning_maps):
        if fmap.name not in obs.values:
            continue
        consistent &= np.asarray(fmap.assignment) == _symbol_position(fmap, obs.value(fmap.name))
        c = obs.conditioner(fmap.name)
        if cmap is not None and c is not None:
            consistent &= np.asarray(cmap.assignment) == _symbol_position(cmap, c)
    mass = oracle.likelihood_rows()[:, consistent].sum(axis=1)
    logs = oracle.prior_theta.log_probs + safe_log(mass)
    if not np.any(np.isfinite(logs)):
        raise ZeroMarginalDataError("The observed clue combination has zero probability")
    return normalize_log(logs, oracle.hypothesis_space.labels)


def u_star(oracle: GenerativeOracle) -> float:
    """sum_j pi(theta_j) D(p(y|theta_j) || p(y|theta_0)): the utility of the full data."""
    if oracle.is_parametric:
        raise UnsupportedModelError("u_star is defined for nuisance-free oracles")
    y = oracle.y_alphabet
    rows = oracle.likelihood_rows()
    reference = FiniteDistribution.from_probs(y, rows[0])
    prior = oracle.prior_theta.probs
    total = 0.0
    for j in range(1, oracle.hypothesis_space.size):
        if prior[j] == 0:
            continue
        total += prior[j] * kl_divergence(FiniteDistribution.from_probs(y, rows[j]), reference)
    return float(total)


@dataclass(frozen=True)
class LabeledExample:
    """One draw (theta [, psi], y) with its extracted clues."""
    y: str
    obs: CluesObservation
    theta: int
    psi: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Seeded i.i.d. sample stored column-wise.

    ``features`` and ``conditioners`` hold alphabet indices per example and
    clue; conditioners are -1 for unconditional clues.
    """
    oracle: GenerativeOracle
    y: np.ndarray
    theta: np.ndarray
    psi: Optional[np.ndarray]
    features: np.ndarray
    conditioners: np.ndarray

    def __len__(self) -> int:
        return int(self.y.size)

    def example(self, k: int) -> LabeledExample:
        values, conditioners = self.oracle.clue_values(int(self.y[k]))
        return LabeledExample(
            y=self.oracle.y_alphabet[int(self.y[k])],
            obs=CluesObservation(values, conditioners),
            theta=int(self.theta[k]),
            psi=int(self.psi[k]) if self.psi is not None else None,
        )

    def __iter__(self) -> Iterator[LabeledExample]:
        for k in range(len(self)):
            yield self.example(k)

    def pairs(self) -> List[tuple]:
        """(observation, theta) pairs as consumed by empirical utilities."""
        return [(ex.obs, ex.theta) for ex in self]


def _draw_categorical(rng: np.random.Generator, probs: np.ndarray, size: int) -> np.ndarray:
    # tables are validated to sum to 1 within tolerance; choice wants it exact
    return rng.choice(probs.size, size=size, p=probs / probs.sum())


def sample_dataset(oracle: GenerativeOracle, n: int, seed: int) -> Dataset:
    """
    n i.i.d. draws theta ~ pi, [psi ~ pi(psi)], y ~ p(y | theta [, psi]).

    Deterministic given the seed; concurrent callers need distinct seeds.
    """
    if n < 1:
        raise EmptySampleError(f"Cannot sample {n} examples; n must be at least 1")
    rng = np.random.default_rng(seed)
    theta = _draw_categorical(rng, oracle.prior_theta.probs, n)
    psi = None
    if oracle.is_parametric:
        psi = _draw_categorical(rng, oracle.prior_psi.distribution.probs, n)
    slots = psi if psi is not None else np.zeros(n, dtype=np.int64)

    y = np.zeros(n, dtype=np.int64)
    for t in range(oracle.hypothesis_space.size):
        for s in range(oracle.psi_size):
            group = np.flatnonzero((theta == t) & (slots == s))
            if group.size:
                y[group] = _draw_categorical(rng, oracle.likelihood[t, s], group.size)

    features = np.stack([np.asarray(f.assignment)[y] for f in oracle.feature_maps], axis=1)
    conditioners = np.stack([
        np.asarray(c.assignment)[y] if c is not None else np.full(n, -1)
        for c in oracle.conditioning_maps
    ], axis=1)
    app_logger.debug(f"Sampled {n} examples with seed {seed}")
    return Dataset(oracle, y, theta, psi, features, conditioners)
