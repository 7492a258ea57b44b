"""
model.py

Full generative models on a finite data alphabet: ground truth for every
check in sclkit.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    AlphabetMismatchError,
    CapExceededError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidDistributionError,
    SpecValidationError,
    SymbolNotInAlphabetError,
    UnsupportedModelError,
)
from core.numerics import INPUT_SIMPLEX_TOL, safe_log
from core.types import FiniteDistribution, HypothesisSpace, NuisancePrior
from utils import config

MAX_Y_SIZE = config.get_int("oracle.max_y_size", 10_000)
MAX_HYPOTHESES = config.get_int("oracle.max_hypotheses", 64)
MAX_NUISANCE_GRID = config.get_int("oracle.max_nuisance_grid", 64)
MAX_FEATURE_ALPHABET = config.get_int("oracle.max_feature_alphabet", 256)


@dataclass(frozen=True, eq=False)
class FeatureMap:
    """
    Deterministic map f: Y -> A stored as the alphabet index of f(y) for
    every y in order.
    """
    name: str
    alphabet: Tuple[str, ...]
    assignment: Tuple[int, ...]

    def __post_init__(self) -> None:
        alphabet = tuple(str(a) for a in self.alphabet)
        if len(set(alphabet)) != len(alphabet) or not alphabet:
            raise SpecValidationError(f"Feature map '{self.name}' needs distinct symbols")
        if len(alphabet) > MAX_FEATURE_ALPHABET:
            raise CapExceededError(
                f"Feature '{self.name}' alphabet has {len(alphabet)} symbols "
                f"(cap {MAX_FEATURE_ALPHABET})"
            )
        assignment = tuple(int(a) for a in self.assignment)
        if any(not 0 <= a < len(alphabet) for a in assignment):
            raise IndexOutOfRangeError(f"Feature map '{self.name}' points outside its alphabet")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def from_mapping(
        cls,
        name: str,
        y_alphabet: Sequence[str],
        mapping: Mapping[str, str],
        alphabet: Optional[Sequence[str]] = None,
    ) -> "FeatureMap":
        """Build from {y: z}; the alphabet defaults to first-appearance order."""
        missing = [y for y in y_alphabet if y not in mapping]
        if missing:
            raise SpecValidationError(f"Feature map '{name}' is not total: no image for {missing}")
        if alphabet is None:
            alphabet = list(dict.fromkeys(str(mapping[y]) for y in y_alphabet))
        alphabet = tuple(str(a) for a in alphabet)
        index = {a: k for k, a in enumerate(alphabet)}
        try:
            assignment = tuple(index[str(mapping[y])] for y in y_alphabet)
        except KeyError as e:
            raise SymbolNotInAlphabetError(f"Feature map '{name}' produces {e} outside its alphabet")
        return cls(name, alphabet, assignment)

    @classmethod
    def identity(cls, name: str, y_alphabet: Sequence[str]) -> "FeatureMap":
        return cls(name, tuple(y_alphabet), tuple(range(len(y_alphabet))))

    @classmethod
    def constant(cls, name: str, y_size: int, symbol: str = "*") -> "FeatureMap":
        return cls(name, (symbol,), (0,) * y_size)

    @property
    def y_size(self) -> int:
        return len(self.assignment)

    def apply(self, y_index: int) -> str:
        return self.alphabet[self.assignment[y_index]]

    def level_set(self, symbol: str) -> List[int]:
        """Gamma(z) = {y : f(y) = z} as y indices."""
        k = self.alphabet.index(symbol)
        return [y for y, a in enumerate(self.assignment) if a == k]

    def induce(self, probs: np.ndarray) -> np.ndarray:
        """Push a distribution over Y forward to the feature alphabet."""
        return np.bincount(
            np.asarray(self.assignment, dtype=np.int64),
            weights=np.asarray(probs, dtype=np.float64),
            minlength=len(self.alphabet),
        )

    def as_mapping(self, y_alphabet: Sequence[str]) -> Dict[str, str]:
        return {y: self.apply(k) for k, y in enumerate(y_alphabet)}


@dataclass(frozen=True, eq=False)
class GenerativeOracle:
    """
    p(y | theta [, psi]) tables on a finite Y together with the clue
    extraction maps f_i (and optional conditioning maps f_i^c).

    ``likelihood`` has shape (|Theta|, |Psi| or 1, |Y|).
    """
    hypothesis_space: HypothesisSpace
    y_alphabet: Tuple[str, ...]
    likelihood: np.ndarray
    feature_maps: Tuple[FeatureMap, ...]
    prior_theta: FiniteDistribution
    conditioning_maps: Tuple[Optional[FeatureMap], ...] = field(default=())
    prior_psi: Optional[NuisancePrior] = None

    def __post_init__(self) -> None:
        space = self.hypothesis_space
        y_alphabet = tuple(str(y) for y in self.y_alphabet)
        if len(set(y_alphabet)) != len(y_alphabet) or not y_alphabet:
            raise SpecValidationError("Y alphabet must be non-empty with distinct symbols")
        if len(y_alphabet) > MAX_Y_SIZE:
            raise CapExceededError(f"|Y| = {len(y_alphabet)} exceeds the cap {MAX_Y_SIZE}")
        if space.size > MAX_HYPOTHESES:
            raise CapExceededError(f"|Theta| = {space.size} exceeds the cap {MAX_HYPOTHESES}")
        psi_size = 1
        if self.prior_psi is not None:
            psi_size = self.prior_psi.size
            if psi_size > MAX_NUISANCE_GRID:
                raise CapExceededError(f"Nuisance grid of {psi_size} exceeds the cap {MAX_NUISANCE_GRID}")

        likelihood = np.array(self.likelihood, dtype=np.float64)
        if likelihood.shape != (space.size, psi_size, len(y_alphabet)):
            raise DimensionMismatchError(
                f"Likelihood shape {likelihood.shape}, expected "
                f"{(space.size, psi_size, len(y_alphabet))}"
            )
        if np.any(np.isnan(likelihood)) or np.any(likelihood < -INPUT_SIMPLEX_TOL):
            raise InvalidDistributionError("Likelihood rows contain negative or NaN entries")
        sums = likelihood.sum(axis=-1, keepdims=True)
        if np.any(np.abs(sums - 1.0) > INPUT_SIMPLEX_TOL):
            raise InvalidDistributionError("Every likelihood row must sum to one")
        likelihood = np.clip(likelihood, 0.0, None) / sums
        likelihood.setflags(write=False)

        if self.prior_theta.alphabet != space.labels:
            raise AlphabetMismatchError("Prior over Theta must follow the hypothesis labels")
        if not self.feature_maps:
            raise SpecValidationError("An oracle needs at least one feature map")
        for fmap in self.feature_maps:
            if fmap.y_size != len(y_alphabet):
                raise SpecValidationError(f"Feature map '{fmap.name}' is not total on Y")
        names = [f.name for f in self.feature_maps]
        if len(set(names)) != len(names):
            raise SpecValidationError(f"Feature names must be distinct: {names}")

        cond = tuple(self.conditioning_maps) or (None,) * len(self.feature_maps)
        if len(cond) != len(self.feature_maps):
            raise DimensionMismatchError("One conditioning slot per feature map is required")
        for cmap in cond:
            if cmap is not None and cmap.y_size != len(y_alphabet):
                raise SpecValidationError(f"Conditioning map '{cmap.name}' is not total on Y")

        object.__setattr__(self, "y_alphabet", y_alphabet)
        object.__setattr__(self, "likelihood", likelihood)
        object.__setattr__(self, "feature_maps", tuple(self.feature_maps))
        object.__setattr__(self, "conditioning_maps", cond)

    @property
    def n_features(self) -> int:
        return len(self.feature_maps)

    @property
    def is_parametric(self) -> bool:
        return self.prior_psi is not None

    @property
    def psi_size(self) -> int:
        return self.prior_psi.size if self.prior_psi is not None else 1

    def y_index(self, y: str) -> int:
        try:
            return self.y_alphabet.index(str(y))
        except ValueError:
            raise SymbolNotInAlphabetError(f"'{y}' is not in the Y alphabet")

    def check_psi(self, psi: Optional[int]) -> None:
        if psi is None:
            return
        if not self.is_parametric:
            raise UnsupportedModelError("This oracle has no nuisance parameter")
        if not 0 <= psi < self.psi_size:
            raise IndexOutOfRangeError(f"Nuisance index {psi} outside 0..{self.psi_size - 1}")

    def likelihood_rows(self, psi: Optional[int] = None) -> np.ndarray:
        """
        (|Theta|, |Y|) sampling table. With psi omitted on a parametric
        oracle the nuisance is integrated out under its prior.
        """
        self.check_psi(psi)
        if psi is not None:
            return self.likelihood[:, psi, :]
        if not self.is_parametric:
            return self.likelihood[:, 0, :]
        return np.einsum("s,tsy->ty", self.prior_psi.distribution.probs, self.likelihood)

    def log_likelihood_rows(self, psi: Optional[int] = None) -> np.ndarray:
        return safe_log(self.likelihood_rows(psi))

    def joint_feature_probs(self, feature: int, theta: int, psi: Optional[int] = None) -> np.ndarray:
        """(|C| or 1, |A|) joint mass of (z_i^c, z_i) under p(y | theta [, psi])."""
        if not 0 <= feature < self.n_features:
            raise IndexOutOfRangeError(f"Feature position {feature} outside 0..{self.n_features - 1}")
        self.hypothesis_space.check_index(theta)
        fmap = self.feature_maps[feature]
        cmap = self.conditioning_maps[feature]
        rows = self.likelihood_rows(psi)[theta]
        n_cond = len(cmap.alphabet) if cmap is not None else 1
        c_idx = np.asarray(cmap.assignment if cmap is not None else (0,) * len(rows))
        joint = np.zeros((n_cond, len(fmap.alphabet)))
        np.add.at(joint, (c_idx, np.asarray(fmap.assignment)), rows)
        return joint

    def clue_values(self, y_index: int) -> Tuple[Dict[str, str], Dict[str, str]]:
        """Observed clue symbols and conditioning symbols for datum y."""
        values = {f.name: f.apply(y_index) for f in self.feature_maps}
        conditioners = {
            f.name: c.apply(y_index)
            for f, c in zip(self.feature_maps, self.conditioning_maps)
            if c is not None
        }
        return values, conditioners

    def with_reference(self, label: str) -> "GenerativeOracle":
        """Same model with another hypothesis designated as the reference."""
        space = HypothesisSpace.with_reference(self.hypothesis_space.labels, label)
        order = [self.hypothesis_space.index(l) for l in space.labels]
        prior = FiniteDistribution(space.labels, self.prior_theta.log_probs[order])
        return GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=self.y_alphabet,
            likelihood=self.likelihood[order],
            feature_maps=self.feature_maps,
            prior_theta=prior,
            conditioning_maps=self.conditioning_maps,
            prior_psi=self.prior_psi,
        )

