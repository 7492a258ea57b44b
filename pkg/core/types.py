"""
types.py

Immutable domain containers: hypothesis spaces, finite distributions,
feature sampling tables, weight matrices and nuisance priors.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    AlphabetMismatchError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidDistributionError,
    InvalidWeightsError,
    MissingConditionerError,
    MissingNuisanceError,
    SpecValidationError,
    SymbolNotInAlphabetError,
)
from core.numerics import (
    INPUT_SIMPLEX_TOL,
    OUTPUT_SIMPLEX_TOL,
    log_normalizer,
    safe_log,
    validate_simplex,
)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _check_distinct(symbols: Sequence[str], what: str) -> Tuple[str, ...]:
    symbols = tuple(str(s) for s in symbols)
    if len(set(symbols)) != len(symbols):
        raise SpecValidationError(f"{what} contains duplicate symbols: {symbols}")
    return symbols


@dataclass(frozen=True)
class HypothesisSpace:
    """
    Finite labeled set of hypotheses with a distinguished reference.

    The reference always ends up at index 0: passing another
    ``reference_index`` moves that label to the front at construction.
    """
    labels: Tuple[str, ...]
    reference_index: int = 0

    def __post_init__(self) -> None:
        labels = _check_distinct(self.labels, "Hypothesis labels")
        if len(labels) < 2:
            raise SpecValidationError("A hypothesis space needs at least two hypotheses")
        if not 0 <= self.reference_index < len(labels):
            raise IndexOutOfRangeError(
                f"Reference index {self.reference_index} outside 0..{len(labels) - 1}"
            )
        ref = labels[self.reference_index]
        reordered = (ref,) + tuple(l for l in labels if l != ref)
        object.__setattr__(self, "labels", reordered)
        object.__setattr__(self, "reference_index", 0)

    @classmethod
    def with_reference(cls, labels: Sequence[str], reference: str) -> "HypothesisSpace":
        labels = tuple(str(l) for l in labels)
        if reference not in labels:
            raise SpecValidationError(f"Reference '{reference}' is not a hypothesis label")
        return cls(labels, labels.index(reference))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        """Number of non-reference hypotheses."""
        return len(self.labels) - 1

    @property
    def reference(self) -> str:
        return self.labels[0]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpecValidationError(f"Unknown hypothesis '{label}'")

    def check_index(self, theta: int) -> int:
        if not 0 <= theta < self.size:
            raise IndexOutOfRangeError(f"Hypothesis index {theta} outside 0..{self.m}")
        return theta


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Categorical distribution over a labeled alphabet, stored as log-probabilities."""
    alphabet: Tuple[str, ...]
    log_probs: np.ndarray

    def __post_init__(self) -> None:
        alphabet = _check_distinct(self.alphabet, "Alphabet")
        log_probs = _frozen(self.log_probs)
        if log_probs.shape != (len(alphabet),):
            raise InvalidDistributionError(
                f"Expected {len(alphabet)} log-probabilities, got shape {log_probs.shape}"
            )
        if np.any(np.isnan(log_probs)) or np.any(np.isposinf(log_probs)):
            raise InvalidDistributionError("Log-probabilities must not be NaN or +inf")
        if not validate_simplex(np.exp(log_probs), OUTPUT_SIMPLEX_TOL):
            raise InvalidDistributionError(
                f"Probabilities sum to {np.exp(log_probs).sum():.15g}, not 1"
            )
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "log_probs", log_probs)

    @classmethod
    def from_probs(
        cls,
        alphabet: Sequence[str],
        probs: Sequence[float],
        tol: float = INPUT_SIMPLEX_TOL,
    ) -> "FiniteDistribution":
        """Validate user probabilities with the input tolerance, then renormalize exactly."""
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or not validate_simplex(arr, tol):
            raise InvalidDistributionError(f"Not a probability vector: {list(arr)}")
        logs = safe_log(np.clip(arr, 0.0, None))
        return cls(tuple(alphabet), logs - log_normalizer(logs))

    @classmethod
    def uniform(cls, alphabet: Sequence[str]) -> "FiniteDistribution":
        k = len(alphabet)
        return cls(tuple(alphabet), np.full(k, -np.log(k)))

    @classmethod
    def point_mass(cls, alphabet: Sequence[str], symbol: str) -> "FiniteDistribution":
        alphabet = tuple(alphabet)
        logs = np.full(len(alphabet), -np.inf)
        logs[alphabet.index(symbol)] = 0.0
        return cls(alphabet, logs)

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    @property
    def size(self) -> int:
        return len(self.alphabet)

    def symbol_index(self, symbol: str) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise SymbolNotInAlphabetError(f"'{symbol}' not in {self.alphabet}")

    def prob(self, symbol: str) -> float:
        return float(self.probs[self.symbol_index(symbol)])

    def log_prob(self, symbol: str) -> float:
        return float(self.log_probs[self.symbol_index(symbol)])

    def as_dict(self) -> dict:
        return dict(zip(self.alphabet, self.probs.tolist()))

    def max_abs_diff(self, other: "FiniteDistribution") -> float:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatchError(f"{self.alphabet} vs {other.alphabet}")
        return float(np.max(np.abs(self.probs - other.probs)))

    def entropy(self) -> float:
        p = self.probs
        support = p > 0
        return float(-np.sum(p[support] * self.log_probs[support]))

    def argmax(self) -> int:
        return int(np.argmax(self.log_probs))


@dataclass(frozen=True, eq=False)
class NuisancePrior:
    """Prior over a finite nuisance grid."""
    grid: Tuple[str, ...]
    distribution: FiniteDistribution

    def __post_init__(self) -> None:
        grid = _check_distinct(self.grid, "Nuisance grid")
        if grid != self.distribution.alphabet:
            raise AlphabetMismatchError("Nuisance prior must be defined over its grid")
        object.__setattr__(self, "grid", grid)

    @classmethod
    def from_probs(cls, grid: Sequence[str], probs: Sequence[float]) -> "NuisancePrior":
        grid = tuple(str(g) for g in grid)
        return cls(grid, FiniteDistribution.from_probs(grid, probs))

    @classmethod
    def point_mass(cls, grid: Sequence[str], value: str) -> "NuisancePrior":
        grid = tuple(str(g) for g in grid)
        return cls(grid, FiniteDistribution.point_mass(grid, value))

    @property
    def size(self) -> int:
        return len(self.grid)

    @property
    def log_probs(self) -> np.ndarray:
        return self.distribution.log_probs


@dataclass(frozen=True, eq=False)
class FeatureModel:
    """
    Sampling tables of one clue z_i, optionally conditioned on z_i^c and
    indexed by a nuisance grid.

    ``log_table`` has shape (|Theta|, |Psi| or 1, |C| or 1, |A|); every
    innermost row is a log-probability vector over ``alphabet``.
    ``feature_index`` is the 1-based clue number i.
    """
    name: str
    feature_index: int
    hypothesis_space: HypothesisSpace
    alphabet: Tuple[str, ...]
    log_table: np.ndarray
    conditioning_alphabet: Optional[Tuple[str, ...]] = None
    nuisance_grid: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        alphabet = _check_distinct(self.alphabet, f"Alphabet of '{self.name}'")
        cond = None
        if self.conditioning_alphabet is not None:
            cond = _check_distinct(self.conditioning_alphabet, f"Conditioning alphabet of '{self.name}'")
        grid = None
        if self.nuisance_grid is not None:
            grid = _check_distinct(self.nuisance_grid, "Nuisance grid")
        table = _frozen(self.log_table)
        expected = (
            self.hypothesis_space.size,
            len(grid) if grid else 1,
            len(cond) if cond else 1,
            len(alphabet),
        )
        if table.shape != expected:
            raise DimensionMismatchError(
                f"Feature '{self.name}' table has shape {table.shape}, expected {expected}"
            )
        if np.any(np.isnan(table)) or np.any(np.isposinf(table)):
            raise InvalidDistributionError(f"Feature '{self.name}' table contains NaN or +inf")
        row_sums = np.exp(table).sum(axis=-1)
        if np.any(np.abs(row_sums - 1.0) > OUTPUT_SIMPLEX_TOL):
            raise InvalidDistributionError(f"Feature '{self.name}' has a row not summing to 1")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "conditioning_alphabet", cond)
        object.__setattr__(self, "nuisance_grid", grid)
        object.__setattr__(self, "log_table", table)

    @classmethod
    def from_probabilities(
        cls,
        name: str,
        feature_index: int,
        hypothesis_space: HypothesisSpace,
        alphabet: Sequence[str],
        probabilities,
        conditioning_alphabet: Optional[Sequence[str]] = None,
        nuisance_grid: Optional[Sequence[str]] = None,
    ) -> "FeatureModel":
        """
        Build from a probability array shaped (|Theta|, [|Psi|], [|C|], |A|).

        Each row is checked with the input tolerance and renormalized.
        """
        probs = np.asarray(probabilities, dtype=np.float64)
        if nuisance_grid is None:
            probs = probs[:, np.newaxis, ...]
        if conditioning_alphabet is None:
            probs = probs[:, :, np.newaxis, ...]
        if probs.ndim != 4:
            raise DimensionMismatchError(f"Feature '{name}' probabilities have the wrong rank")
        if np.any(np.isnan(probs)) or np.any(probs < -INPUT_SIMPLEX_TOL):
            raise InvalidDistributionError(f"Feature '{name}' has negative or NaN probabilities")
        sums = probs.sum(axis=-1, keepdims=True)
        if np.any(np.abs(sums - 1.0) > INPUT_SIMPLEX_TOL):
            raise InvalidDistributionError(f"Feature '{name}' has a row not summing to 1")
        logs = safe_log(np.clip(probs, 0.0, None)) - np.log(sums)
        return cls(
            name=name,
            feature_index=feature_index,
            hypothesis_space=hypothesis_space,
            alphabet=tuple(alphabet),
            log_table=logs,
            conditioning_alphabet=tuple(conditioning_alphabet) if conditioning_alphabet else None,
            nuisance_grid=tuple(nuisance_grid) if nuisance_grid else None,
        )

    @property
    def is_conditional(self) -> bool:
        return self.conditioning_alphabet is not None

    @property
    def is_parametric(self) -> bool:
        return self.nuisance_grid is not None

    def symbol_index(self, symbol: str) -> int:
        try:
            return self.alphabet.index(symbol)
        except ValueError:
            raise SymbolNotInAlphabetError(
                f"'{symbol}' not in alphabet of feature '{self.name}': {self.alphabet}"
            )

    def conditioner_index(self, conditioner: Optional[str]) -> int:
        if not self.is_conditional:
            return 0
        if conditioner is None:
            raise MissingConditionerError(f"Feature '{self.name}' needs a conditioning value")
        try:
            return self.conditioning_alphabet.index(conditioner)
        except ValueError:
            raise SymbolNotInAlphabetError(
                f"'{conditioner}' not in conditioning alphabet of '{self.name}'"
            )

    def nuisance_index(self, psi: Optional[int]) -> int:
        """Grid slot for psi; non-parametric models are constant in psi."""
        if not self.is_parametric:
            return 0
        if psi is None:
            raise MissingNuisanceError(f"Feature '{self.name}' needs a nuisance value")
        if not 0 <= psi < len(self.nuisance_grid):
            raise IndexOutOfRangeError(f"Nuisance index {psi} outside the grid of '{self.name}'")
        return psi

    def distribution(
        self,
        theta: int,
        psi: Optional[int] = None,
        conditioner: Optional[str] = None,
    ) -> FiniteDistribution:
        self.hypothesis_space.check_index(theta)
        row = self.log_table[theta, self.nuisance_index(psi), self.conditioner_index(conditioner)]
        return FiniteDistribution(self.alphabet, row)

    def log_likelihoods(
        self,
        symbol: str,
        psi: Optional[int] = None,
        conditioner: Optional[str] = None,
    ) -> np.ndarray:
        """log p(z_i = symbol | theta [, psi][, z_i^c]) for every hypothesis."""
        return self.log_table[
            :, self.nuisance_index(psi), self.conditioner_index(conditioner), self.symbol_index(symbol)
        ]


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """
    n x m matrix of clue weights, one simplex column per non-reference hypothesis.

    Column j (1-based, matching hypothesis index) is ``entries[:, j - 1]``;
    the reference carries no weights, w_i(theta_0) = 0.
    """
    entries: np.ndarray
    notes: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise DimensionMismatchError(f"Weight matrix must be n x m, got shape {entries.shape}")
        for j in range(entries.shape[1]):
            if not validate_simplex(entries[:, j], INPUT_SIMPLEX_TOL):
                raise InvalidWeightsError(
                    f"Weight column {j + 1} is not on the simplex: {entries[:, j].tolist()}"
                )
        object.__setattr__(self, "entries", _frozen(np.clip(entries, 0.0, None)))
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def constant(cls, column: Sequence[float], m: int) -> "WeightMatrix":
        col = np.asarray(column, dtype=np.float64).reshape(-1, 1)
        return cls(np.repeat(col, m, axis=1))

    @classmethod
    def uniform(cls, n: int, m: int) -> "WeightMatrix":
        return cls(np.full((n, m), 1.0 / n))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.m:
            raise IndexOutOfRangeError(f"Weight column {j} outside 1..{self.m}")
        return self.entries[:, j - 1]

    def weight(self, i: int, theta: int) -> float:
        """w_i(theta) with i a 0-based clue position; zero at the reference."""
        if theta == 0:
            return 0.0
        return float(self.column(theta)[i])

    def has_identical_columns(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.entries - self.entries[:, :1]) <= tol))
