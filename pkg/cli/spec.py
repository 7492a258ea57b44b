"""
spec.py

Problem specifications: a single JSON document naming the hypotheses, the
prior, the clue model (explicit feature tables or a generative oracle), an
optional nuisance grid and the weight mode.

Probabilities in files are plain decimals; the log domain never leaks out.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import SpecValidationError, UnsupportedModelError
from core.types import FeatureModel, FiniteDistribution, HypothesisSpace, NuisancePrior, WeightMatrix
from nuisance.optimizer import nuisance_utility_from_models, nuisance_utility_matrix
from oracle.inference import derive_feature_models
from oracle.model import FeatureMap, GenerativeOracle
from pool.observation import CluesObservation
from scl.super_composite import pdf_projection_matrix
from utils import app_logger
from weights.optimizer import optimal_constant_weights, optimal_weights, tie_sets
from weights.utility import UtilityMatrix, oracle_utility_matrix, utility_matrix

WEIGHT_MODES = ("uniform", "equal-columns", "optimal", "pdf-projection", "explicit")


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise SpecValidationError(f"{where} is missing '{key}'")
    return doc[key]


def _ordered(mapping: Mapping[str, Any], keys: Sequence[str], where: str) -> List[Any]:
    """Values of a {label: value} block in the given label order."""
    if not isinstance(mapping, Mapping):
        raise SpecValidationError(f"{where} must be an object keyed by {list(keys)}")
    extra = set(mapping) - set(keys)
    if extra:
        raise SpecValidationError(f"{where} has unknown keys {sorted(extra)}")
    return [_require(mapping, k, where) for k in keys]


def _probability(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SpecValidationError(f"{where} holds a non-numeric probability {value!r}")
    try:
        return float(value)
    except ValueError:
        raise SpecValidationError(f"{where} holds a non-numeric probability {value!r}")


def _probability_block(block: Any, labels: Sequence[str], where: str) -> List[float]:
    if isinstance(block, Mapping):
        return [_probability(v, where) for v in _ordered(block, labels, where)]
    if isinstance(block, (list, tuple)) and len(block) == len(labels):
        return [_probability(v, where) for v in block]
    raise SpecValidationError(f"{where} must list {len(labels)} probabilities")


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Parsed problem: everything a command needs, with the reference at index 0."""
    hypothesis_space: HypothesisSpace
    prior: FiniteDistribution
    feature_models: Tuple[FeatureModel, ...]
    oracle: Optional[GenerativeOracle] = None
    nuisance_prior: Optional[NuisancePrior] = None
    weight_mode: str = "optimal"
    weight_options: Dict[str, Any] = field(default_factory=dict)

    @property
    def feature_names(self) -> List[str]:
        return [m.name for m in self.feature_models]

    @property
    def is_parametric(self) -> bool:
        return self.nuisance_prior is not None

    def require_oracle(self) -> GenerativeOracle:
        if self.oracle is None:
            raise UnsupportedModelError("This command needs a problem spec with an 'oracle' block")
        return self.oracle

    def utility(self) -> UtilityMatrix:
        """u_ij (or the nuisance-averaged ubar_ij) from the best available source."""
        if self.nuisance_prior is not None:
            if self.oracle is not None:
                return nuisance_utility_matrix(self.oracle, self.nuisance_prior)
            return nuisance_utility_from_models(
                self.feature_models, self.hypothesis_space, self.nuisance_prior
            )
        if self.oracle is not None:
            return oracle_utility_matrix(self.oracle)
        return utility_matrix(self.feature_models, self.hypothesis_space)

    def mask(self) -> Optional[np.ndarray]:
        """Allowed (clue, hypothesis) cells from weights.allowed = {label: [features]}."""
        allowed = self.weight_options.get("allowed")
        if allowed is None:
            return None
        space = self.hypothesis_space
        names = self.feature_names
        out = np.ones((len(names), space.m), dtype=bool)
        for label, features in allowed.items():
            j = space.index(label)
            if j == 0:
                raise SpecValidationError("The reference carries no weights; it cannot be masked")
            unknown = set(features) - set(names)
            if unknown:
                raise SpecValidationError(f"Mask for '{label}' names unknown features {sorted(unknown)}")
            out[:, j - 1] = [name in features for name in names]
        return out

    def optimal_weights(self, U: Optional[UtilityMatrix] = None) -> WeightMatrix:
        U = U if U is not None else self.utility()
        return optimal_weights(U, mask=self.mask(), labels=self.hypothesis_space.labels)

    def tie_sets(self, U: UtilityMatrix) -> List[Tuple[int, ...]]:
        return tie_sets(U, mask=self.mask())

    def argmax_iota(self, U: Optional[UtilityMatrix] = None) -> Dict[int, int]:
        """1-based iota(j) = first clue of the tie set of column j."""
        sets = self.tie_sets(U if U is not None else self.utility())
        return {j: winners[0] + 1 for j, winners in enumerate(sets, start=1)}

    def resolve_weights(self) -> WeightMatrix:
        """The W selected by the spec's weight mode."""
        n, m = len(self.feature_models), self.hypothesis_space.m
        mode, options = self.weight_mode, self.weight_options
        space = self.hypothesis_space
        if mode == "uniform":
            return WeightMatrix.uniform(n, m)
        if mode == "equal-columns":
            if "column" in options:
                return WeightMatrix.constant(
                    _probability_block(options["column"], self.feature_names, "weights.column"), m
                )
            return optimal_constant_weights(self.utility(), self.prior)
        if mode == "optimal":
            return self.optimal_weights()
        if mode == "pdf-projection":
            if "iota" not in options:
                return pdf_projection_matrix(self.argmax_iota(), n)
            iota = {}
            targets = _ordered(options["iota"], space.labels[1:], "weights.iota")
            for label, feature in zip(space.labels[1:], targets):
                if feature not in self.feature_names:
                    raise SpecValidationError(f"weights.iota maps '{label}' to unknown '{feature}'")
                iota[space.index(label)] = self.feature_names.index(feature) + 1
            return pdf_projection_matrix(iota, n)
        if mode == "explicit":
            matrix = _require(options, "matrix", "weights")
            columns = [
                _probability_block(col, self.feature_names, f"weights.matrix.{label}")
                for label, col in zip(space.labels[1:], _ordered(matrix, space.labels[1:], "weights.matrix"))
            ]
            return WeightMatrix(np.column_stack(columns))
        raise SpecValidationError(f"Unknown weight mode '{mode}'; expected one of {WEIGHT_MODES}")


# --- parsing ------------------------------------------------------------------

def _parse_nuisance(doc: Mapping[str, Any]) -> NuisancePrior:
    grid = [str(g) for g in _require(doc, "grid", "nuisance")]
    probs = doc.get("prior")
    if probs is None:
        return NuisancePrior(tuple(grid), FiniteDistribution.uniform(grid))
    return NuisancePrior.from_probs(grid, _probability_block(probs, grid, "nuisance.prior"))


def _table_array(
    table: Mapping[str, Any],
    space: HypothesisSpace,
    grid: Optional[Sequence[str]],
    conditioning: Optional[Sequence[str]],
    alphabet: Sequence[str],
    where: str,
) -> np.ndarray:
    """Nested {theta: [psi:] [c:] probs} blocks into an array (|Theta|, [|Psi|], [|C|], |A|)."""
    def leaf(block, path):
        return _probability_block(block, alphabet, path)

    def by_conditioner(block, path):
        if conditioning is None:
            return leaf(block, path)
        return [leaf(b, f"{path}.{c}") for c, b in zip(conditioning, _ordered(block, conditioning, path))]

    def by_psi(block, path):
        if grid is None:
            return by_conditioner(block, path)
        return [by_conditioner(b, f"{path}.{g}") for g, b in zip(grid, _ordered(block, grid, path))]

    rows = [by_psi(b, f"{where}.{t}") for t, b in zip(space.labels, _ordered(table, space.labels, where))]
    return np.array(rows, dtype=np.float64)


def _parse_features(
    docs: Sequence[Mapping[str, Any]],
    space: HypothesisSpace,
    nuisance: Optional[NuisancePrior],
) -> Tuple[FeatureModel, ...]:
    models = []
    for i, doc in enumerate(docs):
        name = str(_require(doc, "name", f"features[{i}]"))
        alphabet = [str(a) for a in _require(doc, "alphabet", f"feature '{name}'")]
        conditioning = doc.get("conditioning_alphabet")
        conditioning = [str(c) for c in conditioning] if conditioning else None
        parametric = bool(doc.get("parametric", False))
        if parametric and nuisance is None:
            raise SpecValidationError(f"Feature '{name}' is parametric but the spec has no nuisance grid")
        grid = list(nuisance.grid) if parametric else None
        table = _table_array(
            _require(doc, "table", f"feature '{name}'"), space, grid, conditioning, alphabet, name
        )
        models.append(FeatureModel.from_probabilities(
            name=name,
            feature_index=i + 1,
            hypothesis_space=space,
            alphabet=alphabet,
            probabilities=table,
            conditioning_alphabet=conditioning,
            nuisance_grid=grid,
        ))
    return tuple(models)


def _parse_map(doc: Mapping[str, Any], y_alphabet: Sequence[str], name: str) -> FeatureMap:
    block = _require(doc, "map", f"feature '{name}'")
    if not isinstance(block, Mapping):
        raise SpecValidationError(f"feature '{name}' map must be an object keyed by y symbol")
    mapping = {str(k): str(v) for k, v in block.items()}
    alphabet = doc.get("alphabet")
    return FeatureMap.from_mapping(name, y_alphabet, mapping, alphabet)


def _parse_oracle(
    doc: Mapping[str, Any],
    space: HypothesisSpace,
    prior: FiniteDistribution,
    nuisance: Optional[NuisancePrior],
) -> GenerativeOracle:
    y_alphabet = [str(y) for y in _require(doc, "y_alphabet", "oracle")]
    grid = list(nuisance.grid) if nuisance is not None else None

    def rows(block, path):
        if grid is None:
            return [_probability_block(block, y_alphabet, path)]
        return [_probability_block(b, y_alphabet, f"{path}.{g}") for g, b in zip(grid, _ordered(block, grid, path))]

    likelihood = [
        rows(b, f"oracle.likelihood.{t}")
        for t, b in zip(space.labels, _ordered(_require(doc, "likelihood", "oracle"), space.labels, "oracle.likelihood"))
    ]
    feature_maps, conditioning_maps = [], []
    for i, fdoc in enumerate(_require(doc, "features", "oracle")):
        name = str(_require(fdoc, "name", f"oracle.features[{i}]"))
        feature_maps.append(_parse_map(fdoc, y_alphabet, name))
        cond = fdoc.get("conditioning")
        if cond is not None and not isinstance(cond, Mapping):
            raise SpecValidationError(f"oracle feature '{name}' conditioning must be an object")
        conditioning_maps.append(
            _parse_map(cond, y_alphabet, str(cond.get("name", f"{name}^c"))) if cond else None
        )
    return GenerativeOracle(
        hypothesis_space=space,
        y_alphabet=tuple(y_alphabet),
        likelihood=np.array(likelihood),
        feature_maps=tuple(feature_maps),
        prior_theta=prior,
        conditioning_maps=tuple(conditioning_maps),
        prior_psi=nuisance,
    )


def parse_problem(doc: Mapping[str, Any]) -> ProblemSpec:
    """Build a ProblemSpec from a parsed JSON document."""
    labels = [str(h) for h in _require(doc, "hypotheses", "spec")]
    reference = str(doc.get("reference", labels[0] if labels else ""))
    space = HypothesisSpace.with_reference(labels, reference)

    prior_block = doc.get("prior")
    if prior_block is None:
        prior = FiniteDistribution.uniform(space.labels)
    else:
        if not isinstance(prior_block, Mapping):
            raise SpecValidationError("prior must be an object keyed by hypothesis label")
        prior = FiniteDistribution.from_probs(
            space.labels, _probability_block(prior_block, space.labels, "prior")
        )

    nuisance = _parse_nuisance(doc["nuisance"]) if doc.get("nuisance") else None

    has_features, has_oracle = "features" in doc, "oracle" in doc
    if has_features == has_oracle:
        raise SpecValidationError("A spec needs exactly one of 'features' or 'oracle'")
    oracle = None
    if has_oracle:
        oracle = _parse_oracle(doc["oracle"], space, prior, nuisance)
        models = tuple(derive_feature_models(oracle))
    else:
        models = _parse_features(doc["features"], space, nuisance)
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        raise SpecValidationError(f"Feature names must be distinct: {names}")

    weights = dict(doc.get("weights") or {})
    mode = str(weights.pop("mode", "optimal"))
    if mode not in WEIGHT_MODES:
        raise SpecValidationError(f"Unknown weight mode '{mode}'; expected one of {WEIGHT_MODES}")

    app_logger.debug(
        f"Parsed problem: {space.size} hypotheses (reference '{space.reference}'), "
        f"{len(models)} clues, oracle={'yes' if oracle else 'no'}, weights={mode}"
    )
    return ProblemSpec(space, prior, models, oracle, nuisance, mode, weights)


def _read_json(path: str, what: str) -> Any:
    try:
        with open(Path(path), "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SpecValidationError(f"{what} {path} is not valid JSON: {e}")
    except OSError as e:
        raise SpecValidationError(f"Cannot read {what} {path}: {e}")


def load_problem(path: str) -> ProblemSpec:
    doc = _read_json(path, "problem spec")
    if not isinstance(doc, Mapping):
        raise SpecValidationError("A problem spec must be a JSON object")
    try:
        return parse_problem(doc)
    except (TypeError, AttributeError, ValueError) as e:
        # a block of the wrong JSON type somewhere deep in the document
        raise SpecValidationError(f"Malformed problem spec {path}: {e}") from e


def parse_observation(doc: Mapping[str, Any], spec: ProblemSpec) -> Tuple[CluesObservation, Optional[str]]:
    """
    Observation {feature: symbol, conditioners?: {...}, y?: symbol}.

    With an oracle and a raw ``y``, missing clue values are extracted from y.
    """
    doc = dict(doc)
    y = doc.pop("y", None)
    conditioners = dict(doc.pop("conditioners", None) or {})
    values = {str(k): str(v) for k, v in doc.items()}
    if y is not None:
        oracle = spec.require_oracle()
        extracted, extracted_cond = oracle.clue_values(oracle.y_index(str(y)))
        values = {**extracted, **values}
        conditioners = {**extracted_cond, **conditioners}
    obs = CluesObservation(values, conditioners)
    for model in spec.feature_models:
        model.symbol_index(obs.value(model.name))
        if model.is_conditional:
            model.conditioner_index(obs.conditioner(model.name))
    return obs, (str(y) if y is not None else None)


def load_observation(path: str, spec: ProblemSpec) -> Tuple[CluesObservation, Optional[str]]:
    doc = _read_json(path, "observation")
    if not isinstance(doc, Mapping):
        raise SpecValidationError("An observation must be a JSON object")
    return parse_observation(doc, spec)


def oracle_to_document(oracle: GenerativeOracle) -> Dict[str, Any]:
    """A problem document reproducing an oracle; loadable with parse_problem."""
    space = oracle.hypothesis_space
    y = list(oracle.y_alphabet)
    doc: Dict[str, Any] = {
        "hypotheses": list(space.labels),
        "reference": space.reference,
        "prior": oracle.prior_theta.as_dict(),
    }
    if oracle.is_parametric:
        doc["nuisance"] = {
            "grid": list(oracle.prior_psi.grid),
            "prior": oracle.prior_psi.distribution.as_dict(),
        }

    def row(values):
        return dict(zip(y, (float(v) for v in values)))

    likelihood = {}
    for t, label in enumerate(space.labels):
        if oracle.is_parametric:
            likelihood[label] = {g: row(oracle.likelihood[t, s]) for s, g in enumerate(oracle.prior_psi.grid)}
        else:
            likelihood[label] = row(oracle.likelihood[t, 0])
    features = []
    for fmap, cmap in zip(oracle.feature_maps, oracle.conditioning_maps):
        entry: Dict[str, Any] = {
            "name": fmap.name,
            "alphabet": list(fmap.alphabet),
            "map": fmap.as_mapping(y),
        }
        if cmap is not None:
            entry["conditioning"] = {"name": cmap.name, "alphabet": list(cmap.alphabet), "map": cmap.as_mapping(y)}
        features.append(entry)
    doc["oracle"] = {"y_alphabet": y, "likelihood": likelihood, "features": features}
    return doc
