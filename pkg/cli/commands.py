"""
commands.py

The experiment commands behind the sclkit CLI. Each command returns a
plain report dictionary; rendering is left to report_generators.
"""

from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.operations import kl_divergence
from core.types import FiniteDistribution, WeightMatrix
from nuisance.evidence import (
    composite_evidence_posterior,
    naive_bayes_evidence_posterior,
    nuisance_posterior,
    super_composite_evidence_vector,
)
from oracle.inference import Dataset, clue_posterior, sample_dataset, true_posterior
from oracle.model import GenerativeOracle
from pool.composite import log_linear_pool, naive_bayes_posterior
from pool.observation import CluesObservation
from scl.super_composite import pdf_projection_matrix, scl_log_vector, scl_posterior
from cli.spec import ProblemSpec
from utils import app_logger

METHODS = ("naive-bayes", "cl-uniform", "scl-optimal", "pdf-projection", "true")

Table = Tuple[List[str], List[List[Any]]]


def _posterior_and_logs(
    spec: ProblemSpec,
    obs: CluesObservation,
    W: WeightMatrix,
) -> Tuple[FiniteDistribution, np.ndarray]:
    models = spec.feature_models
    if spec.is_parametric:
        return (
            nuisance_posterior(spec.prior, models, obs, W, spec.nuisance_prior),
            super_composite_evidence_vector(models, obs, W, spec.nuisance_prior),
        )
    return scl_posterior(spec.prior, models, obs, W), scl_log_vector(models, obs, W)


def cmd_infer(spec: ProblemSpec, obs: CluesObservation, y: Optional[str] = None) -> Dict[str, Any]:
    """
    SCL posterior for one observation. With an oracle, the exact posterior
    (given y, or given the clues alone) and the gap D(truth || scl) are added.
    """
    W = spec.resolve_weights()
    posterior, log_scl = _posterior_and_logs(spec, obs, W)
    labels = spec.hypothesis_space.labels
    report: Dict[str, Any] = {
        "method": f"scl-{spec.weight_mode}",
        "reference": spec.hypothesis_space.reference,
        "posterior": posterior.as_dict(),
        "log_scl": dict(zip(labels, log_scl.tolist())),
    }
    if spec.oracle is not None:
        truth = true_posterior(spec.oracle, y) if y is not None else clue_posterior(spec.oracle, obs)
        report["true_posterior"] = truth.as_dict()
        report["kl_to_truth"] = kl_divergence(truth, posterior)
    for note in W.notes:
        app_logger.info(f"Weights: {note}")
    return report


def infer_table(report: Dict[str, Any]) -> Table:
    headers = ["hypothesis", "posterior", "log_scl"]
    has_truth = "true_posterior" in report
    if has_truth:
        headers.append("true_posterior")
    rows = []
    for label, prob in report["posterior"].items():
        row = [label, prob, report["log_scl"][label]]
        if has_truth:
            row.append(report["true_posterior"][label])
        rows.append(row)
    return headers, rows


def cmd_optimize(spec: ProblemSpec) -> Dict[str, Any]:
    """Utilities, the optimal weights and the per-column tie sets."""
    U = spec.utility()
    W = spec.optimal_weights(U)
    space = spec.hypothesis_space
    names = spec.feature_names
    alternatives = space.labels[1:]
    report: Dict[str, Any] = {
        "reference": space.reference,
        "nuisance": spec.is_parametric,
        "features": names,
        "utility": {
            label: dict(zip(names, U.column(j).tolist()))
            for j, label in enumerate(alternatives, start=1)
        },
        "weights": {
            label: dict(zip(names, W.column(j).tolist()))
            for j, label in enumerate(alternatives, start=1)
        },
        "tie_sets": {
            label: [names[i] for i in winners]
            for label, winners in zip(alternatives, spec.tie_sets(U))
        },
        "warnings": list(W.notes),
    }
    return report


def optimize_table(report: Dict[str, Any]) -> Table:
    """One row per (hypothesis, clue); ``tied`` marks membership of the column's tie set."""
    headers = ["hypothesis", "feature", "utility", "weight", "tied"]
    rows = [
        [
            label,
            name,
            report["utility"][label][name],
            report["weights"][label][name],
            name in report["tie_sets"][label],
        ]
        for label in report["utility"]
        for name in report["features"]
    ]
    return headers, rows


def _method_posteriors(spec: ProblemSpec) -> Dict[str, Callable[[CluesObservation], FiniteDistribution]]:
    """Posterior functions of every compared method except the truth."""
    models = spec.feature_models
    n = len(models)
    U = spec.utility()
    W_opt = spec.optimal_weights(U)
    W_pdf = pdf_projection_matrix(spec.argmax_iota(U), n)
    uniform = np.full(n, 1.0 / n)
    prior = spec.prior
    if spec.is_parametric:
        psi = spec.nuisance_prior
        return {
            "naive-bayes": lambda obs: naive_bayes_evidence_posterior(prior, models, obs, psi),
            "cl-uniform": lambda obs: composite_evidence_posterior(prior, models, obs, uniform, psi),
            "scl-optimal": lambda obs: nuisance_posterior(prior, models, obs, W_opt, psi),
            "pdf-projection": lambda obs: nuisance_posterior(prior, models, obs, W_pdf, psi),
        }
    return {
        "naive-bayes": lambda obs: naive_bayes_posterior(prior, models, obs),
        "cl-uniform": lambda obs: log_linear_pool(prior, models, obs, uniform),
        "scl-optimal": lambda obs: scl_posterior(prior, models, obs, W_opt),
        "pdf-projection": lambda obs: scl_posterior(prior, models, obs, W_pdf),
    }


def _solve_y(
    oracle: GenerativeOracle,
    methods: Dict[str, Callable[[CluesObservation], FiniteDistribution]],
    y: int,
) -> Dict[str, FiniteDistribution]:
    values, conditioners = oracle.clue_values(y)
    obs = CluesObservation(values, conditioners)
    solved = {name: fn(obs) for name, fn in methods.items()}
    solved["true"] = true_posterior(oracle, oracle.y_alphabet[y])
    return solved


def evaluate_methods(spec: ProblemSpec, dataset: Dataset) -> Dict[str, Dict[str, np.ndarray]]:
    """
    Per-example KL(true || method), MAP correctness and log-score for every
    method. Posteriors depend on y only, so each distinct y is solved once.
    """
    oracle = spec.require_oracle()
    methods = _method_posteriors(spec)
    per_y = {int(y): _solve_y(oracle, methods, int(y)) for y in np.unique(dataset.y)}

    size = len(dataset)
    out = {name: {"kl": np.zeros(size), "correct": np.zeros(size, dtype=bool), "log_score": np.zeros(size)}
           for name in METHODS}
    for k in range(size):
        solved = per_y[int(dataset.y[k])]
        theta = int(dataset.theta[k])
        for name in METHODS:
            posterior = solved[name]
            out[name]["kl"][k] = kl_divergence(solved["true"], posterior)
            out[name]["correct"][k] = posterior.argmax() == theta
            out[name]["log_score"][k] = posterior.log_probs[theta]
    return out


def expected_divergences(spec: ProblemSpec) -> Dict[str, float]:
    """
    E_y[KL(true || method)] under the oracle's marginal p(y), by enumeration.
    The population value the sampled mean_kl estimates.
    """
    oracle = spec.require_oracle()
    methods = _method_posteriors(spec)
    marginal = oracle.prior_theta.probs @ oracle.likelihood_rows()
    totals = dict.fromkeys(METHODS, 0.0)
    for y in np.flatnonzero(marginal > 0):
        solved = _solve_y(oracle, methods, int(y))
        for name in METHODS:
            totals[name] += float(marginal[y]) * kl_divergence(solved["true"], solved[name])
    return totals


def cmd_compare(spec: ProblemSpec, n: int, seed: int) -> Dict[str, Any]:
    """
    Sample n labeled examples and score every method against the truth.
    expected_kl is exact and does not depend on the sample.
    """
    dataset = sample_dataset(spec.require_oracle(), n, seed)
    metrics = evaluate_methods(spec, dataset)
    expected = expected_divergences(spec)
    rows = []
    for name in METHODS:
        entry = metrics[name]
        rows.append({
            "method": name,
            "mean_kl": float(np.mean(entry["kl"])),
            "expected_kl": expected[name],
            "accuracy": float(np.mean(entry["correct"])),
            "mean_log_score": float(np.mean(entry["log_score"])),
        })
    app_logger.debug(f"Compared {len(METHODS)} methods on {n} examples (seed {seed})")
    return {"n": n, "seed": seed, "methods": rows}


def compare_table(report: Dict[str, Any]) -> Table:
    headers = ["method", "mean_kl", "expected_kl", "accuracy", "mean_log_score"]
    rows = [[r[h] for h in headers] for r in report["methods"]]
    return headers, rows


def cmd_sample(spec: ProblemSpec, n: int, seed: int) -> Table:
    """Seeded dataset as a table: y, theta, [psi], clue values, [conditioning values]."""
    oracle = spec.require_oracle()
    dataset = sample_dataset(oracle, n, seed)
    labels = oracle.hypothesis_space.labels
    names = [f.name for f in oracle.feature_maps]
    cond_maps = [(k, c) for k, c in enumerate(oracle.conditioning_maps) if c is not None]

    headers = ["y", "theta"]
    if oracle.is_parametric:
        headers.append("psi")
    headers += names + [f"{names[k]}^c" for k, _ in cond_maps]

    rows = []
    for k in range(len(dataset)):
        row: List[Any] = [oracle.y_alphabet[int(dataset.y[k])], labels[int(dataset.theta[k])]]
        if oracle.is_parametric:
            row.append(oracle.prior_psi.grid[int(dataset.psi[k])])
        row += [f.alphabet[int(dataset.features[k, i])] for i, f in enumerate(oracle.feature_maps)]
        row += [c.alphabet[int(dataset.conditioners[k, i])] for i, c in cond_maps]
        rows.append(row)
    return headers, rows
