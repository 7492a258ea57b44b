"""
verification.py

Randomized property suite behind `sclkit verify`.

Instance k draws everything from default_rng([seed, k]), so any instance
can be replayed alone and results do not depend on the worker count.
Inequalities are checked with a configurable slack; equalities use fixed
tolerances.
"""

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from core.types import FiniteDistribution, NuisancePrior, WeightMatrix
from nuisance.evidence import (
    composite_evidence_log,
    nuisance_posterior,
    super_composite_evidence_log,
)
from oracle.checks import check_data_reduction, check_variation_bound
from oracle.expectations import expected_log_composite, expected_log_scl
from oracle.inference import derive_feature_models, true_posterior, u_star
from oracle.model import FeatureMap, GenerativeOracle
from oracle.random_instances import RandomInstanceGenerator
from pool.composite import agent_posteriors, average_kl_objective, log_linear_pool, pool_opinions
from pool.minimizer import AverageKLMinimizer
from pool.observation import CluesObservation
from scl.population import factorization_gap, population_code_posterior, scl_code_joint, scl_posterior_by_code
from scl.super_composite import scl_posterior, scl_posterior_prior_folded
from cli.spec import oracle_to_document
from utils import app_logger, config
from weights.optimizer import consistency_envelope, optimal_weights
from weights.utility import expected_utility, oracle_utility_matrix

STRICT_TOL = 1e-12
EQUALITY_TOL = 1e-10
MINIMIZER_GAP = 1e-8
RANDOM_WEIGHTS = 20
RANDOM_CANDIDATES = 20

CHECKS = (
    "data_reduction",
    "variation_bound",
    "consistency",
    "envelope",
    "utility_bound",
    "scl_consistency",
    "cl_scl_equivalence",
    "population_code",
    "external_bayesianity",
    "average_kl_minimizer",
    "bipartite",
    "odds_conservation",
)


class CheckFailure(Exception):
    """A property did not hold on the current instance."""
    pass


@dataclass
class InstanceContext:
    """Everything drawn for one instance, in draw order."""
    gen: RandomInstanceGenerator
    slack: float
    oracle: GenerativeOracle
    artifacts: Dict[str, Any] = field(default_factory=dict)

    @property
    def rng(self) -> np.random.Generator:
        return self.gen.rng

    def observation(self, oracle: GenerativeOracle) -> Tuple[str, CluesObservation]:
        y = int(self.rng.integers(0, len(oracle.y_alphabet)))
        values, conditioners = oracle.clue_values(y)
        return oracle.y_alphabet[y], CluesObservation(values, conditioners)


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailure(message)


def _gap(a: FiniteDistribution, b: FiniteDistribution) -> float:
    return a.max_abs_diff(b)


def _triple_document(p, pi_ref, f: FeatureMap) -> Dict[str, Any]:
    return {"p": p.as_dict(), "pi_ref": pi_ref.as_dict(), "map": f.as_mapping(p.alphabet)}


# --- checks -------------------------------------------------------------------

def check_data_reduction_property(ctx: InstanceContext) -> str:
    p, pi_ref, f = ctx.gen.triple()
    ctx.artifacts["data_reduction"] = _triple_document(p, pi_ref, f)
    result = check_data_reduction(p, pi_ref, f, ctx.slack)
    _expect(result.holds, f"random map: D_reduced={result.d_reduced!r} D_full={result.d_full!r}")
    identity = check_data_reduction(p, pi_ref, FeatureMap.identity("identity", p.alphabet), ctx.slack)
    _expect(identity.holds and identity.equality, f"identity map: {identity}")
    constant = check_data_reduction(p, pi_ref, FeatureMap.constant("constant", p.size), ctx.slack)
    _expect(constant.holds and abs(constant.d_reduced) <= STRICT_TOL, f"constant map: {constant}")
    return "data_reduction"


def check_variation_bound_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    w = ctx.gen.simplex(oracle.n_features)
    for theta_star in range(oracle.hypothesis_space.size):
        for theta in range(oracle.hypothesis_space.size):
            r = check_variation_bound(oracle, theta, theta_star, w, ctx.slack)
            _expect(r.holds, f"theta={theta} theta*={theta_star} w={w.tolist()}: {r}")
    return "variation_bound"


def check_consistency_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    w = ctx.gen.simplex(oracle.n_features)
    size = oracle.hypothesis_space.size
    for theta_star in range(size):
        values = [expected_log_composite(oracle, t, w, truth=theta_star) for t in range(size)]
        _expect(
            values[theta_star] >= max(values) - ctx.slack,
            f"theta*={theta_star} is not a maximizer of the expected log CL: {values}",
        )
    return "consistency"


def check_envelope_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    space = oracle.hypothesis_space
    W = ctx.gen.weight_matrix(oracle.n_features, space.m)
    for theta_star in range(space.size):
        top = consistency_envelope(oracle, theta_star, theta_star)
        for theta in range(space.size):
            envelope = consistency_envelope(oracle, theta, theta_star)
            value = expected_log_scl(oracle, theta, W, theta_star)
            _expect(value <= envelope + ctx.slack, f"E[log SCL]={value!r} > M({theta})={envelope!r}")
            _expect(envelope <= top + ctx.slack, f"M({theta})={envelope!r} > M(theta*={theta_star})={top!r}")
    return "envelope"


def check_utility_bound_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    space = oracle.hypothesis_space
    U = oracle_utility_matrix(oracle)
    bound = u_star(oracle)
    best = expected_utility(U, optimal_weights(U), oracle.prior_theta)
    for _ in range(RANDOM_WEIGHTS):
        value = expected_utility(U, ctx.gen.weight_matrix(U.n, U.m), oracle.prior_theta)
        _expect(value <= bound + ctx.slack, f"U(W)={value!r} exceeds U*={bound!r}")
        _expect(best >= value - ctx.slack, f"optimal U={best!r} beaten by random W with {value!r}")

    identity = GenerativeOracle(
        hypothesis_space=space,
        y_alphabet=oracle.y_alphabet,
        likelihood=oracle.likelihood,
        feature_maps=(FeatureMap.identity("y", oracle.y_alphabet),),
        prior_theta=oracle.prior_theta,
    )
    attained = expected_utility(
        oracle_utility_matrix(identity), WeightMatrix(np.ones((1, space.m))), oracle.prior_theta
    )
    _expect(abs(attained - bound) < STRICT_TOL, f"identity clue utility {attained!r} != U* {bound!r}")
    return "utility_bound"


def check_scl_consistency_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    W = optimal_weights(oracle_utility_matrix(oracle))
    size = oracle.hypothesis_space.size
    for theta_star in range(size):
        top = expected_log_scl(oracle, theta_star, W, theta_star)
        for theta in range(size):
            value = expected_log_scl(oracle, theta, W, theta_star)
            _expect(value <= top + ctx.slack, f"E[log SCL({theta})]={value!r} > E[log SCL(theta*={theta_star})]={top!r}")
    return "scl_consistency"


def check_cl_scl_equivalence_property(ctx: InstanceContext) -> str:
    labels = ctx.oracle.hypothesis_space.labels
    reference = labels[int(ctx.rng.integers(0, len(labels)))]
    oracle = ctx.oracle.with_reference(reference)
    models = derive_feature_models(oracle)
    w = ctx.gen.simplex(len(models))
    _, obs = ctx.observation(oracle)
    scl = scl_posterior(oracle.prior_theta, models, obs, WeightMatrix.constant(w, oracle.hypothesis_space.m))
    cl = log_linear_pool(oracle.prior_theta, models, obs, w)
    _expect(_gap(scl, cl) < STRICT_TOL, f"reference '{reference}': constant-column SCL differs from CL by {_gap(scl, cl)!r}")
    return "cl_scl_equivalence"


def check_population_code_property(ctx: InstanceContext) -> str:
    y, _ = ctx.observation(ctx.oracle)
    coded = population_code_posterior(ctx.oracle, y)
    direct = true_posterior(ctx.oracle, y)
    _expect(_gap(coded, direct) < STRICT_TOL, f"y='{y}': population code off by {_gap(coded, direct)!r}")
    return "population_code"


def check_external_bayesianity_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    models = derive_feature_models(oracle)
    prior = oracle.prior_theta
    _, obs = ctx.observation(oracle)
    w = ctx.gen.simplex(len(models))
    after = log_linear_pool(prior, models, obs, w)
    before = pool_opinions(agent_posteriors(prior, models, obs), w)
    _expect(_gap(after, before) < EQUALITY_TOL, f"pool: prior before/after differ by {_gap(after, before)!r}")
    W = ctx.gen.weight_matrix(len(models), oracle.hypothesis_space.m)
    plain = scl_posterior(prior, models, obs, W)
    folded = scl_posterior_prior_folded(prior, models, obs, W)
    _expect(_gap(plain, folded) < EQUALITY_TOL, f"SCL: prior folding changes the posterior by {_gap(plain, folded)!r}")
    return "external_bayesianity"


def check_average_kl_minimizer_property(ctx: InstanceContext) -> str:
    oracle = ctx.oracle
    models = derive_feature_models(oracle)
    prior = oracle.prior_theta
    _, obs = ctx.observation(oracle)
    w = ctx.gen.simplex(len(models))
    agents = agent_posteriors(prior, models, obs)
    pooled = log_linear_pool(prior, models, obs, w)
    best = average_kl_objective(pooled, agents, w)
    for _ in range(RANDOM_CANDIDATES):
        candidate = ctx.gen.distribution(prior.alphabet)
        value = average_kl_objective(candidate, agents, w)
        _expect(best <= value + ctx.slack, f"random candidate beats the pool: {value!r} < {best!r}")
    numeric = AverageKLMinimizer().minimize(agents, w)
    gap = average_kl_objective(numeric, agents, w) - best
    _expect(abs(gap) < MINIMIZER_GAP, f"numerical minimizer objective gap {gap!r}")
    return "average_kl_minimizer"


def check_bipartite_property(ctx: InstanceContext) -> str:
    tiny = ctx.gen.oracle(
        n_hypotheses=int(ctx.rng.integers(2, 5)),
        n_features=int(ctx.rng.integers(1, 4)),
        max_alphabet=3,
    )
    ctx.artifacts["bipartite"] = oracle_to_document(tiny)
    models = derive_feature_models(tiny)
    W = ctx.gen.weight_matrix(len(models), tiny.hypothesis_space.m)
    _, obs = ctx.observation(tiny)
    gap = factorization_gap(scl_code_joint(models, obs, W))
    _expect(gap < STRICT_TOL, f"p3(t|z) does not factorize: gap {gap!r}")
    by_code = scl_posterior_by_code(tiny.prior_theta, models, obs, W)
    closed = scl_posterior(tiny.prior_theta, models, obs, W)
    _expect(_gap(by_code, closed) < STRICT_TOL, f"code-summed posterior off by {_gap(by_code, closed)!r}")
    return "bipartite"


def check_odds_conservation_property(ctx: InstanceContext) -> str:
    oracle = ctx.gen.oracle(psi_size=int(ctx.rng.integers(2, 4)))
    ctx.artifacts["odds_conservation"] = oracle_to_document(oracle)
    models = derive_feature_models(oracle)
    prior_psi = oracle.prior_psi
    W = ctx.gen.weight_matrix(len(models), oracle.hypothesis_space.m)
    _, obs = ctx.observation(oracle)
    for j in range(1, oracle.hypothesis_space.size):
        ratio = super_composite_evidence_log(models, j, obs, W, prior_psi)
        top = composite_evidence_log(models, j, obs, W.column(j), prior_psi)
        bottom = composite_evidence_log(models, 0, obs, W.column(j), prior_psi)
        error = abs(np.expm1(ratio + bottom - top))
        _expect(error < EQUALITY_TOL, f"hypothesis {j}: odds not conserved, relative error {error!r}")
    s = int(ctx.rng.integers(0, prior_psi.size))
    point = NuisancePrior.point_mass(prior_psi.grid, prior_psi.grid[s])
    collapsed = nuisance_posterior(oracle.prior_theta, models, obs, W, point)
    direct = scl_posterior(oracle.prior_theta, models, obs, W, psi=s)
    _expect(_gap(collapsed, direct) < STRICT_TOL, f"point-mass nuisance differs by {_gap(collapsed, direct)!r}")
    return "odds_conservation"


SUITE: Tuple[Callable[[InstanceContext], str], ...] = (
    check_data_reduction_property,
    check_variation_bound_property,
    check_consistency_property,
    check_envelope_property,
    check_utility_bound_property,
    check_scl_consistency_property,
    check_cl_scl_equivalence_property,
    check_population_code_property,
    check_external_bayesianity_property,
    check_average_kl_minimizer_property,
    check_bipartite_property,
    check_odds_conservation_property,
)


@dataclass
class InstanceResult:
    index: int
    outcomes: Dict[str, bool]
    failure: Optional[Dict[str, Any]] = None


def run_instance(task: Tuple[int, int, float]) -> InstanceResult:
    """All checks on instance k; top-level so worker processes can pickle it."""
    seed, index, slack = task
    gen = RandomInstanceGenerator(rng=np.random.default_rng([seed, index]))
    ctx = InstanceContext(gen=gen, slack=slack, oracle=gen.oracle())
    outcomes: Dict[str, bool] = {}
    failure = None
    for check, name in zip(SUITE, CHECKS):
        try:
            check(ctx)
            outcomes[name] = True
        except Exception as e:
            outcomes[name] = False
            if failure is None:
                failure = {
                    "seed": seed,
                    "instance": index,
                    "check": name,
                    "detail": f"{type(e).__name__}: {e}",
                    "problem": ctx.artifacts.get(name, oracle_to_document(ctx.oracle)),
                }
    return InstanceResult(index, outcomes, failure)


class PropertySuiteRunner:
    """
    Runs every property check over seeded random instances, optionally on a
    process pool, and aggregates per-check counts in instance order.
    """

    def __init__(
        self,
        seed: Optional[int] = None,
        instances: Optional[int] = None,
        workers: Optional[int] = None,
        slack: Optional[float] = None,
        show_progress: Optional[bool] = None,
    ) -> None:
        self.seed = config.get_int("verification.default_seed", 20160503) if seed is None else seed
        self.instances = (
            config.get_int("verification.default_instances", 200) if instances is None else instances
        )
        self.workers = workers or config.get_int("verification.workers", 1)
        self.slack = config.get_float("verification.slack", 1e-12) if slack is None else slack
        self.show_progress = config.get("ui.show_progress", True) if show_progress is None else show_progress
        self.logger = app_logger

    def _results(self, tasks: List[Tuple[int, int, float]]) -> Iterable[InstanceResult]:
        if self.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                yield from pool.map(run_instance, tasks)
        else:
            yield from map(run_instance, tasks)

    def run(self) -> Dict[str, Any]:
        self.logger.info(
            f"Verifying {self.instances} instances (seed {self.seed}, workers {self.workers}, slack {self.slack})"
        )
        counts = {name: {"passed": 0, "failed": 0} for name in CHECKS}
        failure = None
        tasks = [(self.seed, k, self.slack) for k in range(self.instances)]
        progress = tqdm(
            self._results(tasks),
            total=len(tasks),
            desc="verify",
            unit="instance",
            file=sys.stderr,
            disable=not self.show_progress,
        )
        for result in progress:
            for name, ok in result.outcomes.items():
                counts[name]["passed" if ok else "failed"] += 1
            if result.failure is not None and failure is None:
                failure = result.failure
                self.logger.warning(
                    f"Instance {result.index} failed {failure['check']}: {failure['detail']}"
                )
        passed = failure is None
        report: Dict[str, Any] = {
            "seed": self.seed,
            "instances": self.instances,
            "slack": self.slack,
            "passed": passed,
            "checks": counts,
        }
        if failure is not None:
            report["failure"] = failure
        return report


def cmd_verify(
    seed: Optional[int] = None,
    instances: Optional[int] = None,
    workers: Optional[int] = None,
    slack: Optional[float] = None,
    show_progress: Optional[bool] = None,
) -> Dict[str, Any]:
    """Property-suite report; ``passed`` is False iff some instance failed a check."""
    return PropertySuiteRunner(seed, instances, workers, slack, show_progress).run()


def verify_table(report: Dict[str, Any]) -> Tuple[List[str], List[List[Any]]]:
    headers = ["check", "passed", "failed"]
    rows = [[name, c["passed"], c["failed"]] for name, c in report["checks"].items()]
    return headers, rows
