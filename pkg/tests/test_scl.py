"""Tests for the super composite likelihood and its population-code views."""

import math

import numpy as np
import pytest

from core.errors import (
    DimensionMismatchError,
    IndeterminateRatioError,
    IndexOutOfRangeError,
    ReferenceLikelihoodZeroError,
    ReferencePriorZeroError,
    WeightDimensionMismatchError,
)
from core.types import FiniteDistribution, HypothesisSpace, WeightMatrix
from oracle.inference import derive_feature_models, true_posterior
from oracle.model import FeatureMap, GenerativeOracle
from pool.composite import log_linear_pool
from pool.observation import CluesObservation
from scl.population import (
    PopulationCode,
    code_marginals,
    factorization_gap,
    population_code_posterior,
    scl_code_joint,
    scl_posterior_by_code,
)
from scl.super_composite import (
    pdf_projection_matrix,
    scl_log,
    scl_log_vector,
    scl_posterior,
    scl_posterior_prior_folded,
)
from tests.conftest import binary_models, bit_oracle


def _random_observation(gen, oracle):
    y = int(gen.rng.integers(0, len(oracle.y_alphabet)))
    values, conditioners = oracle.clue_values(y)
    return oracle.y_alphabet[y], CluesObservation(values, conditioners)


class TestSuperCompositeLikelihood:

    def test_reference_is_zero(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        W = WeightMatrix.uniform(2, 2)
        assert scl_log(models, 0, both_ones, W) == 0.0

    def test_one_hot_columns(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        W = WeightMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        np.testing.assert_allclose(scl_log_vector(models, both_ones, W), [0.0, math.log(1.5), math.log(1.5)], atol=1e-15)

    def test_threeclass_posterior(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        W = WeightMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        posterior = scl_posterior(oracle.prior_theta, models, both_ones, W)
        np.testing.assert_allclose(posterior.probs, [0.4, 0.3, 0.3], atol=1e-14)

    def test_reference_likelihood_zero_gives_plus_inf(self):
        space = HypothesisSpace(("h0", "h1"))
        models = binary_models(space, {"z": [[1.0, 0.0], [0.5, 0.5]]})
        obs = CluesObservation({"z": "1"})
        W = WeightMatrix(np.array([[1.0]]))
        assert scl_log(models, 1, obs, W) == math.inf
        prior = FiniteDistribution.from_probs(space.labels, [0.9, 0.1])
        posterior = scl_posterior(prior, models, obs, W)
        np.testing.assert_array_equal(posterior.probs, [0.0, 1.0])

    def test_indeterminate_ratio(self):
        space = HypothesisSpace(("h0", "h1"))
        models = binary_models(space, {"z": [[1.0, 0.0], [1.0, 0.0]]})
        obs = CluesObservation({"z": "1"})
        with pytest.raises(IndeterminateRatioError):
            scl_log(models, 1, obs, WeightMatrix(np.array([[1.0]])))

    def test_zero_weight_hides_indeterminate_clue(self):
        space = HypothesisSpace(("h0", "h1"))
        models = binary_models(space, {"a": [[1.0, 0.0], [1.0, 0.0]], "b": [[0.5, 0.5], [0.25, 0.75]]})
        obs = CluesObservation({"a": "1", "b": "1"})
        W = WeightMatrix(np.array([[0.0], [1.0]]))
        assert scl_log(models, 1, obs, W) == pytest.approx(math.log(1.5))

    def test_shape_checks(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        with pytest.raises(WeightDimensionMismatchError):
            scl_log_vector(models, both_ones, WeightMatrix.uniform(3, 2))
        with pytest.raises(DimensionMismatchError):
            scl_log_vector(models, both_ones, WeightMatrix.uniform(2, 3))

    def test_reference_prior_zero(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        prior = FiniteDistribution.from_probs(oracle.hypothesis_space.labels, [0.0, 0.5, 0.5])
        with pytest.raises(ReferencePriorZeroError):
            scl_posterior(prior, models, both_ones, WeightMatrix.uniform(2, 2))


class TestCompositeEquivalence:
    """Identical columns reduce the SCL posterior to the CL posterior."""

    def test_constant_columns_match_cl_under_any_reference(self, gen):
        for _ in range(200):
            base = gen.oracle()
            labels = base.hypothesis_space.labels
            oracle = base.with_reference(labels[int(gen.rng.integers(0, len(labels)))])
            models = derive_feature_models(oracle)
            _, obs = _random_observation(gen, oracle)
            w = gen.simplex(len(models))
            W = WeightMatrix.constant(w, oracle.hypothesis_space.m)
            scl = scl_posterior(oracle.prior_theta, models, obs, W)
            cl = log_linear_pool(oracle.prior_theta, models, obs, w)
            assert scl.max_abs_diff(cl) < 1e-12

    def test_prior_folding_is_externally_bayesian(self, gen):
        for _ in range(200):
            oracle = gen.oracle()
            models = derive_feature_models(oracle)
            _, obs = _random_observation(gen, oracle)
            W = gen.weight_matrix(len(models), oracle.hypothesis_space.m)
            plain = scl_posterior(oracle.prior_theta, models, obs, W)
            folded = scl_posterior_prior_folded(oracle.prior_theta, models, obs, W)
            assert plain.max_abs_diff(folded) < 1e-10


class TestPdfProjection:

    def test_one_hot(self):
        W = pdf_projection_matrix({1: 2, 2: 1}, 3)
        np.testing.assert_array_equal(W.entries, [[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]])
        assert "pdf-projection" in W.notes

    def test_iota_domain(self):
        with pytest.raises(IndexOutOfRangeError):
            pdf_projection_matrix({1: 1, 3: 1}, 2)
        with pytest.raises(IndexOutOfRangeError):
            pdf_projection_matrix({1: 4}, 2)


class TestPopulationCode:

    def test_codes(self, three_space):
        code = PopulationCode(three_space)
        assert code.code(0) == (0, 0)
        assert code.code(2) == (0, 1)
        assert list(code.codes()) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert code.gamma(1, 1, 1) == 1.0
        assert code.gamma(1, 1, 2) == 0.0

    def test_population_posterior_is_bayes(self, gen):
        for _ in range(200):
            oracle = gen.oracle()
            y, _ = _random_observation(gen, oracle)
            coded = population_code_posterior(oracle, y)
            assert coded.max_abs_diff(true_posterior(oracle, y)) < 1e-12

    def test_reference_likelihood_zero(self):
        oracle = bit_oracle()
        likelihood = np.array(oracle.likelihood)
        likelihood[0, 0] = [0.0, 0.0, 0.5, 0.5]
        broken = GenerativeOracle(
            hypothesis_space=oracle.hypothesis_space,
            y_alphabet=oracle.y_alphabet,
            likelihood=likelihood,
            feature_maps=oracle.feature_maps,
            prior_theta=oracle.prior_theta,
        )
        with pytest.raises(ReferenceLikelihoodZeroError):
            population_code_posterior(broken, "00")

    def test_two_hypotheses_survive_zero_reference_likelihood(self):
        space = HypothesisSpace(("h0", "h1"))
        y = ("0", "1")
        oracle = GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=y,
            likelihood=np.array([[[1.0, 0.0]], [[0.4, 0.6]]]),
            feature_maps=(FeatureMap.identity("y", y),),
            prior_theta=FiniteDistribution.from_probs(space.labels, [0.7, 0.3]),
        )
        coded = population_code_posterior(oracle, "1")
        np.testing.assert_array_equal(coded.probs, [0.0, 1.0])
        assert coded.max_abs_diff(true_posterior(oracle, "1")) < 1e-15


class TestBipartiteFactorization:

    def test_code_joint_factorizes(self, gen):
        for _ in range(200):
            oracle = gen.oracle(n_hypotheses=int(gen.rng.integers(2, 5)), n_features=int(gen.rng.integers(1, 4)))
            models = derive_feature_models(oracle)
            _, obs = _random_observation(gen, oracle)
            W = gen.weight_matrix(len(models), oracle.hypothesis_space.m)
            joint = scl_code_joint(models, obs, W)
            assert joint.shape == (2,) * oracle.hypothesis_space.m
            assert joint.sum() == pytest.approx(1.0, abs=1e-12)
            assert factorization_gap(joint) < 1e-12

    def test_code_marginals_give_odds(self, oracle, both_ones):
        models = derive_feature_models(oracle)
        W = WeightMatrix(np.array([[1.0, 0.0], [0.0, 1.0]]))
        marginals = code_marginals(scl_code_joint(models, both_ones, W))
        # odds t_j = 1 : t_j = 0 equal the SCL ratio of column j
        np.testing.assert_allclose(marginals[:, 1] / marginals[:, 0], [1.5, 1.5], atol=1e-12)

    def test_summing_codes_recovers_scl_posterior(self, gen):
        for _ in range(100):
            oracle = gen.oracle(n_hypotheses=int(gen.rng.integers(2, 5)), n_features=int(gen.rng.integers(1, 4)))
            models = derive_feature_models(oracle)
            _, obs = _random_observation(gen, oracle)
            W = gen.weight_matrix(len(models), oracle.hypothesis_space.m)
            by_code = scl_posterior_by_code(oracle.prior_theta, models, obs, W)
            closed = scl_posterior(oracle.prior_theta, models, obs, W)
            assert by_code.max_abs_diff(closed) < 1e-12
