"""Tests for generative oracles: induced clue models, exact expectations and the information checks."""

import math

import numpy as np
import pytest

from core.errors import (
    CapExceededError,
    DimensionMismatchError,
    EmptyConditioningSetError,
    EmptySampleError,
    InvalidDistributionError,
    SpecValidationError,
    SymbolNotInAlphabetError,
    UnsupportedModelError,
    ZeroMarginalDataError,
)
from core.types import FiniteDistribution, HypothesisSpace, WeightMatrix
from oracle.checks import check_data_reduction, check_variation_bound
from oracle.expectations import (
    expected_log_composite,
    expected_log_composite_ratio,
    expected_log_feature_ratio,
    expected_log_likelihood_ratio,
    expected_log_scl,
    variance_log_composite_ratio,
)
from oracle.inference import (
    clue_posterior,
    derive_feature_models,
    induced_distribution,
    sample_dataset,
    true_posterior,
    u_star,
)
from oracle.model import FeatureMap, GenerativeOracle
from oracle.random_instances import RandomInstanceGenerator
from pool.observation import CluesObservation


class TestFeatureMap:

    def test_from_mapping_default_alphabet(self):
        f = FeatureMap.from_mapping("parity", ["a", "b", "c"], {"a": "even", "b": "odd", "c": "even"})
        assert f.alphabet == ("even", "odd")
        assert f.level_set("even") == [0, 2]
        np.testing.assert_allclose(f.induce(np.array([0.2, 0.3, 0.5])), [0.7, 0.3])

    def test_map_must_be_total(self):
        with pytest.raises(SpecValidationError):
            FeatureMap.from_mapping("f", ["a", "b"], {"a": "x"})

    def test_image_outside_alphabet(self):
        with pytest.raises(SymbolNotInAlphabetError):
            FeatureMap.from_mapping("f", ["a"], {"a": "x"}, alphabet=["y"])

    def test_alphabet_cap(self):
        with pytest.raises(CapExceededError):
            FeatureMap.identity("big", [f"y{k}" for k in range(300)])


class TestGenerativeOracle:

    def test_rows_must_sum_to_one(self):
        space = HypothesisSpace(("a", "b"))
        with pytest.raises(InvalidDistributionError):
            GenerativeOracle(
                hypothesis_space=space,
                y_alphabet=("0", "1"),
                likelihood=np.array([[[0.5, 0.6]], [[0.5, 0.5]]]),
                feature_maps=(FeatureMap.identity("y", ("0", "1")),),
                prior_theta=FiniteDistribution.uniform(space.labels),
            )

    def test_shape_checked(self):
        space = HypothesisSpace(("a", "b"))
        with pytest.raises(DimensionMismatchError):
            GenerativeOracle(
                hypothesis_space=space,
                y_alphabet=("0", "1"),
                likelihood=np.array([[[0.5, 0.5]]]),
                feature_maps=(FeatureMap.identity("y", ("0", "1")),),
                prior_theta=FiniteDistribution.uniform(space.labels),
            )

    def test_with_reference_reorders_everything(self, oracle):
        moved = oracle.with_reference("beta")
        assert moved.hypothesis_space.labels == ("beta", "null", "alpha")
        assert moved.prior_theta.prob("beta") == pytest.approx(0.25)
        np.testing.assert_allclose(moved.likelihood_rows()[0], [0.125, 0.375, 0.125, 0.375])

    def test_psi_is_integrated(self, gen):
        oracle = gen.oracle(psi_size=3)
        expected = sum(
            oracle.prior_psi.distribution.probs[s] * oracle.likelihood_rows(s) for s in range(3)
        )
        np.testing.assert_allclose(oracle.likelihood_rows(), expected, atol=1e-15)

    def test_psi_on_plain_oracle(self, oracle):
        with pytest.raises(UnsupportedModelError):
            oracle.likelihood_rows(0)


class TestInducedModels:

    def test_bit_marginals(self, oracle):
        d = induced_distribution(oracle, 0, 1)
        np.testing.assert_allclose(d.probs, [0.25, 0.75])

    def test_derived_models_match_induced_distributions(self, gen):
        for _ in range(30):
            oracle = gen.oracle(psi_size=int(gen.rng.integers(0, 3)))
            models = derive_feature_models(oracle)
            psis = range(oracle.psi_size) if oracle.is_parametric else [None]
            for i, model in enumerate(models):
                for theta in range(oracle.hypothesis_space.size):
                    for psi in psis:
                        a = model.distribution(theta, psi)
                        b = induced_distribution(oracle, i, theta, psi)
                        assert a.max_abs_diff(b) < 1e-14

    def test_conditional_models(self):
        gen = RandomInstanceGenerator(seed=3)
        for _ in range(30):
            oracle = gen.oracle(conditional=True)
            models = derive_feature_models(oracle)
            for i, (model, cmap) in enumerate(zip(models, oracle.conditioning_maps)):
                assert model.is_conditional == (cmap is not None)
                if cmap is None:
                    continue
                for c in cmap.alphabet:
                    a = model.distribution(1, conditioner=c)
                    b = induced_distribution(oracle, i, 1, conditioner=c)
                    assert a.max_abs_diff(b) < 1e-14

    def test_empty_conditioning_set(self):
        space = HypothesisSpace(("a", "b"))
        y = ("0", "1", "2")
        oracle = GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=y,
            likelihood=np.array([[[0.5, 0.5, 0.0]], [[0.2, 0.3, 0.5]]]),
            feature_maps=(FeatureMap.from_mapping("z", y, {"0": "a", "1": "b", "2": "a"}),),
            prior_theta=FiniteDistribution.uniform(space.labels),
            conditioning_maps=(FeatureMap.from_mapping("c", y, {"0": "lo", "1": "lo", "2": "hi"}),),
        )
        with pytest.raises(EmptyConditioningSetError):
            induced_distribution(oracle, 0, 0, conditioner="hi")
        with pytest.raises(EmptyConditioningSetError):
            derive_feature_models(oracle)


class TestPosteriors:

    def test_true_posterior_threeclass(self, oracle):
        np.testing.assert_allclose(true_posterior(oracle, "11").probs, [0.4, 0.3, 0.3], atol=1e-15)

    def test_clue_posterior_with_all_clues_is_true_posterior(self, oracle):
        obs = CluesObservation({"first": "1", "second": "0"})
        assert clue_posterior(oracle, obs).max_abs_diff(true_posterior(oracle, "10")) < 1e-15

    def test_clue_posterior_with_partial_clues(self, oracle):
        posterior = clue_posterior(oracle, CluesObservation({"first": "1"}))
        expected = np.array([0.5 * 0.5, 0.25 * 0.75, 0.25 * 0.5])
        np.testing.assert_allclose(posterior.probs, expected / expected.sum(), atol=1e-15)

    def test_zero_marginal(self):
        space = HypothesisSpace(("a", "b"))
        oracle = GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=("0", "1"),
            likelihood=np.array([[[1.0, 0.0]], [[1.0, 0.0]]]),
            feature_maps=(FeatureMap.identity("y", ("0", "1")),),
            prior_theta=FiniteDistribution.uniform(space.labels),
        )
        with pytest.raises(ZeroMarginalDataError):
            true_posterior(oracle, "1")

    def test_u_star(self, oracle):
        kl = 2 * (0.125 * math.log(0.5) + 0.375 * math.log(1.5))
        assert u_star(oracle) == pytest.approx(0.5 * kl, abs=1e-15)


class TestExpectations:

    def test_feature_ratio_is_kl(self, oracle):
        expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
        assert expected_log_feature_ratio(oracle, 0, 1, 0, truth=1) == pytest.approx(expected, abs=1e-15)
        assert expected_log_feature_ratio(oracle, 1, 1, 0, truth=1) == 0.0

    def test_scl_is_zero_at_reference(self, oracle):
        assert expected_log_scl(oracle, 0, WeightMatrix.uniform(2, 2), truth=2) == 0.0

    def test_composite_is_maximized_at_truth(self, gen):
        for _ in range(200):
            oracle = gen.oracle()
            w = gen.simplex(oracle.n_features)
            size = oracle.hypothesis_space.size
            for star in range(size):
                values = [expected_log_composite(oracle, t, w, truth=star) for t in range(size)]
                assert values[star] >= max(values) - 1e-12

    def test_variance_matches_two_point_case(self, oracle):
        # under alpha the log-ratio of "first" is log 1.5 w.p. 0.75 and log 0.5 w.p. 0.25
        a, b = math.log(1.5), math.log(0.5)
        mean = 0.75 * a + 0.25 * b
        expected = 0.75 * (a - mean) ** 2 + 0.25 * (b - mean) ** 2
        value = variance_log_composite_ratio(oracle, 1, 0, [1.0, 0.0], truth=1)
        assert value == pytest.approx(expected, abs=1e-14)

    def test_infinite_ratio(self):
        space = HypothesisSpace(("a", "b"))
        oracle = GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=("0", "1"),
            likelihood=np.array([[[1.0, 0.0]], [[0.5, 0.5]]]),
            feature_maps=(FeatureMap.identity("y", ("0", "1")),),
            prior_theta=FiniteDistribution.uniform(space.labels),
        )
        assert expected_log_likelihood_ratio(oracle, 1, 0, truth=1) == math.inf
        assert expected_log_composite_ratio(oracle, 0, 1, [1.0], truth=1) == -math.inf


class TestDataReduction:

    def test_random_triples(self, gen):
        for _ in range(200):
            p, pi_ref, f = gen.triple()
            result = check_data_reduction(p, pi_ref, f)
            assert result.holds, result

    def test_identity_is_sufficient(self, gen):
        for _ in range(200):
            p, pi_ref, _ = gen.triple()
            result = check_data_reduction(p, pi_ref, FeatureMap.identity("id", p.alphabet))
            assert result.holds and result.equality

    def test_constant_map_loses_everything(self, gen):
        for _ in range(200):
            p, pi_ref, _ = gen.triple()
            result = check_data_reduction(p, pi_ref, FeatureMap.constant("const", p.size))
            assert result.holds
            assert abs(result.d_reduced) < 1e-12

    def test_negative_slack_breaks_equality(self, gen):
        p, pi_ref, _ = gen.triple()
        result = check_data_reduction(p, pi_ref, FeatureMap.identity("id", p.alphabet), slack=-1e-6)
        assert not result.holds


class TestVariationBound:

    def test_bracketing_on_random_oracles(self, gen):
        for _ in range(200):
            oracle = gen.oracle()
            w = gen.simplex(oracle.n_features)
            size = oracle.hypothesis_space.size
            for star in range(size):
                for theta in range(size):
                    result = check_variation_bound(oracle, theta, star, w)
                    assert result.holds, result

    def test_full_data_clue_is_tight(self, oracle):
        identity = GenerativeOracle(
            hypothesis_space=oracle.hypothesis_space,
            y_alphabet=oracle.y_alphabet,
            likelihood=oracle.likelihood,
            feature_maps=(FeatureMap.identity("y", oracle.y_alphabet),),
            prior_theta=oracle.prior_theta,
        )
        result = check_variation_bound(identity, 0, 1, [1.0])
        assert result.middle == pytest.approx(result.upper, abs=1e-15)


class TestSampling:

    def test_seeded_and_reproducible(self, oracle):
        a = sample_dataset(oracle, 50, seed=5)
        b = sample_dataset(oracle, 50, seed=5)
        np.testing.assert_array_equal(a.y, b.y)
        np.testing.assert_array_equal(a.theta, b.theta)
        assert len(a) == 50

    def test_examples_carry_clues(self, oracle):
        data = sample_dataset(oracle, 20, seed=2)
        for example in data:
            assert example.obs.value("first") == example.y[0]
            assert example.obs.value("second") == example.y[1]

    def test_frequencies(self, oracle):
        data = sample_dataset(oracle, 40_000, seed=9)
        freq = np.bincount(data.theta, minlength=3) / len(data)
        np.testing.assert_allclose(freq, [0.5, 0.25, 0.25], atol=0.015)

    def test_y_frequencies_follow_likelihood(self, oracle):
        data = sample_dataset(oracle, 40_000, seed=13)
        for t in range(3):
            ys = data.y[data.theta == t]
            freq = np.bincount(ys, minlength=4) / ys.size
            np.testing.assert_allclose(freq, oracle.likelihood[t, 0], atol=0.02)

    def test_zero_mass_symbols_never_drawn(self, oracle):
        sparse = GenerativeOracle(
            hypothesis_space=oracle.hypothesis_space,
            y_alphabet=oracle.y_alphabet,
            likelihood=np.array([[[0.5, 0.0, 0.0, 0.5]], [[0.0, 0.0, 1.0, 0.0]], [[0.0, 0.6, 0.4, 0.0]]]),
            feature_maps=oracle.feature_maps,
            prior_theta=oracle.prior_theta,
        )
        data = sample_dataset(sparse, 5_000, seed=3)
        assert np.all(sparse.likelihood[data.theta, 0, data.y] > 0)

    def test_needs_positive_n(self, oracle):
        with pytest.raises(EmptySampleError):
            sample_dataset(oracle, 0, seed=1)
        with pytest.raises(SpecValidationError):
            sample_dataset(oracle, -3, seed=1)

    def test_parametric_sample_records_psi(self, gen):
        oracle = gen.oracle(psi_size=2)
        data = sample_dataset(oracle, 30, seed=4)
        assert data.psi is not None and data.psi.shape == (30,)
        assert data.example(0).psi in (0, 1)
