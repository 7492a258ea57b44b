"""Tests for composite evidence over a nuisance grid and the nuisance-aware optimizer."""

import math

import numpy as np
import pytest

from core.errors import (
    AlphabetMismatchError,
    ReferenceEvidenceZeroError,
    UnsupportedModelError,
)
from core.types import FeatureModel, FiniteDistribution, HypothesisSpace, NuisancePrior, WeightMatrix
from nuisance.evidence import (
    composite_evidence_log,
    composite_evidence_posterior,
    naive_bayes_evidence_posterior,
    nuisance_posterior,
    super_composite_evidence_log,
    super_composite_evidence_vector,
)
from nuisance.optimizer import (
    nuisance_utility_from_models,
    nuisance_utility_matrix,
    optimize_weights_nuisance,
)
from oracle.inference import derive_feature_models
from oracle.model import GenerativeOracle
from pool.composite import log_linear_pool
from pool.observation import CluesObservation
from scl.super_composite import scl_posterior
from weights.optimizer import optimal_weights, tie_sets
from weights.utility import oracle_utility_matrix


def _observation(gen, oracle):
    values, conditioners = oracle.clue_values(int(gen.rng.integers(0, len(oracle.y_alphabet))))
    return CluesObservation(values, conditioners)


class TestCompositeEvidence:

    def test_sensor_spec_by_hand(self, sensor_spec):
        models = sensor_spec.feature_models
        obs = CluesObservation({"amplitude": "large", "duration": "long"})
        w = [0.5, 0.5]
        value = composite_evidence_log(models, 1, obs, w, sensor_spec.nuisance_prior)
        expected = math.log(0.5 * math.sqrt(0.6 * 0.5) + 0.5 * math.sqrt(0.8 * 0.5))
        assert value == pytest.approx(expected, abs=1e-14)

    def test_odds_conservation(self, gen):
        for _ in range(200):
            oracle = gen.oracle(psi_size=int(gen.rng.integers(2, 4)))
            models = derive_feature_models(oracle)
            prior_psi = oracle.prior_psi
            W = gen.weight_matrix(len(models), oracle.hypothesis_space.m)
            obs = _observation(gen, oracle)
            for j in range(1, oracle.hypothesis_space.size):
                ratio = super_composite_evidence_log(models, j, obs, W, prior_psi)
                top = composite_evidence_log(models, j, obs, W.column(j), prior_psi)
                bottom = composite_evidence_log(models, 0, obs, W.column(j), prior_psi)
                assert abs(math.expm1(ratio + bottom - top)) < 1e-10

    def test_point_mass_collapses_to_plain_scl(self, gen):
        for _ in range(100):
            oracle = gen.oracle(psi_size=3)
            models = derive_feature_models(oracle)
            W = gen.weight_matrix(len(models), oracle.hypothesis_space.m)
            obs = _observation(gen, oracle)
            s = int(gen.rng.integers(0, 3))
            point = NuisancePrior.point_mass(oracle.prior_psi.grid, oracle.prior_psi.grid[s])
            collapsed = nuisance_posterior(oracle.prior_theta, models, obs, W, point)
            direct = scl_posterior(oracle.prior_theta, models, obs, W, psi=s)
            assert collapsed.max_abs_diff(direct) < 1e-12

    def test_p4_point_mass_is_cl_pool(self, gen):
        for _ in range(50):
            oracle = gen.oracle(psi_size=2)
            models = derive_feature_models(oracle)
            w = gen.simplex(len(models))
            obs = _observation(gen, oracle)
            point = NuisancePrior.point_mass(oracle.prior_psi.grid, oracle.prior_psi.grid[1])
            p4 = composite_evidence_posterior(oracle.prior_theta, models, obs, w, point)
            assert p4.max_abs_diff(log_linear_pool(oracle.prior_theta, models, obs, w, psi=1)) < 1e-12

    def test_naive_bayes_evidence_is_clue_posterior_for_one_clue(self, gen):
        oracle = gen.oracle(psi_size=2, n_features=1)
        models = derive_feature_models(oracle)
        obs = _observation(gen, oracle)
        nb = naive_bayes_evidence_posterior(oracle.prior_theta, models, obs, oracle.prior_psi)
        lik = np.array([
            sum(
                oracle.prior_psi.distribution.probs[s] * math.exp(models[0].log_likelihoods(obs.value("z1"), psi=s)[t])
                for s in range(2)
            )
            for t in range(oracle.hypothesis_space.size)
        ])
        expected = oracle.prior_theta.probs * lik
        np.testing.assert_allclose(nb.probs, expected / expected.sum(), atol=1e-12)

    def test_reference_evidence_zero(self):
        space = HypothesisSpace(("h0", "h1"))
        model = FeatureModel.from_probabilities(
            "z", 1, space, ("a", "b"),
            np.array([[[1.0, 0.0], [1.0, 0.0]], [[0.5, 0.5], [0.5, 0.5]]]),
            nuisance_grid=("g0", "g1"),
        )
        prior_psi = NuisancePrior.from_probs(("g0", "g1"), [0.5, 0.5])
        with pytest.raises(ReferenceEvidenceZeroError):
            super_composite_evidence_vector([model], CluesObservation({"z": "b"}), WeightMatrix(np.array([[1.0]])), prior_psi)

    def test_grid_mismatch(self, sensor_spec):
        other = NuisancePrior.from_probs(("a", "b"), [0.5, 0.5])
        obs = CluesObservation({"amplitude": "large", "duration": "long"})
        with pytest.raises(AlphabetMismatchError):
            composite_evidence_log(sensor_spec.feature_models, 1, obs, [0.5, 0.5], other)

    def test_tiny_likelihoods_stay_finite(self):
        space = HypothesisSpace(("h0", "h1"))
        tiny = np.exp(-700.0)
        table = np.array([[[tiny, 1 - tiny]] * 2, [[0.5, 0.5]] * 2])
        model = FeatureModel.from_probabilities("z", 1, space, ("a", "b"), table, nuisance_grid=("g0", "g1"))
        prior_psi = NuisancePrior.from_probs(("g0", "g1"), [0.5, 0.5])
        value = composite_evidence_log([model], 0, CluesObservation({"z": "a"}), [1.0], prior_psi)
        assert value == pytest.approx(-700.0, abs=1e-9)


class TestNuisanceUtilities:

    def test_oracle_and_tables_agree(self, gen):
        for _ in range(30):
            oracle = gen.oracle(psi_size=int(gen.rng.integers(2, 4)))
            models = derive_feature_models(oracle)
            a = nuisance_utility_matrix(oracle)
            b = nuisance_utility_from_models(models, oracle.hypothesis_space, oracle.prior_psi)
            np.testing.assert_allclose(a.entries, b.entries, atol=1e-12)

    def test_sensor_spec_prefers_amplitude(self, sensor_spec):
        U = sensor_spec.utility()
        assert U.entries[0, 0] > U.entries[1, 0]
        W = sensor_spec.optimal_weights(U)
        np.testing.assert_array_equal(W.column(1), [1.0, 0.0])

    def test_needs_parametric_oracle(self, oracle):
        with pytest.raises(UnsupportedModelError):
            nuisance_utility_matrix(oracle)

    def test_optimizer_is_tie_split_argmax(self, gen):
        oracle = gen.oracle(psi_size=2)
        W = optimize_weights_nuisance(oracle)
        U = nuisance_utility_matrix(oracle)
        for j in range(1, U.m + 1):
            assert W.column(j) @ U.column(j) == pytest.approx(U.column(j).max(), abs=1e-12)

    @pytest.mark.slow
    def test_matches_monte_carlo(self, gen, rng):
        for _ in range(10):
            oracle = gen.oracle(psi_size=3)
            models = derive_feature_models(oracle)
            U = nuisance_utility_matrix(oracle)
            psi_probs = oracle.prior_psi.distribution.probs
            n = 100_000
            for j in range(1, oracle.hypothesis_space.size):
                psi = rng.choice(psi_probs.size, size=n, p=psi_probs)
                cdf = np.cumsum(oracle.likelihood[j, psi], axis=1)
                y = np.minimum((rng.random(n)[:, None] > cdf).sum(axis=1), len(oracle.y_alphabet) - 1)
                for i, (fmap, model) in enumerate(zip(oracle.feature_maps, models)):
                    symbols = np.asarray(fmap.assignment)[y]
                    table = model.log_table[:, :, 0, :]
                    samples = table[j, psi, symbols] - table[0, psi, symbols]
                    stderr = samples.std(ddof=1) / math.sqrt(n)
                    assert abs(samples.mean() - U.entries[i, j - 1]) <= 4 * stderr + 1e-12


class TestNuisanceWeights:

    @staticmethod
    def _with_grid(oracle, likelihood, probs):
        grid = tuple(f"psi{s}" for s in range(len(probs)))
        return GenerativeOracle(
            hypothesis_space=oracle.hypothesis_space,
            y_alphabet=oracle.y_alphabet,
            likelihood=likelihood,
            feature_maps=oracle.feature_maps,
            prior_theta=oracle.prior_theta,
            prior_psi=NuisancePrior.from_probs(grid, probs),
        )

    def test_single_grid_point_is_plain_optimum(self, gen):
        for _ in range(30):
            plain = gen.oracle()
            single = self._with_grid(plain, plain.likelihood, [1.0])
            U = oracle_utility_matrix(plain)
            np.testing.assert_allclose(nuisance_utility_matrix(single).entries, U.entries, atol=1e-12)
            np.testing.assert_array_equal(optimize_weights_nuisance(single).entries, optimal_weights(U).entries)

    def test_psi_independent_tables_ignore_the_grid(self, gen):
        for _ in range(30):
            plain = gen.oracle()
            repeated = self._with_grid(plain, np.repeat(plain.likelihood, 3, axis=1), gen.simplex(3))
            U = oracle_utility_matrix(plain)
            np.testing.assert_allclose(nuisance_utility_matrix(repeated).entries, U.entries, atol=1e-12)
            np.testing.assert_array_equal(optimize_weights_nuisance(repeated).entries, optimal_weights(U).entries)

    def test_point_mass_prior_selects_a_slice(self, gen):
        oracle = gen.oracle(psi_size=2)
        point = NuisancePrior.from_probs(oracle.prior_psi.grid, [0.0, 1.0])
        sliced = self._with_grid(oracle, oracle.likelihood[:, 1:, :], [1.0])
        np.testing.assert_allclose(
            nuisance_utility_matrix(oracle, point).entries, nuisance_utility_matrix(sliced).entries, atol=1e-12
        )

    def test_symmetric_grid_splits_evenly(self, oracle):
        # under psi0 the alternative moves only the first bit, under psi1 only the second
        space = HypothesisSpace(("null", "alpha"))
        likelihood = np.array([
            [[0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25]],
            [[0.125, 0.125, 0.375, 0.375], [0.125, 0.375, 0.125, 0.375]],
        ])
        symmetric = GenerativeOracle(
            hypothesis_space=space,
            y_alphabet=oracle.y_alphabet,
            likelihood=likelihood,
            feature_maps=oracle.feature_maps,
            prior_theta=FiniteDistribution.uniform(space.labels),
            prior_psi=NuisancePrior.from_probs(("psi0", "psi1"), [0.5, 0.5]),
        )
        U = nuisance_utility_matrix(symmetric)
        bit_utility = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
        np.testing.assert_allclose(U.column(1), [0.5 * bit_utility, 0.5 * bit_utility], atol=1e-15)
        W = optimize_weights_nuisance(symmetric)
        np.testing.assert_allclose(W.column(1), [0.5, 0.5], atol=1e-15)
        assert tie_sets(U) == [(0, 1)]
