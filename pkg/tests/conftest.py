"""
Shared fixtures: the bundled problems, a hand-built two-bit oracle and
seeded instance generators.
"""

from pathlib import Path

import numpy as np
import pytest

from cli.spec import load_problem
from core.types import FeatureModel, FiniteDistribution, HypothesisSpace
from oracle.model import FeatureMap, GenerativeOracle
from oracle.random_instances import RandomInstanceGenerator
from pool.observation import CluesObservation

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"
GOLDEN = Path(__file__).resolve().parent / "golden"


def bit_oracle(prior=(0.5, 0.25, 0.25)) -> GenerativeOracle:
    """Three hypotheses over two bits; each alternative moves exactly one bit."""
    space = HypothesisSpace(("null", "alpha", "beta"))
    y = ("00", "01", "10", "11")
    likelihood = np.array([
        [[0.25, 0.25, 0.25, 0.25]],
        [[0.125, 0.125, 0.375, 0.375]],
        [[0.125, 0.375, 0.125, 0.375]],
    ])
    first = FeatureMap.from_mapping("first", y, {"00": "0", "01": "0", "10": "1", "11": "1"}, ["0", "1"])
    second = FeatureMap.from_mapping("second", y, {"00": "0", "01": "1", "10": "0", "11": "1"}, ["0", "1"])
    return GenerativeOracle(
        hypothesis_space=space,
        y_alphabet=y,
        likelihood=likelihood,
        feature_maps=(first, second),
        prior_theta=FiniteDistribution.from_probs(space.labels, prior),
    )


def binary_models(space: HypothesisSpace, rows_per_feature):
    """Unconditional clue tables from {name: [[p(a0), p(a1)] per hypothesis]}."""
    return [
        FeatureModel.from_probabilities(
            name=name,
            feature_index=i + 1,
            hypothesis_space=space,
            alphabet=("0", "1"),
            probabilities=np.array(rows),
        )
        for i, (name, rows) in enumerate(rows_per_feature.items())
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def gen():
    return RandomInstanceGenerator(seed=7)


@pytest.fixture
def three_space():
    return HypothesisSpace(("null", "alpha", "beta"))


@pytest.fixture
def oracle():
    return bit_oracle()


@pytest.fixture
def both_ones():
    return CluesObservation({"first": "1", "second": "1"})


@pytest.fixture
def threeclass_spec():
    return load_problem(str(PROBLEMS / "threeclass.json"))


@pytest.fixture
def medical_spec():
    return load_problem(str(PROBLEMS / "medical_checkup.json"))


@pytest.fixture
def sensor_spec():
    return load_problem(str(PROBLEMS / "drifting_sensor.json"))
