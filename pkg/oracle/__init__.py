"""
oracle package

Brute-force ground truth on a finite data alphabet: generative models,
induced clue distributions, exact posteriors and expectations, the
information-inequality checks and seeded random instances.
"""

from oracle.checks import (
    DataReductionCheck,
    VariationBoundCheck,
    check_data_reduction,
    check_variation_bound,
)
from oracle.expectations import (
    expected_log_composite,
    expected_log_composite_ratio,
    expected_log_feature_ratio,
    expected_log_likelihood_ratio,
    expected_log_scl,
    variance_log_composite_ratio,
)
from oracle.inference import (
    Dataset,
    LabeledExample,
    clue_posterior,
    derive_feature_models,
    induced_distribution,
    sample_dataset,
    true_posterior,
    u_star,
)
from oracle.model import FeatureMap, GenerativeOracle
from oracle.random_instances import RandomInstanceGenerator

__all__ = [
    "DataReductionCheck",
    "Dataset",
    "FeatureMap",
    "GenerativeOracle",
    "LabeledExample",
    "RandomInstanceGenerator",
    "VariationBoundCheck",
    "check_data_reduction",
    "check_variation_bound",
    "clue_posterior",
    "derive_feature_models",
    "expected_log_composite",
    "expected_log_composite_ratio",
    "expected_log_feature_ratio",
    "expected_log_likelihood_ratio",
    "expected_log_scl",
    "induced_distribution",
    "sample_dataset",
    "true_posterior",
    "u_star",
    "variance_log_composite_ratio",
]
