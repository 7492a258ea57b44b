"""
cli package

Problem-spec ingestion, the experiment commands and the randomized
property suite used by main.py.
"""

from cli.commands import (
    METHODS,
    cmd_compare,
    cmd_infer,
    cmd_optimize,
    cmd_sample,
    compare_table,
    evaluate_methods,
    infer_table,
    optimize_table,
)
from cli.spec import (
    WEIGHT_MODES,
    ProblemSpec,
    load_observation,
    load_problem,
    oracle_to_document,
    parse_observation,
    parse_problem,
)
from cli.verification import CHECKS, PropertySuiteRunner, cmd_verify, run_instance, verify_table

__all__ = [
    "METHODS",
    "WEIGHT_MODES",
    "CHECKS",
    "ProblemSpec",
    "PropertySuiteRunner",
    "cmd_compare",
    "cmd_infer",
    "cmd_optimize",
    "cmd_sample",
    "cmd_verify",
    "compare_table",
    "evaluate_methods",
    "infer_table",
    "load_observation",
    "load_problem",
    "optimize_table",
    "oracle_to_document",
    "parse_observation",
    "parse_problem",
    "run_instance",
    "verify_table",
]
