"""
main.py

sclkit orchestrator: composite and super composite likelihood inference,
weight optimization, method comparison, sampling and the property suite.

Reports go to standard output; banners, progress and logs go to standard error.
Exit codes: 0 ok, 1 property failure, 2 spec error, 3 math error.
"""

import argparse
import sys
from typing import Any, Dict, List, Optional

from colorama import Fore, Style

from cli import (
    cmd_compare,
    cmd_infer,
    cmd_optimize,
    cmd_sample,
    cmd_verify,
    compare_table,
    infer_table,
    load_observation,
    load_problem,
    optimize_table,
    verify_table,
)
from core.errors import MathError, SpecValidationError
from report_generators import JSONReportGenerator, TableReportGenerator
from utils import app_logger, config

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_SPEC_ERROR = 2
EXIT_MATH_ERROR = 3
EXIT_INTERRUPTED = 130


def setup_argument_parser() -> argparse.ArgumentParser:
    """Configure command-line argument parser."""
    parser = argparse.ArgumentParser(
        prog="sclkit",
        description="sclkit - composite and super composite likelihood toolkit",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s infer --spec problems/threeclass.json --obs problems/threeclass_obs.json
  %(prog)s optimize --spec problems/medical_checkup.json
  %(prog)s compare --spec problems/medical_checkup.json --n 2000 --seed 7
  %(prog)s verify --seed 1 --instances 200 --workers 4
  %(prog)s sample --spec problems/threeclass.json --n 10 --seed 3
        """
    )

    parser.add_argument(
        "--verbose", "-v",
        action="store_true",
        help="Enable verbose output"
    )

    parser.add_argument(
        "--quiet", "-q",
        action="store_true",
        help="Suppress banners and non-essential output"
    )

    sub = parser.add_subparsers(dest="command", required=True)

    infer = sub.add_parser("infer", help="SCL posterior for one observation")
    infer.add_argument("--spec", required=True, help="Problem spec JSON")
    infer.add_argument("--obs", required=True, help="Observation JSON")
    infer.add_argument("--json", action="store_true", help="Emit JSON instead of TSV")

    optimize = sub.add_parser("optimize", help="Utility matrix and optimal weights")
    optimize.add_argument("--spec", required=True, help="Problem spec JSON")
    optimize.add_argument("--tsv", action="store_true", help="Emit a TSV table instead of JSON")

    compare = sub.add_parser("compare", help="Compare pooling methods on sampled data")
    compare.add_argument("--spec", required=True, help="Problem spec JSON with an oracle")
    compare.add_argument("--n", type=int, required=True, help="Number of labeled examples")
    compare.add_argument("--seed", type=int, required=True, help="Sampling seed")
    compare.add_argument("--json", action="store_true", help="Emit JSON instead of TSV")

    verify = sub.add_parser("verify", help="Run the randomized property suite")
    verify.add_argument(
        "--seed", type=int,
        default=config.get_int("verification.default_seed", 20160503),
        help="Base seed; instance k uses [seed, k]"
    )
    verify.add_argument(
        "--instances", type=int,
        default=config.get_int("verification.default_instances", 200),
        help="Number of random instances"
    )
    verify.add_argument(
        "--workers", type=int,
        default=config.get_int("verification.workers", 1),
        help="Worker processes"
    )
    verify.add_argument(
        "--slack", type=float,
        default=config.get_float("verification.slack", 1e-12),
        help="Tolerance on inequality checks"
    )
    verify.add_argument("--json", action="store_true", help="Emit JSON instead of TSV")

    sample = sub.add_parser("sample", help="Sample a labeled dataset as TSV")
    sample.add_argument("--spec", required=True, help="Problem spec JSON with an oracle")
    sample.add_argument("--n", type=int, required=True, help="Number of examples")
    sample.add_argument("--seed", type=int, required=True, help="Sampling seed")

    return parser


def print_header(title: str, quiet: bool = False) -> None:
    """Print a formatted banner on standard error."""
    if quiet:
        return
    if config.get("ui.colorized_output", True):
        print(f"{Fore.CYAN}== {title} =={Style.RESET_ALL}", file=sys.stderr)
    else:
        print(f"== {title} ==", file=sys.stderr)


def print_error(kind: str, message: str) -> None:
    print(f"{Fore.RED}[!] {kind}:{Style.RESET_ALL} {message}", file=sys.stderr)


def emit(report: Dict[str, Any], table: Optional[tuple], as_json: bool) -> None:
    if as_json or table is None:
        text = JSONReportGenerator().render(report)
    else:
        headers, rows = table
        text = TableReportGenerator().render(headers, rows)
    sys.stdout.write(text)


def run_command(args: argparse.Namespace) -> int:
    if args.command == "infer":
        spec = load_problem(args.spec)
        obs, y = load_observation(args.obs, spec)
        print_header(f"infer ({spec.weight_mode} weights)", args.quiet)
        report = cmd_infer(spec, obs, y)
        emit(report, infer_table(report), args.json)
        return EXIT_OK

    if args.command == "optimize":
        spec = load_problem(args.spec)
        print_header("optimize", args.quiet)
        report = cmd_optimize(spec)
        for warning in report["warnings"]:
            app_logger.warning(warning)
        emit(report, optimize_table(report), not args.tsv)
        return EXIT_OK

    if args.command == "compare":
        spec = load_problem(args.spec)
        print_header(f"compare (n={args.n}, seed={args.seed})", args.quiet)
        report = cmd_compare(spec, args.n, args.seed)
        emit(report, compare_table(report), args.json)
        return EXIT_OK

    if args.command == "verify":
        print_header(f"verify ({args.instances} instances, seed {args.seed})", args.quiet)
        report = cmd_verify(
            seed=args.seed,
            instances=args.instances,
            workers=args.workers,
            slack=args.slack,
            show_progress=False if args.quiet else None,
        )
        # the replay blob must be reachable from the TSV mode too
        emit(report, verify_table(report) if report["passed"] else None, args.json)
        if not report["passed"]:
            failure = report["failure"]
            print_error("Property failure", f"{failure['check']} on instance {failure['instance']}")
            return EXIT_PROPERTY_FAILURE
        return EXIT_OK

    if args.command == "sample":
        spec = load_problem(args.spec)
        print_header(f"sample (n={args.n}, seed={args.seed})", args.quiet)
        headers, rows = cmd_sample(spec, args.n, args.seed)
        sys.stdout.write(TableReportGenerator().render(headers, rows))
        return EXIT_OK

    raise SpecValidationError(f"Unknown command '{args.command}'")


def main(argv: Optional[List[str]] = None) -> int:
    """Main execution function."""
    parser = setup_argument_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        app_logger.setLevel("DEBUG")
    elif args.quiet:
        app_logger.setLevel("WARNING")

    try:
        app_logger.info(f"=== sclkit {args.command} started ===")
        code = run_command(args)
        app_logger.info(f"=== sclkit {args.command} finished ({code}) ===")
        return code

    except SpecValidationError as e:
        app_logger.error(f"Invalid input: {e}")
        print_error("Spec error", str(e))
        return EXIT_SPEC_ERROR

    except MathError as e:
        app_logger.error(f"Undefined quantity: {e}")
        print_error("Math error", str(e))
        return EXIT_MATH_ERROR

    except KeyboardInterrupt:
        app_logger.warning("Interrupted by user")
        if not args.quiet:
            print(f"\n{Fore.YELLOW}[!] Interrupted by user{Style.RESET_ALL}", file=sys.stderr)
        return EXIT_INTERRUPTED

    except Exception as e:
        app_logger.error(f"Unexpected error: {e}", exc_info=True)
        print_error("Error", str(e))
        return EXIT_PROPERTY_FAILURE


if __name__ == "__main__":
    sys.exit(main())
