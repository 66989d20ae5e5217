"""
Command line interface.

Every command writes a JSON report to standard output (or ``--output``)
and exits with one of the codes below. Logs go to standard error.
"""
from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import argparse
import logging
import sys
import time

from .convert import build_report, dump_problem, dump_report, load_problem
from .doc import doc_category
from .errors import InfeasibleStartError, ProblemFormatError, RenyiConesError
from .experiments import fidelity_check, mutual_info, rate_distortion
from .solver import SolveStatus, SolverConfig, solve
from .verifier import SUITES, run_suite, suite_passed


__all__ = (
    "EXIT_OK",
    "EXIT_VERIFY_FAILED",
    "EXIT_ITERATION_LIMIT",
    "EXIT_NUMERICAL_FAILURE",
    "EXIT_PARSE_ERROR",
    "EXIT_INFEASIBLE",
    "build_parser",
    "main",
)


logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ITERATION_LIMIT = 2
EXIT_NUMERICAL_FAILURE = 3
EXIT_PARSE_ERROR = 4
EXIT_INFEASIBLE = 5

STATUS_EXIT_CODES = {
    SolveStatus.OPTIMAL: EXIT_OK,
    SolveStatus.ITERATION_LIMIT: EXIT_ITERATION_LIMIT,
    SolveStatus.NUMERICAL_FAILURE: EXIT_NUMERICAL_FAILURE,
    SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
}

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

#: Agreement required between the semidefinite and direct fidelity values.
FIDELITY_TOLERANCE = 1e-6

Report = Tuple[dict, int]


class _Parser(argparse.ArgumentParser):
    "Argument parser that reports usage errors with the parse error exit code."
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE_ERROR, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {text}")

    return value


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    overrides = {}
    if args.tol is not None:
        overrides["gap_tolerance"] = args.tol

    if args.max_iter is not None:
        overrides["max_iterations"] = args.max_iter

    return replace(SolverConfig(), **overrides)


def cmd_mutual_info(args: argparse.Namespace) -> Report:
    started = time.perf_counter()
    info = mutual_info(args.n, args.alpha, args.seed, args.state, _solver_config(args))
    report = build_report(
        "mutual-info",
        info.result.status,
        seed=args.seed,
        config=info.config,
        result=info.result,
        wall_time=time.perf_counter() - started,
        n=args.n,
        alpha=args.alpha,
        state=args.state,
        value=info.value,
        objective_divergence=info.objective_value,
        fixed_point_residual=info.residual,
        X=info.X,
    )
    return report, STATUS_EXIT_CODES[info.result.status]


def cmd_rate_distortion(args: argparse.Namespace) -> Report:
    started = time.perf_counter()
    distortion = rate_distortion(args.n, args.delta, args.alpha, _solver_config(args))
    if args.export is not None:
        dump_problem(distortion.problem, args.export, distortion.start)
        logger.info("Problem written to %s.", args.export)

    report = build_report(
        "rate-distortion",
        distortion.result.status,
        config=distortion.config,
        result=distortion.result,
        wall_time=time.perf_counter() - started,
        n=args.n,
        delta=args.delta,
        alpha=args.alpha,
        value=distortion.value,
        closed_form=distortion.closed_form,
        X=distortion.X,
    )
    return report, STATUS_EXIT_CODES[distortion.result.status]


def cmd_fidelity(args: argparse.Namespace) -> Report:
    started = time.perf_counter()
    config = _solver_config(args)
    fidelity = fidelity_check(args.n, args.seed, args.trials, config)
    report = build_report(
        "fidelity",
        fidelity.status,
        seed=args.seed,
        config=config,
        wall_time=time.perf_counter() - started,
        n=args.n,
        max_error=fidelity.max_error,
        agreement=fidelity.max_error <= FIDELITY_TOLERANCE,
        trials=fidelity.trials,
    )
    return report, STATUS_EXIT_CODES[fidelity.status]


def cmd_verify(args: argparse.Namespace) -> Report:
    started = time.perf_counter()
    reports = run_suite(args.suite, args.seed)
    passed = suite_passed(reports)
    report = build_report(
        "verify",
        "passed" if passed else "failed",
        seed=args.seed,
        verification=reports,
        wall_time=time.perf_counter() - started,
        suite=args.suite,
    )
    return report, EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_solve(args: argparse.Namespace) -> Report:
    problem, start = load_problem(args.problem)
    if args.phase1:
        start = None
    elif start is None:
        raise ProblemFormatError(f"{args.problem} has no 'start' point; pass --phase1 to search for one.")

    config = _solver_config(args)
    result = solve(problem, config, start)
    report = build_report(
        "solve",
        result.status,
        config=config,
        result=result,
        problem=str(args.problem),
        x=result.x,
    )
    return report, STATUS_EXIT_CODES[result.status]


@doc_category("Command line")
def build_parser() -> argparse.ArgumentParser:
    "Returns the parser of the ``renyicones`` command."
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="Seed of randomized commands (default: 0).")
    common.add_argument("--tol", type=float, default=None, help="Solver gap tolerance (default: 1e-8).")
    common.add_argument("--max-iter", type=int, default=None, dest="max_iter", help="Newton step limit (default: 200).")
    common.add_argument("--output", type=Path, default=None, help="Write the report here instead of stdout.")
    common.add_argument("--format", choices=["json"], default="json", help="Report format.")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="Log progress (-v) or every Newton step (-vv)."
    )

    parser = _Parser(prog="renyicones", description="Conic optimization over sandwiched Renyi cones.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub = commands.add_parser("mutual-info", parents=[common], help="Sandwiched Renyi mutual information.")
    sub.add_argument("--n", type=int, default=4, help="Subsystem size, 2..8 (default: 4).")
    sub.add_argument("--alpha", type=float, required=True, help="Order in [0.5, 1) or (1, 2].")
    sub.add_argument(
        "--state", choices=["random", "maximally-mixed", "product"], default="random",
        help="Bipartite state (default: random).",
    )
    sub.set_defaults(handler=cmd_mutual_info)

    sub = commands.add_parser("rate-distortion", parents=[common], help="Entanglement-assisted rate distortion.")
    sub.add_argument("--n", type=int, default=4, help="Local dimension, 2..4 (default: 4).")
    sub.add_argument("--delta", type=float, required=True, help="Distortion in [0, 1].")
    sub.add_argument("--alpha", type=float, required=True, help="Order in [0.5, 1) or (1, 2].")
    sub.add_argument("--export", type=Path, default=None, help="Also write the solved problem as a problem file.")
    sub.set_defaults(handler=cmd_rate_distortion)

    sub = commands.add_parser("fidelity", parents=[common], help="Fidelity SDP against the direct formula.")
    sub.add_argument("--n", type=int, default=3, help="Matrix size, 1..8 (default: 3).")
    sub.add_argument("--trials", type=int, default=10, help="Number of random pairs (default: 10).")
    sub.set_defaults(handler=cmd_fidelity)

    sub = commands.add_parser("verify", parents=[common], help="Run verification suites.")
    sub.add_argument("--suite", choices=SUITES, default="all", help="Suite to run (default: all).")
    sub.set_defaults(handler=cmd_verify)

    sub = commands.add_parser("solve", parents=[common], help="Solve a problem file.")
    sub.add_argument("problem", type=Path, help="Problem file.")
    sub.add_argument("--phase1", action="store_true", help="Find a strictly feasible start instead of reading it.")
    sub.set_defaults(handler=cmd_solve)
    return parser


def _configure_logging(verbosity: int):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _emit(report: dict, output: Optional[Path]):
    text = dump_report(report) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


@doc_category("Command line")
def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs the command line and returns the exit code.

    ======  ==========================================
    Code    Meaning
    ======  ==========================================
    0       Optimal, or verification passed
    1       Verification failed
    2       Iteration limit
    3       Numerical failure
    4       Usage, parse or file error
    5       Infeasible (no strictly feasible start)
    ======  ==========================================
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], Report] = args.handler
    try:
        report, code = handler(args)
    except InfeasibleStartError as exc:
        logger.error("%s", exc)
        report, code = build_report(args.command, "infeasible", message=str(exc)), EXIT_INFEASIBLE
    except (ProblemFormatError, OSError, ValueError) as exc:
        logger.error("%s", exc)
        report, code = build_report(args.command, "error", message=str(exc)), EXIT_PARSE_ERROR
    except RenyiConesError as exc:
        logger.error("%s", exc)
        report, code = build_report(args.command, "numerical_failure", message=str(exc)), EXIT_NUMERICAL_FAILURE

    try:
        _emit(report, args.output)
    except OSError as exc:
        logger.error("Can't write the report: %s", exc)
        return EXIT_PARSE_ERROR

    return code
