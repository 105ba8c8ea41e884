"""
Command line runner: ``nematiclab simulate``, ``verify``, ``besov report`` and ``lagrangian``.

Exit codes: 0 when every suite passes, 1 when a suite fails or the numerics break down, 2 for invalid input.
"""

import argparse
import logging
import typing
from pathlib import Path

from nematiclab.cli import pipelines
from nematiclab.common.exceptions import UnknownScenarioError
from nematiclab.common.logging import setup_logging
from nematiclab.config.settings.defaults import (
    EXIT_SUCCESS,
    EXIT_SUITE_FAILURE,
    EXIT_USAGE_ERROR,
    REFINEMENT_HALVINGS,
)
from nematiclab.config.settings.run import load_run_configuration
from nematiclab.config.settings.services import LabConfiguration
from nematiclab.domain.indices import BesovIndex
from nematiclab.domain.reports import Verdict
from nematiclab.duhamel.lemmas import LEMMA_BUILDERS

Handler = typing.Callable[[argparse.Namespace], Verdict | None]


def _simulate(arguments: argparse.Namespace) -> Verdict:
    configuration = load_run_configuration(arguments.config)
    out = arguments.out if arguments.out is not None else configuration.output.directory
    return pipelines.simulate(configuration, out)


def _lemmas(requested: list[str] | None) -> list[str]:
    if not requested or "all" in requested:
        return list(LEMMA_BUILDERS)
    return requested


def _verify_duhamel(arguments: argparse.Namespace) -> Verdict:
    return pipelines.verify_duhamel(_lemmas(arguments.lemma), arguments.trials, arguments.out, arguments.seed)


def _verify_besov(arguments: argparse.Namespace) -> Verdict:
    return pipelines.verify_besov(arguments.out, arguments.trials, arguments.seed)


def _verify_lagrangian(arguments: argparse.Namespace) -> Verdict:
    return pipelines.verify_lagrangian(arguments.out)


def _verify_refinement(arguments: argparse.Namespace) -> Verdict:
    configuration = load_run_configuration(arguments.config)
    return pipelines.verify_refinement(configuration, arguments.out, arguments.halvings)


def _verify_all(arguments: argparse.Namespace) -> Verdict:
    verdict = pipelines.verify_duhamel(_lemmas(None), arguments.trials, arguments.out, arguments.seed)
    verdict = verdict.merged(pipelines.verify_besov(arguments.out, seed=arguments.seed))
    verdict = verdict.merged(pipelines.verify_lagrangian(arguments.out))
    if arguments.trajectory is not None:
        verdict = verdict.merged(pipelines.verify_trajectory(arguments.trajectory, arguments.out))
    if arguments.config is not None:
        configuration = load_run_configuration(arguments.config)
        verdict = verdict.merged(pipelines.verify_refinement(configuration, arguments.out))
    return verdict


def _besov_report(arguments: argparse.Namespace) -> None:
    pipelines.besov_report(arguments.snapshot, arguments.index, arguments.out, arguments.heat)


def _lagrangian(arguments: argparse.Namespace) -> Verdict:
    return pipelines.lagrangian_check(
        arguments.trajectory, arguments.check, arguments.out, arguments.against, arguments.require_series
    )


def _besov_index(text: str) -> BesovIndex:
    try:
        return BesovIndex.parse(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected s,p,r with p > 1 and r >= 1, got {text!r}") from error


def _with_output(parser: argparse.ArgumentParser, required: bool = True) -> argparse.ArgumentParser:
    parser.add_argument("--out", type=Path, required=required, default=None, help="Output directory.")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nematiclab", description="Pseudospectral laboratory for the simplified Ericksen-Leslie system."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = _with_output(commands.add_parser("simulate", help="Solve a run file."), required=False)
    simulate.add_argument("--config", type=Path, required=True, help="TOML run file.")
    simulate.set_defaults(handler=_simulate)

    verify = commands.add_parser("verify", help="Run a verification suite.")
    suites = verify.add_subparsers(dest="suite", required=True)
    duhamel = _with_output(suites.add_parser("duhamel", help="Bound constants of the Duhamel lemmas."))
    duhamel.add_argument("--lemma", action="append", choices=[*LEMMA_BUILDERS, "all"], help="Repeatable.")
    duhamel.add_argument("--trials", type=int, default=10)
    duhamel.add_argument("--seed", type=int, default=0)
    duhamel.set_defaults(handler=_verify_duhamel)
    besov = _with_output(suites.add_parser("besov", help="Besov norm equivalences and scaling."))
    besov.add_argument("--trials", type=int, default=20)
    besov.add_argument("--seed", type=int, default=0)
    besov.set_defaults(handler=_verify_besov)
    lagrangian = _with_output(suites.add_parser("lagrangian", help="Lagrangian identities on a Taylor-Green run."))
    lagrangian.set_defaults(handler=_verify_lagrangian)
    refinement = _with_output(suites.add_parser("refinement", help="Observed orders under time-step halving."))
    refinement.add_argument("--config", type=Path, required=True, help="TOML run file.")
    refinement.add_argument("--halvings", type=int, default=REFINEMENT_HALVINGS)
    refinement.set_defaults(handler=_verify_refinement)
    everything = _with_output(suites.add_parser("all", help="Every suite, and diagnostics of a stored run."))
    everything.add_argument("--in", dest="trajectory", type=Path, default=None, help="Trajectory directory.")
    everything.add_argument("--config", type=Path, default=None, help="Run file for the refinement study.")
    everything.add_argument("--trials", type=int, default=10)
    everything.add_argument("--seed", type=int, default=0)
    everything.set_defaults(handler=_verify_all)

    besov_command = commands.add_parser("besov", help="Besov norms of stored fields.")
    besov_actions = besov_command.add_subparsers(dest="action", required=True)
    report = _with_output(besov_actions.add_parser("report", help="Per-block norms of a snapshot."))
    report.add_argument("snapshot", type=Path, help="ELF1 snapshot.")
    report.add_argument("--index", type=_besov_index, required=True, help="Besov index as s,p,r.")
    report.add_argument("--heat", action="store_true", help="Add the heat-flow characterization (s < 0).")
    report.set_defaults(handler=_besov_report)

    check = _with_output(commands.add_parser("lagrangian", help="Lagrangian checks of a stored trajectory."))
    check.add_argument("--in", dest="trajectory", type=Path, required=True, help="Trajectory directory.")
    check.add_argument("--check", choices=pipelines.LAGRANGIAN_CHECKS, default="identities")
    check.add_argument("--against", type=Path, default=None, help="Second trajectory for the deltaA check.")
    check.add_argument("--require-series", action="store_true", help="Refuse direct Jacobian inversion.")
    check.set_defaults(handler=_lagrangian)
    return parser


def main(argv: typing.Sequence[str] | None = None) -> int:
    with LabConfiguration.use() as config:
        setup_logging(config.log_level)
    arguments = build_parser().parse_args(argv)
    handler: Handler = arguments.handler
    try:
        verdict = handler(arguments)
    except (ValueError, UnknownScenarioError, OSError) as error:
        logging.error(f"[CLI] {error}")
        return EXIT_USAGE_ERROR
    except ArithmeticError as error:
        logging.error(f"[CLI] Numerical failure: {error}")
        return EXIT_SUITE_FAILURE
    if verdict is None:
        return EXIT_SUCCESS
    for line in verdict.render().splitlines():
        logging.info(f"[CLI] {line}")
    return EXIT_SUCCESS if verdict.passed else EXIT_SUITE_FAILURE
