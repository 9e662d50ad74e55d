# This library is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This library is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this library; if not, see <http://www.gnu.org/licenses/>.

"""
preoccupied.bioblend.cli
Command line front end.

Every subcommand takes a configuration file, or ``--profile`` naming a
shipped one, and ``--set key=value`` overrides. Exit codes are 0 on
success, 2 when no schedule exists, 3 for configuration or data errors
and 4 for solver failures.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import sys
from argparse import ArgumentParser, Namespace
from pathlib import Path
from typing import Dict, List, Optional

from .config import RULES, RunConfig, load_config, profile_path
from .errors import SolverError
from .lpformat import export_lp_text, write_solution_text
from .metrics import write_metrics
from .milp import instance_statistics
from .runner import (
    build_instance, metrics_from_solution, prepare, read_saved_solution,
    run, solve_once)
from .saa import lower_bound, upper_bound
from .sequencing import write_ordering
from .solver import SolveStatus


__all__ = (
    "EXIT_BACKEND",
    "EXIT_CONFIG",
    "EXIT_INFEASIBLE",
    "EXIT_OK",
    "create_parser",
    "main",
)


logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_CONFIG = 3
EXIT_BACKEND = 4


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)
        logger.info("wrote %s", output)


def _overrides(pairs: List[str]) -> Dict[str, str]:
    found = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"--set expects key=value, got {pair!r}")
        found[key.strip()] = value.strip()
    return found


def _config(options: Namespace, **extra: str) -> RunConfig:
    if options.config is None and options.profile is None:
        raise ValueError("give a configuration file or --profile")
    path = options.config or profile_path(options.profile)
    overrides = _overrides(options.set)
    overrides.update({k: v for k, v in extra.items() if v is not None})
    return load_config(path, overrides)


def cmd_sequence(options: Namespace) -> int:
    problem = prepare(_config(options, sequence=options.rule))
    _emit(write_ordering(problem.ordering), options.output)
    for note in problem.ordering.notes:
        print(note, file=sys.stderr)
    return EXIT_OK


def cmd_build(options: Namespace) -> int:
    problem = prepare(_config(options, variant=options.variant))
    instance = build_instance(problem, options.seed)
    if options.stats:
        _emit(instance_statistics(instance), options.output)
    else:
        _emit(export_lp_text(instance), options.output)
    return EXIT_OK


def cmd_solve(options: Namespace) -> int:
    problem = prepare(_config(options, variant=options.variant))
    outcome = solve_once(problem, options.seed)

    if outcome.status == SolveStatus.ERROR:
        print(f"solver error: {outcome.message}", file=sys.stderr)
        return EXIT_BACKEND
    if outcome.record is None:
        print(f"{problem.config.problem}: {outcome.status.value}")
        return EXIT_INFEASIBLE

    hours = problem.builder.hours(outcome.makespan)
    print(
        f"{problem.config.problem}: {outcome.status.value} makespan={outcome.makespan}"
        f" periods ({hours:.2f} h) feasible={outcome.feasible}")
    for line in outcome.trace:
        print(line)
    if options.solution is not None:
        options.solution.write_text(write_solution_text(outcome.values))
    return EXIT_OK


def cmd_bounds(options: Namespace) -> int:
    config = _config(options)
    problem = prepare(config)
    kinds = ("lower", "upper") if options.kind == "both" else (options.kind,)

    certificates = []
    if "lower" in kinds:
        certificates.append(lower_bound(
            problem.builder, config.gamma, config.lower_gamma_hat, config.delta,
            config.replications, seed=config.seed,
            sample_size=options.lower_size or config.lower_sample_size,
            options=config.penalty_options(), pool_size=config.pool_size))
    if "upper" in kinds:
        certificates.append(upper_bound(
            problem.builder, config.gamma, config.gamma_hat, config.delta,
            config.sample_size, config.posterior_size or 10000,
            config.replications, config.step, seed=config.seed,
            max_rounds=config.max_rounds, options=config.penalty_options(),
            pool_size=config.pool_size))

    _emit("\n".join(c.to_text() for c in certificates), options.output)
    return EXIT_OK if all(c.value is not None for c in certificates) else EXIT_INFEASIBLE


def cmd_run(options: Namespace) -> int:
    config = _config(options)
    report = run(config)
    report.write(options.output or config.output)
    sys.stdout.write(write_metrics([report.metrics]))

    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if report.solved:
        return EXIT_OK
    return EXIT_BACKEND if report.errors else EXIT_INFEASIBLE


def cmd_report(options: Namespace) -> int:
    problem = prepare(_config(options))
    values = read_saved_solution(options.solution)
    row = metrics_from_solution(problem, values)
    _emit(write_metrics([row]), options.output)
    return EXIT_OK


def create_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="bioblend",
        description="Schedule biomass bales through a preprocessing line")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    parser.add_argument("-q", "--quiet", action="store_true", help="log errors only")

    common = ArgumentParser(add_help=False)
    common.add_argument("config", nargs="?", type=Path, help="configuration file")
    common.add_argument("--profile", help="shipped configuration profile, e.g. desk")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a configuration key, repeatable")

    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("sequence", parents=[common], help="emit a bale ordering")
    p.add_argument("--rule", choices=RULES, help="ordering rule instead of the configured sequence")
    p.add_argument("--output", type=Path)
    p.set_defaults(handler=cmd_sequence)

    p = subs.add_parser("build", parents=[common], help="emit LP text of the model")
    p.add_argument("--variant", choices=("deterministic", "chance_saa", "all_samples"))
    p.add_argument("--seed", type=int, help="sample seed of sampled variants")
    p.add_argument("--stats", action="store_true", help="row and variable counts only")
    p.add_argument("--output", type=Path)
    p.set_defaults(handler=cmd_build)

    p = subs.add_parser("solve", parents=[common], help="solve one replication")
    p.add_argument("--variant", choices=("deterministic", "chance_saa", "all_samples"))
    p.add_argument("--seed", type=int, help="replication seed")
    p.add_argument("--solution", type=Path, help="write variable values here")
    p.set_defaults(handler=cmd_solve)

    p = subs.add_parser("bounds", parents=[common], help="lower and upper bound procedures")
    p.add_argument("--kind", choices=("lower", "upper", "both"), default="both")
    p.add_argument(
        "--lower-size", type=int,
        help="lower bound sample size instead of the one its confidence needs")
    p.add_argument("--output", type=Path)
    p.set_defaults(handler=cmd_bounds)

    p = subs.add_parser("run", parents=[common], help="run the full experiment")
    p.add_argument("--output", type=Path, help="report directory")
    p.set_defaults(handler=cmd_run)

    p = subs.add_parser("report", parents=[common], help="metrics of a saved solution")
    p.add_argument("solution", type=Path, help="solution file")
    p.add_argument("--output", type=Path)
    p.set_defaults(handler=cmd_report)

    return parser


def main(args: Optional[List[str]] = None) -> int:
    parser = create_parser()
    options = parser.parse_args(args)

    level = logging.WARNING
    if options.verbose:
        level = logging.INFO
    elif options.quiet:
        level = logging.ERROR
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return options.handler(options)
    except (SolverError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BACKEND
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())


# The end.
