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
preoccupied.bioblend.runner
Experiment orchestration.

:func:`run` reads the case data, orders the bales, solves the
configured variant over its replications and writes the report
tables. Report contents depend only on the configuration and its
seeds; wall times and the worker pool size never reach them.

Report files:

``metrics.csv``
  the summary row of the run

``replications.csv``
  status, makespan, penalty and risk of every replication

``plot_data.csv``
  per-period reactor flow and bin inventories of the summary solution

``certificate.txt``
  bound certificates, when bounds were requested

``trace.txt``
  penalty search records of every replication

``energy.csv``
  energy use per staged node and moisture level

``sequence.csv``, ``solution.sol``, ``statistics.txt``
  the bale ordering, the summary solution's variable values and the
  instance row counts

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .casedata import CaseData, ingest_case_data
from .config import RunConfig
from .lpformat import read_solution_text, write_solution_text
from .metrics import (
    MetricsRow, compute_metrics, energy_rows, mass_balance_error,
    write_energy, write_metrics, write_plot_data, write_replications)
from .milp import MilpInstance, instance_statistics
from .model import BaleClass, SequencePlan, SolutionRecord, expand_sequence
from .pool import map_replications
from .saa import (
    BoundCertificate, Replication, ReplicationOutcome, ScenarioBuilder,
    lower_bound, run_replication, upper_bound)
from .sampling import replication_seeds
from .sequencing import (
    Ordering, inventory_counts, load_literal_sequence, random_sequence,
    realize, rule1_moisture, rule2_quality, rule3_distance, rule4_combined,
    write_ordering)
from .solver import SolveStatus


__all__ = (
    "Problem",
    "RunReport",
    "build_instance",
    "build_ordering",
    "metrics_from_solution",
    "prepare",
    "read_saved_solution",
    "run",
    "solve_once",
)


logger = logging.getLogger(__name__)


# spawn key of the run's own replication seeds, apart from the bound rounds
_RUN_STREAM = 1000

# reactor mass may differ from the traced mass by this much per Mg
_MASS_TOLERANCE = 1e-6

# posterior sample size for upper bounds when the configuration has none
_DEFAULT_POSTERIOR = 10000


def build_ordering(config: RunConfig, case: CaseData) -> Ordering:
    """
    The bale ordering a configuration asks for: a sequence file, a seeded
    shuffle or one of the ordering rules.
    """

    inventory = case.inventory
    path = config.sequence_path()
    if path is not None:
        return load_literal_sequence(path, config.moisture, inventory)
    if config.sequence == "random":
        return random_sequence(inventory, config.seed, config.moisture)

    counts = inventory_counts(
        inventory, case.distributions, config.threshold, config.gamma)
    if config.sequence == "rule1":
        return realize(rule1_moisture(counts).labels(), inventory, "moisture")
    if config.sequence == "rule2":
        return realize(rule2_quality(counts).labels(), inventory, "quality", counts)
    if config.sequence == "rule3":
        return rule3_distance(counts, inventory)
    return rule4_combined(counts, inventory)


@dataclass
class Problem:
    """
    A configuration made concrete: data read, bales ordered and the
    deterministic model built.
    """

    config: RunConfig
    case: CaseData
    ordering: Ordering
    classes: Dict[str, BaleClass]
    plan: SequencePlan
    builder: ScenarioBuilder


    @property
    def warnings(self) -> List[str]:
        return list(self.ordering.notes) + list(self.builder.core.warnings)


def prepare(config: RunConfig) -> Problem:
    case = ingest_case_data(
        config.case_paths(), config.horizon, config.period_minutes, config.big_m)
    ordering = build_ordering(config, case)
    for note in ordering.notes:
        logger.warning("ordering: %s", note)

    geometry = config.geometry()
    classes = case.classes_for(ordering.bales, geometry)
    for key, bale in sorted(classes.items()):
        if bale.mass > bale.mass_per_meter * geometry.length:
            logger.warning(
                "a %s bale of %.3f Mg cannot pass the infeed within one bale"
                " length at %.4f Mg per meter", key, bale.mass, bale.mass_per_meter)

    plan = expand_sequence(ordering.bales, classes, config.horizon)
    builder = ScenarioBuilder(
        case.network, plan, geometry, classes, config.reliability(),
        case.distributions,
        threshold=config.threshold,
        window_minutes=config.window_minutes,
        backend=config.backend_config(),
        time_limit=config.time_limit,
        mip_gap=config.mip_gap,
        threads=config.threads,
        verify=config.verify,
        verbatim_big_m=config.verbatim_big_m,
        mean_carbs=case.mean_carbs,
        name=config.problem)

    logger.info(
        "%s: %d bales over %d of %d periods, %d variables, %d rows",
        config.problem, len(ordering), plan.occupied, config.horizon,
        len(builder.core.variables), len(builder.core.rows))
    return Problem(config, case, ordering, classes, plan, builder)


def build_instance(problem: Problem, seed: Optional[int] = None) -> MilpInstance:
    """
    The configured variant's model. Sampled variants draw
    ``sample_size`` samples from ``seed``, the configuration's seed by
    default; the chance variant carries a unit shortfall penalty.
    """

    config = problem.config
    builder = problem.builder
    if config.variant == "deterministic":
        return builder.deterministic()

    samples = builder.draw(config.sample_size, config.seed if seed is None else seed)
    if config.variant == "all_samples":
        return builder.all_samples(samples)
    return builder.chance(samples, 1.0)


def _task(problem: Problem, index: int, seed: int) -> Replication:
    config = problem.config
    sampled = config.variant != "deterministic"
    return Replication(
        builder=problem.builder,
        index=index,
        variant=config.variant,
        seed=seed,
        sample_size=config.sample_size if sampled else 0,
        risk=config.gamma_hat,
        gamma=config.gamma if config.posterior_size else None,
        delta=config.delta,
        posterior_size=config.posterior_size if sampled else 0,
        options=config.penalty_options())


def solve_once(problem: Problem, seed: Optional[int] = None) -> ReplicationOutcome:
    """
    One replication of the configured variant.
    """

    if seed is None:
        seed = replication_seeds(problem.config.seed, 1, _RUN_STREAM)[0]
    return run_replication(_task(problem, 1, seed))


def metrics_from_solution(
        problem: Problem,
        values: Dict[str, float],
        feasible: int = 1,
        replications: int = 1) -> MetricsRow:
    """
    Metrics of saved variable values, decoded against the problem's
    deterministic model.
    """

    record = SolutionRecord.from_values(problem.builder.core.layout, values)
    return compute_metrics(
        record, problem.config.period_minutes, problem.config.problem,
        feasible, replications)


def _number(value: Optional[float], digits: int = 6) -> str:
    return "" if value is None else f"{value:.{digits}g}"


@dataclass
class RunReport:
    """
    Everything a run produced. ``files`` maps report file names to their
    contents.
    """

    config: RunConfig
    metrics: MetricsRow
    outcomes: List[ReplicationOutcome]
    certificates: List[BoundCertificate] = field(default_factory=list)
    best: Optional[ReplicationOutcome] = None
    warnings: List[str] = field(default_factory=list)
    files: Dict[str, str] = field(default_factory=dict)


    @property
    def solved(self) -> bool:
        return self.best is not None


    @property
    def errors(self) -> int:
        return sum(o.status == SolveStatus.ERROR for o in self.outcomes)


    def write(self, directory: Optional[Path] = None) -> List[Path]:
        directory = Path(directory or self.config.output)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name in sorted(self.files):
            path = directory / name
            path.write_text(self.files[name])
            written.append(path)
        logger.info("wrote %d report files to %s", len(written), directory)
        return written


def _choose(outcomes: List[ReplicationOutcome]) -> Optional[ReplicationOutcome]:
    """
    Least makespan among replications that passed their checks, or
    among all solved replications when none did. Ties go to the lower
    index.
    """

    solved = [o for o in outcomes if o.record is not None]
    passed = [o for o in solved if o.feasible]
    pool = passed or solved
    if not pool:
        return None
    return min(pool, key=lambda o: (o.makespan, o.index))


def _replication_rows(problem: Problem, outcomes: List[ReplicationOutcome]) -> List[dict]:
    hours = problem.builder.hours
    return [{
        "replication": o.index,
        "seed": o.seed,
        "status": o.status.value,
        "objective": "" if o.makespan is None else o.makespan,
        "process_time_h": "" if o.makespan is None else f"{hours(o.makespan):.2f}",
        "alpha": _number(o.alpha),
        "sample_rate": _number(o.sample_rate),
        "posterior_rate": _number(o.posterior_rate),
        "posterior_bound": _number(o.posterior_bound),
        "feasible": int(o.feasible),
        "source": o.source,
    } for o in outcomes]


def _trace_text(outcomes: List[ReplicationOutcome]) -> str:
    lines = []
    for o in outcomes:
        lines.append(f"replication={o.index} seed={o.seed} source={o.source or '-'}")
        lines.extend(o.trace)
    return "\n".join(lines) + "\n"


def _bounds(problem: Problem) -> List[BoundCertificate]:
    config = problem.config
    found = []
    if config.bounds in ("lower", "both"):
        found.append(lower_bound(
            problem.builder, config.gamma, config.lower_gamma_hat, config.delta,
            config.replications, seed=config.seed,
            sample_size=config.lower_sample_size,
            options=config.penalty_options(), pool_size=config.pool_size))
    if config.bounds in ("upper", "both"):
        found.append(upper_bound(
            problem.builder, config.gamma, config.gamma_hat, config.delta,
            config.sample_size, config.posterior_size or _DEFAULT_POSTERIOR,
            config.replications, config.step, seed=config.seed,
            max_rounds=config.max_rounds, options=config.penalty_options(),
            pool_size=config.pool_size))
    return found


def run(config: RunConfig, problem: Optional[Problem] = None) -> RunReport:
    """
    Run the configured experiment. The deterministic variant is solved
    once; sampled variants run ``replications`` replications on the
    worker pool. Nothing is written; see :meth:`RunReport.write`.
    """

    problem = problem or prepare(config)
    warnings = problem.warnings

    count = 1 if config.variant == "deterministic" else config.replications
    seeds = replication_seeds(config.seed, count, _RUN_STREAM)
    tasks = [_task(problem, j + 1, s) for j, s in enumerate(seeds)]
    outcomes = map_replications(run_replication, tasks, config.pool_size)

    for o in outcomes:
        if o.status == SolveStatus.ERROR:
            warnings.append(f"replication {o.index} failed: {o.message}")
            logger.error("replication %d failed: %s", o.index, o.message)

    best = _choose(outcomes)
    feasible = sum(o.feasible for o in outcomes)
    files = {
        "replications.csv": write_replications(_replication_rows(problem, outcomes)),
        "sequence.csv": write_ordering(problem.ordering),
        "statistics.txt": instance_statistics(problem.builder.core),
    }

    if any(o.trace for o in outcomes):
        files["trace.txt"] = _trace_text(outcomes)

    if best is None:
        metrics = MetricsRow.infeasible(config.problem, count)
        logger.warning("%s: no replication found a schedule", config.problem)
    else:
        record = best.record
        metrics = compute_metrics(
            record, config.period_minutes, config.problem, feasible, count)
        metrics = metrics.model_copy(update={"status": best.status.value})

        gap = mass_balance_error(record, problem.case.network)
        if gap > _MASS_TOLERANCE * max(1.0, metrics.flow):
            warnings.append(f"reactor mass is off the flow trace by {gap:.3g} Mg")
            logger.warning("reactor mass is off the flow trace by %.3g Mg", gap)

        energy = {
            stage: problem.case.equipment.by_moisture(stage, "energy_kwh_per_mg")
            for stage in problem.case.equipment.stages()
            if problem.case.equipment.has(stage, "energy_kwh_per_mg")}
        files["plot_data.csv"] = write_plot_data(record)
        files["energy.csv"] = write_energy(
            energy_rows(record, problem.case.network, energy))
        files["solution.sol"] = write_solution_text(best.values)

    files["metrics.csv"] = write_metrics([metrics])

    certificates = _bounds(problem)
    if certificates:
        files["certificate.txt"] = "\n".join(c.to_text() for c in certificates)

    return RunReport(
        config=config, metrics=metrics, outcomes=outcomes,
        certificates=certificates, best=best, warnings=warnings, files=files)


def read_saved_solution(path: Path) -> Dict[str, float]:
    return read_solution_text(Path(path).read_text())


# The end.
