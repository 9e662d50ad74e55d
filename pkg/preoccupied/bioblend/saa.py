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
preoccupied.bioblend.saa
Sample average approximation of the carbohydrate chance constraint.

The chance constraint asks the reactor blend to reach the carbohydrate
threshold with probability at least ``1 - gamma``. Over a finite sample
set it becomes a count: at most ``gamma_hat * N`` samples may fall
short. :func:`solve_penalty` meets that count by searching the price of
a shortfall, and :func:`lower_bound` and :func:`upper_bound` replicate
the search over fresh samples to bracket the true optimum with a given
confidence.

Objectives here are makespans in periods.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import math
from dataclasses import dataclass, field, replace
from typing import (
    Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union)

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import BoundsError
from .milp import MilpInstance, VariantSpec, add_blending, build_core
from .model import (
    BaleClass, BaleGeometry, ReliabilitySpec, SequencePlan, SolutionRecord,
    make_windows, window_periods)
from .network import ProcessNetwork
from .pool import map_replications
from .sampling import EmpiricalDist, SampleSet, replication_seeds, sample
from .solver import (
    BackendConfig, HighsBackend, SolveRequest, SolveResult, SolveStatus,
    solve)
from .stats import inverse_normal_cdf


__all__ = (
    "SHORTFALL_TOLERANCE",
    "BoundCertificate",
    "PenaltyOptions",
    "PenaltyResult",
    "PenaltySearchState",
    "PenaltyStep",
    "Replication",
    "ReplicationOutcome",
    "ScenarioBuilder",
    "lower_bound",
    "lower_bound_sample_size",
    "posterior_upper",
    "run_replication",
    "solve_penalty",
    "upper_bound",
    "violation_flags",
    "violation_rate",
)


logger = logging.getLogger(__name__)


# a shortfall below this many Mg is solver noise
SHORTFALL_TOLERANCE = 1e-7

# closer risk levels need unbounded sample sizes
_MIN_RISK_GAP = 1e-3


class ScenarioBuilder:
    """
    The deterministic core of one problem, built once, plus what is
    needed to attach blending rows and solve. Instances of this class
    pickle, so replications can run in worker processes.
    """

    def __init__(
            self,
            network: ProcessNetwork,
            plan: SequencePlan,
            geometry: BaleGeometry,
            classes: Union[Mapping[str, BaleClass], Iterable[BaleClass]],
            reliability: ReliabilitySpec,
            distributions: Union[Mapping[str, EmpiricalDist], Iterable[EmpiricalDist]],
            *,
            threshold: float = 0.591,
            window_minutes: float = 0.0,
            backend: Optional[BackendConfig] = None,
            time_limit: float = 600.0,
            mip_gap: float = 1e-4,
            threads: int = 1,
            verify: bool = False,
            verbatim_big_m: bool = False,
            mean_carbs: Optional[Mapping[str, float]] = None,
            name: str = "core") -> None:

        if not isinstance(distributions, Mapping):
            distributions = {d.feedstock: d for d in distributions}

        self.core: MilpInstance = build_core(
            network, plan, geometry, classes, reliability,
            verbatim_big_m=verbatim_big_m, name=name)
        self.distributions: Dict[str, EmpiricalDist] = dict(distributions)
        # inventory means where given, histogram means for the rest
        self.mean_carbs: Dict[str, float] = {
            b: d.mean() for b, d in self.distributions.items()}
        self.mean_carbs.update(mean_carbs or {})
        self.threshold = threshold
        self.window_minutes = window_minutes
        self.backend = backend or HighsBackend()
        self.time_limit = time_limit
        self.mip_gap = mip_gap
        self.threads = threads
        self.verify = verify
        self.period_minutes = geometry.period_minutes

        missing = set(self.core.layout.feedstocks()) - set(self.distributions)
        if missing:
            raise ValueError(
                f"no carbohydrate distribution for {', '.join(sorted(missing))}")


    def hours(self, periods: float) -> float:
        return periods * self.period_minutes / 60.0


    def draw(self, size: int, seed: int) -> SampleSet:
        return sample(self.distributions, size, seed)


    def _variant(self, variant: str, **fields) -> VariantSpec:
        return VariantSpec(
            variant=variant, threshold=self.threshold,
            window_minutes=self.window_minutes, **fields)


    def deterministic(self) -> MilpInstance:
        return add_blending(
            self.core, self._variant("deterministic", mean_carbs=self.mean_carbs))


    def chance(self, samples: SampleSet, penalty: float = 1.0) -> MilpInstance:
        return add_blending(
            self.core, self._variant("chance_saa", samples=samples, penalty=penalty))


    def all_samples(self, samples: SampleSet) -> MilpInstance:
        return add_blending(self.core, self._variant("all_samples", samples=samples))


    def solve(self, instance: MilpInstance, seed: int = 0) -> SolveResult:
        request = SolveRequest(
            instance=instance, time_limit=self.time_limit,
            mip_gap=self.mip_gap, threads=self.threads,
            seed=seed % (2 ** 31), verify=self.verify)
        return solve(request, self.backend)


    def decode(self, instance: MilpInstance, result: SolveResult) -> SolutionRecord:
        return SolutionRecord.from_values(instance.layout, result.values)


def _rewindowed(record: SolutionRecord, window_minutes: Optional[float]) -> SolutionRecord:
    if window_minutes is None:
        return record
    layout = record.layout
    size = window_periods(window_minutes, layout.period_minutes)
    return replace(record, layout=replace(
        layout, windows=make_windows(layout.periods, size)))


def violation_flags(
        solution: SolutionRecord,
        samples: SampleSet,
        threshold: float,
        window_minutes: Optional[float] = None,
        tolerance: float = SHORTFALL_TOLERANCE) -> np.ndarray:
    """
    ``(N, W)`` flags for sample and window pairs whose reactor blend falls
    short of the threshold, recomputed from the reactor flows. Windows
    are the solution's own unless ``window_minutes`` is given.
    """

    record = _rewindowed(solution, window_minutes)
    feedstocks, flows = record.reactor_flow_by_window()
    values = samples.aligned(feedstocks)

    # shortfall[n, w] = sum_b (threshold - f[n, b]) * flow[b, w]
    shortfall = threshold * flows.sum(axis=0)[np.newaxis, :] - values @ flows
    scale = max(1.0, float(flows.sum()))
    return shortfall > tolerance * scale


def violation_rate(
        solution: SolutionRecord,
        samples: SampleSet,
        threshold: float,
        window_minutes: Optional[float] = None,
        per_window: bool = False) -> float:
    """
    Fraction of samples whose blend falls short in any window, or with
    ``per_window`` the fraction of short sample and window pairs.
    """

    flags = violation_flags(solution, samples, threshold, window_minutes)
    if per_window:
        return float(flags.mean())
    return float(flags.any(axis=1).mean())


class PenaltyOptions(BaseModel):
    """
    Initial penalty bracket and the tolerances of the penalty search.
    """

    model_config = ConfigDict(frozen=True)

    alpha_lower: float = Field(1e-3, gt=0)
    alpha_upper: float = Field(1e3, gt=0)
    epsilon: float = Field(1e-4, ge=0)
    phi: float = Field(1e-4, gt=0)


    @model_validator(mode="after")
    def _bracket(self) -> "PenaltyOptions":
        if not self.alpha_lower < self.alpha_upper:
            raise ValueError("alpha_lower must be below alpha_upper")
        return self


    def iteration_cap(self) -> int:
        """
        Bisection depth after which the stopping test must hold.
        """

        width = self.alpha_upper - self.alpha_lower
        return max(1, math.ceil(math.log2(width / self.phi)))


@dataclass(frozen=True)
class PenaltyStep:
    iteration: int
    alpha: float
    low: float
    high: float
    violations: Optional[int]
    objective: Optional[float]
    makespan: Optional[int]
    status: str


    def record(self) -> str:
        return (
            f"iteration={self.iteration} alpha={self.alpha!r}"
            f" low={self.low!r} high={self.high!r} C={self.violations}"
            f" objective={self.objective!r} makespan={self.makespan}"
            f" status={self.status}")


@dataclass
class PenaltySearchState:
    """
    Bracket and counters of a penalty search. ``violations`` counts
    samples with a positive shortfall at the current ``alpha``.
    """

    alpha: float
    low: float
    high: float
    epsilon: float
    phi: float
    violations: int = 0
    objective: Optional[float] = None
    steps: List[PenaltyStep] = field(default_factory=list)


    @property
    def iterations(self) -> int:
        return len(self.steps)


    def trace(self) -> List[str]:
        return [step.record() for step in self.steps]


@dataclass
class PenaltyResult:
    """
    Outcome of :func:`solve_penalty`. ``source`` tells where the returned
    solution came from: ``search`` for an iterate of the bisection,
    ``upper`` for the re-solve at the top of the bracket and
    ``all_samples`` for the hard model on every sample.
    """

    verdict: SolveStatus
    alpha: float
    state: PenaltySearchState
    result: Optional[SolveResult] = None
    record: Optional[SolutionRecord] = None
    source: str = ""
    violations: int = 0
    message: str = ""


    @property
    def solved(self) -> bool:
        return self.record is not None


    @property
    def makespan(self) -> Optional[int]:
        return None if self.record is None else self.record.makespan


def _shortfall_count(record: SolutionRecord) -> int:
    return int(record.violations(SHORTFALL_TOLERANCE).sum())


def _hard_model(
        builder: ScenarioBuilder,
        samples: SampleSet,
        state: PenaltySearchState,
        seed: int) -> PenaltyResult:

    instance = builder.all_samples(samples)
    result = builder.solve(instance, seed)
    if not result.has_solution:
        return PenaltyResult(
            verdict=result.status if result.status is not SolveStatus.OPTIMAL
            else SolveStatus.ERROR,
            alpha=state.alpha, state=state, result=result,
            message=result.message)

    return PenaltyResult(
        verdict=result.status, alpha=state.alpha, state=state,
        result=result, record=builder.decode(instance, result),
        source="all_samples", violations=0)


def solve_penalty(
        builder: ScenarioBuilder,
        samples: SampleSet,
        risk: float,
        options: Optional[PenaltyOptions] = None,
        seed: int = 0) -> PenaltyResult:
    """
    Bisect the shortfall penalty ``alpha`` until the number of short
    samples settles at ``risk * N``.

    Each iterate solves the penalized model. When more samples fall short
    than allowed the penalty rises, when fewer do it falls, and the
    search stops once ``alpha`` sits within ``phi`` of the bracket middle.
    The returned solution is the shortest makespan among iterates whose
    recomputed violation count is at most ``floor(risk * N)``. If no
    iterate qualifies the model is solved at the top of the bracket, and
    if that still violates too often the hard model on every sample
    decides. A zero ``risk`` goes straight to the hard model.
    """

    options = options or PenaltyOptions()
    if not 0.0 <= risk < 1.0:
        raise ValueError(f"risk must lie in [0, 1), got {risk!r}")

    size = samples.size
    allowed = math.floor(risk * size + 1e-9)
    state = PenaltySearchState(
        alpha=options.alpha_upper, low=options.alpha_lower,
        high=options.alpha_upper, epsilon=options.epsilon, phi=options.phi)

    if risk == 0.0:
        return _hard_model(builder, samples, state, seed)

    base = builder.chance(samples)
    cap = options.iteration_cap()
    best: Optional[PenaltyResult] = None

    def attempt(alpha: float, iteration: int) -> Tuple[Optional[PenaltyResult], SolveResult, int]:
        instance = base.with_penalty(alpha)
        result = builder.solve(instance, seed)
        if not result.has_solution:
            state.steps.append(PenaltyStep(
                iteration, alpha, state.low, state.high, None, None, None,
                result.status.value))
            return None, result, 0

        record = builder.decode(instance, result)
        count = _shortfall_count(record)
        recomputed = int(violation_flags(record, samples, builder.threshold).any(axis=1).sum())
        state.steps.append(PenaltyStep(
            iteration, alpha, state.low, state.high, count, result.objective,
            record.makespan, result.status.value))
        logger.debug(
            "penalty alpha=%r C=%d objective=%r makespan=%d",
            alpha, count, result.objective, record.makespan)

        found = None
        if recomputed <= allowed:
            found = PenaltyResult(
                verdict=result.status, alpha=alpha, state=state, result=result,
                record=record, source="search", violations=recomputed)
        return found, result, count

    for iteration in range(1, cap + 1):
        state.alpha = (state.low + state.high) / 2.0
        found, result, count = attempt(state.alpha, iteration)

        if found is None and result.status in (SolveStatus.INFEASIBLE, SolveStatus.ERROR):
            logger.warning(
                "penalized model is %s at alpha=%r", result.status.value, state.alpha)
            return PenaltyResult(
                verdict=result.status, alpha=state.alpha, state=state,
                result=result, message=result.message)

        if result.has_solution:
            state.violations = count
            state.objective = result.objective
            if count >= risk * size + state.epsilon:
                state.low = state.alpha
            elif count < risk * size - state.epsilon:
                state.high = state.alpha

        if found is not None and (best is None or found.makespan < best.makespan):
            best = found

        if abs(state.alpha - (state.low + state.high) / 2.0) <= state.phi:
            break

    if best is None:
        logger.info(
            "no penalty iterate met the violation limit; solving at alpha=%r",
            options.alpha_upper)
        found, result, count = attempt(options.alpha_upper, state.iterations + 1)
        if found is not None:
            found.source = "upper"
            best = found

    if best is None:
        logger.info("falling back to the hard model on all %d samples", size)
        fallback = _hard_model(builder, samples, state, seed)
        fallback.alpha = state.alpha
        return fallback

    best.alpha = state.alpha
    return best


def lower_bound_sample_size(gamma: float, gamma_hat: float, delta: float) -> int:
    """
    Smallest N with ``N >= ln(1 / delta) / (2 (gamma_hat - gamma)^2)``.
    """

    if not 0.0 < delta < 1.0:
        raise BoundsError(f"delta must lie in (0, 1), got {delta!r}")
    if not gamma_hat > gamma:
        raise BoundsError(
            f"a lower bound needs gamma_hat above gamma, got {gamma_hat!r} <= {gamma!r}")
    if gamma_hat - gamma < _MIN_RISK_GAP:
        raise BoundsError(
            f"gamma_hat - gamma = {gamma_hat - gamma:.3g} is below {_MIN_RISK_GAP};"
            f" the sample size would be unbounded")

    size = math.log(1.0 / delta) / (2.0 * (gamma_hat - gamma) ** 2)
    return int(math.ceil(size - 1e-9))


def posterior_upper(rate: float, size: int, delta: float) -> float:
    """
    One-sided ``1 - delta`` confidence bound on a violation probability
    estimated as ``rate`` from ``size`` samples.
    """

    if not 0.0 <= rate <= 1.0:
        raise BoundsError(f"rate must lie in [0, 1], got {rate!r}")
    if size < 1:
        raise BoundsError(f"posterior sample size must be positive, got {size}")
    if not 0.0 < delta < 1.0:
        raise BoundsError(f"delta must lie in (0, 1), got {delta!r}")

    z = inverse_normal_cdf(1.0 - delta)
    return rate + z * math.sqrt(rate * (1.0 - rate) / size)


@dataclass(frozen=True)
class Replication:
    """
    One independent solve: a variant on a fresh sample set drawn from
    ``seed``, optionally checked afterwards against ``posterior_size``
    fresh samples.
    """

    builder: ScenarioBuilder
    index: int
    variant: str
    seed: int
    sample_size: int = 0
    risk: float = 0.05
    gamma: Optional[float] = None
    delta: float = 0.01
    posterior_size: int = 0
    options: PenaltyOptions = field(default_factory=PenaltyOptions)


@dataclass
class ReplicationOutcome:
    index: int
    seed: int
    status: SolveStatus
    objective: Optional[float] = None
    makespan: Optional[int] = None
    alpha: Optional[float] = None
    sample_rate: Optional[float] = None
    posterior_rate: Optional[float] = None
    posterior_bound: Optional[float] = None
    feasible: bool = False
    record: Optional[SolutionRecord] = None
    values: Dict[str, float] = field(default_factory=dict)
    trace: List[str] = field(default_factory=list)
    source: str = ""
    message: str = ""


    @property
    def solved(self) -> bool:
        return self.record is not None


def run_replication(task: Replication) -> ReplicationOutcome:
    """
    Solve one replication. Module level so that worker processes can
    import it.
    """

    builder = task.builder
    if task.variant != "deterministic" and task.sample_size < 1:
        raise ValueError(f"variant {task.variant} needs a positive sample size")
    samples = builder.draw(task.sample_size, task.seed) if task.sample_size else None
    trace: List[str] = []
    alpha = None
    source = ""

    if task.variant == "chance_saa":
        found = solve_penalty(builder, samples, task.risk, task.options, task.seed)
        status, result, record = found.verdict, found.result, found.record
        alpha, source, trace = found.alpha, found.source, found.state.trace()
    else:
        if task.variant == "all_samples":
            instance = builder.all_samples(samples)
        elif task.variant == "deterministic":
            instance = builder.deterministic()
        else:
            raise ValueError(f"unknown variant {task.variant!r}")
        result = builder.solve(instance, task.seed)
        status = result.status
        record = builder.decode(instance, result) if result.has_solution else None

    outcome = ReplicationOutcome(
        index=task.index, seed=task.seed, status=status, alpha=alpha,
        trace=trace, source=source,
        message="" if result is None else result.message)
    if record is None:
        return outcome

    outcome.record = record
    outcome.values = dict(result.values)
    outcome.makespan = record.makespan
    outcome.objective = float(record.makespan)
    outcome.feasible = True
    if samples is not None:
        outcome.sample_rate = violation_rate(record, samples, builder.threshold)

    if task.posterior_size:
        posterior_seed = replication_seeds(task.seed, 1, 1)[0]
        fresh = builder.draw(task.posterior_size, posterior_seed)
        rate = violation_rate(record, fresh, builder.threshold)
        outcome.posterior_rate = rate
        outcome.posterior_bound = posterior_upper(rate, task.posterior_size, task.delta)
        if task.gamma is not None:
            outcome.feasible = outcome.posterior_bound <= task.gamma

    return outcome


class BoundCertificate(BaseModel):
    """
    Result of a bound procedure. ``value`` is the bound in periods: for a
    lower bound the least objective over solved replications, for an
    upper bound the least objective over replications that passed the
    posterior check.
    """

    model_config = ConfigDict(frozen=True)

    kind: str = Field(pattern=r"^(lower|upper)$")
    gamma: float = Field(ge=0, lt=1)
    gamma_hat: float = Field(ge=0, lt=1)
    delta: float = Field(gt=0, lt=1)
    sample_size: int = Field(ge=1)
    replications: int = Field(ge=1)
    posterior_size: int = Field(0, ge=0)
    period_minutes: float = Field(1.0, gt=0)
    value: Optional[float] = None
    objectives: Tuple[Optional[float], ...] = ()
    statuses: Tuple[str, ...] = ()
    feasible: Tuple[bool, ...] = ()
    posterior_rates: Tuple[Optional[float], ...] = ()
    posterior_bounds: Tuple[Optional[float], ...] = ()
    rounds: int = Field(1, ge=1)
    converged: bool = True
    flagged: bool = False


    @model_validator(mode="after")
    def _least(self) -> "BoundCertificate":
        if self.kind == "lower":
            solved = [v for v in self.objectives if v is not None]
            expected = min(solved) if solved else None
            if self.value != expected:
                raise ValueError("a lower bound must be the least solved objective")
        return self


    @property
    def hours(self) -> Optional[float]:
        if self.value is None:
            return None
        return self.value * self.period_minutes / 60.0


    @property
    def feasible_count(self) -> int:
        return sum(self.feasible)


    def to_text(self) -> str:
        def fmt(value) -> str:
            return "-" if value is None else repr(value)

        lines = [
            f"kind={self.kind}",
            f"gamma={self.gamma!r}",
            f"gamma_hat={self.gamma_hat!r}",
            f"delta={self.delta!r}",
            f"N={self.sample_size}",
            f"M={self.replications}",
            f"N_posterior={self.posterior_size}",
            f"rounds={self.rounds}",
            f"converged={self.converged}",
            f"flagged={self.flagged}",
            f"value={fmt(self.value)}",
            f"hours={'-' if self.hours is None else format(self.hours, '.2f')}",
            f"feasible={self.feasible_count}/{self.replications}",
        ]
        for j in range(len(self.statuses)):
            rate = self.posterior_rates[j] if self.posterior_rates else None
            bound = self.posterior_bounds[j] if self.posterior_bounds else None
            lines.append(
                f"replication={j + 1} status={self.statuses[j]}"
                f" objective={fmt(self.objectives[j])}"
                f" feasible={self.feasible[j]}"
                f" posterior_rate={fmt(rate)} posterior_bound={fmt(bound)}")
        return "\n".join(lines) + "\n"


def _replicate(
        builder: ScenarioBuilder,
        round_key: int,
        seed: int,
        count: int,
        pool_size: int,
        **fields) -> List[ReplicationOutcome]:

    seeds = replication_seeds(seed, count, round_key)
    tasks = [
        Replication(builder=builder, index=j + 1, seed=s, **fields)
        for j, s in enumerate(seeds)]
    return map_replications(run_replication, tasks, pool_size)


def lower_bound(
        builder: ScenarioBuilder,
        gamma: float,
        gamma_hat: float,
        delta: float = 0.01,
        replications: int = 10,
        *,
        seed: int = 0,
        sample_size: Optional[int] = None,
        options: Optional[PenaltyOptions] = None,
        pool_size: int = 1) -> BoundCertificate:
    """
    Solve ``replications`` penalty searches at risk ``gamma_hat`` on fresh
    samples and take the least makespan. With probability ``1 - delta``
    it does not exceed the optimum at risk ``gamma``. ``sample_size``
    overrides the size the bound formula asks for.
    """

    required = lower_bound_sample_size(gamma, gamma_hat, delta)
    if replications < 1:
        raise BoundsError(f"replications must be at least 1, got {replications}")
    size = sample_size or required
    if size < required:
        logger.warning(
            "lower bound uses %d samples, fewer than the %d its confidence needs",
            size, required)

    outcomes = _replicate(
        builder, 0, seed, replications, pool_size,
        variant="chance_saa", sample_size=size, risk=gamma_hat,
        options=options or PenaltyOptions())

    objectives = tuple(o.objective for o in outcomes)
    solved = [v for v in objectives if v is not None]
    flagged = len(solved) < len(outcomes)
    if flagged:
        logger.warning(
            "%d of %d lower bound replications have no solution",
            len(outcomes) - len(solved), len(outcomes))

    return BoundCertificate(
        kind="lower", gamma=gamma, gamma_hat=gamma_hat, delta=delta,
        sample_size=size, replications=replications,
        period_minutes=builder.period_minutes,
        value=min(solved) if solved else None,
        objectives=objectives,
        statuses=tuple(o.status.value for o in outcomes),
        feasible=tuple(o.solved for o in outcomes),
        flagged=flagged)


def upper_bound(
        builder: ScenarioBuilder,
        gamma: float,
        gamma_hat: float,
        delta: float = 0.01,
        sample_size: int = 400,
        posterior_size: int = 10000,
        replications: int = 10,
        step: int = 50,
        *,
        seed: int = 0,
        max_rounds: int = 10,
        options: Optional[PenaltyOptions] = None,
        pool_size: int = 1) -> BoundCertificate:
    """
    Solve ``replications`` penalty searches at risk ``gamma_hat`` and check
    each solution against ``posterior_size`` fresh samples. A solution is
    feasible when the ``1 - delta`` bound on its violation probability is
    at most ``gamma``. Until every replication is feasible the sample size
    grows by ``step``, for at most ``max_rounds`` rounds.
    """

    if not gamma_hat < gamma:
        raise BoundsError(
            f"an upper bound needs gamma_hat below gamma, got {gamma_hat!r} >= {gamma!r}")
    if not 0.0 < delta < 1.0:
        raise BoundsError(f"delta must lie in (0, 1), got {delta!r}")
    if sample_size < 1 or posterior_size < 1 or replications < 1 or step < 1:
        raise BoundsError(
            "sample size, posterior size, replications and step must be positive")

    size = sample_size
    outcomes: Sequence[ReplicationOutcome] = ()
    rounds = 0
    converged = False

    while rounds < max_rounds:
        rounds += 1
        outcomes = _replicate(
            builder, rounds, seed, replications, pool_size,
            variant="chance_saa", sample_size=size, risk=gamma_hat,
            gamma=gamma, delta=delta, posterior_size=posterior_size,
            options=options or PenaltyOptions())

        passed = sum(o.feasible for o in outcomes)
        logger.info(
            "upper bound round %d with N=%d: %d of %d feasible",
            rounds, size, passed, replications)
        if passed == replications:
            converged = True
            break
        if rounds < max_rounds:
            size += step

    if not converged:
        logger.warning("upper bound did not converge in %d rounds", max_rounds)

    accepted = [o.objective for o in outcomes if o.feasible and o.objective is not None]
    return BoundCertificate(
        kind="upper", gamma=gamma, gamma_hat=gamma_hat, delta=delta,
        sample_size=size, replications=replications,
        posterior_size=posterior_size, period_minutes=builder.period_minutes,
        value=min(accepted) if accepted else None,
        objectives=tuple(o.objective for o in outcomes),
        statuses=tuple(o.status.value for o in outcomes),
        feasible=tuple(o.feasible for o in outcomes),
        posterior_rates=tuple(o.posterior_rate for o in outcomes),
        posterior_bounds=tuple(o.posterior_bound for o in outcomes),
        rounds=rounds, converged=converged,
        flagged=any(not o.solved for o in outcomes))


# The end.
