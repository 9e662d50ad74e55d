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
preoccupied.bioblend.milp
Solver-neutral mixed integer model of the bale processing schedule.

Variable names encode their role and index, split on underscores:

- ``X_<node>_<moisture>_<feedstock>_<t>`` flow out of a node
- ``M_<bin>_<moisture>_<feedstock>_<t>`` bin inventory, t from 0
- ``V_<moisture>_<feedstock>_<t>`` infeed speed in meters per period
- ``Z_<moisture>_<feedstock>_<t>`` class on the infeed
- ``Zr_<t>`` reactor running
- ``U`` maximum reactor feed rate
- ``W_<t>`` linearized product of ``U`` and ``Zr_<t>``
- ``Bp_<n>_<w>`` / ``Bm_<n>_<w>`` surplus and shortfall of sample n in
  blending window w

Every row carries the tag of the constraint family it belongs to, such
as ``"(12)"`` for grinder losses or ``"plumbing"`` for rows the
formulation needs but does not number.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import math
from dataclasses import dataclass, replace
from typing import (
    Dict, Iterable, List, Mapping, Optional, Tuple, Union)

import numpy as np
from pydantic import ConfigDict, Field
from scipy import sparse

from .model import (
    BaleClass, BaleGeometry, InstanceLayout, ReliabilitySpec, SequencePlan,
    make_windows, split_key, window_periods)
from .errors import HorizonError
from .network import Grinder, ProcessNetwork, Separator, validate_network
from .sampling import SampleSet
from .selector import Discriminator, KindSelector, Match


__all__ = (
    "ROW_TAGS",
    "AllSamplesVariant",
    "ChanceSaaVariant",
    "DeterministicVariant",
    "MilpArrays",
    "MilpInstance",
    "Row",
    "Variable",
    "VariantSpec",
    "add_blending",
    "build_core",
    "instance_statistics",
)


logger = logging.getLogger(__name__)


ROW_TAGS = frozenset(
    [f"({n})" for n in range(2, 26)] +
    ["(29)", "(30)", "(34)", "(35)", "(37)", "plumbing"])

SENSES = ("<=", ">=", "=")

ROLES = ("X", "M", "V", "Z", "Zr", "U", "W", "Bp", "Bm")


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float = 0.0
    upper: float = math.inf
    binary: bool = False


    @property
    def role(self) -> str:
        return self.name.split("_", 1)[0]


@dataclass(frozen=True)
class Row:
    """
    A linear row ``sum(coef * var) <sense> rhs``. Terms are sorted by
    variable name.
    """

    name: str
    terms: Tuple[Tuple[str, float], ...]
    sense: str
    rhs: float
    tag: str


    def activity(self, values: Mapping[str, float]) -> float:
        return sum(coef * values.get(var, 0.0) for var, coef in self.terms)


    def violation(self, values: Mapping[str, float]) -> float:
        """
        How far the row is from holding at the given values; zero when it
        holds.
        """

        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass(frozen=True)
class MilpArrays:
    """
    Dense vectors and a sparse matrix form of an instance, rows as
    ``row_lower <= A x <= row_upper``.
    """

    names: Tuple[str, ...]
    objective: np.ndarray
    matrix: sparse.csr_matrix
    row_lower: np.ndarray
    row_upper: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integrality: np.ndarray


class MilpInstance:
    """
    Variables, tagged rows and a minimization objective.
    """

    def __init__(self, name: str = "bioblend") -> None:
        self.name = name
        self._variables: Dict[str, Variable] = {}
        self._rows: List[Row] = []
        self.objective: Dict[str, float] = {}
        self.layout: Optional[InstanceLayout] = None
        self.warnings: List[str] = []


    def add_variable(
            self,
            name: str,
            lower: float = 0.0,
            upper: float = math.inf,
            binary: bool = False) -> str:

        if name in self._variables:
            raise ValueError(f"variable {name} declared twice")
        if lower > upper:
            raise ValueError(f"variable {name} has lower bound above upper bound")
        self._variables[name] = Variable(name, float(lower), float(upper), binary)
        return name


    def add_row(
            self,
            terms: Union[Mapping[str, float], Iterable[Tuple[str, float]]],
            sense: str,
            rhs: float,
            tag: str,
            name: Optional[str] = None) -> Row:
        """
        Append a row. Repeated variables are merged and zero
        coefficients dropped.
        """

        if sense not in SENSES:
            raise ValueError(f"unknown row sense {sense!r}")
        if tag not in ROW_TAGS:
            raise ValueError(f"unknown row tag {tag!r}")

        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: Dict[str, float] = {}
        for var, coef in items:
            if var not in self._variables:
                raise ValueError(f"row refers to undeclared variable {var}")
            merged[var] = merged.get(var, 0.0) + float(coef)

        row = Row(
            name=name or f"c{len(self._rows) + 1}",
            terms=tuple(sorted((v, c) for v, c in merged.items() if c != 0.0)),
            sense=sense,
            rhs=float(rhs),
            tag=tag)
        self._rows.append(row)
        return row


    def set_objective(self, terms: Mapping[str, float]) -> None:
        for var in terms:
            if var not in self._variables:
                raise ValueError(f"objective refers to undeclared variable {var}")
        self.objective = {v: float(c) for v, c in terms.items() if c != 0.0}


    @property
    def variables(self) -> Tuple[Variable, ...]:
        return tuple(self._variables.values())


    @property
    def rows(self) -> Tuple[Row, ...]:
        return tuple(self._rows)


    def has_variable(self, name: str) -> bool:
        return name in self._variables


    def variable(self, name: str) -> Variable:
        return self._variables[name]


    def names(self, role: str) -> List[str]:
        return [v.name for v in self._variables.values() if v.role == role]


    def copy(self, name: Optional[str] = None) -> "MilpInstance":
        dup = MilpInstance(name or self.name)
        dup._variables = dict(self._variables)
        dup._rows = list(self._rows)
        dup.objective = dict(self.objective)
        dup.layout = self.layout
        dup.warnings = list(self.warnings)
        return dup


    def with_penalty(self, alpha: float) -> "MilpInstance":
        """
        Copy with every shortfall variable weighted by ``alpha`` in the
        objective.
        """

        dup = self.copy()
        for var in self.names("Bm"):
            dup.objective[var] = float(alpha)
        return dup


    def with_bounds(self, bounds: Mapping[str, Tuple[float, float]]) -> "MilpInstance":
        dup = self.copy()
        for var, (lower, upper) in bounds.items():
            dup._variables[var] = replace(dup._variables[var], lower=lower, upper=upper)
        return dup


    def structure(self) -> Tuple:
        """
        Everything that defines the model, for comparing instances.
        """

        return (
            tuple(sorted(self._variables.values(), key=lambda v: v.name)),
            tuple(self._rows),
            tuple(sorted(self.objective.items())),
        )


    def tag_counts(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for row in self._rows:
            counts[row.tag] = counts.get(row.tag, 0) + 1
        return counts


    def issues(self) -> List[str]:
        """
        Problems that make the instance unsolvable as written.
        """

        found = []
        for var in self._variables.values():
            if math.isnan(var.lower) or math.isnan(var.upper):
                found.append(f"variable {var.name} has a NaN bound")
            if var.binary and (var.lower < 0 or var.upper > 1):
                found.append(f"binary variable {var.name} bounded outside [0, 1]")
        for row in self._rows:
            if row.tag not in ROW_TAGS:
                found.append(f"row {row.name} has unknown tag {row.tag!r}")
            if not math.isfinite(row.rhs):
                found.append(f"row {row.name} has a non-finite right-hand side")
            if any(not math.isfinite(c) for _, c in row.terms):
                found.append(f"row {row.name} has a non-finite coefficient")
        return found


    def arrays(self) -> MilpArrays:
        names = tuple(self._variables)
        index = {n: i for i, n in enumerate(names)}

        data, indices, indptr = [], [], [0]
        row_lower = np.empty(len(self._rows))
        row_upper = np.empty(len(self._rows))
        for r, row in enumerate(self._rows):
            for var, coef in row.terms:
                indices.append(index[var])
                data.append(coef)
            indptr.append(len(indices))
            row_lower[r] = row.rhs if row.sense in (">=", "=") else -np.inf
            row_upper[r] = row.rhs if row.sense in ("<=", "=") else np.inf

        matrix = sparse.csr_matrix(
            (np.array(data, dtype=float), np.array(indices, dtype=int), np.array(indptr)),
            shape=(len(self._rows), len(names)))

        objective = np.zeros(len(names))
        for var, coef in self.objective.items():
            objective[index[var]] = coef

        variables = list(self._variables.values())
        return MilpArrays(
            names=names,
            objective=objective,
            matrix=matrix,
            row_lower=row_lower,
            row_upper=row_upper,
            lower=np.array([v.lower for v in variables]),
            upper=np.array([v.upper for v in variables]),
            integrality=np.array([1 if v.binary else 0 for v in variables]))


def instance_statistics(instance: MilpInstance) -> str:
    """
    Row counts per constraint tag and variable counts per role, as
    comma-delimited text.
    """

    lines = ["kind,name,count"]
    for tag, count in sorted(instance.tag_counts().items()):
        lines.append(f"rows,{tag},{count}")

    roles: Dict[str, int] = {}
    for var in instance.variables:
        roles[var.role] = roles.get(var.role, 0) + 1
    for role in ROLES:
        if role in roles:
            lines.append(f"variables,{role},{roles[role]}")

    binaries = sum(1 for v in instance.variables if v.binary)
    lines.append(f"variables,binary,{binaries}")
    return "\n".join(lines) + "\n"


def _token(key: str) -> str:
    moisture, feedstock = split_key(key)
    return f"{moisture}_{feedstock}"


def flow_name(node: str, key: str, t: int) -> str:
    return f"X_{node}_{_token(key)}_{t}"


def inventory_name(node: str, key: str, t: int) -> str:
    return f"M_{node}_{_token(key)}_{t}"


class _CoreBuilder:
    """
    Assembles the deterministic scheduling model one constraint family
    at a time.
    """

    def __init__(
            self,
            network: ProcessNetwork,
            plan: SequencePlan,
            geometry: BaleGeometry,
            classes: Mapping[str, BaleClass],
            reliability: ReliabilitySpec,
            verbatim_big_m: bool,
            name: str) -> None:

        self.keys = tuple(sorted(k for k, c in classes.items() if c.count > 0))
        self.net = network.model_copy(update={"classes": self.keys})
        self.plan = plan
        self.geometry = geometry
        self.classes = classes
        self.reliability = reliability
        self.verbatim = verbatim_big_m
        self.T = network.horizon
        self.big_m = network.effective_big_m(geometry.length)
        self.order = self.net.order()
        self.carried = {
            node.id: [k for k in self.keys if node.carries(k)]
            for node in self.net.nodes}
        self.instance = MilpInstance(name)


    def warn(self, message: str, *args) -> None:
        text = message % args
        logger.warning(text)
        self.instance.warnings.append(text)


    def build(self) -> MilpInstance:
        self.check()
        self.declare()
        self.capacity_rows()
        self.storage_rows()
        self.sequence_rows()
        self.infeed_rows()
        self.balance_rows()
        self.reactor_rows()

        periods = range(1, self.T + 1)
        self.instance.set_objective({f"Zr_{t}": 1.0 for t in periods})
        self.instance.layout = InstanceLayout(
            nodes=tuple(self.order),
            classes=self.keys,
            bins=tuple(n for n in self.order if self.net.node(n).stores),
            reactor_feeders=tuple(self.net.reactor_feeders),
            infeed=self.net.infeed,
            periods=self.T,
            period_minutes=self.geometry.period_minutes,
            windows=make_windows(self.T, 0))
        return self.instance


    def check(self) -> None:
        problems = validate_network(self.net)
        if problems:
            raise ValueError(
                "network is not usable: " + "; ".join(str(p) for p in problems))

        for key in self.keys:
            if not self.classes[key].derived:
                raise ValueError(f"class {key} has no derived bale parameters")

        counts = self.plan.counts()
        for key in self.keys:
            if counts.get(key, 0) != self.classes[key].count:
                raise ValueError(
                    f"plan lists {counts.get(key, 0)} bales of {key},"
                    f" classes say {self.classes[key].count}")

        if self.plan.occupied > self.T:
            raise HorizonError(self.plan.occupied, self.T)

        longest = max((self.classes[k].periods for k in self.keys), default=1)
        if self.big_m < max(self.geometry.length, self.T):
            self.warn("big_M %s is below max(bale length, horizon)", self.big_m)
        if self.verbatim and self.big_m < max(
                (len(self.keys) - 1) * longest,
                (longest - 1) * self.geometry.length):
            self.warn("big_M %s may cut off schedules in the sequence rows", self.big_m)


    def declare(self) -> None:
        inst = self.instance
        T = self.T

        for t in range(1, T + 1):
            for node_id in self.order:
                for key in self.carried[node_id]:
                    inst.add_variable(flow_name(node_id, key, t))

        for node in self.net.bins():
            for key in self.carried[node.id]:
                for t in range(0, T + 1):
                    inst.add_variable(inventory_name(node.id, key, t))

        for key in self.keys:
            token = _token(key)
            for t in range(1, T + 1):
                inst.add_variable(f"V_{token}_{t}", 0.0, self.geometry.length)
                inst.add_variable(f"Z_{token}_{t}", 0.0, 1.0, binary=True)

        self.u_lower = self.reliability.feed_rate_lower
        self.u_upper = self.reliability.feed_rate_upper
        if self.u_upper is None:
            self.u_upper = self.net.reactor_capacity()
        if not self.u_lower < self.u_upper:
            raise ValueError(
                f"feed rate bounds [{self.u_lower}, {self.u_upper}] are empty")

        for t in range(1, T + 1):
            inst.add_variable(f"Zr_{t}", 0.0, 1.0, binary=True)
        inst.add_variable("U", self.u_lower, self.u_upper)
        for t in range(1, T + 1):
            inst.add_variable(f"W_{t}", 0.0, self.u_upper)


    def capacity_rows(self) -> None:
        inst = self.instance
        infeed = self.net.node(self.net.infeed)

        for key in self.keys:
            token = _token(key)
            for t in range(1, self.T + 1):
                inst.add_row(
                    [(flow_name(infeed.id, key, t), 1.0),
                     (f"Z_{token}_{t}", -infeed.capacity[key])],
                    "<=", 0.0, "(2)")

        for node_id in self.order:
            node = self.net.node(node_id)
            for key in self.carried[node_id]:
                if key not in node.capacity:
                    continue
                for t in range(1, self.T + 1):
                    inst.add_row(
                        [(flow_name(node_id, key, t), 1.0)],
                        "<=", node.capacity[key], "(3)")


    def storage_rows(self) -> None:
        inst = self.instance
        for node in self.net.bins():
            carried = self.carried[node.id]
            for t in range(1, self.T + 1):
                inst.add_row(
                    [(inventory_name(node.id, k, t), 1.0) for k in carried],
                    "<=", node.mass_cap, "(4)")
                inst.add_row(
                    [(inventory_name(node.id, k, t), 1.0 / node.processed_density[k])
                     for k in carried],
                    "<=", node.volume_cap, "(5)")


    def _window(self, start: int, key: str) -> range:
        return range(start, min(start + self.classes[key].periods - 1, self.T) + 1)


    def sequence_rows(self) -> None:
        inst = self.instance
        starts = self.plan.start_indicator()
        length = self.geometry.length

        for key in self.keys:
            token = _token(key)
            others = [k for k in self.keys if k != key]

            for t in range(1, self.T + 1):
                started = starts.get((key, t), 0)
                if not started and not self.verbatim:
                    continue

                window = self._window(t, key)
                slack = self.big_m * (1 - started)

                if others:
                    inst.add_row(
                        [(f"Z_{_token(k)}_{s}", 1.0) for k in others for s in window],
                        "<=", slack, "(6)")

                speeds = [(f"V_{token}_{s}", 1.0) for s in window]
                inst.add_row(speeds, ">=", length - slack, "(9)")
                inst.add_row(speeds, "<=", length + slack, "(10)")


    def infeed_rows(self) -> None:
        inst = self.instance
        infeed = self.net.infeed

        for key in self.keys:
            bale = self.classes[key]
            token = _token(key)
            for t in range(1, self.T + 1):
                inst.add_row(
                    [(flow_name(infeed, key, t), 1.0),
                     (f"V_{token}_{t}", -bale.mass_per_meter)],
                    "<=", 0.0, "(7)")

            inst.add_row(
                [(flow_name(infeed, key, t), 1.0) for t in range(1, self.T + 1)],
                "=", bale.mass * bale.count, "(8)")

        for t in range(2, self.T + 1):
            inst.add_row(
                [(f"Zr_{t}", 1.0), (f"Zr_{t - 1}", -1.0)], "<=", 0.0, "(11)")


    def balance_rows(self) -> None:
        inst = self.instance
        outlets: Dict[str, Tuple[str, str]] = {}
        for node in self.net.nodes:
            if isinstance(node, Separator):
                outlets[node.oversize_outlet] = ("(13)", node.id)
                outlets[node.undersize_outlet] = ("(14)", node.id)

        for node_id in self.order:
            node = self.net.node(node_id)
            if node_id == self.net.infeed:
                continue

            for key in self.carried[node_id]:
                preds = [p for p in node.predecessors if self.net.node(p).carries(key)]

                if node.stores:
                    for t in range(1, self.T + 1):
                        terms = [
                            (inventory_name(node_id, key, t), 1.0),
                            (inventory_name(node_id, key, t - 1), -1.0),
                            (flow_name(node_id, key, t), 1.0)]
                        terms += [(flow_name(p, key, t), -1.0) for p in preds]
                        inst.add_row(terms, "=", 0.0, "(16)")
                    inst.add_row(
                        [(inventory_name(node_id, key, 0), 1.0)], "=", 0.0, "(17)")
                    inst.add_row(
                        [(inventory_name(node_id, key, self.T), 1.0)], "=", 0.0, "(18)")
                    continue

                if isinstance(node, Grinder):
                    tag, factor = "(12)", 1.0 - node.dry_matter_loss
                elif node_id in outlets:
                    tag, separator = outlets[node_id]
                    ratio = self.net.node(separator).bypass_ratio[key]
                    factor = ratio if tag == "(14)" else 1.0 - ratio
                else:
                    tag, factor = "(15)", 1.0

                for t in range(1, self.T + 1):
                    terms = [(flow_name(node_id, key, t), 1.0)]
                    terms += [(flow_name(p, key, t), -factor) for p in preds]
                    inst.add_row(terms, "=", 0.0, tag)


    def reactor_rows(self) -> None:
        inst = self.instance
        rel = self.reliability
        lo, hi = self.u_lower, self.u_upper

        def into_reactor(t: int) -> List[Tuple[str, float]]:
            return [
                (flow_name(r, k, t), 1.0)
                for r in self.net.reactor_feeders
                for k in self.carried[r]]

        for t in range(1, self.T + 1):
            flows = into_reactor(t)
            inst.add_row(flows + [("U", -1.0)], "<=", 0.0, "(19)")
            inst.add_row(flows + [(f"Zr_{t}", -hi)], "<=", 0.0, "plumbing")
            inst.add_row(flows + [(f"W_{t}", -rel.min_utilization)], ">=", 0.0, "(20)")

        total = [term for t in range(1, self.T + 1) for term in into_reactor(t)]
        total += [(f"W_{t}", -rel.avg_utilization) for t in range(1, self.T + 1)]
        inst.add_row(total, ">=", 0.0, "(21)")

        for t in range(1, self.T + 1):
            w, z = f"W_{t}", f"Zr_{t}"
            inst.add_row([(w, 1.0), (z, -lo)], ">=", 0.0, "(22)")
            inst.add_row([(w, 1.0), (z, -hi)], "<=", 0.0, "(23)")
            inst.add_row([(w, 1.0), (z, -hi), ("U", -1.0)], ">=", -hi, "(24)")
            inst.add_row([(w, 1.0), (z, -lo), ("U", -1.0)], "<=", -lo, "(25)")

        expected = sum(
            self.classes[k].mass * self.classes[k].count * self.net.reactor_yield(k)
            for k in self.keys)
        if expected > hi * self.T * (1 + 1e-9):
            self.warn(
                "the reactor cannot take %.4g Mg within %s periods at %.4g Mg per period",
                expected, self.T, hi)


def build_core(
        network: ProcessNetwork,
        plan: SequencePlan,
        geometry: BaleGeometry,
        classes: Union[Mapping[str, BaleClass], Iterable[BaleClass]],
        reliability: ReliabilitySpec,
        *,
        verbatim_big_m: bool = False,
        name: str = "core") -> MilpInstance:
    """
    Build the deterministic makespan model for a bale plan on a network.

    Sequence rows whose bale does not start in that period only relax to
    big-M right-hand sides; they are left out unless ``verbatim_big_m``.
    Problems that make the model infeasible by construction are logged
    and kept in ``instance.warnings``.
    """

    if not isinstance(classes, Mapping):
        classes = {c.key: c for c in classes}

    builder = _CoreBuilder(
        network, plan, geometry, classes, reliability, verbatim_big_m, name)
    return builder.build()


class VariantSpec(KindSelector):
    """
    Carbohydrate blending requirement added on top of the core model.
    ``window_minutes`` of zero applies the requirement over the whole
    horizon.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    variant: str = Discriminator()
    threshold: float = Field(0.591, gt=0, lt=1)
    window_minutes: float = Field(0.0, ge=0)


class DeterministicVariant(VariantSpec):
    """
    Hard rows on mean carbohydrate contents.
    """

    variant: str = Match("deterministic")
    mean_carbs: Dict[str, float]


class ChanceSaaVariant(VariantSpec):
    """
    Penalized sample rows; violations cost ``penalty`` per Mg short.
    """

    variant: str = Match("chance_saa")
    samples: SampleSet
    penalty: float = Field(1.0, gt=0)


class AllSamplesVariant(VariantSpec):
    """
    Hard rows for every sample.
    """

    variant: str = Match("all_samples")
    samples: SampleSet


def _window_flows(
        instance: MilpInstance,
        window: Tuple[int, int]) -> List[Tuple[str, str]]:

    layout = instance.layout
    flows = []
    for feeder in layout.reactor_feeders:
        for key in layout.classes:
            feedstock = split_key(key)[1]
            for t in range(window[0], window[1] + 1):
                name = flow_name(feeder, key, t)
                if instance.has_variable(name):
                    flows.append((name, feedstock))
    return flows


def add_blending(instance: MilpInstance, variant: VariantSpec) -> MilpInstance:
    """
    Copy of a core instance with the variant's carbohydrate rows.
    """

    layout = instance.layout
    if layout is None:
        raise ValueError("blending rows need an instance made by build_core")

    size = window_periods(variant.window_minutes, layout.period_minutes)
    windows = make_windows(layout.periods, size)

    result = instance.copy(f"{instance.name}-{variant.variant}")
    if 0 < size < layout.periods and layout.periods % size:
        message = (
            f"{layout.periods} periods do not divide into windows of {size};"
            f" the last window is truncated at the horizon")
        logger.warning(message)
        result.warnings.append(message)

    target = variant.threshold
    flows = [_window_flows(instance, w) for w in windows]
    samples = 0

    if isinstance(variant, DeterministicVariant):
        for window in flows:
            terms = []
            for name, feedstock in window:
                if feedstock not in variant.mean_carbs:
                    raise ValueError(f"no mean carbohydrate content for {feedstock}")
                terms.append((name, variant.mean_carbs[feedstock] - target))
            result.add_row(terms, ">=", 0.0, "(35)")

    elif isinstance(variant, AllSamplesVariant):
        values = _sample_lookup(variant.samples, layout)
        for n in range(variant.samples.size):
            for window in flows:
                terms = [(name, values[b][n] - target) for name, b in window]
                result.add_row(terms, ">=", 0.0, "(37)")

    elif isinstance(variant, ChanceSaaVariant):
        values = _sample_lookup(variant.samples, layout)
        samples = variant.samples.size
        cap = _supplied_mass(instance)
        for n in range(samples):
            for w, window in enumerate(flows, 1):
                plus = result.add_variable(f"Bp_{n + 1}_{w}", 0.0, cap)
                minus = result.add_variable(f"Bm_{n + 1}_{w}", 0.0, cap)
                terms = [(name, target - values[b][n]) for name, b in window]
                terms += [(plus, 1.0), (minus, -1.0)]
                result.add_row(terms, "=", 0.0, "(29)")
                result.objective[minus] = variant.penalty

    else:
        raise TypeError(f"unsupported variant {variant.variant!r}")

    result.layout = replace(layout, windows=windows, samples=samples)
    return result


def _sample_lookup(samples: SampleSet, layout: InstanceLayout) -> Dict[str, np.ndarray]:
    return {b: samples.column(b) for b in layout.feedstocks()}


def _supplied_mass(instance: MilpInstance) -> float:
    total = 0.0
    for row in instance.rows:
        if row.tag == "(8)":
            total += row.rhs
    return max(total, 1.0)


# The end.
