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
preoccupied.bioblend.metrics
Schedule metrics and report tables.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .model import SolutionRecord, split_key
from .network import Grinder, ProcessNetwork, Separator


__all__ = (
    "RATE_TOLERANCE",
    "MetricsRow",
    "compute_metrics",
    "energy_rows",
    "mass_balance_error",
    "trace_reactor_mass",
    "write_energy",
    "write_metrics",
    "write_plot_data",
    "write_replications",
)


logger = logging.getLogger(__name__)


# relative disagreement allowed between rate times time and flow
RATE_TOLERANCE = 0.005


class MetricsRow(BaseModel):
    """
    One line of a results table. Times are hours, masses dry Mg. A row
    for a problem without any solution carries only the status and the
    replication counts.
    """

    model_config = ConfigDict(frozen=True)

    problem: str
    status: str = "Optimal"
    process_time: Optional[float] = Field(None, ge=0)
    rate: Optional[float] = Field(None, ge=0)
    flow: Optional[float] = Field(None, ge=0)
    avg_inventory: Optional[float] = Field(None, ge=0)
    max_inventory: Optional[float] = Field(None, ge=0)
    cov: Optional[float] = Field(None, ge=0)
    feasible: int = Field(0, ge=0)
    replications: int = Field(1, ge=0)


    @model_validator(mode="after")
    def _consistent(self) -> "MetricsRow":
        error = self.consistency_error()
        if error is not None and error > RATE_TOLERANCE:
            raise ValueError(
                f"rate {self.rate} over {self.process_time} h gives"
                f" {self.rate * self.process_time:.4f} Mg, not {self.flow}")
        return self


    @classmethod
    def infeasible(cls, problem: str, replications: int) -> "MetricsRow":
        return cls(problem=problem, status="Infeasible", replications=replications)


    def consistency_error(self) -> Optional[float]:
        """
        Relative gap between rate times process time and flow.
        """

        if None in (self.rate, self.process_time, self.flow) or not self.flow:
            return None
        return abs(self.rate * self.process_time - self.flow) / self.flow


    def record(self) -> Dict[str, object]:
        def fixed(value: Optional[float], digits: int) -> str:
            return "" if value is None else f"{value:.{digits}f}"

        return {
            "problem": self.problem,
            "status": self.status,
            "process_time_h": fixed(self.process_time, 2),
            "rate_mg_per_h": fixed(self.rate, 2),
            "flow_mg": fixed(self.flow, 2),
            "avg_inventory_mg": fixed(self.avg_inventory, 2),
            "max_inventory_mg": fixed(self.max_inventory, 2),
            "cov": fixed(self.cov, 4),
            "feasible": f"{self.feasible}/{self.replications}",
        }


def compute_metrics(
        solution: SolutionRecord,
        period_minutes: Optional[float] = None,
        problem: str = "",
        feasible: int = 1,
        replications: int = 1) -> MetricsRow:
    """
    Metrics of a solved schedule. Average inventory and the coefficient
    of variation are taken over the periods the reactor runs; the
    coefficient is the population standard deviation of each period's
    share of the total reactor flow.
    """

    if period_minutes is None:
        period_minutes = solution.layout.period_minutes

    on = np.round(solution.reactor_on).astype(bool)
    periods = int(on.sum())
    if not periods:
        raise ValueError("the reactor never runs, so the schedule has no process time")

    hours = periods * period_minutes / 60.0
    flows = solution.reactor_flow()
    flow = float(flows.sum())
    inventory = solution.inventory_total()
    shares = flows[on] / flow if flow > 0 else np.zeros(periods)

    return MetricsRow(
        problem=problem,
        process_time=hours,
        rate=flow / hours,
        flow=flow,
        avg_inventory=float(inventory[on].mean()),
        max_inventory=float(inventory.max()) if inventory.size else 0.0,
        cov=float(np.std(shares)),
        feasible=feasible,
        replications=replications)


def trace_reactor_mass(
        network: ProcessNetwork,
        infeed_mass: Mapping[str, float]) -> Dict[str, float]:
    """
    Push each class's infeed mass through the network in topological
    order, applying grinder losses and separator splits, and collect
    what arrives at the reactor feeders.
    """

    graph = network.graph()
    order = list(nx.topological_sort(graph))
    arrived: Dict[str, float] = {}

    for key, mass in infeed_mass.items():
        inflow = {node_id: 0.0 for node_id in order}
        inflow[network.infeed] = mass

        for node_id in order:
            node = network.node(node_id)
            outflow = inflow[node_id]
            if isinstance(node, Grinder):
                outflow *= 1.0 - node.dry_matter_loss

            if node_id in network.reactor_feeders:
                arrived[key] = arrived.get(key, 0.0) + outflow
            elif isinstance(node, Separator):
                ratio = node.bypass_ratio[key]
                inflow[node.undersize_outlet] += ratio * outflow
                inflow[node.oversize_outlet] += (1.0 - ratio) * outflow
            else:
                targets = [
                    s for s in graph.successors(node_id)
                    if network.node(s).carries(key)]
                if targets:
                    inflow[targets[0]] += outflow

    return arrived


def mass_balance_error(solution: SolutionRecord, network: ProcessNetwork) -> float:
    """
    Largest absolute gap, over classes, between the reactor mass of a
    solution and the mass the flow trace predicts from its infeed.
    """

    layout = solution.layout
    infeed = layout.nodes.index(layout.infeed)
    feeders = [layout.nodes.index(n) for n in layout.reactor_feeders]

    supplied = {
        key: float(solution.flows[infeed, k].sum())
        for k, key in enumerate(layout.classes)}
    expected = trace_reactor_mass(network, supplied)

    worst = 0.0
    for k, key in enumerate(layout.classes):
        delivered = float(solution.flows[feeders, k].sum())
        worst = max(worst, abs(delivered - expected.get(key, 0.0)))
    return worst


def energy_rows(
        solution: SolutionRecord,
        network: ProcessNetwork,
        energy: Mapping[str, Mapping[str, float]]) -> List[Dict[str, object]]:
    """
    Energy use of every staged node, the stage's kWh per dry Mg times the
    mass the node processed, per moisture level. ``energy`` maps stage
    names to kWh per Mg by moisture level.
    """

    layout = solution.layout
    rows = []
    for n, node_id in enumerate(layout.nodes):
        stage = network.node(node_id).stage
        if stage not in energy:
            continue
        mass: Dict[str, float] = {}
        for k, key in enumerate(layout.classes):
            moisture = split_key(key)[0]
            mass[moisture] = mass.get(moisture, 0.0) + float(solution.flows[n, k].sum())
        for moisture in sorted(mass):
            rows.append({
                "node": node_id,
                "stage": stage,
                "moisture": moisture,
                "mass_mg": round(mass[moisture], 6) + 0.0,
                "energy_kwh": round(mass[moisture] * energy[stage][moisture], 6) + 0.0,
            })
    return rows


def _csv(rows: Sequence[Mapping[str, object]], columns: Sequence[str]) -> str:
    return pd.DataFrame(list(rows), columns=list(columns)).to_csv(
        index=False, lineterminator="\n")


def write_metrics(rows: Iterable[MetricsRow]) -> str:
    records = [row.record() for row in rows]
    return _csv(records, (
        "problem", "status", "process_time_h", "rate_mg_per_h", "flow_mg",
        "avg_inventory_mg", "max_inventory_mg", "cov", "feasible"))


def write_replications(rows: Iterable[Mapping[str, object]]) -> str:
    return _csv(list(rows), (
        "replication", "seed", "status", "objective", "process_time_h",
        "alpha", "sample_rate", "posterior_rate", "posterior_bound",
        "feasible", "source"))


def write_energy(rows: Iterable[Mapping[str, object]]) -> str:
    return _csv(list(rows), ("node", "stage", "moisture", "mass_mg", "energy_kwh"))


def write_plot_data(solution: SolutionRecord) -> str:
    """
    Per-period reactor state, reactor flow and inventory of every bin.
    """

    layout = solution.layout
    columns = {
        "period": np.arange(1, layout.periods + 1),
        "reactor_on": np.round(solution.reactor_on).astype(int),
        "reactor_flow": np.round(solution.reactor_flow(), 6) + 0.0,
    }
    for b, bin_id in enumerate(layout.bins):
        columns[f"inventory_{bin_id}"] = np.round(
            solution.inventories[b, :, 1:].sum(axis=0), 6) + 0.0

    frame = pd.DataFrame(columns)
    return frame.to_csv(index=False, lineterminator="\n")


# The end.
