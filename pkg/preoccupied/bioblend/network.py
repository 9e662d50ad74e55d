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
preoccupied.bioblend.network
Equipment kinds and the process network they form.

Equipment nodes are kind-dispatched: ``EquipmentNode(kind="grinder",
...)`` returns a :class:`Grinder`. Every node carries the bale classes
of the feedstocks it handles (all feedstocks unless ``feedstocks`` is
given) and a per-class capacity in dry Mg per period.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .model import IDENTIFIER, split_key
from .selector import Discriminator, KindSelector, Match


__all__ = (
    "Conveyor",
    "EquipmentNode",
    "Grinder",
    "MeteringBin",
    "NetworkViolation",
    "Pelleter",
    "ProcessNetwork",
    "ReactorFeeder",
    "Separator",
    "SurgeBin",
    "validate_network",
)


def _positive_values(values: Dict[str, float], what: str) -> Dict[str, float]:
    for key, value in values.items():
        split_key(key)
        if not value > 0:
            raise ValueError(f"{what} for {key} must be positive, got {value}")
    return values


class EquipmentNode(KindSelector):
    """
    One piece of equipment. ``capacity`` maps class keys to the most dry
    Mg the node may pass on in one period.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: str = Discriminator()
    id: str = Field(pattern=IDENTIFIER)
    predecessors: Tuple[str, ...] = ()
    capacity: Dict[str, float] = Field(default_factory=dict)
    feedstocks: Optional[Tuple[str, ...]] = None
    stage: Optional[str] = None


    @field_validator("capacity")
    @classmethod
    def _capacity_positive(cls, value: Dict[str, float]) -> Dict[str, float]:
        return _positive_values(value, "capacity")


    def carries(self, key: str) -> bool:
        """
        Whether bales of the class may flow through this node.
        """

        return self.feedstocks is None or split_key(key)[1] in self.feedstocks


    @property
    def stores(self) -> bool:
        return False


class Conveyor(EquipmentNode):
    kind: str = Match("conveyor")


class Pelleter(EquipmentNode):
    kind: str = Match("pelleter")


class ReactorFeeder(EquipmentNode):
    """
    Conveyor delivering into the reactor.
    """

    kind: str = Match("reactor_feeder")


class Grinder(EquipmentNode):
    """
    Grinder whose outflow is its inflow less the dry matter loss fraction.
    """

    kind: str = Match("grinder")
    dry_matter_loss: Optional[float] = Field(None, ge=0, lt=1)


class Separator(EquipmentNode):
    """
    Screen splitting its outflow: ``bypass_ratio`` of each class goes to
    the undersize outlet, the rest to the oversize outlet.
    """

    kind: str = Match("separator")
    bypass_ratio: Dict[str, float] = Field(default_factory=dict)
    oversize_outlet: Optional[str] = None
    undersize_outlet: Optional[str] = None


    @field_validator("bypass_ratio")
    @classmethod
    def _ratio_range(cls, value: Dict[str, float]) -> Dict[str, float]:
        for key, ratio in value.items():
            split_key(key)
            if not 0 <= ratio <= 1:
                raise ValueError(
                    f"bypass ratio for {key} must lie in [0, 1], got {ratio}")
        return value


class MeteringBin(EquipmentNode):
    """
    Storage bin with mass and volume limits. ``processed_density`` gives
    the bulk density of each class as stored. ``capacity`` bounds the
    bin's outflow per period where given.
    """

    kind: str = Match("metering_bin")
    mass_cap: Optional[float] = Field(None, gt=0)
    volume_cap: Optional[float] = Field(None, gt=0)
    processed_density: Dict[str, float] = Field(default_factory=dict)


    @field_validator("processed_density")
    @classmethod
    def _density_positive(cls, value: Dict[str, float]) -> Dict[str, float]:
        return _positive_values(value, "processed density")


    @property
    def stores(self) -> bool:
        return True


class SurgeBin(MeteringBin):
    """
    Per-feedstock storage ahead of the reactor feeders.
    """

    kind: str = Match("surge_bin")


class ProcessNetwork(BaseModel):
    """
    Directed equipment graph. Edges are given by each node's
    ``predecessors``. ``classes`` lists the bale classes the network must
    route from the infeed to the reactor feeders.
    """

    model_config = ConfigDict(frozen=True)

    nodes: Tuple[EquipmentNode, ...]
    infeed: str
    reactor_feeders: Tuple[str, ...]
    horizon: int = Field(gt=0)
    big_m: Optional[float] = Field(None, gt=0)
    classes: Tuple[str, ...] = ()


    @field_validator("nodes", mode="before")
    @classmethod
    def _dispatch_nodes(cls, value: Any) -> Any:
        # nested fields bypass the façade dispatch, so resolve kinds here
        return tuple(
            item if isinstance(item, EquipmentNode)
            else EquipmentNode.model_validate(item)
            for item in value)


    def node(self, node_id: str) -> EquipmentNode:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)


    def ids(self) -> Tuple[str, ...]:
        return tuple(node.id for node in self.nodes)


    def bins(self) -> Tuple[MeteringBin, ...]:
        return tuple(node for node in self.nodes if node.stores)


    def successors(self, node_id: str) -> Tuple[str, ...]:
        return tuple(n.id for n in self.nodes if node_id in n.predecessors)


    def graph(self) -> nx.DiGraph:
        """
        The equipment graph, edges pointing downstream.
        """

        graph = nx.DiGraph()
        for node in self.nodes:
            graph.add_node(node.id, node=node)
        for node in self.nodes:
            for pred in node.predecessors:
                graph.add_edge(pred, node.id)
        return graph


    def order(self) -> List[str]:
        """
        Node ids in a deterministic topological order.
        """

        return list(nx.lexicographical_topological_sort(self.graph()))


    def effective_big_m(self, bale_length: float) -> float:
        if self.big_m is not None:
            return self.big_m
        return max(bale_length, float(self.horizon)) * 10.0


    def reactor_capacity(self) -> float:
        """
        Summed largest capacity of the reactor feeders, the default upper
        bound on the reactor feed rate.
        """

        total = 0.0
        for node_id in self.reactor_feeders:
            capacity = self.node(node_id).capacity
            total += max(capacity.values()) if capacity else 0.0
        return total


    def reactor_yield(self, key: str) -> float:
        """
        Fraction of a class's infeed mass that reaches the reactor, after
        grinder losses and the separator split.
        """

        memo: Dict[str, float] = {}

        def outflow(node_id: str) -> float:
            if node_id in memo:
                return memo[node_id]
            node = self.node(node_id)
            if node_id in self.reactor_feeders:
                value = 1.0
            elif isinstance(node, Separator):
                ratio = node.bypass_ratio[key]
                value = ((1.0 - ratio) * inflow(node.oversize_outlet) +
                         ratio * inflow(node.undersize_outlet))
            else:
                found = [s for s in self.successors(node_id) if self.node(s).carries(key)]
                if len(found) > 1:
                    raise ValueError(
                        f"class {key} splits at {node_id} without a separator")
                value = inflow(found[0]) if found else 0.0
            memo[node_id] = value
            return value

        def inflow(node_id: str) -> float:
            node = self.node(node_id)
            if isinstance(node, Grinder):
                return (1.0 - node.dry_matter_loss) * outflow(node_id)
            return outflow(node_id)

        return outflow(self.infeed)


@dataclass(frozen=True)
class NetworkViolation:
    """
    One problem found by :func:`validate_network`.
    """

    code: str
    node: Optional[str]
    message: str


    def __str__(self) -> str:
        where = f" at {self.node}" if self.node else ""
        return f"{self.code}{where}: {self.message}"


def validate_network(net: ProcessNetwork) -> List[NetworkViolation]:
    """
    Check a network for structural problems. Returns an empty list when
    the network is usable.
    """

    found: List[NetworkViolation] = []

    def report(code: str, node: Optional[str], message: str) -> None:
        found.append(NetworkViolation(code, node, message))

    ids = [n.id for n in net.nodes]
    known = set(ids)
    for node_id in sorted(known):
        if ids.count(node_id) > 1:
            report("duplicate", node_id, "node id used more than once")

    if net.infeed not in known:
        report("unknown-node", net.infeed, "infeed node is not in the network")

    if not net.reactor_feeders:
        report("role", None, "no reactor feeders declared")

    for feeder in net.reactor_feeders:
        if feeder not in known:
            report("unknown-node", feeder, "reactor feeder is not in the network")
        elif net.node(feeder).stores:
            report("role", feeder, "a storage bin cannot feed the reactor")

    for node in net.nodes:
        for pred in node.predecessors:
            if pred not in known:
                report("unknown-node", node.id, f"predecessor {pred} does not exist")

        if node.id == net.infeed:
            if node.predecessors:
                report("role", node.id, "the infeed node cannot have predecessors")
        elif not node.predecessors:
            report("orphan", node.id, "node has no predecessors")

        if node.id not in net.reactor_feeders and not net.successors(node.id):
            report("dead-end", node.id, "node delivers nowhere")

    graph = net.graph()
    for cycle in sorted(nx.simple_cycles(graph), key=lambda c: (len(c), c)):
        report("cycle", cycle[0], " -> ".join(cycle + [cycle[0]]))

    for node in net.nodes:
        _check_fields(net, node, report)

    for key in net.classes:
        _check_class(net, graph, key, report)

    return found


def _check_fields(net, node, report) -> None:
    carried = [k for k in net.classes if node.carries(k)]

    if isinstance(node, Grinder) and node.dry_matter_loss is None:
        report("missing-field", node.id, "grinder has no dry matter loss")

    if isinstance(node, MeteringBin):
        if node.mass_cap is None:
            report("missing-field", node.id, "bin has no mass capacity")
        if node.volume_cap is None:
            report("missing-field", node.id, "bin has no volume capacity")
        for key in carried:
            if key not in node.processed_density:
                report("missing-field", node.id, f"bin has no processed density for {key}")
    else:
        for key in carried:
            if key not in node.capacity:
                report("missing-capacity", node.id, f"no capacity for class {key}")

    if not isinstance(node, Separator):
        for key in carried:
            routes = [s for s in net.successors(node.id) if net.node(s).carries(key)]
            if len(routes) > 1:
                report("split", node.id, f"class {key} may leave by {', '.join(routes)}")

    if isinstance(node, Separator):
        for key in carried:
            if key not in node.bypass_ratio:
                report("missing-field", node.id, f"separator has no bypass ratio for {key}")

        outlets = (("oversize", node.oversize_outlet), ("undersize", node.undersize_outlet))
        for label, outlet in outlets:
            if outlet is None:
                report("missing-field", node.id, f"separator has no {label} outlet")
                continue
            if outlet not in net.ids():
                report("unknown-node", node.id, f"{label} outlet {outlet} does not exist")
                continue
            target = net.node(outlet)
            if target.predecessors != (node.id,):
                report("role", outlet, f"{label} outlet must be fed by {node.id} alone")
            if target.stores or isinstance(target, (Grinder, Separator)):
                report("role", outlet, f"{label} outlet must be a conveying node")

        if node.oversize_outlet is not None and node.oversize_outlet == node.undersize_outlet:
            report("role", node.id, "separator outlets must differ")


def _check_class(net, graph, key, report) -> None:
    if net.infeed not in graph:
        return

    if not net.node(net.infeed).carries(key):
        report("unroutable", net.infeed, f"infeed does not carry class {key}")
        return

    carrying = [n.id for n in net.nodes if n.carries(key)]
    sub = graph.subgraph(carrying)
    reached = nx.descendants(sub, net.infeed) | {net.infeed}
    if not reached.intersection(net.reactor_feeders):
        report("unroutable", None, f"class {key} cannot reach a reactor feeder")


# The end.
