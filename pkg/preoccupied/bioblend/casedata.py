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
preoccupied.bioblend.casedata
Case study tables: equipment data, flowsheet, inventory and carbohydrate
distributions.

All tables are comma separated with a header row; lines starting with
``#`` are comments. Rates in the tables are dry Mg per hour and are
converted to dry Mg per period on ingestion.

``equipment.csv``
  ``stage,parameter,high,medium,low``, one row per stage parameter with
  a value per moisture level

``network.csv``
  ``node,kind,predecessors,stage,capacity,mass_cap,volume_cap,
  density_stage,feedstocks,oversize,undersize``. Blank ``capacity``
  takes the stage's ``max_infeed`` rate per moisture level, grinders
  take ``dry_matter_loss_pct`` and separators ``bypass_ratio_pct`` from
  their stage, bins take stored densities from ``density_stage``.
  ``predecessors`` and ``feedstocks`` are space separated.

``inventory.csv``
  ``feedstock,name,L,M,H,bale_mass,mean_carb``, bale counts per moisture
  level, dry bale mass in Mg and mean carbohydrate content in percent

distribution files
  ``feedstock,carb,weight``, histogram bins of carbohydrate fraction

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import CaseDataError
from .model import (
    MOISTURE_LEVELS, BaleClass, BaleGeometry, class_key, classes_from_sequence)
from .network import ProcessNetwork
from .sampling import EmpiricalDist
from .sequencing import Bale, BaleInventory


__all__ = (
    "CaseData",
    "CasePaths",
    "EquipmentTable",
    "ingest_case_data",
    "read_distributions",
    "read_equipment",
    "read_inventory",
    "read_network",
)


logger = logging.getLogger(__name__)


_COLUMNS = {"H": "high", "M": "medium", "L": "low"}

_NODE_COLUMNS = (
    "node", "kind", "predecessors", "stage", "capacity", "mass_cap",
    "volume_cap", "density_stage", "feedstocks", "oversize", "undersize")


def _read_table(path: Path, columns: Iterable[str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path, comment="#", dtype=str, keep_default_na=False,
            skipinitialspace=True)
    except FileNotFoundError:
        raise CaseDataError(f"{path}: no such file") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as err:
        raise CaseDataError(f"{path}: {err}") from None

    frame.columns = [c.strip() for c in frame.columns]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise CaseDataError(f"{path}: missing columns {', '.join(missing)}")
    return frame.apply(lambda col: col.str.strip())


def _number(path: Path, row: int, column: str, text: str,
            positive: bool = False) -> float:
    try:
        value = float(text)
    except ValueError:
        raise CaseDataError(
            f"{path}, row {row}, column {column}: {text!r} is not a number") from None
    if positive and not value > 0:
        raise CaseDataError(
            f"{path}, row {row}, column {column}: {text!r} must be positive")
    return value


class EquipmentTable:
    """
    Stage parameters by moisture level.
    """

    def __init__(self, path: Path, values: Dict[Tuple[str, str], Dict[str, float]]) -> None:
        self.path = path
        self.values = values


    def stages(self) -> Tuple[str, ...]:
        return tuple(sorted({stage for stage, _ in self.values}))


    def has(self, stage: str, parameter: str) -> bool:
        return (stage, parameter) in self.values


    def by_moisture(self, stage: str, parameter: str) -> Dict[str, float]:
        try:
            return dict(self.values[(stage, parameter)])
        except KeyError:
            raise CaseDataError(
                f"{self.path}: no row for stage {stage!r} parameter {parameter!r}") from None


    def value(self, stage: str, parameter: str, moisture: str) -> float:
        return self.by_moisture(stage, parameter)[moisture]


def read_equipment(path: Path) -> EquipmentTable:
    frame = _read_table(path, ("stage", "parameter") + tuple(_COLUMNS.values()))

    values: Dict[Tuple[str, str], Dict[str, float]] = {}
    for i, row in enumerate(frame.to_dict("records"), 1):
        ident = (row["stage"], row["parameter"])
        if not all(ident):
            raise CaseDataError(f"{path}, row {i}: stage and parameter are required")
        if ident in values:
            raise CaseDataError(f"{path}, row {i}: {ident[0]} {ident[1]} repeated")
        values[ident] = {
            m: _number(path, i, column, row[column])
            for m, column in _COLUMNS.items()}

    return EquipmentTable(path, values)


class CasePaths(BaseModel):
    """
    Locations of the case study tables.
    """

    model_config = ConfigDict(frozen=True)

    network: Path
    equipment: Path
    inventory: Path
    distributions: Tuple[Path, ...]


def _per_class(rates: Dict[str, float], keys: Iterable[str], scale: float) -> Dict[str, float]:
    return {k: rates[k.split(".", 1)[0]] * scale for k in keys}


def read_network(
        path: Path,
        equipment: EquipmentTable,
        classes: Iterable[str],
        horizon: int,
        period_minutes: float = 1.0,
        big_m: Optional[float] = None) -> ProcessNetwork:
    """
    Build the process network for the given class keys. The first node
    row is the infeed; ``reactor_feeder`` rows feed the reactor.
    """

    frame = _read_table(path, _NODE_COLUMNS)
    if frame.empty:
        raise CaseDataError(f"{path}: no nodes")

    keys = tuple(sorted(classes))
    per_period = period_minutes / 60.0
    nodes: List[dict] = []

    for i, row in enumerate(frame.to_dict("records"), 1):
        node_id, kind, stage = row["node"], row["kind"], row["stage"]
        where = f"{path}, row {i}"

        feedstocks = tuple(row["feedstocks"].split()) or None
        carried = [k for k in keys if feedstocks is None or k.split(".", 1)[1] in feedstocks]
        spec = {
            "id": node_id,
            "kind": kind,
            "predecessors": tuple(row["predecessors"].split()),
            "feedstocks": feedstocks,
            "stage": stage or None,
        }

        if row["capacity"]:
            rate = _number(path, i, "capacity", row["capacity"], positive=True)
            spec["capacity"] = {k: rate * per_period for k in carried}
        elif stage and equipment.has(stage, "max_infeed"):
            spec["capacity"] = _per_class(
                equipment.by_moisture(stage, "max_infeed"), carried, per_period)
        elif kind not in ("metering_bin", "surge_bin"):
            raise CaseDataError(
                f"{where}, column capacity: {node_id} needs a capacity or a"
                f" stage with a max_infeed row")

        if kind == "grinder":
            if not stage:
                raise CaseDataError(f"{where}, column stage: grinder {node_id} needs a stage")
            losses = equipment.by_moisture(stage, "dry_matter_loss_pct")
            if len(set(losses.values())) > 1:
                logger.warning(
                    "%s: dry matter loss of %s varies by moisture; using the largest",
                    path, stage)
            spec["dry_matter_loss"] = max(losses.values()) / 100.0

        if kind == "separator":
            if not stage:
                raise CaseDataError(f"{where}, column stage: separator {node_id} needs a stage")
            spec["bypass_ratio"] = _per_class(
                equipment.by_moisture(stage, "bypass_ratio_pct"), carried, 0.01)
            spec["oversize_outlet"] = row["oversize"] or None
            spec["undersize_outlet"] = row["undersize"] or None

        if kind in ("metering_bin", "surge_bin"):
            for column in ("mass_cap", "volume_cap"):
                if row[column]:
                    spec[column] = _number(path, i, column, row[column], positive=True)
            if not row["density_stage"]:
                raise CaseDataError(
                    f"{where}, column density_stage: bin {node_id} needs a density stage")
            spec["processed_density"] = _per_class(
                equipment.by_moisture(row["density_stage"], "dry_bulk_density"), carried, 1.0)

        nodes.append(spec)

    feeders = tuple(spec["id"] for spec in nodes if spec["kind"] == "reactor_feeder")
    try:
        return ProcessNetwork(
            nodes=nodes, infeed=nodes[0]["id"], reactor_feeders=feeders,
            horizon=horizon, big_m=big_m, classes=keys)
    except (ValidationError, ValueError) as err:
        raise CaseDataError(f"{path}: {err}") from None


@dataclass(frozen=True)
class _InventoryRow:
    name: str
    counts: Dict[str, int]
    bale_mass: float
    mean_carb: float


def read_inventory(path: Path) -> Dict[str, _InventoryRow]:
    frame = _read_table(path, ("feedstock", "name", "bale_mass", "mean_carb") + MOISTURE_LEVELS)

    found = {}
    for i, row in enumerate(frame.to_dict("records"), 1):
        feedstock = row["feedstock"]
        if not feedstock or feedstock in found:
            raise CaseDataError(f"{path}, row {i}, column feedstock: missing or repeated")

        counts = {}
        for m in MOISTURE_LEVELS:
            value = _number(path, i, m, row[m])
            if value < 0 or value != int(value):
                raise CaseDataError(
                    f"{path}, row {i}, column {m}: bale counts are whole and not negative")
            counts[m] = int(value)

        found[feedstock] = _InventoryRow(
            name=row["name"] or feedstock,
            counts=counts,
            bale_mass=_number(path, i, "bale_mass", row["bale_mass"], positive=True),
            mean_carb=_number(path, i, "mean_carb", row["mean_carb"], positive=True) / 100.0)
    return found


def read_distributions(paths: Iterable[Path]) -> Dict[str, EmpiricalDist]:
    """
    Histogram files, several feedstocks per file allowed.
    """

    support: Dict[str, List[float]] = {}
    weights: Dict[str, List[float]] = {}
    labels: Dict[str, str] = {}

    for path in paths:
        frame = _read_table(path, ("feedstock", "carb", "weight"))
        for i, row in enumerate(frame.to_dict("records"), 1):
            feedstock = row["feedstock"]
            if not feedstock:
                raise CaseDataError(f"{path}, row {i}, column feedstock: missing")
            carb = _number(path, i, "carb", row["carb"])
            if not 0.0 < carb < 1.0:
                raise CaseDataError(
                    f"{path}, row {i}, column carb: {carb!r} is not a fraction in (0, 1)")
            weight = _number(path, i, "weight", row["weight"])
            if weight < 0:
                raise CaseDataError(f"{path}, row {i}, column weight: negative weight")
            support.setdefault(feedstock, []).append(carb)
            weights.setdefault(feedstock, []).append(weight)
            labels.setdefault(feedstock, path.name)

    found = {}
    for feedstock in sorted(support):
        try:
            found[feedstock] = EmpiricalDist.from_histogram(
                feedstock, support[feedstock], weights[feedstock], labels[feedstock])
        except (ValidationError, ValueError) as err:
            raise CaseDataError(f"{labels[feedstock]}: {feedstock}: {err}") from None
    return found


@dataclass(frozen=True)
class CaseData:
    """
    Everything read from the case tables. Bale classes depend on the
    ordering being scheduled, see :meth:`classes_for`.
    """

    network: ProcessNetwork
    equipment: EquipmentTable
    inventory: BaleInventory
    distributions: Dict[str, EmpiricalDist]
    masses: Dict[str, float]
    densities: Dict[str, float]
    mean_carbs: Dict[str, float]
    names: Dict[str, str]


    def infeed_capacity(self) -> Dict[str, float]:
        return dict(self.network.node(self.network.infeed).capacity)


    def classes_for(self, bales: Iterable[Bale], geometry: BaleGeometry) -> Dict[str, BaleClass]:
        """
        Derived bale classes for an ordering of physical bales.
        """

        return classes_from_sequence(
            bales, geometry, self.masses, self.densities, self.infeed_capacity())


    def with_horizon(self, horizon: int) -> "CaseData":
        return replace(
            self, network=self.network.model_copy(update={"horizon": horizon}))


def ingest_case_data(
        paths: CasePaths,
        horizon: int,
        period_minutes: float = 1.0,
        big_m: Optional[float] = None) -> CaseData:
    """
    Read and cross-check every case table. Distribution means that
    stray more than 1% from the inventory's mean carbohydrate content are
    logged.
    """

    equipment = read_equipment(paths.equipment)
    rows = read_inventory(paths.inventory)
    distributions = read_distributions(paths.distributions)

    counts = {
        class_key(m, b): row.counts[m]
        for b, row in rows.items() for m in MOISTURE_LEVELS}
    inventory = BaleInventory(counts=counts)

    network = read_network(
        paths.network, equipment, counts, horizon, period_minutes, big_m)

    for feedstock, row in rows.items():
        dist = distributions.get(feedstock)
        if dist is None:
            raise CaseDataError(
                f"{paths.inventory}: no carbohydrate distribution for {feedstock}")
        if abs(dist.mean() - row.mean_carb) > 0.01 * row.mean_carb:
            logger.warning(
                "distribution mean %.4f of %s differs from the inventory mean %.4f",
                dist.mean(), feedstock, row.mean_carb)

    densities = equipment.by_moisture("bale", "dry_bulk_density")

    return CaseData(
        network=network,
        equipment=equipment,
        inventory=inventory,
        distributions={b: distributions[b] for b in rows},
        masses={b: row.bale_mass for b, row in rows.items()},
        densities=densities,
        mean_carbs={b: row.mean_carb for b, row in rows.items()},
        names={b: row.name for b, row in rows.items()})


# The end.
