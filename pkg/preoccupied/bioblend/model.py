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
preoccupied.bioblend.model
Bale classes, geometry, sequence expansion and solution records.

Everything in the scheduling model is indexed by a bale class, the pair
of a static moisture level (``L``, ``M`` or ``H``) and a feedstock id.
Class keys are written ``"<moisture>.<feedstock>"``, for example
``"M.C2"`` for medium moisture two-pass corn stover.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import math
from dataclasses import dataclass, field
from typing import (
    Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union)

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import HorizonError, SequenceError


__all__ = (
    "IDENTIFIER",
    "MOISTURE_LEVELS",
    "BaleClass",
    "BaleGeometry",
    "InstanceLayout",
    "ReliabilitySpec",
    "SequencePlan",
    "SolutionRecord",
    "class_key",
    "classes_from_sequence",
    "derive_bale_parameters",
    "expand_sequence",
    "make_windows",
    "split_key",
    "window_periods",
)


logger = logging.getLogger(__name__)


MOISTURE_LEVELS: Tuple[str, ...] = ("L", "M", "H")

# ids feed LP variable names, which are split on underscores
IDENTIFIER = r"^[A-Za-z][A-Za-z0-9]*$"

# absorbs float noise in ceil(l / speed)
_CEIL_SLACK = 1e-9


def class_key(moisture: str, feedstock: str) -> str:
    return f"{moisture}.{feedstock}"


def split_key(key: str) -> Tuple[str, str]:
    """
    Split a class key into its ``(moisture, feedstock)`` pair.
    """

    moisture, sep, feedstock = key.partition(".")
    if not sep or moisture not in MOISTURE_LEVELS or not feedstock:
        raise ValueError(f"malformed bale class key {key!r}")
    return moisture, feedstock


class BaleGeometry(BaseModel):
    """
    Physical bale dimensions in meters and the period length in minutes.
    """

    model_config = ConfigDict(frozen=True)

    width: float = Field(1.2, gt=0)
    height: float = Field(1.2, gt=0)
    length: float = Field(2.4, gt=0)
    period_minutes: float = Field(1.0, gt=0)


    @property
    def cross_section(self) -> float:
        return self.width * self.height


class BaleClass(BaseModel):
    """
    A feedstock at one moisture level. ``mass`` is the dry mass of one
    bale in Mg, ``density`` its dry bulk density in Mg per cubic meter.
    The derived fields are filled in by :func:`derive_bale_parameters`.
    """

    model_config = ConfigDict(frozen=True)

    feedstock: str = Field(pattern=IDENTIFIER)
    moisture: str = Field(pattern=r"^[LMH]$")
    mass: float = Field(gt=0)
    count: int = Field(ge=0)
    density: float = Field(gt=0)
    mass_per_meter: Optional[float] = Field(None, gt=0)
    periods: Optional[int] = Field(None, ge=1)


    @property
    def key(self) -> str:
        return class_key(self.moisture, self.feedstock)


    @property
    def derived(self) -> bool:
        return self.mass_per_meter is not None and self.periods is not None


def derive_bale_parameters(
        geometry: BaleGeometry,
        bale: BaleClass,
        infeed_capacity: float) -> BaleClass:
    """
    Fill in mass per meter of bale, ``c = w * h * d``, and the number of
    periods needed to push one bale through the infeed conveyor at the
    class's maximum speed, ``p = ceil(l / (u / c))``.

    :param infeed_capacity: dry Mg per period the infeed accepts for
      this class
    """

    if not infeed_capacity > 0:
        raise ValueError(
            f"infeed_capacity must be positive for {bale.key},"
            f" got {infeed_capacity!r}")

    mass_per_meter = geometry.width * geometry.height * bale.density
    speed = infeed_capacity / mass_per_meter
    periods = max(1, math.ceil(geometry.length / speed - _CEIL_SLACK))

    if bale.mass > mass_per_meter * geometry.length * (1 + 1e-9):
        logger.warning(
            "bale class %s weighs %s Mg but only %s Mg fit in one bale length;"
            " the infeed rows cannot deliver it",
            bale.key, bale.mass, mass_per_meter * geometry.length)

    return bale.model_copy(update={
        "mass_per_meter": mass_per_meter,
        "periods": periods,
    })


def classes_from_sequence(
        bales: Iterable[Tuple[str, str]],
        geometry: BaleGeometry,
        masses: Union[float, Mapping[str, float]],
        densities: Mapping[str, float],
        infeed_capacity: Mapping[str, float]) -> Dict[str, BaleClass]:
    """
    Build the derived bale classes for an ordering of physical bales,
    given as ``(feedstock, moisture)`` pairs. Counts come from the
    ordering itself.

    :param masses: one dry bale mass for all feedstocks, or a mapping
      by feedstock id
    :param densities: dry bulk density by class key or by moisture level
    :param infeed_capacity: infeed capacity per period by class key
    """

    counts: Dict[Tuple[str, str], int] = {}
    for feedstock, moisture in bales:
        counts[(feedstock, moisture)] = counts.get((feedstock, moisture), 0) + 1

    found = {}
    for (feedstock, moisture), count in sorted(counts.items()):
        key = class_key(moisture, feedstock)

        if isinstance(masses, Mapping):
            if feedstock not in masses:
                raise ValueError(f"no bale mass for feedstock {feedstock!r}")
            mass = masses[feedstock]
        else:
            mass = masses

        density = densities.get(key, densities.get(moisture))
        if density is None:
            raise ValueError(f"no bale density for class {key}")

        capacity = infeed_capacity.get(key)
        if capacity is None:
            raise ValueError(f"no infeed capacity for class {key}")

        bale = BaleClass(
            feedstock=feedstock, moisture=moisture, mass=mass,
            count=count, density=density)
        found[key] = derive_bale_parameters(geometry, bale, capacity)

    return found


class ReliabilitySpec(BaseModel):
    """
    Reactor feeding requirements: while the reactor runs, each period
    must carry at least ``min_utilization`` of the maximum feed rate
    ``U`` and the run as a whole at least ``avg_utilization`` of it.
    ``U`` is chosen by the model within the feed rate bounds; a missing
    upper bound defaults to the summed capacity into the reactor.
    """

    model_config = ConfigDict(frozen=True)

    min_utilization: float = Field(0.90, ge=0, lt=1)
    avg_utilization: float = Field(0.95, gt=0, le=1)
    feed_rate_lower: float = Field(0.0, ge=0)
    feed_rate_upper: Optional[float] = Field(None, gt=0)


    @model_validator(mode="after")
    def _ordered(self) -> "ReliabilitySpec":
        if not self.min_utilization < self.avg_utilization:
            raise ValueError(
                "min_utilization must be below avg_utilization")
        if self.feed_rate_upper is not None and \
           not self.feed_rate_lower < self.feed_rate_upper:
            raise ValueError(
                "feed_rate_lower must be below feed_rate_upper")
        return self


class SequencePlan(BaseModel):
    """
    An ordering of physical bales by class key, with the start period
    (1-based) and duration of each bale on the infeed.
    """

    model_config = ConfigDict(frozen=True)

    bales: Tuple[str, ...] = ()
    starts: Tuple[int, ...] = ()
    durations: Tuple[int, ...] = ()
    horizon: int = Field(gt=0)


    @model_validator(mode="after")
    def _consecutive(self) -> "SequencePlan":
        if not len(self.bales) == len(self.starts) == len(self.durations):
            raise ValueError("bales, starts and durations differ in length")

        expected = 1
        for start, duration in zip(self.starts, self.durations):
            if start != expected or duration < 1:
                raise ValueError(
                    f"bale starts must be consecutive; expected {expected},"
                    f" got {start}")
            expected = start + duration

        if expected - 1 > self.horizon:
            raise HorizonError(expected - 1, self.horizon)
        return self


    @property
    def occupied(self) -> int:
        return sum(self.durations)


    def counts(self) -> Dict[str, int]:
        found: Dict[str, int] = {}
        for key in self.bales:
            found[key] = found.get(key, 0) + 1
        return found


    def starts_for(self, key: str) -> Tuple[int, ...]:
        return tuple(s for k, s in zip(self.bales, self.starts) if k == key)


    def start_indicator(self) -> Dict[Tuple[str, int], int]:
        """
        The nonzero entries of y, keyed by ``(class key, period)``.
        """

        return {(k, s): 1 for k, s in zip(self.bales, self.starts)}


def expand_sequence(
        bales: Sequence[Union[str, BaleClass, Tuple[str, str]]],
        classes: Union[Mapping[str, BaleClass], Iterable[BaleClass]],
        horizon: int) -> SequencePlan:
    """
    Place bales on the infeed back to back, each starting right after
    its predecessor's processing periods.

    Entries may be class keys, :class:`BaleClass` instances or
    ``(feedstock, moisture)`` pairs. The number of entries per class must
    match the class's bale count.
    """

    if not isinstance(classes, Mapping):
        classes = {c.key: c for c in classes}

    keys: List[str] = []
    for entry in bales:
        if isinstance(entry, BaleClass):
            key = entry.key
        elif isinstance(entry, tuple):
            key = class_key(entry[1], entry[0])
        else:
            key = entry
        if key not in classes:
            raise SequenceError(f"bale of unknown class {key!r}")
        keys.append(key)

    seen: Dict[str, int] = {}
    for key in keys:
        seen[key] = seen.get(key, 0) + 1
    for key, bale in classes.items():
        if seen.get(key, 0) != bale.count:
            raise SequenceError(
                f"class {key} has {bale.count} bales but the sequence"
                f" lists {seen.get(key, 0)}")

    starts = []
    durations = []
    period = 1
    for key in keys:
        duration = classes[key].periods
        if duration is None:
            raise SequenceError(
                f"class {key} has no processing periods; derive it first")
        starts.append(period)
        durations.append(duration)
        period += duration

    if period - 1 > horizon:
        raise HorizonError(period - 1, horizon)

    return SequencePlan(
        bales=tuple(keys), starts=tuple(starts),
        durations=tuple(durations), horizon=horizon)


def window_periods(window_minutes: float, period_minutes: float) -> int:
    """
    Convert a blending window length to whole periods. Zero means the
    whole horizon is one window.
    """

    if window_minutes < 0:
        raise ValueError("window length must not be negative")
    if window_minutes == 0:
        return 0

    count = window_minutes / period_minutes
    rounded = round(count)
    if rounded < 1 or abs(count - rounded) > 1e-9 * max(1.0, count):
        raise ValueError(
            f"window of {window_minutes} minutes is not a multiple of the"
            f" {period_minutes} minute period")
    return int(rounded)


def make_windows(periods: int, size: int) -> Tuple[Tuple[int, int], ...]:
    """
    Right-closed blending windows ``(first, last)`` over periods
    ``1..periods``. The last window is truncated at the horizon.
    """

    if size <= 0 or size >= periods:
        return ((1, periods),)

    return tuple(
        (start, min(start + size - 1, periods))
        for start in range(1, periods + 1, size))


@dataclass(frozen=True)
class InstanceLayout:
    """
    Index sets of a built model, enough to decode variable values back
    into arrays.
    """

    nodes: Tuple[str, ...]
    classes: Tuple[str, ...]
    bins: Tuple[str, ...]
    reactor_feeders: Tuple[str, ...]
    infeed: str
    periods: int
    period_minutes: float
    windows: Tuple[Tuple[int, int], ...]
    samples: int = 0


    def feedstocks(self) -> Tuple[str, ...]:
        return tuple(sorted({split_key(k)[1] for k in self.classes}))


@dataclass(frozen=True)
class SolutionRecord:
    """
    Variable values of one solved model, as arrays. Period axes of flows,
    speeds and activity are 0-based for periods ``1..T``; inventories
    carry an extra leading column for period 0.
    """

    layout: InstanceLayout
    flows: np.ndarray
    inventories: np.ndarray
    speeds: np.ndarray
    class_active: np.ndarray
    reactor_on: np.ndarray
    max_feed: float
    linearized: np.ndarray
    objective: float
    shortfall: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))


    @classmethod
    def from_values(
            cls,
            layout: InstanceLayout,
            values: Mapping[str, float],
            objective: Optional[float] = None) -> "SolutionRecord":
        """
        Decode a solver's ``{variable name: value}`` mapping.
        """

        nodes = {n: i for i, n in enumerate(layout.nodes)}
        bins = {n: i for i, n in enumerate(layout.bins)}
        classes = {k: i for i, k in enumerate(layout.classes)}
        T = layout.periods
        K = len(layout.classes)

        flows = np.zeros((len(nodes), K, T))
        inventories = np.zeros((len(bins), K, T + 1))
        speeds = np.zeros((K, T))
        active = np.zeros((K, T))
        reactor_on = np.zeros(T)
        linearized = np.zeros(T)
        windows = max(1, len(layout.windows))
        shortfall = np.zeros((layout.samples, windows))
        max_feed = 0.0

        for name, value in values.items():
            parts = name.split("_")
            role = parts[0]

            if role == "X":
                key = class_key(parts[2], parts[3])
                flows[nodes[parts[1]], classes[key], int(parts[4]) - 1] = value
            elif role == "M":
                key = class_key(parts[2], parts[3])
                inventories[bins[parts[1]], classes[key], int(parts[4])] = value
            elif role == "V":
                speeds[classes[class_key(parts[1], parts[2])], int(parts[3]) - 1] = value
            elif role == "Z":
                active[classes[class_key(parts[1], parts[2])], int(parts[3]) - 1] = value
            elif role == "Zr":
                reactor_on[int(parts[1]) - 1] = value
            elif role == "W":
                linearized[int(parts[1]) - 1] = value
            elif role == "U":
                max_feed = float(value)
            elif role == "Bm":
                shortfall[int(parts[1]) - 1, int(parts[2]) - 1] = value

        if objective is None:
            objective = float(np.round(reactor_on).sum())

        return cls(
            layout=layout, flows=flows, inventories=inventories,
            speeds=speeds, class_active=active, reactor_on=reactor_on,
            max_feed=max_feed, linearized=linearized,
            objective=float(objective), shortfall=shortfall)


    @property
    def makespan(self) -> int:
        """
        Periods during which the reactor runs.
        """

        return int(np.round(self.reactor_on).sum())


    def reactor_flow(self) -> np.ndarray:
        """
        Total flow into the reactor per period.
        """

        rows = [self.layout.nodes.index(n) for n in self.layout.reactor_feeders]
        return self.flows[rows].sum(axis=(0, 1))


    def reactor_flow_by_window(self) -> Tuple[Tuple[str, ...], np.ndarray]:
        """
        Reactor flow summed per feedstock and blending window, as the
        feedstock ids and a ``(feedstocks, windows)`` array.
        """

        feedstocks = self.layout.feedstocks()
        rows = [self.layout.nodes.index(n) for n in self.layout.reactor_feeders]
        per_class = self.flows[rows].sum(axis=0)

        result = np.zeros((len(feedstocks), len(self.layout.windows)))
        for k, key in enumerate(self.layout.classes):
            b = feedstocks.index(split_key(key)[1])
            for w, (first, last) in enumerate(self.layout.windows):
                result[b, w] += per_class[k, first - 1:last].sum()

        return feedstocks, result


    def inventory_total(self) -> np.ndarray:
        """
        Inventory summed over bins and classes for periods ``1..T``.
        """

        if not len(self.layout.bins):
            return np.zeros(self.layout.periods)
        return self.inventories[:, :, 1:].sum(axis=(0, 1))


    def violations(self, tolerance: float = 1e-7) -> np.ndarray:
        """
        Per-sample flags for samples whose shortfall exceeds the tolerance
        in any window.
        """

        if not self.shortfall.size:
            return np.zeros(0, dtype=bool)
        return (self.shortfall > tolerance).any(axis=1)


# The end.
