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
preoccupied.bioblend.sequencing
Bale ordering rules and sequence files.

Four rules produce orderings from an inventory:

1. moisture: repeat ``aL-bM-cH`` as often as the gcd of the moisture
   counts allows
2. quality: the same with bales that do or do not reach the
   carbohydrate threshold (``q`` and ``nq``)
3. distance: interleave the weakest passing feedstock with the
   strongest failing one in proportion to their distances from the
   threshold
4. combined: follow the moisture pattern and a quality pattern at the
   same time

Literal orderings are read from pattern files such as
``10S-40C2-10M-20C3`` with a cyclic moisture pattern ``3L-3M-2H``.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import io
import itertools
import logging
import math
import re
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import (
    Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union)

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import SequenceError
from .model import MOISTURE_LEVELS, class_key, split_key
from .sampling import EmpiricalDist


__all__ = (
    "QUALITY_LABELS",
    "Bale",
    "BaleInventory",
    "InventoryCounts",
    "Ordering",
    "SequencePattern",
    "Swap",
    "inventory_counts",
    "load_literal_sequence",
    "parse_pattern",
    "random_sequence",
    "read_ordering",
    "realize",
    "rule1_moisture",
    "rule2_quality",
    "rule3_distance",
    "rule4_combined",
    "write_ordering",
)


logger = logging.getLogger(__name__)


QUALITY_LABELS: Tuple[str, str] = ("q", "nq")

# a physical bale as (feedstock, moisture)
Bale = Tuple[str, str]

# absorbs float noise in the rule 3 distance ratios
_RATIO_SLACK = 1e-9


class BaleInventory(BaseModel):
    """
    Bales on hand, counted by class key.
    """

    model_config = ConfigDict(frozen=True)

    counts: Dict[str, int]


    @field_validator("counts")
    @classmethod
    def _valid(cls, value: Dict[str, int]) -> Dict[str, int]:
        for key, count in value.items():
            split_key(key)
            if count < 0:
                raise ValueError(f"class {key} has a negative bale count")
        return value


    @classmethod
    def from_bales(cls, bales: Iterable[Bale]) -> "BaleInventory":
        counts: Dict[str, int] = {}
        for feedstock, moisture in bales:
            key = class_key(moisture, feedstock)
            counts[key] = counts.get(key, 0) + 1
        return cls(counts=counts)


    @property
    def total(self) -> int:
        return sum(self.counts.values())


    def feedstocks(self) -> Tuple[str, ...]:
        return tuple(sorted({split_key(k)[1] for k, c in self.counts.items() if c}))


    def by_moisture(self) -> Dict[str, int]:
        found = {m: 0 for m in MOISTURE_LEVELS}
        for key, count in self.counts.items():
            found[split_key(key)[0]] += count
        return found


    def by_feedstock(self) -> Dict[str, int]:
        found: Dict[str, int] = {}
        for key, count in self.counts.items():
            feedstock = split_key(key)[1]
            found[feedstock] = found.get(feedstock, 0) + count
        return found


    def bales(self) -> List[Bale]:
        """
        Every bale once, grouped by feedstock and then moisture.
        """

        found = []
        for feedstock in self.feedstocks():
            for moisture in MOISTURE_LEVELS:
                found.extend(
                    [(feedstock, moisture)] * self.counts.get(class_key(moisture, feedstock), 0))
        return found


class InventoryCounts(BaseModel):
    """
    The counts the ordering rules work from. ``percentiles`` holds the
    carbohydrate content at the ``gamma`` percentile of each feedstock; a
    feedstock whose percentile reaches ``threshold`` is a quality
    feedstock.
    """

    model_config = ConfigDict(frozen=True)

    moisture: Dict[str, int]
    feedstocks: Dict[str, int]
    percentiles: Dict[str, float] = Field(default_factory=dict)
    threshold: float = Field(0.591, gt=0, lt=1)
    gamma: float = Field(0.10, ge=0, le=1)


    @field_validator("moisture", "feedstocks")
    @classmethod
    def _not_negative(cls, value: Dict[str, int]) -> Dict[str, int]:
        if any(c < 0 for c in value.values()):
            raise ValueError("bale counts must not be negative")
        return value


    @field_validator("percentiles")
    @classmethod
    def _fraction(cls, value: Dict[str, float]) -> Dict[str, float]:
        if any(not 0.0 < v < 1.0 for v in value.values()):
            raise ValueError("percentile carbohydrate contents must lie in (0, 1)")
        return value


    def quality_feedstocks(self) -> Tuple[str, ...]:
        return tuple(sorted(
            b for b, p in self.percentiles.items() if p >= self.threshold))


    def non_quality_feedstocks(self) -> Tuple[str, ...]:
        return tuple(sorted(
            b for b, p in self.percentiles.items() if p < self.threshold))


    @property
    def quality(self) -> int:
        return sum(self.feedstocks.get(b, 0) for b in self.quality_feedstocks())


    @property
    def non_quality(self) -> int:
        return sum(self.feedstocks.get(b, 0) for b in self.non_quality_feedstocks())


def inventory_counts(
        inventory: BaleInventory,
        distributions: Union[Mapping[str, EmpiricalDist], Iterable[EmpiricalDist]],
        threshold: float = 0.591,
        gamma: float = 0.10) -> InventoryCounts:
    """
    Count bales per moisture level and per feedstock and compute each
    feedstock's ``gamma`` percentile carbohydrate content.
    """

    if not isinstance(distributions, Mapping):
        distributions = {d.feedstock: d for d in distributions}

    feedstocks = inventory.by_feedstock()
    missing = [b for b, c in feedstocks.items() if c and b not in distributions]
    if missing:
        raise ValueError(
            f"no carbohydrate distribution for {', '.join(sorted(missing))}")

    return InventoryCounts(
        moisture=inventory.by_moisture(),
        feedstocks=feedstocks,
        percentiles={b: distributions[b].percentile(gamma) for b in feedstocks},
        threshold=threshold, gamma=gamma)


@dataclass(frozen=True)
class SequencePattern:
    """
    ``block`` repeated ``repeats`` times, then ``leftovers``. Both are
    runs of ``(label, count)``.
    """

    block: Tuple[Tuple[str, int], ...]
    repeats: int
    leftovers: Tuple[Tuple[str, int], ...] = ()
    adjusted: bool = False


    def labels(self) -> List[str]:
        found = []
        for _ in range(self.repeats):
            for label, count in self.block:
                found.extend([label] * count)
        for label, count in self.leftovers:
            found.extend([label] * count)
        return found


    def __len__(self) -> int:
        return self.repeats * sum(c for _, c in self.block) + sum(c for _, c in self.leftovers)


    def __str__(self) -> str:
        text = "-".join(f"{c}{label}" for label, c in self.block)
        if self.repeats != 1:
            text += f" x{self.repeats}"
        if self.leftovers:
            text += " + " + "-".join(f"{c}{label}" for label, c in self.leftovers)
        return text


@dataclass(frozen=True)
class Swap:
    """
    A repair made by rule 4: the labels on ``axis`` at two positions
    (1-based) were exchanged.
    """

    position: int
    other: int
    axis: str
    labels: Tuple[str, str]


    def __str__(self) -> str:
        return (
            f"position {self.position}: {self.axis} {self.labels[0]}"
            f" swapped with {self.labels[1]} from position {self.other}")


@dataclass(frozen=True)
class Ordering:
    """
    Physical bales in processing order, with notes on anything the rule
    had to adjust.
    """

    bales: Tuple[Bale, ...]
    notes: Tuple[str, ...] = ()
    swaps: Tuple[Swap, ...] = ()


    def __len__(self) -> int:
        return len(self.bales)


    def keys(self) -> List[str]:
        return [class_key(m, b) for b, m in self.bales]


    def moisture_labels(self) -> List[str]:
        return [m for _, m in self.bales]


    def feedstock_labels(self) -> List[str]:
        return [b for b, _ in self.bales]


    def quality_labels(self, counts: InventoryCounts) -> List[str]:
        passing = set(counts.quality_feedstocks())
        return ["q" if b in passing else "nq" for b, _ in self.bales]


    def inventory(self) -> BaleInventory:
        return BaleInventory.from_bales(self.bales)


def _gcd(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def _pattern(labels: Sequence[str], counts: Sequence[int], used: Sequence[int],
             adjusted: bool) -> SequencePattern:

    psi = _gcd(used)
    block = tuple((label, u // psi) for label, u in zip(labels, used) if u)
    leftovers = tuple((label, c - u) for label, c, u in zip(labels, counts, used) if c > u)
    return SequencePattern(block=block, repeats=psi, leftovers=leftovers, adjusted=adjusted)


def rule1_moisture(counts: Union[InventoryCounts, Sequence[int]]) -> SequencePattern:
    """
    Moisture pattern ``(N_L/psi)L-(N_M/psi)M-(N_H/psi)H`` repeated ``psi``
    times, ``psi`` the gcd of the counts.

    When the gcd is one, each count may be reduced by up to two bales (no
    count dropping to zero) to find a common divisor. Among reductions
    that work the fewest removed bales win, then the smallest single
    reduction, then the largest gcd. Removed bales go at the end.
    """

    if isinstance(counts, InventoryCounts):
        counts = [counts.moisture.get(m, 0) for m in MOISTURE_LEVELS]
    counts = list(counts)
    if len(counts) != 3 or any(c < 0 for c in counts):
        raise ValueError("rule 1 takes three non-negative moisture counts")
    if not sum(counts):
        raise SequenceError("rule 1 needs at least one bale")

    if _gcd(counts) > 1 or sum(1 for c in counts if c) == 1:
        return _pattern(MOISTURE_LEVELS, counts, counts, False)

    best = None
    for cut in itertools.product(range(3), repeat=3):
        used = [c - r for c, r in zip(counts, cut)]
        if any(u < 0 or (c and not u) for c, u in zip(counts, used)):
            continue
        psi = _gcd(used)
        if psi < 2:
            continue
        rank = (sum(cut), max(cut), -psi)
        if best is None or rank < best[0]:
            best = (rank, used)

    if best is None:
        return _pattern(MOISTURE_LEVELS, counts, counts, False)

    used = best[1]
    logger.info("moisture counts %s adjusted to %s for a common divisor", counts, used)
    return _pattern(MOISTURE_LEVELS, counts, used, True)


def rule2_quality(counts: Union[InventoryCounts, Sequence[int]]) -> SequencePattern:
    """
    Quality pattern ``(N_q/psi)q-(N_nq/psi)nq`` repeated ``psi`` times.
    When the gcd is one, ``N_nq`` alone is reduced, by as little as
    possible, until a common divisor appears.
    """

    if isinstance(counts, InventoryCounts):
        counts = [counts.quality, counts.non_quality]
    quality, other = counts
    if quality < 0 or other < 0:
        raise ValueError("rule 2 takes non-negative quality counts")
    if not quality + other:
        raise SequenceError("rule 2 needs at least one bale")
    if not quality:
        logger.warning("no quality bales to lead the blending windows")

    used = [quality, other]
    if quality > 1 and other > 1 and math.gcd(quality, other) == 1:
        for reduced in range(other - 1, 0, -1):
            if math.gcd(quality, reduced) > 1:
                used = [quality, reduced]
                logger.info(
                    "non-quality count %d reduced to %d for a common divisor",
                    other, reduced)
                break

    return _pattern(QUALITY_LABELS, [quality, other], used, used[1] != other)


def _moisture_cycle(inventory: BaleInventory, feedstock: str) -> List[str]:
    found = []
    for moisture in MOISTURE_LEVELS:
        found.extend([moisture] * inventory.counts.get(class_key(moisture, feedstock), 0))
    return found


def rule3_distance(counts: InventoryCounts, inventory: BaleInventory) -> Ordering:
    """
    Pair the weakest quality feedstock with the strongest non-quality
    feedstock. With ``d_over`` its margin above the threshold and
    ``d_under`` the other's shortfall, each round emits 2 quality bales
    and ``floor(d_over / d_under)`` others when ``d_over >= d_under``,
    otherwise ``ceil(d_under / d_over) + 1`` quality bales and one other.
    A feedstock that runs out leaves its set and the next pair is taken.
    Remaining bales follow at the end. Bales of one feedstock are taken
    low moisture first.
    """

    target = counts.threshold
    left = {b: counts.feedstocks.get(b, 0) for b in counts.percentiles}
    passing = {b for b in counts.quality_feedstocks() if left[b]}
    failing = {b for b in counts.non_quality_feedstocks() if left[b]}
    pct = counts.percentiles

    notes: List[str] = []
    labels: List[str] = []

    while passing and failing:
        weak = min(passing, key=lambda b: (pct[b], b))
        strong = max(failing, key=lambda b: (pct[b], b))
        over = pct[weak] - target
        under = target - pct[strong]

        while left[weak] > 0 and left[strong] > 0:
            if over >= under:
                if under > 0:
                    ratio = math.floor(over / under + _RATIO_SLACK)
                else:
                    ratio = 1
                    notes.append(f"{strong} sits at the threshold; ratio taken as 1")
                take_q, take_nq = 2, ratio
            else:
                if over > 0:
                    ratio = math.ceil(under / over - _RATIO_SLACK)
                else:
                    ratio = 1
                    notes.append(f"{weak} sits at the threshold; ratio taken as 1")
                take_q, take_nq = ratio + 1, 1

            take_q = min(take_q, left[weak])
            take_nq = min(take_nq, left[strong])
            labels.extend([weak] * take_q + [strong] * take_nq)
            left[weak] -= take_q
            left[strong] -= take_nq

        if not left[weak]:
            passing.discard(weak)
        if not left[strong]:
            failing.discard(strong)

    for b in sorted(passing) + sorted(failing):
        labels.extend([b] * left[b])

    for note in dict.fromkeys(notes):
        logger.warning(note)

    ordering = realize(labels, inventory, axis="feedstock")
    return Ordering(bales=ordering.bales, notes=tuple(dict.fromkeys(notes)))


class _Picker:
    """
    Hands out bales of an inventory, rotating over the classes that
    match a request.
    """

    def __init__(self, inventory: BaleInventory) -> None:
        self.left = {k: c for k, c in sorted(inventory.counts.items()) if c}
        self.turn: Dict[Tuple, int] = {}


    def candidates(self, moisture: Optional[str], feedstocks: Optional[Iterable[str]]) -> List[str]:
        allowed = None if feedstocks is None else set(feedstocks)
        found = []
        for key, count in self.left.items():
            m, b = split_key(key)
            if count and (moisture is None or m == moisture) and \
               (allowed is None or b in allowed):
                found.append(key)
        return found


    def available(self, moisture: Optional[str], feedstocks: Optional[Iterable[str]]) -> bool:
        return bool(self.candidates(moisture, feedstocks))


    def take(self, moisture: Optional[str], feedstocks: Optional[Iterable[str]],
             turn_key: Tuple) -> Optional[Bale]:

        found = self.candidates(moisture, feedstocks)
        if not found:
            return None
        turn = self.turn.get(turn_key, 0)
        key = found[turn % len(found)]
        self.turn[turn_key] = turn + 1
        self.left[key] -= 1
        moisture, feedstock = split_key(key)
        return feedstock, moisture


def realize(
        labels: Sequence[str],
        inventory: BaleInventory,
        axis: str = "moisture",
        counts: Optional[InventoryCounts] = None) -> Ordering:
    """
    Turn a label sequence into physical bales. ``axis`` says what the
    labels are: ``moisture`` levels, ``quality`` labels (which need
    ``counts``) or ``feedstock`` ids. Within a label, bales are taken in
    rotation over the matching classes. Every label must find a bale and
    every bale must be used.
    """

    if len(labels) != inventory.total:
        raise SequenceError(
            f"{len(labels)} labels for an inventory of {inventory.total} bales")
    if axis == "quality" and counts is None:
        raise ValueError("quality labels need inventory counts")

    picker = _Picker(inventory)
    bales = []
    for position, label in enumerate(labels, 1):
        if axis == "moisture":
            bale = picker.take(label, None, (label,))
        elif axis == "quality":
            group = counts.quality_feedstocks() if label == "q" else counts.non_quality_feedstocks()
            bale = picker.take(None, group, (label,))
        elif axis == "feedstock":
            bale = picker.take(None, (label,), (label,))
        else:
            raise ValueError(f"unknown label axis {axis!r}")

        if bale is None:
            raise SequenceError(f"no bale left for {axis} {label!r} at position {position}")
        bales.append(bale)

    return Ordering(bales=tuple(bales))


def rule4_combined(
        counts: InventoryCounts,
        inventory: BaleInventory,
        quality: Optional[Union[SequencePattern, Ordering]] = None) -> Ordering:
    """
    Follow rule 1's moisture pattern and a quality pattern (rule 2 by
    default, or the quality projection of a rule 3 ordering) position by
    position. Each position takes a bale of its (moisture, quality) cell,
    rotating over the feedstocks left in the cell. When a cell is empty
    the nearest later position whose moisture or quality label opens a
    cell is swapped in, and the swap is recorded.
    """

    moisture = rule1_moisture(counts).labels()
    if quality is None:
        quality = rule2_quality(counts)
    if isinstance(quality, Ordering):
        grades = quality.quality_labels(counts)
    else:
        grades = quality.labels()

    if len(moisture) != inventory.total or len(grades) != inventory.total:
        raise SequenceError(
            f"patterns cover {len(moisture)} and {len(grades)} positions for"
            f" an inventory of {inventory.total} bales")

    groups = {
        "q": counts.quality_feedstocks(),
        "nq": counts.non_quality_feedstocks(),
    }
    picker = _Picker(inventory)
    bales: List[Bale] = []
    swaps: List[Swap] = []

    for k in range(len(moisture)):
        if not picker.available(moisture[k], groups[grades[k]]):
            swap = None
            for j in range(k + 1, len(moisture)):
                if picker.available(moisture[j], groups[grades[k]]):
                    swap = Swap(k + 1, j + 1, "moisture", (moisture[k], moisture[j]))
                    moisture[k], moisture[j] = moisture[j], moisture[k]
                    break
                if picker.available(moisture[k], groups[grades[j]]):
                    swap = Swap(k + 1, j + 1, "quality", (grades[k], grades[j]))
                    grades[k], grades[j] = grades[j], grades[k]
                    break
            if swap is None:
                raise SequenceError(
                    f"no bale for moisture {moisture[k]} and quality {grades[k]}"
                    f" at position {k + 1}, and no later position can be swapped in")
            logger.info("rule 4 repair at %s", swap)
            swaps.append(swap)

        bales.append(picker.take(
            moisture[k], groups[grades[k]], (moisture[k], grades[k])))

    return Ordering(
        bales=tuple(bales), swaps=tuple(swaps),
        notes=tuple(str(s) for s in swaps))


_TERM_RE = re.compile(r"(\d+)\s*([A-Za-z][A-Za-z0-9]*)")


def parse_pattern(text: str) -> List[Tuple[int, str]]:
    """
    Read pattern terms like ``10S-40C2`` or ``(2S-1C2)-(2S-3C2)`` into
    ``(count, code)`` runs. Grouping parentheses are ignored.
    """

    stripped = text.replace("(", " ").replace(")", " ").replace("-", " ")
    terms = []
    for token in stripped.split():
        match = _TERM_RE.fullmatch(token)
        if match is None:
            raise SequenceError(f"cannot read pattern term {token!r}")
        count = int(match.group(1))
        if count < 1:
            raise SequenceError(f"pattern term {token!r} has no bales")
        terms.append((count, match.group(2)))
    return terms


def _expand(terms: Iterable[Tuple[int, str]]) -> List[str]:
    found = []
    for count, code in terms:
        found.extend([code] * count)
    return found


def _apply_moisture(feedstocks: Sequence[str], moisture: str) -> List[Bale]:
    cycle = _expand(parse_pattern(moisture))
    for level in cycle:
        if level not in MOISTURE_LEVELS:
            raise SequenceError(f"unknown moisture level {level!r} in {moisture!r}")
    return [(b, cycle[i % len(cycle)]) for i, b in enumerate(feedstocks)]


def _check_totals(bales: Sequence[Bale], inventory: Optional[BaleInventory]) -> None:
    if inventory is None:
        return
    listed: Dict[str, int] = {}
    for feedstock, _ in bales:
        listed[feedstock] = listed.get(feedstock, 0) + 1
    held = inventory.by_feedstock()
    deltas = {
        b: listed.get(b, 0) - held.get(b, 0)
        for b in sorted(set(listed) | set(held))
        if listed.get(b, 0) != held.get(b, 0)}
    if deltas:
        detail = ", ".join(f"{b} {d:+d}" for b, d in deltas.items())
        raise SequenceError(f"sequence totals differ from the inventory: {detail}")


def load_literal_sequence(
        source: Union[str, Path],
        moisture: Optional[str] = None,
        inventory: Optional[BaleInventory] = None) -> Ordering:
    """
    Read a sequence file. Lines ``feedstock = <pattern>`` are read in
    order and concatenated; ``moisture = <pattern>`` gives the moisture
    cycle laid over the bales, unless ``moisture`` overrides it. Blank
    lines and ``#`` comments are skipped. ``source`` is a path, or the
    text itself when it spans more than one line.

    With an inventory, per-feedstock totals must match it.
    """

    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" in source:
        text = source
    else:
        text = Path(source).read_text()

    feedstocks: List[str] = []
    cycle = None
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition("=")
        name = name.strip().lower()
        if not sep or name not in ("feedstock", "moisture"):
            raise SequenceError(f"line {number}: expected 'feedstock =' or 'moisture ='")
        if name == "feedstock":
            feedstocks.extend(_expand(parse_pattern(value)))
        else:
            cycle = value.strip()

    cycle = moisture or cycle
    if not feedstocks:
        raise SequenceError("sequence lists no bales")
    if not cycle:
        raise SequenceError("sequence has no moisture pattern")

    bales = _apply_moisture(feedstocks, cycle)
    _check_totals(bales, inventory)
    return Ordering(bales=tuple(bales))


def random_sequence(
        inventory: BaleInventory,
        seed: int,
        moisture: Optional[str] = None) -> Ordering:
    """
    Seeded uniform shuffle of the inventory. With a moisture pattern only
    the feedstocks are shuffled and the pattern sets the moisture levels.
    """

    if not inventory.total:
        raise SequenceError("cannot shuffle an empty inventory")

    rng = np.random.default_rng(seed)
    bales = inventory.bales()
    order = rng.permutation(len(bales))
    shuffled = [bales[i] for i in order]

    if moisture is not None:
        shuffled = _apply_moisture([b for b, _ in shuffled], moisture)
    return Ordering(bales=tuple(shuffled))


def write_ordering(ordering: Ordering) -> str:
    """
    One bale per line as ``position,feedstock,moisture``.
    """

    frame = pd.DataFrame({
        "position": range(1, len(ordering) + 1),
        "feedstock": ordering.feedstock_labels(),
        "moisture": ordering.moisture_labels(),
    })
    return frame.to_csv(index=False, lineterminator="\n")


def read_ordering(source: Union[str, Path]) -> Ordering:
    """
    Read an ordering written by :func:`write_ordering`, from a path or
    the text itself.
    """

    text = Path(source).read_text() if isinstance(source, Path) else source
    frame = pd.read_csv(io.StringIO(text), dtype={"feedstock": str, "moisture": str})

    missing = {"position", "feedstock", "moisture"} - set(frame.columns)
    if missing:
        raise SequenceError(f"ordering lacks columns {', '.join(sorted(missing))}")

    frame = frame.sort_values("position")
    expected = list(range(1, len(frame) + 1))
    if list(frame["position"]) != expected:
        raise SequenceError("ordering positions must run 1..N without gaps")

    bales = []
    for row in frame.itertuples(index=False):
        if row.moisture not in MOISTURE_LEVELS:
            raise SequenceError(
                f"position {row.position}: unknown moisture level {row.moisture!r}")
        bales.append((row.feedstock, row.moisture))
    return Ordering(bales=tuple(bales))


# The end.
