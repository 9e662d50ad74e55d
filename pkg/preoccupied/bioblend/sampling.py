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
preoccupied.bioblend.sampling
Empirical carbohydrate distributions and seeded sample sets.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from typing import Any, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .model import IDENTIFIER
from .stats import nearest_rank


__all__ = (
    "EmpiricalDist",
    "SampleSet",
    "replication_seeds",
    "sample",
)


class EmpiricalDist(BaseModel):
    """
    Discrete distribution of the carbohydrate fraction of one feedstock.
    ``label`` records where the numbers came from.
    """

    model_config = ConfigDict(frozen=True)

    feedstock: str = Field(pattern=IDENTIFIER)
    support: Tuple[float, ...]
    weights: Tuple[float, ...]
    label: str = ""


    @model_validator(mode="after")
    def _valid(self) -> "EmpiricalDist":
        if not self.support:
            raise ValueError(f"distribution for {self.feedstock} is empty")
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights differ in length")
        if any(not 0.0 < v < 1.0 for v in self.support):
            raise ValueError("support values must lie in (0, 1)")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must not be negative")
        if abs(sum(self.weights) - 1.0) > 1e-6:
            raise ValueError(
                f"weights sum to {sum(self.weights)!r}, not 1")
        return self


    @classmethod
    def from_histogram(
            cls,
            feedstock: str,
            support: Sequence[float],
            counts: Sequence[float],
            label: str = "") -> "EmpiricalDist":
        """
        Normalize bin counts or unnormalized weights into a distribution.
        """

        total = float(sum(counts))
        if not total > 0:
            raise ValueError(f"histogram for {feedstock} has no mass")
        return cls(
            feedstock=feedstock, support=tuple(support),
            weights=tuple(c / total for c in counts), label=label)


    @classmethod
    def from_samples(
            cls,
            feedstock: str,
            values: Sequence[float],
            label: str = "") -> "EmpiricalDist":
        """
        Equal-weight distribution over a raw sample list.
        """

        return cls.from_histogram(feedstock, values, [1.0] * len(values), label)


    def mean(self) -> float:
        return float(np.dot(self.support, self.weights))


    def percentile(self, fraction: float) -> float:
        return nearest_rank(self.support, self.weights, fraction)


class SampleSet(BaseModel):
    """
    ``values[n, b]`` is the carbohydrate fraction of feedstock
    ``feedstocks[b]`` in sample ``n``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    feedstocks: Tuple[str, ...]
    values: np.ndarray
    seed: int = 0


    @field_validator("values", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=float)
        if array.ndim != 2 or array.shape[0] < 1:
            raise ValueError("sample values must be a non-empty (N, B) array")
        array.setflags(write=False)
        return array


    @model_validator(mode="after")
    def _shape(self) -> "SampleSet":
        if self.values.shape[1] != len(self.feedstocks):
            raise ValueError(
                f"sample values have {self.values.shape[1]} columns for"
                f" {len(self.feedstocks)} feedstocks")
        return self


    @property
    def size(self) -> int:
        return int(self.values.shape[0])


    def column(self, feedstock: str) -> np.ndarray:
        if feedstock not in self.feedstocks:
            raise KeyError(f"no samples for feedstock {feedstock!r}")
        return self.values[:, self.feedstocks.index(feedstock)]


    def aligned(self, feedstocks: Sequence[str]) -> np.ndarray:
        """
        Sample values with columns in the given feedstock order.
        """

        return np.stack([self.column(b) for b in feedstocks], axis=1)


def sample(
        dists: Union[Mapping[str, EmpiricalDist], Iterable[EmpiricalDist]],
        size: int,
        seed: int) -> SampleSet:
    """
    Draw ``size`` independent samples per feedstock. The same seed gives
    the same values.
    """

    if size < 1:
        raise ValueError(f"sample size must be at least 1, got {size}")

    if isinstance(dists, Mapping):
        dists = list(dists.values())
    ordered = sorted(dists, key=lambda d: d.feedstock)
    if not ordered:
        raise ValueError("no distributions to sample from")

    rng = np.random.default_rng(seed)
    columns = []
    for dist in ordered:
        weights = np.array(dist.weights)
        columns.append(rng.choice(
            np.array(dist.support), size=size, p=weights / weights.sum()))

    return SampleSet(
        feedstocks=tuple(d.feedstock for d in ordered),
        values=np.stack(columns, axis=1),
        seed=seed)


def replication_seeds(seed: int, count: int, *key: int) -> List[int]:
    """
    Independent integer seeds for ``count`` replications, spawned from the
    run seed. ``key`` separates streams, for example bound rounds.
    """

    root = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return [int(child.generate_state(1)[0]) for child in root.spawn(count)]


# The end.
