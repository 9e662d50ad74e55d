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
preoccupied.bioblend.stats
Small statistical helpers: the standard normal quantile and the
nearest-rank percentile of a weighted discrete distribution.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from typing import Sequence

import numpy as np
from scipy.special import ndtri


__all__ = (
    "inverse_normal_cdf",
    "nearest_rank",
)


def inverse_normal_cdf(p: float) -> float:
    """
    Quantile of the standard normal distribution.
    """

    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p!r}")

    # mirror the upper half, where 1 - p is exact
    if p > 0.5:
        return -float(ndtri(1.0 - p))
    return float(ndtri(p))


def nearest_rank(
        values: Sequence[float],
        weights: Sequence[float],
        fraction: float) -> float:
    """
    Smallest value whose cumulative weight reaches ``fraction`` of the
    total weight.
    """

    if not len(values) or len(values) != len(weights):
        raise ValueError("values and weights must be non-empty and equal in length")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction!r}")

    vals = np.asarray(values, dtype=float)
    wts = np.asarray(weights, dtype=float)
    total = wts.sum()
    if not total > 0:
        raise ValueError("weights must not all be zero")

    order = np.argsort(vals, kind="stable")
    cumulative = np.cumsum(wts[order])
    index = int(np.searchsorted(cumulative, fraction * total - 1e-12, side="left"))
    return float(vals[order][min(index, len(order) - 1)])


# The end.
