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
preoccupied.bioblend.oracle
Exact reference solver for tiny instances.

Binary variables are fixed depth first, one at a time. Each node solves
its LP relaxation with the dual simplex and is dropped when the
relaxation is infeasible or cannot beat the incumbent. A node whose
relaxation is already integral is solved once more with its binaries
fixed, which gives the exact continuous part. Nothing is pruned on
heuristics, so the result is optimal within LP tolerance.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import math
import time
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .milp import MilpInstance
from .solver import SolveResult, SolveStatus


__all__ = (
    "OracleLimits",
    "oracle_solve",
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleLimits:
    max_binaries: int = 24
    max_continuous: int = 2000
    time_limit: float = 600.0
    tolerance: float = 1e-7


class _Relaxation:
    """
    The instance as ``A_ub x <= b_ub``, ``A_eq x = b_eq`` for linprog.
    """

    def __init__(self, instance: MilpInstance) -> None:
        arrays = instance.arrays()
        self.arrays = arrays
        matrix = arrays.matrix
        lower, upper = arrays.row_lower, arrays.row_upper

        equal = np.isfinite(lower) & np.isfinite(upper) & (lower == upper)
        above = np.isfinite(upper) & ~equal
        below = np.isfinite(lower) & ~equal

        blocks = []
        rhs = []
        if above.any():
            blocks.append(matrix[np.flatnonzero(above)])
            rhs.append(upper[above])
        if below.any():
            blocks.append(-matrix[np.flatnonzero(below)])
            rhs.append(-lower[below])

        self.a_ub = sparse.vstack(blocks).tocsr() if blocks else None
        self.b_ub = np.concatenate(rhs) if rhs else None
        self.a_eq = matrix[np.flatnonzero(equal)] if equal.any() else None
        self.b_eq = lower[equal] if equal.any() else None


    def solve(self, lower: np.ndarray, upper: np.ndarray):
        bounds = [
            (lo if math.isfinite(lo) else None, hi if math.isfinite(hi) else None)
            for lo, hi in zip(lower, upper)]
        return linprog(
            self.arrays.objective,
            A_ub=self.a_ub, b_ub=self.b_ub,
            A_eq=self.a_eq, b_eq=self.b_eq,
            bounds=bounds, method="highs-ds")


def oracle_solve(
        instance: MilpInstance,
        limits: Optional[OracleLimits] = None) -> SolveResult:
    """
    Solve a small instance exactly. Instances above the limits come back
    as ``Error`` results.
    """

    limits = limits or OracleLimits()
    started = time.perf_counter()

    def elapsed() -> float:
        return time.perf_counter() - started

    relaxation = _Relaxation(instance)
    arrays = relaxation.arrays
    binaries = np.flatnonzero(arrays.integrality)
    continuous = len(arrays.names) - len(binaries)

    if len(binaries) > limits.max_binaries:
        return SolveResult(
            status=SolveStatus.ERROR, wall_time=elapsed(),
            message=f"{len(binaries)} binaries exceed the oracle limit of {limits.max_binaries}")
    if continuous > limits.max_continuous:
        return SolveResult(
            status=SolveStatus.ERROR, wall_time=elapsed(),
            message=f"{continuous} continuous variables exceed the oracle limit of {limits.max_continuous}")
    if not len(arrays.names):
        return SolveResult(status=SolveStatus.OPTIMAL, objective=0.0, gap=0.0)

    tol = limits.tolerance
    best_objective = math.inf
    best_x: Optional[np.ndarray] = None
    explored = 0
    timed_out = False

    stack: List[Tuple[np.ndarray, np.ndarray]] = [
        (arrays.lower.copy(), arrays.upper.copy())]

    while stack:
        if elapsed() > limits.time_limit:
            timed_out = True
            break

        lower, upper = stack.pop()
        res = relaxation.solve(lower, upper)
        explored += 1

        if res.status == 3:
            return SolveResult(
                status=SolveStatus.ERROR, wall_time=elapsed(),
                message="relaxation is unbounded")
        if res.status != 0 or res.fun >= best_objective - tol:
            continue

        x = res.x
        fractional = [j for j in binaries if abs(x[j] - round(x[j])) > tol]
        if fractional:
            j = fractional[0]
            down_upper = upper.copy()
            down_upper[j] = 0.0
            up_lower = lower.copy()
            up_lower[j] = 1.0
            stack.append((lower, down_upper))
            stack.append((up_lower, upper))
            continue

        fixed_lower, fixed_upper = lower.copy(), upper.copy()
        fixed_lower[binaries] = fixed_upper[binaries] = np.round(x[binaries])
        polished = relaxation.solve(fixed_lower, fixed_upper)
        if polished.status == 0 and polished.fun < best_objective:
            best_objective = float(polished.fun)
            best_x = polished.x

    logger.debug("oracle explored %d nodes on %s", explored, instance.name)
    message = f"explored {explored} nodes"

    if best_x is None:
        status = SolveStatus.TIME_LIMIT if timed_out else SolveStatus.INFEASIBLE
        return SolveResult(status=status, wall_time=elapsed(), message=message)

    values = dict(zip(arrays.names, (float(v) for v in best_x)))
    return SolveResult(
        status=SolveStatus.TIME_LIMIT if timed_out else SolveStatus.OPTIMAL,
        objective=best_objective, values=values, wall_time=elapsed(),
        gap=None if timed_out else 0.0, message=message)


# The end.
