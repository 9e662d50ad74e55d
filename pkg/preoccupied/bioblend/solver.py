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
preoccupied.bioblend.solver
Solving contract and backends.

Backends are kind-dispatched configuration models:
``BackendConfig(name="highs")`` solves in process through scipy's HiGHS
bindings, ``BackendConfig(name="lpfile", executable="cbc")`` runs CBC through
PuLP, bundled or at the given path, and
``BackendConfig(name="oracle")`` runs the exact branch and bound oracle for
tiny instances.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import logging
import math
import shutil
import time
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

import pulp
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import Bounds, LinearConstraint, milp

from .lpformat import export_lp_text
from .milp import MilpInstance
from .selector import Discriminator, KindSelector, Match


__all__ = (
    "BackendConfig",
    "HighsBackend",
    "LpFileBackend",
    "OracleBackend",
    "SolveRequest",
    "SolveResult",
    "SolveStatus",
    "check_solution",
    "pulp_problem",
    "solve",
)


logger = logging.getLogger(__name__)


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    TIME_LIMIT = "TimeLimit"
    ERROR = "Error"


class SolveRequest(BaseModel):
    """
    An instance and the limits to solve it under. The thread and seed
    hints are passed to backends that accept them.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    instance: MilpInstance
    time_limit: float = Field(600.0, gt=0)
    mip_gap: float = Field(1e-4, ge=0)
    threads: int = Field(1, ge=1)
    seed: int = Field(0, ge=0)
    verify: bool = False


class SolveResult(BaseModel):
    """
    Outcome of one solve. ``values`` holds every variable by name when a
    solution was found and is empty otherwise.
    """

    model_config = ConfigDict(frozen=True)

    status: SolveStatus
    objective: Optional[float] = None
    values: Dict[str, float] = Field(default_factory=dict)
    wall_time: float = 0.0
    gap: Optional[float] = None
    message: str = ""


    @property
    def has_solution(self) -> bool:
        return self.status in (
            SolveStatus.OPTIMAL, SolveStatus.FEASIBLE, SolveStatus.TIME_LIMIT) \
            and bool(self.values)


    def by_role(self, role: str) -> Dict[str, float]:
        prefix = f"{role}_"
        return {
            name: value for name, value in self.values.items()
            if name == role or name.startswith(prefix) and
            name.split("_", 1)[0] == role}


def _error(message: str, started: float) -> SolveResult:
    logger.error(message)
    return SolveResult(
        status=SolveStatus.ERROR, message=message,
        wall_time=time.perf_counter() - started)


class BackendConfig(KindSelector):
    """
    Selects and configures a solver backend.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Discriminator("highs")


    def solve(self, request: SolveRequest) -> SolveResult:
        raise NotImplementedError


class HighsBackend(BackendConfig):
    """
    HiGHS branch and cut through ``scipy.optimize.milp``.
    """

    name: str = Match("highs")
    presolve: bool = True


    def solve(self, request: SolveRequest) -> SolveResult:
        started = time.perf_counter()
        instance = request.instance
        arrays = instance.arrays()

        if not arrays.names:
            return SolveResult(
                status=SolveStatus.OPTIMAL, objective=0.0, gap=0.0,
                wall_time=time.perf_counter() - started)

        constraints = None
        if arrays.matrix.shape[0]:
            constraints = LinearConstraint(
                arrays.matrix, arrays.row_lower, arrays.row_upper)

        options = {
            "time_limit": request.time_limit,
            "mip_rel_gap": request.mip_gap,
            "presolve": self.presolve,
            "disp": False,
        }
        if request.threads > 1:
            logger.debug("HiGHS through scipy ignores the threads hint")

        try:
            res = milp(
                c=arrays.objective,
                integrality=arrays.integrality,
                bounds=Bounds(arrays.lower, arrays.upper),
                constraints=constraints,
                options=options)
        except (ValueError, RuntimeError) as err:
            return _error(f"HiGHS failed on {instance.name}: {err}", started)

        elapsed = time.perf_counter() - started
        gap = getattr(res, "mip_gap", None)
        gap = None if gap is None or not math.isfinite(gap) else float(gap)

        if res.status == 2:
            return SolveResult(
                status=SolveStatus.INFEASIBLE, wall_time=elapsed,
                message=str(res.message))
        if res.x is None:
            status = SolveStatus.TIME_LIMIT if res.status == 1 else SolveStatus.ERROR
            return SolveResult(
                status=status, wall_time=elapsed, message=str(res.message))

        if res.status == 0:
            status = SolveStatus.OPTIMAL
        elif res.status == 1:
            status = SolveStatus.TIME_LIMIT
        else:
            status = SolveStatus.FEASIBLE

        values = dict(zip(arrays.names, (float(v) for v in res.x)))
        return SolveResult(
            status=status, objective=float(res.fun), values=values,
            wall_time=elapsed, gap=0.0 if gap is None and status is SolveStatus.OPTIMAL else gap,
            message=str(res.message))


_PULP_STATUS = {
    pulp.LpSolutionOptimal: SolveStatus.OPTIMAL,
    pulp.LpSolutionIntegerFeasible: SolveStatus.FEASIBLE,
    pulp.LpSolutionInfeasible: SolveStatus.INFEASIBLE,
    pulp.LpSolutionNoSolutionFound: SolveStatus.TIME_LIMIT,
}


def pulp_problem(
        instance: MilpInstance) -> Tuple[pulp.LpProblem, Dict[str, pulp.LpVariable]]:
    """
    The instance as a PuLP problem, and its columns by variable name.
    Columns and rows are numbered so PuLP never renames them.
    """

    problem = pulp.LpProblem("bioblend", pulp.LpMinimize)
    columns: Dict[str, pulp.LpVariable] = {}
    for i, var in enumerate(instance.variables):
        columns[var.name] = pulp.LpVariable(
            f"x{i}",
            lowBound=var.lower if math.isfinite(var.lower) else None,
            upBound=var.upper if math.isfinite(var.upper) else None,
            cat=pulp.LpInteger if var.binary else pulp.LpContinuous)

    problem += pulp.lpSum(c * columns[v] for v, c in instance.objective.items())
    for i, row in enumerate(instance.rows):
        expr = pulp.lpSum(c * columns[v] for v, c in row.terms)
        if row.sense == "<=":
            problem += (expr <= row.rhs, f"r{i}")
        elif row.sense == ">=":
            problem += (expr >= row.rhs, f"r{i}")
        else:
            problem += (expr == row.rhs, f"r{i}")
    return problem, columns


class LpFileBackend(BackendConfig):
    """
    CBC through PuLP. Without an ``executable`` the CBC build bundled
    with PuLP runs; otherwise the named CBC compatible binary does.
    ``keep_files`` names a directory that keeps the LP text of each
    instance and PuLP's working files.
    """

    name: str = Match("lpfile")
    executable: Optional[str] = None
    keep_files: Optional[Path] = None


    def solver(self, path: Optional[str], request: SolveRequest) -> pulp.LpSolver_CMD:
        options = {
            "msg": False,
            "timeLimit": request.time_limit,
            "gapRel": request.mip_gap,
            "threads": request.threads,
            "options": [f"randomSeed {request.seed}"],
            "keepFiles": self.keep_files is not None,
        }
        if path is None:
            solver = pulp.PULP_CBC_CMD(**options)
        else:
            solver = pulp.COIN_CMD(path=path, **options)
        if self.keep_files is not None:
            solver.tmpDir = str(self.keep_files)
        return solver


    def solve(self, request: SolveRequest) -> SolveResult:
        started = time.perf_counter()
        instance = request.instance

        path = None
        if self.executable:
            path = shutil.which(self.executable)
            if path is None:
                return _error(f"solver executable {self.executable!r} not found", started)

        if not instance.variables:
            return SolveResult(
                status=SolveStatus.OPTIMAL, objective=0.0, gap=0.0,
                wall_time=time.perf_counter() - started)

        solver = self.solver(path, request)
        if not solver.available():
            return _error(f"{solver.name} is not available", started)

        if self.keep_files is not None:
            self.keep_files.mkdir(parents=True, exist_ok=True)
            (self.keep_files / f"{instance.name}.lp").write_text(export_lp_text(instance))

        problem, columns = pulp_problem(instance)
        try:
            problem.solve(solver)
        except pulp.PulpSolverError as err:
            return _error(f"{solver.name} failed on {instance.name}: {err}", started)

        elapsed = time.perf_counter() - started
        status = _PULP_STATUS.get(problem.sol_status, SolveStatus.ERROR)
        message = pulp.LpStatus.get(problem.status, str(problem.status))

        if status not in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE):
            return SolveResult(status=status, wall_time=elapsed, message=message)

        values = {}
        for var in instance.variables:
            value = columns[var.name].value()
            # columns in no row or objective never reach CBC
            values[var.name] = min(max(0.0, var.lower), var.upper) if value is None else float(value)
        objective = sum(c * values[v] for v, c in instance.objective.items())
        return SolveResult(
            status=status, objective=objective, values=values, wall_time=elapsed,
            gap=0.0 if status is SolveStatus.OPTIMAL else None, message=message)


class OracleBackend(BackendConfig):
    """
    Exact enumeration oracle for tiny instances.
    """

    name: str = Match("oracle")
    max_binaries: int = Field(24, ge=0)
    max_continuous: int = Field(2000, ge=0)


    def solve(self, request: SolveRequest) -> SolveResult:
        from .oracle import OracleLimits, oracle_solve

        limits = OracleLimits(
            max_binaries=self.max_binaries,
            max_continuous=self.max_continuous,
            time_limit=request.time_limit)
        return oracle_solve(request.instance, limits)


def check_solution(
        instance: MilpInstance,
        values: Mapping[str, float],
        tolerance: float = 1e-6) -> List[str]:
    """
    Substitute values into every bound and row. Returns a description of
    each violation; an empty list means the assignment is feasible.
    """

    found = []
    for var in instance.variables:
        if var.name not in values:
            found.append(f"{var.name} has no value")
            continue
        value = values[var.name]
        if value < var.lower - tolerance or value > var.upper + tolerance:
            found.append(
                f"{var.name} = {value!r} outside [{var.lower}, {var.upper}]")
        if var.binary and abs(value - round(value)) > tolerance:
            found.append(f"{var.name} = {value!r} is not integral")

    for row in instance.rows:
        slack = row.violation(values)
        scale = max(1.0, abs(row.rhs))
        if slack > tolerance * scale:
            found.append(
                f"row {row.name} {row.tag} violated by {slack:.3g}")
    return found


def solve(
        request: SolveRequest,
        backend: Optional[BackendConfig] = None) -> SolveResult:
    """
    Solve a request with the given backend, HiGHS by default. Malformed
    instances come back as ``Error`` results naming the offending row.
    """

    started = time.perf_counter()
    issues = request.instance.issues()
    if issues:
        return _error("; ".join(issues), started)

    backend = backend or HighsBackend()
    result = backend.solve(request)
    logger.info(
        "%s on %s: %s objective=%s in %.2fs",
        backend.name, request.instance.name, result.status.value,
        result.objective, result.wall_time)

    if request.verify and result.has_solution:
        problems = check_solution(request.instance, result.values)
        if problems:
            logger.warning(
                "%s solution of %s fails %d checks",
                backend.name, request.instance.name, len(problems))
            return SolveResult(
                status=SolveStatus.ERROR,
                message=f"row check failed: {problems[0]}",
                wall_time=result.wall_time)

    return result


# The end.
