"""
tests.test_solver
Solve results, backends, the row checker and agreement between HiGHS
and the exact oracle.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import math

import pulp
import pytest

from preoccupied.bioblend.milp import (
    ChanceSaaVariant, DeterministicVariant, MilpInstance, add_blending)
from preoccupied.bioblend.model import SolutionRecord
from preoccupied.bioblend.oracle import OracleLimits, oracle_solve
from preoccupied.bioblend.sampling import sample
from preoccupied.bioblend.solver import (
    BackendConfig, HighsBackend, LpFileBackend, OracleBackend, SolveRequest,
    SolveResult, SolveStatus, check_solution, pulp_problem, solve)


def single_variable():
    inst = MilpInstance("single")
    inst.add_variable("U", 0.0, 5.0)
    inst.set_objective({"U": 1.0})
    return inst


@pytest.mark.parametrize("backend", [HighsBackend(), OracleBackend()])
def test_single_variable(backend):
    """
    Minimizing one bounded variable gives its lower bound.
    """

    result = solve(SolveRequest(instance=single_variable()), backend)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(0.0)
    assert result.values["U"] == pytest.approx(0.0)
    assert result.has_solution


@pytest.mark.parametrize("backend", [HighsBackend(), OracleBackend()])
def test_contradictory_rows(backend):
    """
    Rows that cannot hold together make the instance infeasible.
    """

    inst = single_variable()
    inst.add_row({"U": 1.0}, ">=", 2.0, "plumbing")
    inst.add_row({"U": 1.0}, "<=", 1.0, "plumbing")

    result = solve(SolveRequest(instance=inst), backend)
    assert result.status is SolveStatus.INFEASIBLE
    assert result.values == {}
    assert not result.has_solution


def test_unit_case_makespan(unit_case):
    """
    Two one-period bales keep the reactor busy for two periods, and the
    linearized feed rate matches U exactly while the reactor runs.
    """

    result = solve(SolveRequest(instance=unit_case.core, verify=True))
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0)
    assert not result.message.startswith("row check failed")
    assert check_solution(unit_case.core, result.values) == []

    values = result.values
    for t in range(1, 5):
        expected = values["U"] * round(values[f"Zr_{t}"])
        assert values[f"W_{t}"] == pytest.approx(expected, abs=1e-6)

    record = SolutionRecord.from_values(unit_case.core.layout, values, result.objective)
    assert record.makespan == 2
    assert record.reactor_flow().sum() == pytest.approx(2.0)


def test_unit_case_oracle(unit_case):
    """
    The oracle agrees with HiGHS on the smallest real instance.
    """

    result = oracle_solve(unit_case.core)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0, abs=1e-6)
    assert check_solution(unit_case.core, result.values) == []


def test_oracle_all_binary():
    """
    A pure binary instance is solved exactly.
    """

    inst = MilpInstance("binary")
    names = [inst.add_variable(f"Zr_{t}", 0.0, 1.0, binary=True) for t in (1, 2, 3)]
    inst.add_row({n: 1.0 for n in names}, ">=", 2.0, "plumbing")
    inst.add_row({"Zr_1": 1.0, "Zr_2": 1.0}, "<=", 1.0, "plumbing")
    inst.set_objective({"Zr_1": 1.0, "Zr_2": 2.0, "Zr_3": 1.0})

    result = oracle_solve(inst)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0)
    assert result.values["Zr_3"] == pytest.approx(1.0)
    assert result.values["Zr_1"] == pytest.approx(1.0)


def test_oracle_integral_relaxation():
    """
    When the relaxation is already integral its value is the answer.
    """

    inst = MilpInstance("mixed")
    inst.add_variable("Zr_1", 0.0, 1.0, binary=True)
    inst.add_variable("U", 0.0, 4.0)
    inst.add_row({"U": 1.0, "Zr_1": 2.0}, ">=", 3.0, "plumbing")
    inst.set_objective({"U": 1.0, "Zr_1": 1.0})

    result = oracle_solve(inst)
    assert result.objective == pytest.approx(2.0)
    assert result.values["Zr_1"] == pytest.approx(1.0)


def test_oracle_limits(unit_case):
    """
    Instances above the oracle's limits are refused.
    """

    result = oracle_solve(unit_case.core, OracleLimits(max_binaries=4))
    assert result.status is SolveStatus.ERROR
    assert "8 binaries exceed the oracle limit of 4" in result.message

    result = solve(
        SolveRequest(instance=unit_case.core),
        BackendConfig(name="oracle", max_continuous=3))
    assert result.status is SolveStatus.ERROR
    assert "continuous variables exceed" in result.message

    empty = oracle_solve(MilpInstance())
    assert empty.status is SolveStatus.OPTIMAL
    assert empty.objective == 0.0


def test_malformed_instance():
    """
    Malformed instances are reported as errors naming the culprit.
    """

    inst = MilpInstance("bad")
    inst.add_variable("U", 0.0, math.nan)
    inst.add_row({"U": 1.0}, "<=", math.inf, "(19)", name="r19")

    result = solve(SolveRequest(instance=inst))
    assert result.status is SolveStatus.ERROR
    assert "variable U has a NaN bound" in result.message
    assert "row r19 has a non-finite right-hand side" in result.message


def test_missing_executable():
    """
    An external solver that is not installed is an error, not a crash.
    """

    backend = LpFileBackend(executable="no-such-solver-bioblend")
    result = solve(SolveRequest(instance=single_variable()), backend)
    assert result.status is SolveStatus.ERROR
    assert "'no-such-solver-bioblend' not found" in result.message


def test_lpfile_solver_options():
    """
    The request's limits and seed reach CBC, bundled or at a path.
    """

    request = SolveRequest(instance=single_variable(), time_limit=30, mip_gap=0.01, seed=7)

    bundled = LpFileBackend().solver(None, request)
    assert isinstance(bundled, pulp.PULP_CBC_CMD)
    assert bundled.timeLimit == 30
    assert bundled.optionsDict["gapRel"] == 0.01
    assert "randomSeed 7" in bundled.options

    external = LpFileBackend().solver("/opt/cbc", request)
    assert isinstance(external, pulp.COIN_CMD)
    assert external.path == "/opt/cbc"


def test_pulp_problem():
    """
    Every variable becomes a numbered column and every row a numbered
    constraint.
    """

    inst = single_variable()
    inst.add_variable("Zr_1", 0.0, 1.0, binary=True)
    inst.add_row({"U": 1.0, "Zr_1": -1.0}, ">=", 0.5, "plumbing")
    inst.add_row({"U": 1.0}, "=", 0.75, "plumbing")

    problem, columns = pulp_problem(inst)
    assert sorted(columns) == ["U", "Zr_1"]
    assert columns["Zr_1"].cat == pulp.LpInteger
    assert columns["U"].upBound == 5.0
    assert sorted(problem.constraints) == ["r0", "r1"]
    assert problem.constraints["r1"].sense == pulp.LpConstraintEQ


@pytest.mark.skipif(
    not pulp.PULP_CBC_CMD(msg=False).available(), reason="no bundled CBC")
def test_lpfile_solves(unit_case, tmp_path):
    """
    Bundled CBC reaches the HiGHS makespan, passes the row checker and
    keeps the LP text when asked.
    """

    backend = LpFileBackend(keep_files=tmp_path)
    result = solve(SolveRequest(instance=unit_case.core, verify=True), backend)
    assert result.status is SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0, abs=1e-6)
    assert check_solution(unit_case.core, result.values) == []
    assert (tmp_path / f"{unit_case.core.name}.lp").read_text().startswith("\\")

    inst = single_variable()
    inst.add_row({"U": 1.0}, ">=", 2.0, "plumbing")
    inst.add_row({"U": 1.0}, "<=", 1.0, "plumbing")
    assert solve(SolveRequest(instance=inst), LpFileBackend()).status is SolveStatus.INFEASIBLE


def test_verify_rejects_bad_assignment(monkeypatch):
    """
    A backend answer that breaks a row is an error once verified, and
    carries no values.
    """

    inst = single_variable()
    inst.add_row({"U": 1.0}, ">=", 2.0, "plumbing")

    def wrong(self, request):
        return SolveResult(
            status=SolveStatus.OPTIMAL, objective=0.0, values={"U": 0.0})

    monkeypatch.setattr(HighsBackend, "solve", wrong)

    unchecked = solve(SolveRequest(instance=inst))
    assert unchecked.status is SolveStatus.OPTIMAL

    checked = solve(SolveRequest(instance=inst, verify=True))
    assert checked.status is SolveStatus.ERROR
    assert checked.values == {}
    assert not checked.has_solution
    assert checked.message.startswith("row check failed: row ")
    assert "violated by 2" in checked.message


def test_check_solution_reports():
    """
    The row checker names missing values, bound breaches and violated
    rows.
    """

    inst = MilpInstance()
    inst.add_variable("U", 0.0, 1.0)
    inst.add_variable("Zr_1", 0.0, 1.0, binary=True)
    inst.add_row({"U": 1.0, "Zr_1": -1.0}, "<=", 0.0, "plumbing", name="link")

    assert check_solution(inst, {"U": 0.5, "Zr_1": 1.0}) == []

    found = check_solution(inst, {"U": 1.5, "Zr_1": 0.5})
    assert "U = 1.5 outside [0.0, 1.0]" in found
    assert "Zr_1 = 0.5 is not integral" in found
    assert "row link plumbing violated by 1" in found

    assert check_solution(inst, {"U": 0.0}) == ["Zr_1 has no value"]


def test_result_by_role():
    """
    Values can be picked out by variable role without prefix clashes.
    """

    result = SolveResult(
        status=SolveStatus.OPTIMAL, objective=1.0,
        values={"Z_L_A_1": 1.0, "Zr_1": 1.0, "U": 0.5, "W_1": 0.5})
    assert result.by_role("Z") == {"Z_L_A_1": 1.0}
    assert result.by_role("Zr") == {"Zr_1": 1.0}
    assert result.by_role("U") == {"U": 0.5}


def test_repeat_solve_same_objective(unit_case):
    """
    Identical requests give identical objectives.
    """

    request = SolveRequest(instance=unit_case.core, seed=3)
    assert solve(request).objective == solve(request).objective


def agree(instance):
    request = SolveRequest(instance=instance, mip_gap=0.0, verify=True)
    highs = solve(request, HighsBackend())
    oracle = solve(request, OracleBackend())

    assert highs.status in (SolveStatus.OPTIMAL, SolveStatus.INFEASIBLE)
    assert oracle.status is highs.status

    if highs.status is SolveStatus.OPTIMAL:
        assert oracle.objective == pytest.approx(highs.objective, abs=1e-6)
        assert check_solution(instance, highs.values) == []
        assert check_solution(instance, oracle.values) == []
    return highs.status


@pytest.mark.parametrize("seed", range(50))
def test_oracle_agrees_on_tiny_instances(tiny_case, seed):
    """
    HiGHS and the oracle find the same optimum on seeded tiny instances,
    bare and with each kind of blending rows, and both answers pass the
    row checker.
    """

    case = tiny_case(seed)
    agree(case.core)

    means = {b: d.mean() for b, d in case.dists.items()}
    agree(add_blending(case.core, DeterministicVariant(mean_carbs=means)))

    samples = sample(case.dists, 3, seed)
    agree(add_blending(case.core, ChanceSaaVariant(samples=samples, penalty=2.0)))


def test_tiny_instances_mostly_feasible(tiny_case):
    """
    The seeded family is not all infeasible, so the agreement test
    compares real optima.
    """

    statuses = [
        solve(SolveRequest(instance=tiny_case(seed).core)).status
        for seed in range(10)]
    assert SolveStatus.OPTIMAL in statuses


# The end.
