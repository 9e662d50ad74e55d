"""
tests.test_cli
Command line subcommands and exit codes.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from types import SimpleNamespace

import pytest

from preoccupied.bioblend import cli
from preoccupied.bioblend.config import ENV_BACKEND, ENV_POOL_SIZE, ENV_SOLVER_PATH
from preoccupied.bioblend.lpformat import write_solution_text
from preoccupied.bioblend.solver import SolveStatus


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """
    Runs here never pick up a developer's solver settings.
    """

    for name in (ENV_BACKEND, ENV_POOL_SIZE, ENV_SOLVER_PATH):
        monkeypatch.delenv(name, raising=False)


def test_sequence(capsys):
    """
    The desk ordering is printed as CSV.
    """

    assert cli.main(["sequence", "--profile", "desk"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "position,feedstock,moisture"
    assert lines[1:3] == ["1,S,L", "2,S,L"]
    assert len(lines) == 9


def test_sequence_rule_notes(capsys):
    """
    Repairs made by a rule are reported on stderr.
    """

    assert cli.main(["sequence", "--profile", "desk", "--rule", "rule4"]) == cli.EXIT_OK
    captured = capsys.readouterr()
    assert "position 3: moisture H swapped with L from position 4" in captured.err
    assert len(captured.out.splitlines()) == 9


@pytest.mark.parametrize("args, message", [
    (["sequence"], "give a configuration file or --profile"),
    (["sequence", "--profile", "nope"], "no shipped profile named 'nope'"),
    (["sequence", "--profile", "desk", "--set", "horizon"], "--set expects key=value"),
    (["sequence", "--profile", "desk", "--set", "horizon=20"], "raise the horizon"),
    (["sequence", "--profile", "desk", "--set", "backend=gurobi"], "unknown backend"),
])
def test_configuration_errors(capsys, args, message):
    """
    Bad configurations exit with the configuration code.
    """

    assert cli.main(args) == cli.EXIT_CONFIG
    assert message in capsys.readouterr().err


def test_build_stats(capsys):
    """
    Statistics list rows by tag and variables by role.
    """

    args = ["build", "--profile", "desk", "--variant", "deterministic", "--stats"]
    assert cli.main(args) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("kind,name,count\n")
    assert "rows,(8)," in out


def test_build_lp(tmp_path):
    """
    LP text goes to the output file.
    """

    target = tmp_path / "desk.lp"
    args = ["build", "--profile", "desk", "--variant", "deterministic", "--output", str(target)]
    assert cli.main(args) == cli.EXIT_OK
    text = target.read_text()
    assert text.startswith("\\ bioblend model desk-deterministic\n")
    assert text.rstrip().endswith("End")


def test_solver_missing(capsys):
    """
    A missing external solver exits with the backend code.
    """

    args = [
        "solve", "--profile", "desk", "--variant", "deterministic",
        "--set", "backend=lpfile", "--set", "solver_path=no-such-solver-bioblend"]
    assert cli.main(args) == cli.EXIT_BACKEND
    assert "'no-such-solver-bioblend' not found" in capsys.readouterr().err


def test_solve_infeasible(capsys, monkeypatch):
    """
    No schedule exits with the infeasible code.
    """

    def no_schedule(problem, seed=None):
        return SimpleNamespace(status=SolveStatus.INFEASIBLE, record=None, message="")

    monkeypatch.setattr(cli, "solve_once", no_schedule)
    assert cli.main(["solve", "--profile", "desk"]) == cli.EXIT_INFEASIBLE
    assert "desk: Infeasible" in capsys.readouterr().out


def test_report(tmp_path, capsys):
    """
    Metrics of a saved solution file.
    """

    saved = tmp_path / "desk.sol"
    saved.write_text(write_solution_text({"Zr_1": 1.0, "X_DC8_L_C2_1": 0.05}))

    assert cli.main(["report", "--profile", "desk", str(saved)]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[1] == "desk,Optimal,0.02,3.00,0.05,0.00,0.00,0.0000,1/1"


def test_subcommand_required():
    """
    A subcommand must be named.
    """

    with pytest.raises(SystemExit) as error:
        cli.main([])
    assert error.value.code == 2


# The end.
