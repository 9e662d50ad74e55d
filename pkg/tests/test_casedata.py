"""
tests.test_casedata
Reading the case study tables.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from pathlib import Path
from types import SimpleNamespace

import pytest

from preoccupied.bioblend.casedata import (
    CasePaths, ingest_case_data, read_distributions, read_equipment,
    read_inventory, read_network)
from preoccupied.bioblend.errors import CaseDataError
from preoccupied.bioblend.model import BaleGeometry
from preoccupied.bioblend.network import validate_network
from preoccupied.bioblend.sequencing import load_literal_sequence


DATA = Path(__file__).parent.parent / "preoccupied" / "bioblend" / "data"


def case_paths(inventory="inventory.csv", feedstocks=("C2", "C3", "M", "S")):
    return CasePaths(
        network=DATA / "network.csv",
        equipment=DATA / "equipment.csv",
        inventory=DATA / inventory,
        distributions=tuple(DATA / f"carbs_{b}.csv" for b in feedstocks))


@pytest.fixture
def shipped():
    """
    The full inventory on the shipped flowsheet, one minute periods.
    """

    paths = case_paths()
    case = ingest_case_data(paths, horizon=2000)

    return SimpleNamespace(**locals())


def test_inventory(shipped):
    """
    Bale counts and carbohydrate means of the shipped inventory.
    """

    case = shipped.case
    assert case.inventory.by_feedstock() == {"C3": 20, "C2": 40, "S": 10, "M": 10}
    assert case.inventory.total == 80
    assert case.inventory.counts["M.C2"] == 20
    assert case.mean_carbs["C2"] == pytest.approx(0.603)
    assert case.masses["S"] == pytest.approx(0.39)
    assert case.names["C2"] == "corn stover 2-pass"
    assert case.densities == {"H": 0.144, "M": 0.144, "L": 0.144}


def test_distributions(shipped):
    """
    Every feedstock has a histogram centred on its inventory mean.
    """

    dists = shipped.case.distributions
    assert sorted(dists) == ["C2", "C3", "M", "S"]
    assert dists["C2"].mean() == pytest.approx(0.603, abs=1e-9)
    assert dists["C2"].label == "carbs_C2.csv"
    for feedstock, dist in dists.items():
        assert dist.mean() == pytest.approx(shipped.case.mean_carbs[feedstock], rel=0.01)


def test_network(shipped):
    """
    The flowsheet converts hourly rates to per-period rates and passes
    validation.
    """

    net = shipped.case.network
    assert validate_network(net) == []
    assert net.infeed == "DC1"
    assert net.reactor_feeders == ("DC8", "DC9", "DC10", "DC11")
    assert net.horizon == 2000

    infeed = shipped.case.infeed_capacity()
    assert infeed["H.S"] == pytest.approx(2.20 / 60)
    assert infeed["L.C2"] == pytest.approx(5.23 / 60)

    assert net.node("G1").dry_matter_loss == pytest.approx(0.015)
    assert net.node("SEP").bypass_ratio["L.S"] == pytest.approx(0.4998)
    assert net.node("MB").processed_density["H.M"] == pytest.approx(0.053)
    assert net.node("DC8").capacity == {k: pytest.approx(5.0 / 60) for k in net.node("DC8").capacity}
    assert set(net.node("DC8").capacity) == {"H.C2", "L.C2", "M.C2"}

    assert shipped.case.with_horizon(500).network.horizon == 500


def test_classes_for_desk():
    """
    The desk inventory and ordering give derived classes whose periods
    follow from the infeed speed.
    """

    case = ingest_case_data(case_paths("inventory_desk.csv"), horizon=200)
    ordering = load_literal_sequence(DATA / "desk.seq", inventory=case.inventory)
    assert ordering.inventory() == case.inventory

    classes = case.classes_for(ordering.bales, BaleGeometry())
    assert sum(c.count for c in classes.values()) == 8
    assert classes["L.S"].count == 2
    assert classes["L.S"].mass_per_meter == pytest.approx(1.2 * 1.2 * 0.144)
    assert classes["L.S"].periods == 6
    assert classes["H.C3"].periods == 14


def write(path, text):
    path.write_text(text)
    return path


def test_bad_number(tmp_path):
    """
    Unreadable cells name the file, row and column.
    """

    path = write(tmp_path / "inventory.csv", (
        "feedstock,name,L,M,H,bale_mass,mean_carb\n"
        "S,switchgrass,x,5,2,0.39,66.6\n"))

    with pytest.raises(CaseDataError) as error:
        read_inventory(path)
    assert f"{path}, row 1, column L: 'x' is not a number" in str(error.value)


@pytest.mark.parametrize("cells, message", [
    ("S,switchgrass,1.5,5,2,0.39,66.6", "column L: bale counts are whole"),
    ("S,switchgrass,1,5,2,0,66.6", "column bale_mass: '0' must be positive"),
    (",switchgrass,1,5,2,0.39,66.6", "column feedstock: missing or repeated"),
])
def test_bad_inventory_rows(tmp_path, cells, message):
    """
    Inventory rows need whole counts, positive masses and an id.
    """

    path = write(tmp_path / "inventory.csv", (
        "feedstock,name,L,M,H,bale_mass,mean_carb\n" + cells + "\n"))

    with pytest.raises(CaseDataError) as error:
        read_inventory(path)
    assert message in str(error.value)


def test_missing_file_and_columns(tmp_path):
    """
    Missing files and columns are reported by path.
    """

    with pytest.raises(CaseDataError) as error:
        read_equipment(tmp_path / "nope.csv")
    assert "nope.csv: no such file" in str(error.value)

    path = write(tmp_path / "equipment.csv", "stage,parameter,high\nbale,x,1\n")
    with pytest.raises(CaseDataError) as error:
        read_equipment(path)
    assert "missing columns medium, low" in str(error.value)


def test_equipment_rows(tmp_path):
    """
    Equipment rows are looked up by stage and parameter.
    """

    table = read_equipment(DATA / "equipment.csv")
    assert table.value("grinder1", "max_infeed", "H") == pytest.approx(2.20)
    assert "pelleting" in table.stages()

    with pytest.raises(CaseDataError) as error:
        table.by_moisture("grinder9", "max_infeed")
    assert "no row for stage 'grinder9'" in str(error.value)

    path = write(tmp_path / "equipment.csv", (
        "stage,parameter,high,medium,low\n"
        "bale,dry_bulk_density,1,1,1\n"
        "bale,dry_bulk_density,2,2,2\n"))
    with pytest.raises(CaseDataError) as error:
        read_equipment(path)
    assert "row 2: bale dry_bulk_density repeated" in str(error.value)


def test_bad_distribution(tmp_path):
    """
    Carbohydrate values must be fractions.
    """

    path = write(tmp_path / "carbs.csv", "feedstock,carb,weight\nS,60.3,1\n")
    with pytest.raises(CaseDataError) as error:
        read_distributions([path])
    assert "column carb: 60.3 is not a fraction in (0, 1)" in str(error.value)

    path = write(tmp_path / "empty.csv", "feedstock,carb,weight\nS,0.6,0\n")
    with pytest.raises(CaseDataError) as error:
        read_distributions([path])
    assert "empty.csv: S:" in str(error.value)


def test_missing_distribution():
    """
    Every inventory feedstock needs a distribution.
    """

    with pytest.raises(CaseDataError) as error:
        ingest_case_data(case_paths(feedstocks=("C2", "C3", "S")), horizon=100)
    assert "no carbohydrate distribution for M" in str(error.value)


def test_node_without_capacity(tmp_path):
    """
    A conveyor needs a capacity or a stage to take it from.
    """

    path = write(tmp_path / "network.csv", (
        "node,kind,predecessors,stage,capacity,mass_cap,volume_cap,"
        "density_stage,feedstocks,oversize,undersize\n"
        "DC1,conveyor,,,,,,,,,\n"))
    equipment = read_equipment(DATA / "equipment.csv")

    with pytest.raises(CaseDataError) as error:
        read_network(path, equipment, ["L.S"], 10)
    assert "column capacity: DC1 needs a capacity" in str(error.value)


def test_distribution_mean_warning(tmp_path, caplog):
    """
    A histogram far from the inventory mean is logged, not refused.
    """

    inventory = write(tmp_path / "inventory.csv", (
        "feedstock,name,L,M,H,bale_mass,mean_carb\n"
        "S,switchgrass,1,0,0,0.39,66.6\n"))
    carbs = write(tmp_path / "carbs.csv", "feedstock,carb,weight\nS,0.5,1\n")
    paths = CasePaths(
        network=DATA / "network.csv", equipment=DATA / "equipment.csv",
        inventory=inventory, distributions=(carbs,))

    case = ingest_case_data(paths, horizon=100)
    assert case.distributions["S"].mean() == 0.5
    assert "differs from the inventory mean" in caplog.text


# The end.
