"""
tests.test_network
Equipment graph queries and structural validation.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from pathlib import Path

import pytest

from preoccupied.bioblend.casedata import read_equipment, read_network
from preoccupied.bioblend.model import MOISTURE_LEVELS, class_key
from preoccupied.bioblend.network import (
    ProcessNetwork, Separator, SurgeBin, validate_network)


DATA = Path(__file__).parent.parent / "preoccupied" / "bioblend" / "data"


@pytest.fixture
def flowsheet():
    """
    The shipped preprocessing flowsheet for every class of the four
    feedstocks, at one minute periods.
    """

    equipment = read_equipment(DATA / "equipment.csv")
    keys = [class_key(m, b) for b in ("C2", "C3", "M", "S") for m in MOISTURE_LEVELS]
    return read_network(DATA / "network.csv", equipment, keys, 120)


def network(*nodes, feeders=("RF",), classes=("L.A",)):
    return ProcessNetwork(
        nodes=nodes, infeed=nodes[0]["id"], reactor_feeders=feeders,
        horizon=4, classes=classes)


def conveyor(node_id, *preds, kind="conveyor", **extra):
    extra.setdefault("capacity", {"L.A": 1.0})
    return {"kind": kind, "id": node_id, "predecessors": preds, **extra}


def codes(net):
    return [v.code for v in validate_network(net)]


def test_flowsheet_is_valid(flowsheet):
    """
    The shipped flowsheet passes validation.
    """

    assert validate_network(flowsheet) == []


def test_flowsheet_structure(flowsheet):
    """
    Node roles and order come from the table rows.
    """

    order = flowsheet.order()
    assert order[0] == "DC1"
    assert order.index("SEP") < order.index("MB") < order.index("P")
    assert [b.id for b in flowsheet.bins()] == ["MB", "S1", "S2", "S3", "S4"]
    assert isinstance(flowsheet.node("S4"), SurgeBin)
    assert isinstance(flowsheet.node("SEP"), Separator)
    assert flowsheet.successors("P") == ("DC4", "DC5", "DC6", "DC7")
    assert flowsheet.reactor_feeders == ("DC8", "DC9", "DC10", "DC11")

    with pytest.raises(KeyError):
        flowsheet.node("DC99")


def test_flowsheet_capacity_per_period(flowsheet):
    """
    Hourly rates convert to dry Mg per one minute period.
    """

    infeed = flowsheet.node("DC1").capacity
    assert infeed["H.S"] == pytest.approx(2.20 / 60)
    assert infeed["L.S"] == pytest.approx(5.23 / 60)
    assert flowsheet.node("SEP").capacity["M.C2"] == pytest.approx(10.0 / 60)
    assert flowsheet.reactor_capacity() == pytest.approx(4 * 5.0 / 60)


def test_flowsheet_yield(flowsheet):
    """
    Mass reaching the reactor loses each grinder's dry matter fraction
    along the path it takes through the separator.
    """

    bypass = 0.4998
    expected = 0.985 * ((1 - bypass) * 0.995 + bypass)
    assert flowsheet.reactor_yield("L.S") == pytest.approx(expected)

    # surge bins carry one feedstock each, so C2 takes the same path
    assert flowsheet.reactor_yield("L.C2") == pytest.approx(expected)


def test_effective_big_m(make_line):
    """
    Without an explicit value, big-M is ten times the longer of the bale
    length and the horizon.
    """

    net = make_line(["L.A"], 4)
    assert net.effective_big_m(2.4) == 40.0
    assert net.effective_big_m(12.0) == 120.0
    assert net.model_copy(update={"big_m": 7.0}).effective_big_m(2.4) == 7.0


def test_line_network_valid(make_line):
    """
    The straight line networks used elsewhere in the tests are valid.
    """

    assert validate_network(make_line(["L.A", "L.B"], 4)) == []
    assert validate_network(make_line(["L.A"], 4, grinder_loss=0.1)) == []
    assert make_line(["L.A"], 4, grinder_loss=0.1).reactor_yield("L.A") == pytest.approx(0.9)


def test_self_loop_is_a_cycle():
    """
    A node feeding itself is reported as a cycle.
    """

    net = network(
        conveyor("IN"),
        conveyor("X", "IN", "X"),
        conveyor("RF", "X", kind="reactor_feeder"))

    found = validate_network(net)
    cycles = [v for v in found if v.code == "cycle"]
    assert len(cycles) == 1
    assert cycles[0].node == "X"
    assert str(cycles[0]) == "cycle at X: X -> X"


def test_grinder_needs_loss():
    """
    A grinder without a dry matter loss is flagged.
    """

    net = network(
        conveyor("IN"),
        conveyor("G", "IN", kind="grinder"),
        conveyor("RF", "G", kind="reactor_feeder"))

    found = validate_network(net)
    assert [(v.code, v.node) for v in found] == [("missing-field", "G")]
    assert "dry matter loss" in found[0].message


def test_orphan_and_dead_end():
    """
    Nodes nothing feeds and nodes feeding nothing are both reported.
    """

    net = network(
        conveyor("IN"),
        conveyor("LOST"),
        conveyor("SPUR", "IN"),
        conveyor("RF", "IN", "LOST", kind="reactor_feeder"))

    found = {(v.code, v.node) for v in validate_network(net)}
    assert ("orphan", "LOST") in found
    assert ("dead-end", "SPUR") in found


def test_unknown_nodes():
    """
    References to missing nodes are reported where they are made.
    """

    net = ProcessNetwork(
        nodes=[conveyor("IN"), conveyor("RF", "GHOST", kind="reactor_feeder")],
        infeed="NOPE", reactor_feeders=("RF", "MISSING"), horizon=4,
        classes=("L.A",))

    found = {(v.code, v.node) for v in validate_network(net)}
    assert ("unknown-node", "NOPE") in found
    assert ("unknown-node", "MISSING") in found
    assert ("unknown-node", "RF") in found


def test_split_without_separator():
    """
    A class with two ways out of a plain node cannot be routed.
    """

    net = network(
        conveyor("IN"),
        conveyor("RF", "IN", kind="reactor_feeder"),
        conveyor("RF2", "IN", kind="reactor_feeder"),
        feeders=("RF", "RF2"))

    assert codes(net) == ["split"]
    with pytest.raises(ValueError) as error:
        net.reactor_yield("L.A")
    assert "splits at IN" in str(error.value)


def test_feedstock_filter_unroutable():
    """
    A class no reactor feeder accepts is unroutable.
    """

    net = network(
        conveyor("IN"),
        conveyor("RF", "IN", kind="reactor_feeder", feedstocks=("B",)),
        classes=("L.A",))

    found = validate_network(net)
    assert ("unroutable", None) in {(v.code, v.node) for v in found}
    assert any("cannot reach a reactor feeder" in v.message for v in found)


def test_missing_capacity_and_bin_fields():
    """
    Conveying nodes need a capacity per class; bins need caps and a
    processed density.
    """

    net = network(
        conveyor("IN"),
        {"kind": "metering_bin", "id": "MB", "predecessors": ("IN",)},
        conveyor("RF", "MB", kind="reactor_feeder", capacity={}))

    found = [(v.code, v.node, v.message) for v in validate_network(net)]
    assert ("missing-capacity", "RF", "no capacity for class L.A") in found
    assert ("missing-field", "MB", "bin has no mass capacity") in found
    assert ("missing-field", "MB", "bin has no volume capacity") in found
    assert ("missing-field", "MB", "bin has no processed density for L.A") in found


def test_bin_cannot_feed_reactor():
    """
    Reactor feeders must be conveying equipment.
    """

    net = network(
        conveyor("IN"),
        {"kind": "surge_bin", "id": "RF", "predecessors": ("IN",),
         "mass_cap": 1.0, "volume_cap": 1.0, "processed_density": {"L.A": 1.0}})

    assert ("role", "RF") in {(v.code, v.node) for v in validate_network(net)}


def test_separator_outlets():
    """
    Separator outlets must exist, differ and be fed by the separator
    alone.
    """

    net = network(
        conveyor("IN"),
        conveyor("SEP", "IN", kind="separator", bypass_ratio={"L.A": 0.5},
                 oversize_outlet="RF", undersize_outlet="RF"),
        conveyor("RF", "SEP", kind="reactor_feeder"))

    found = {(v.code, v.node) for v in validate_network(net)}
    assert ("role", "SEP") in found

    net = network(
        conveyor("IN"),
        conveyor("SEP", "IN", kind="separator", undersize_outlet="NOWHERE"),
        conveyor("RF", "SEP", kind="reactor_feeder"))

    messages = [v.message for v in validate_network(net)]
    assert "separator has no bypass ratio for L.A" in messages
    assert "separator has no oversize outlet" in messages
    assert "undersize outlet NOWHERE does not exist" in messages


def test_bypass_ratio_range():
    """
    Bypass ratios are fractions.
    """

    with pytest.raises(ValueError) as error:
        sep = conveyor("SEP", "IN", kind="separator", bypass_ratio={"L.A": 1.5})
        network(conveyor("IN"), sep, conveyor("RF", "SEP", kind="reactor_feeder"))
    assert "must lie in [0, 1]" in str(error.value)


# The end.
