"""
tests.conftest
Small networks and bale classes shared by the model, solver and
sampling tests.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


from types import SimpleNamespace

import numpy as np
import pytest

from preoccupied.bioblend.milp import build_core
from preoccupied.bioblend.model import (
    BaleClass, BaleGeometry, ReliabilitySpec, derive_bale_parameters,
    expand_sequence)
from preoccupied.bioblend.network import ProcessNetwork
from preoccupied.bioblend.saa import ScenarioBuilder
from preoccupied.bioblend.sampling import EmpiricalDist
from preoccupied.bioblend.solver import HighsBackend


def line_network(keys, horizon, infeed_cap=1.0, feeder_cap=1.0, grinder_loss=None):
    """
    Infeed conveyor IN straight into reactor feeder RF, with a grinder G
    between them when ``grinder_loss`` is given.
    """

    nodes = [{"kind": "conveyor", "id": "IN", "capacity": {k: infeed_cap for k in keys}}]
    last = "IN"
    if grinder_loss is not None:
        nodes.append({
            "kind": "grinder", "id": "G", "predecessors": ("IN",),
            "capacity": {k: 10.0 for k in keys}, "dry_matter_loss": grinder_loss})
        last = "G"
    nodes.append({
        "kind": "reactor_feeder", "id": "RF", "predecessors": (last,),
        "capacity": {k: feeder_cap for k in keys}})

    return ProcessNetwork(
        nodes=nodes, infeed="IN", reactor_feeders=("RF",),
        horizon=horizon, classes=tuple(sorted(keys)))


@pytest.fixture
def make_line():
    """
    Factory for the straight line networks of :func:`line_network`.
    """

    return line_network


@pytest.fixture
def unit_case():
    """
    Two unit bales of one class through a two node line over four
    periods. Each bale takes one period, so the optimal makespan is 2.
    """

    geometry = BaleGeometry(width=1.0, height=1.0, length=1.0, period_minutes=1.0)
    bale = BaleClass(feedstock="A", moisture="L", mass=1.0, count=2, density=1.0)
    classes = {"L.A": derive_bale_parameters(geometry, bale, 1.0)}
    network = line_network(["L.A"], 4)
    plan = expand_sequence(["L.A", "L.A"], classes, 4)
    reliability = ReliabilitySpec()
    core = build_core(network, plan, geometry, classes, reliability)

    return SimpleNamespace(**locals())


@pytest.fixture
def blend_case():
    """
    Factory for one bale each of feedstocks A and B, A first, with point
    mass carbohydrate contents. The blending window is the whole
    horizon, so whether a sample falls short does not depend on the
    schedule. The optimal makespan is 2.
    """

    def make(carb_a, carb_b, horizon=4):
        geometry = BaleGeometry(width=1.0, height=1.0, length=1.0, period_minutes=1.0)
        keys = ["L.A", "L.B"]
        classes = {
            key: derive_bale_parameters(geometry, BaleClass(
                feedstock=key[2:], moisture="L", mass=1.0, count=1, density=1.0), 1.0)
            for key in keys}
        network = line_network(keys, horizon)
        plan = expand_sequence(keys, classes, horizon)
        dists = [
            EmpiricalDist.from_samples("A", [carb_a]),
            EmpiricalDist.from_samples("B", [carb_b]),
        ]
        builder = ScenarioBuilder(
            network, plan, geometry, classes, ReliabilitySpec(), dists,
            backend=HighsBackend(), verify=True, name="blend")

        return SimpleNamespace(**locals())

    return make


@pytest.fixture
def binned_blend_case():
    """
    Two bales of A then one of B through a metering bin over eight
    periods, blended in two period windows. Fed straight through, B
    fills the second window alone and falls short on its low value,
    which has weight 0.05. Holding some A back in the bin costs a
    period of makespan and keeps every window above the threshold.
    """

    geometry = BaleGeometry(width=1.0, height=1.0, length=1.0, period_minutes=1.0)
    keys = ["L.A", "L.B"]
    counts = {"L.A": 2, "L.B": 1}
    classes = {
        key: derive_bale_parameters(geometry, BaleClass(
            feedstock=key[2:], moisture="L", mass=1.0, count=counts[key],
            density=1.0), 1.0)
        for key in keys}

    network = ProcessNetwork(
        nodes=[
            {"kind": "conveyor", "id": "IN", "capacity": {k: 1.0 for k in keys}},
            {"kind": "metering_bin", "id": "B1", "predecessors": ("IN",),
             "mass_cap": 5.0, "volume_cap": 50.0,
             "processed_density": {k: 0.1 for k in keys}},
            {"kind": "reactor_feeder", "id": "RF", "predecessors": ("B1",),
             "capacity": {k: 1.0 for k in keys}},
        ],
        infeed="IN", reactor_feeders=("RF",), horizon=8, classes=tuple(keys))

    plan = expand_sequence(["L.A", "L.A", "L.B"], classes, 8)
    dists = [
        EmpiricalDist.from_histogram("A", [0.66, 0.70], [1, 1]),
        EmpiricalDist.from_histogram("B", [0.56, 0.62, 0.64], [1, 9, 10]),
    ]
    builder = ScenarioBuilder(
        network, plan, geometry, classes, ReliabilitySpec(), dists,
        window_minutes=2.0, backend=HighsBackend(), verify=True,
        name="binned")

    return SimpleNamespace(**locals())


@pytest.fixture
def tiny_case():
    """
    Factory for seeded random instances small enough for the oracle: at
    most two classes and three bales, with no more than 24 binaries.
    """

    def make(seed):
        rng = np.random.default_rng(seed)
        geometry = BaleGeometry(width=1.0, height=1.0, length=1.0, period_minutes=1.0)

        feedstocks = ["A", "B"][:int(rng.integers(1, 3))]
        keys = [f"L.{b}" for b in feedstocks]
        counts = [int(rng.integers(1, 3)) for _ in keys]
        if sum(counts) > 3:
            counts = [1] * len(keys)

        infeed_cap = float(rng.choice([0.5, 1.0]))
        feeder_cap = float(rng.choice([0.5, 1.0]))
        loss = [None, 0.1][int(rng.integers(0, 2))]

        classes = {}
        for key, feedstock, count in zip(keys, feedstocks, counts):
            density = float(rng.choice([0.5, 1.0]))
            mass = round(density * float(rng.uniform(0.5, 1.0)), 3)
            bale = BaleClass(
                feedstock=feedstock, moisture="L", mass=mass, count=count,
                density=density)
            classes[key] = derive_bale_parameters(geometry, bale, infeed_cap)

        bales = [k for k, c in zip(keys, counts) for _ in range(c)]
        rng.shuffle(bales)
        occupied = sum(classes[k].periods for k in bales)
        limit = 24 // (len(keys) + 1)
        horizon = min(limit, occupied + int(rng.integers(1, 4)))

        network = line_network(keys, horizon, infeed_cap, feeder_cap, loss)
        plan = expand_sequence(bales, classes, horizon)
        reliability = ReliabilitySpec()
        core = build_core(network, plan, geometry, classes, reliability)
        dists = {
            b: EmpiricalDist.from_histogram(b, [0.55, 0.60, 0.65], [1, 2, 1])
            for b in feedstocks}

        return SimpleNamespace(**locals())

    return make


# The end.
