"""
tests.test_sampling
Empirical distributions and seeded sample sets.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import numpy as np
import pytest

from preoccupied.bioblend.sampling import (
    EmpiricalDist, SampleSet, replication_seeds, sample)


def test_histogram_normalized():
    """
    Bin counts become weights summing to one.
    """

    dist = EmpiricalDist.from_histogram("C2", [0.55, 0.60, 0.65], [1, 2, 1], "carbs_C2.csv")
    assert dist.weights == (0.25, 0.5, 0.25)
    assert dist.mean() == pytest.approx(0.60)
    assert dist.label == "carbs_C2.csv"
    assert dist.percentile(0.5) == 0.60
    assert dist.percentile(0.2) == 0.55


def test_invalid_distributions():
    """
    Empty, weightless or out of range distributions are rejected.
    """

    with pytest.raises(ValueError) as error:
        EmpiricalDist(feedstock="S", support=(), weights=())
    assert "distribution for S is empty" in str(error.value)

    with pytest.raises(ValueError) as error:
        EmpiricalDist.from_histogram("S", [0.5], [0])
    assert "histogram for S has no mass" in str(error.value)

    with pytest.raises(ValueError) as error:
        EmpiricalDist.from_samples("S", [0.5, 1.2])
    assert "support values must lie in (0, 1)" in str(error.value)

    with pytest.raises(ValueError) as error:
        EmpiricalDist(feedstock="S", support=(0.5, 0.6), weights=(0.5, 0.6))
    assert "not 1" in str(error.value)


def test_point_mass():
    """
    A single-point distribution always samples its point.
    """

    dist = EmpiricalDist.from_samples("S", [0.591])
    samples = sample([dist], 100, 11)
    assert samples.feedstocks == ("S",)
    assert samples.size == 100
    assert np.all(samples.column("S") == 0.591)


def test_two_point_mean():
    """
    The mean of many draws from an even two-point distribution is close
    to the midpoint.
    """

    dist = EmpiricalDist.from_histogram("M", [0.5, 0.7], [1, 1])
    samples = sample({"M": dist}, 100_000, 2024)
    assert samples.column("M").mean() == pytest.approx(0.6, abs=0.002)


def test_seed_replay():
    """
    The same seed gives the same values; another seed does not.
    """

    dists = [
        EmpiricalDist.from_histogram("S", [0.62, 0.66, 0.70], [1, 2, 1]),
        EmpiricalDist.from_histogram("C2", [0.55, 0.60, 0.65], [1, 2, 1]),
    ]

    first = sample(dists, 50, 7)
    again = sample(list(reversed(dists)), 50, 7)
    other = sample(dists, 50, 8)

    assert first.feedstocks == ("C2", "S")
    assert np.array_equal(first.values, again.values)
    assert not np.array_equal(first.values, other.values)
    assert first.seed == 7


def test_sample_errors():
    """
    At least one sample from at least one distribution.
    """

    dist = EmpiricalDist.from_samples("S", [0.6])
    with pytest.raises(ValueError) as error:
        sample([dist], 0, 1)
    assert "sample size must be at least 1" in str(error.value)

    with pytest.raises(ValueError) as error:
        sample([], 5, 1)
    assert "no distributions" in str(error.value)


def test_sample_set_shape():
    """
    Sample sets hold one column per feedstock and are read only.
    """

    samples = SampleSet(feedstocks=("A", "B"), values=[[0.5, 0.6], [0.7, 0.8]])
    assert samples.size == 2
    assert list(samples.column("B")) == [0.6, 0.8]
    assert samples.aligned(["B", "A"]).tolist() == [[0.6, 0.5], [0.8, 0.7]]

    with pytest.raises(ValueError):
        samples.values[0, 0] = 0.1

    with pytest.raises(KeyError):
        samples.column("C")

    with pytest.raises(ValueError) as error:
        SampleSet(feedstocks=("A",), values=[[0.5, 0.6]])
    assert "2 columns for 1 feedstocks" in str(error.value)

    with pytest.raises(ValueError):
        SampleSet(feedstocks=("A",), values=[])


def test_replication_seeds():
    """
    Replication seeds are reproducible, distinct, and separated by key.
    """

    seeds = replication_seeds(20240, 10)
    assert seeds == replication_seeds(20240, 10)
    assert len(set(seeds)) == 10
    assert replication_seeds(20240, 3) == seeds[:3]

    assert replication_seeds(20240, 3, 1) != seeds[:3]
    assert replication_seeds(20240, 3, 1) != replication_seeds(20240, 3, 2)
    assert replication_seeds(20241, 3) != seeds[:3]


# The end.
