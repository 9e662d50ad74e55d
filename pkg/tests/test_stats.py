"""
tests.test_stats
Normal quantiles and weighted nearest-rank percentiles.

:author: Christopher O'Brien <obriencj@preoccupied.net>
:license: GNU General Public License v3
:ai-assistant: GPT-5 Codex via Cursor
"""


import numpy as np
import pytest
from scipy.stats import norm

from preoccupied.bioblend.stats import inverse_normal_cdf, nearest_rank


def test_known_quantiles():
    """
    Table values of the standard normal quantile.
    """

    assert inverse_normal_cdf(0.99) == pytest.approx(2.326348, abs=1e-5)
    assert inverse_normal_cdf(0.5) == pytest.approx(0.0, abs=1e-12)
    assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-5)
    assert inverse_normal_cdf(0.01) == pytest.approx(-2.326348, abs=1e-5)


@pytest.mark.parametrize("p", np.concatenate([
    np.logspace(-12, -1, 12), np.linspace(0.05, 0.95, 19), 1 - np.logspace(-12, -1, 12)]))
def test_inverts_normal_cdf(p):
    """
    The normal cdf of the quantile gives back the probability across
    the body and both tails.
    """

    assert abs(norm.cdf(inverse_normal_cdf(float(p))) - p) <= 1e-9


def test_symmetry():
    """
    The quantile is odd about one half.
    """

    for p in (1e-6, 0.01, 0.2, 0.4):
        assert inverse_normal_cdf(p) == pytest.approx(-inverse_normal_cdf(1 - p), abs=1e-9)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 1.5])
def test_out_of_range(p):
    """
    Probabilities outside the open unit interval are rejected.
    """

    with pytest.raises(ValueError) as error:
        inverse_normal_cdf(p)
    assert "must lie in (0, 1)" in str(error.value)


def test_nearest_rank():
    """
    The smallest value reaching the requested cumulative weight.
    """

    values = [0.65, 0.55, 0.60]
    weights = [1, 1, 2]

    assert nearest_rank(values, weights, 0.25) == 0.55
    assert nearest_rank(values, weights, 0.5) == 0.60
    assert nearest_rank(values, weights, 0.75) == 0.60
    assert nearest_rank(values, weights, 0.76) == 0.65
    assert nearest_rank(values, weights, 1.0) == 0.65


def test_nearest_rank_errors():
    """
    Empty, mismatched or weightless inputs and bad fractions are errors.
    """

    with pytest.raises(ValueError):
        nearest_rank([], [], 0.5)
    with pytest.raises(ValueError):
        nearest_rank([0.5], [1, 2], 0.5)
    with pytest.raises(ValueError):
        nearest_rank([0.5], [0], 0.5)
    with pytest.raises(ValueError) as error:
        nearest_rank([0.5], [1], 1.5)
    assert "fraction must lie in [0, 1]" in str(error.value)


# The end.
