import math

import pytest

from reference import (bs_put_quadrature, enumerate_stopping_rules, history_tree_put,
                       tree_factors)

from capped_lsmc import bs_european_put, crr_american_put, lattice_capped_put
from capped_lsmc.oracles import lattice_factors
from capped_lsmc import _kernels_numpy, kernels

GBM = dict(s0=100.0, K=110.0, r=0.1, sigma=0.4, T=1.0)


def test_bs_zero_vol():
    assert bs_european_put(100, 110, 0.1, 0.0, 1.0) == 0.0
    assert bs_european_put(100, 120, 0.1, 0.0, 1.0) == pytest.approx(
        120 * math.exp(-0.1) - 100, rel=1e-15)


def test_bs_zero_strike():
    assert bs_european_put(100, 0.0, 0.1, 0.4, 1.0) == 0.0


@pytest.mark.parametrize("s0, K, r, sigma, T", [
    (100, 110, 0.1, 0.4, 1.0), (100, 90, 0.05, 0.2, 0.5), (80, 100, 0.0, 0.3, 2.0),
])
def test_bs_matches_quadrature(s0, K, r, sigma, T):
    assert bs_european_put(s0, K, r, sigma, T) == pytest.approx(
        bs_put_quadrature(s0, K, r, sigma, T), abs=1e-6)


def test_crr_one_step_by_hand():
    u = math.exp(0.4)
    d = 1 / u
    p = (math.exp(0.1) - d) / (u - d)
    hold = math.exp(-0.1) * (p * max(110 - 100 * u, 0) + (1 - p) * max(110 - 100 * d, 0))
    expected = max(10.0, hold)
    assert crr_american_put(100, 110, 0.1, 0.4, 1.0, 1) == pytest.approx(expected, rel=1e-14)


def test_crr_dominates_european():
    am = crr_american_put(100, 110, 0.1, 0.4, 1.0, 2000)
    eu = bs_european_put(100, 110, 0.1, 0.4, 1.0)
    assert am >= eu


def test_crr_low_vol_exercises_now():
    # drift dominates: holding only loses the interest on K
    assert crr_american_put(100, 110, 0.1, 0.02, 1.0, 100) == 10.0


def test_crr_converges():
    a = crr_american_put(100, 110, 0.1, 0.4, 1.0, 1000)
    b = crr_american_put(100, 110, 0.1, 0.4, 1.0, 2000)
    assert abs(a - b) <= 0.02


def test_crr_bad_probability():
    with pytest.raises(ValueError):
        crr_american_put(100, 110, 0.5, 0.01, 1.0, 2)


def test_lattice_uncapped_is_crr():
    for L in (1, 5, 24, 300):
        assert lattice_capped_put(100, 105, 110, 0.1, 0.4, 1.0, L, 1.0) == \
            crr_american_put(100, 110, 0.1, 0.4, 1.0, L)


def test_lattice_dp_without_cap_agrees_with_crr():
    # the full capped DP with a level that can never bind
    for L in (3, 12, 24):
        u, p, disc = lattice_factors(0.1, 0.4, 1.0, L)
        dp = kernels.capped_lattice_put(100.0, 105.0, 110.0, u, p, disc, L, 2.0, 2 * L)
        assert dp == pytest.approx(crr_american_put(100, 110, 0.1, 0.4, 1.0, L), rel=1e-12)


def test_lattice_capped_at_issue():
    assert lattice_capped_put(100, 105, 110, 0.1, 0.4, 1.0, 20, 0.04) == 10.0
    assert lattice_capped_put(100, 105, 90, 0.1, 0.4, 1.0, 20, 1 - 100 / 105) == 0.0


@pytest.mark.parametrize("steps", [1, 2, 3, 4])
@pytest.mark.parametrize("level", [0.05, 0.2, 0.35])
def test_lattice_matches_stopping_rule_enumeration(steps, level):
    args = (100.0, 105.0, 110.0, 0.1, 0.4, 1.0, steps, level)
    assert lattice_capped_put(*args) == pytest.approx(enumerate_stopping_rules(*args),
                                                      rel=1e-12)


@pytest.mark.parametrize("steps", [5, 8, 10])
@pytest.mark.parametrize("level", [0.1, 0.2, 0.5])
def test_lattice_matches_history_tree(steps, level):
    args = (100.0, 105.0, 110.0, 0.1, 0.4, 1.0, steps, level)
    assert lattice_capped_put(*args) == pytest.approx(history_tree_put(*args), rel=1e-12)


def test_lattice_other_params_match_history_tree():
    args = (100.0, 100.0, 100.0, 0.05, 0.3, 0.5, 9, 0.15)
    assert lattice_capped_put(*args) == pytest.approx(history_tree_put(*args), rel=1e-12)


def test_lattice_monotone_in_level():
    vals = [lattice_capped_put(100, 105, 110, 0.1, 0.4, 1.0, 24, c)
            for c in (0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_lattice_backends_agree():
    u, p, disc = lattice_factors(0.1, 0.4, 1.0, 40)
    args = (100.0, 105.0, 110.0, u, p, disc, 40, 0.2, 8)
    assert kernels.capped_lattice_put(*args) == pytest.approx(
        _kernels_numpy.capped_lattice_put(*args), rel=1e-13)


def test_tree_factor_helpers_agree():
    assert lattice_factors(0.1, 0.4, 1.0, 7) == pytest.approx(tree_factors(0.1, 0.4, 1.0, 7))
