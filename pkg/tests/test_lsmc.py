import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reference import laguerre_explicit

from capped_lsmc import (NEVER, BasisSpec, CapSpec, MarketParams, PayoffSpec, TimeGrid,
                         backward_induct, basis_eval, cap_indices, fit_continuation, payoff,
                         price, simulate)
from capped_lsmc.caps import CapIndices


def test_basis_examples():
    np.testing.assert_array_equal(basis_eval(BasisSpec(3), 0.0), [1.0, 1.0, 1.0])
    np.testing.assert_allclose(basis_eval(BasisSpec(2), 1.0), [math.exp(-0.5), 0.0],
                               atol=1e-16)
    e = math.exp(-1.0)
    np.testing.assert_allclose(basis_eval(BasisSpec(3), 2.0), [e, -e, -e], rtol=1e-14)


def test_basis_matches_closed_form():
    x = np.linspace(0, 6, 61)
    phi = basis_eval(BasisSpec(8), x)
    for k in range(8):
        ref = [math.exp(-v / 2) * laguerre_explicit(k, v) for v in x]
        np.testing.assert_allclose(phi[:, k], ref, rtol=1e-11, atol=1e-13)


def test_basis_rejects_negative():
    with pytest.raises(ValueError):
        basis_eval(BasisSpec(3), -0.1)
    with pytest.raises(ValueError):
        BasisSpec(0)


@settings(max_examples=50, deadline=None)
@given(m=st.integers(1, 7), seed=st.integers(0, 1000))
def test_basis_full_rank_on_distinct_points(m, seed):
    x = np.sort(np.random.default_rng(seed).uniform(0.2, 3.0, m))
    if np.min(np.diff(x), initial=1.0) < 1e-3:
        return
    assert np.linalg.matrix_rank(basis_eval(BasisSpec(m), x)) == m


def test_fit_one_basis_closed_form():
    x = np.array([0.7, 1.9])
    y = np.array([3.0, -1.5])
    phi0 = np.exp(-x / 2)
    expected = (phi0[0] * y[0] + phi0[1] * y[1]) / (phi0[0] ** 2 + phi0[1] ** 2)
    st_ = fit_continuation(x, y, BasisSpec(1))
    assert st_.coef[0] == pytest.approx(expected, rel=1e-13)
    assert st_.full_rank


def test_fit_zero_targets():
    st_ = fit_continuation(np.linspace(0.5, 2, 20), np.zeros(20), BasisSpec(4))
    assert np.array_equal(st_.coef, np.zeros(4))
    assert st_.rank_flag == "deficient"


def test_fit_no_rows():
    st_ = fit_continuation(np.array([]), np.array([]), BasisSpec(3))
    assert np.array_equal(st_.coef, np.zeros(3)) and not st_.full_rank


def test_fit_recovers_exact_coefficients():
    x = np.linspace(0.3, 2.5, 50)
    alpha = np.array([1.5, -2.0, 0.75])
    y = basis_eval(BasisSpec(3), x) @ alpha
    st_ = fit_continuation(x, y, BasisSpec(3))
    np.testing.assert_allclose(st_.coef, alpha, atol=1e-8)
    assert st_.n_rows == 50


def test_fit_rank_deficient_uses_ridge():
    x = np.array([1.0, 1.0, 2.0, 2.0])
    y = np.array([1.0, 1.2, 0.5, 0.4])
    st_ = fit_continuation(x, y, BasisSpec(4))
    assert not st_.full_rank
    assert np.all(np.isfinite(st_.coef))
    # ridge solution still fits the two distinct states in the mean
    fitted = basis_eval(BasisSpec(4), np.array([1.0, 2.0])) @ st_.coef
    np.testing.assert_allclose(fitted, [1.1, 0.45], atol=1e-4)


def test_fit_minimises_squared_error():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.2, 2.0, 300)
    y = np.maximum(1.1 - x, 0) + 0.05 * rng.standard_normal(300)
    spec = BasisSpec(4)
    st_ = fit_continuation(x, y, spec)
    phi = basis_eval(spec, x)
    best = np.sum((phi @ st_.coef - y) ** 2)
    for _ in range(50):
        trial = st_.coef + 1e-3 * rng.standard_normal(4)
        assert np.sum((phi @ trial - y) ** 2) >= best


def _run(params, cap, n=2000, steps=50, seed=0, **kw):
    pay = PayoffSpec("put", params.strike)
    ps = simulate(params, TimeGrid(params.maturity, steps), n, seed)
    caps = cap_indices(cap, ps)
    return ps, caps, backward_induct(ps, caps, pay, BasisSpec(5), params, cap=cap, **kw)


def test_single_step_is_european_vs_immediate(gbm):
    ps, caps, res = _run(gbm, CapSpec(), steps=1)
    disc = math.exp(-gbm.rate) * payoff(PayoffSpec("put", 110), ps.prices[:, 1])
    assert res.price == pytest.approx(max(10.0, disc.mean()), rel=1e-14)
    assert res.steps == []


def test_capped_at_issue_pays_immediately(gbm):
    ps, caps, res = _run(gbm, CapSpec.drawdown(0.04))
    assert res.price == 10.0
    assert res.std_error == 0.0
    assert np.all(res.exercise_index == 0)


def test_never_exercise_after_cap(levy):
    ps, caps, res = _run(levy, CapSpec.drawdown(0.2), steps=80)
    assert np.all(res.exercise_index <= np.minimum(caps.kappa, 80))


def test_capped_paths_pay_at_cap_exactly(levy):
    ps, caps, res = _run(levy, CapSpec.drawdown(0.2), steps=80)
    capped = caps.kappa <= 80
    early = res.exercise_index < caps.kappa
    assert np.all(res.exercise_index[capped & ~early] == caps.kappa[capped & ~early])
    capped &= ~early
    assert capped.sum() > 100
    k = caps.kappa[capped]
    g = payoff(PayoffSpec("put", 110), ps.prices[capped, k])
    expected = g * np.exp(-levy.rate * ps.grid.delta * k)
    assert np.array_equal(res.cashflows[capped], expected)


def test_price_at_least_immediate_payoff(gbm):
    for C in (0.06, 0.1, 0.5, 1.0):
        _, _, res = _run(gbm, CapSpec.drawdown(C), n=500)
        assert res.price >= 10.0 - 1e-12


def test_dominates_fixed_rule(levy):
    ps, caps, res = _run(levy, CapSpec.drawdown(0.3), steps=60)
    e = np.minimum(caps.kappa, 60)
    g = payoff(PayoffSpec("put", 110), ps.prices[np.arange(ps.n_paths), e])
    fixed = np.mean(g * np.exp(-levy.rate * ps.grid.delta * e))
    assert res.price + 2 * res.std_error >= fixed


def test_capped_below_uncapped(levy):
    _, _, free = _run(levy, CapSpec.drawdown(1.0), steps=60, seed=5)
    for C in (0.1, 0.3, 0.6):
        _, _, capped = _run(levy, CapSpec.drawdown(C), steps=60, seed=5)
        assert capped.price <= free.price + 2 * math.hypot(free.std_error, capped.std_error)


def test_european_flag_is_plain_discounted_mean(gbm):
    ps, caps, res = _run(gbm, CapSpec(), steps=40, european=True)
    L = 40
    g = payoff(PayoffSpec("put", 110), ps.prices[:, L])
    cf = g * np.exp(-gbm.rate * ps.grid.delta * np.full(ps.n_paths, L))
    assert res.price == cf.mean()


def test_deterministic_cap_at_maturity_equals_uncapped(levy):
    _, _, a = _run(levy, CapSpec(), steps=30, seed=3)
    _, _, b = _run(levy, CapSpec.deterministic(1.0), steps=30, seed=3)
    assert a.price == b.price


def test_dimension_mismatch(gbm):
    ps = simulate(gbm, TimeGrid(1.0, 10), 20, seed=0)
    caps = CapIndices(np.full(19, NEVER, dtype=np.int64))
    with pytest.raises(ValueError):
        backward_induct(ps, caps, PayoffSpec("put", 110), BasisSpec(3), gbm)


def test_degenerate_deep_otm():
    p = MarketParams(s0=100, strike=1.0, maturity=1, rate=0.05, sigma=0.2)
    _, _, res = _run(p, CapSpec(), n=300, steps=20)
    assert res.price == 0.0
    assert all(not s.full_rank for s in res.steps)
    assert all(np.array_equal(s.coef, np.zeros(5)) for s in res.steps)


def test_alive_only_with_everything_capped(gbm):
    _, _, res = _run(gbm, CapSpec.drawdown(0.04), alive_only=True)
    assert res.price == 10.0
    assert all(s.n_rows == 0 for s in res.steps)


@pytest.mark.parametrize("flags", [dict(itm_only=True), dict(alive_only=True),
                                   dict(itm_only=True, alive_only=True)])
def test_regression_variants_close_to_default(levy, flags):
    _, _, base = _run(levy, CapSpec.drawdown(0.3), steps=50, seed=2)
    _, _, var = _run(levy, CapSpec.drawdown(0.3), steps=50, seed=2, **flags)
    assert abs(var.price - base.price) < 0.05 * base.price


def test_price_is_deterministic(levy):
    a = price(levy, "put", CapSpec.drawdown(0.3), n_paths=500, n_steps=40, seed=7)
    b = price(levy, "put", CapSpec.drawdown(0.3), n_paths=500, n_steps=40, seed=7)
    assert a.price == b.price and a.std_error == b.std_error
    assert np.array_equal(a.cashflows, b.cashflows)


def test_independent_cap_pricing(gbm):
    # huge cap rate: option is forced to pay at t_1 on every path
    res = price(gbm, "put", CapSpec.exponential(1e9, sub_seed=1), n_paths=2000, n_steps=20,
                seed=1)
    assert np.all(res.exercise_index == 1)
    slow = price(gbm, "put", CapSpec.exponential(0.01, sub_seed=1), n_paths=2000,
                 n_steps=20, seed=1)
    assert res.price <= slow.price


def test_call_payoff_runs():
    p = MarketParams(s0=100, strike=100, maturity=1, rate=0.05, sigma=0.3)
    res = price(p, "call", CapSpec.drawdown(0.5), n_paths=2000, n_steps=40, seed=0)
    from capped_lsmc import bs_european_put
    # no dividends: an uncapped American call is worth the European call
    call_bs = bs_european_put(100, 100, 0.05, 0.3, 1.0) + 100 - 100 * math.exp(-0.05)
    assert 0 < res.price < call_bs + 3 * res.std_error


def test_result_csv_and_coefficients(gbm):
    res = price(gbm, "put", CapSpec.drawdown(0.3), n_paths=200, n_steps=5, n_basis=3,
                seed=4)
    buf = io.StringIO()
    res.write_csv(buf)
    head, row = buf.getvalue().splitlines()
    assert head == "price,std_error,n_paths,n_steps,n_basis,seed,cap_kind,cap_level"
    fields = row.split(",")
    assert float(fields[0]) == res.price
    assert fields[2:] == ["200", "5", "3", "4", "drawdown", "0.3"]
    buf = io.StringIO()
    res.write_coefficients(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "j,alpha_0,alpha_1,alpha_2,rank_flag"
    assert [int(l.split(",")[0]) for l in lines[1:]] == [1, 2, 3, 4]
    assert all(l.endswith((",full", ",deficient")) for l in lines[1:])
