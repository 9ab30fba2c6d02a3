"""Optimizers against published values and independent brute-force oracles.

The oracles in this file deliberately avoid the package's evaluation path:
rates come from re-derived utility thresholds, stocking values from the
marginal-increment identity sum_j max(0, p*P(D>=j) - cost) with
scipy.stats.poisson survival probabilities, and quantile/cdf calls go
through scipy.stats rather than the package's gamma-function route.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from remanopt import poisson
from remanopt._kernels import EXPECTATION, TABLE
from remanopt.market import Contract, CostStructure, MarketParams, Perception, Region
from remanopt.models import (
    Decision,
    critical_quantity,
    evaluate_decision,
    evaluate_tpr,
    optimize_model_n,
    optimize_model_o,
    optimize_model_t,
    profit_model_n,
    profit_model_o,
    tpr_best_response,
)

PAPER = MarketParams(lam=1000, V=1000, delta=0.8)
COSTS = CostStructure(c=200, c_r=80, c_coll=40)
CONTRACT = Contract(H=10000, h=100)
SMALL = MarketParams(lam=50, V=1000, delta=0.8)


# ---------------------------------------------------------------------------
# oracle helpers
# ---------------------------------------------------------------------------

def oracle_rates(p_n, p_r, alpha, beta, v_n, lam):
    """Demand rates straight from the utility thresholds."""
    v_r = alpha * v_n
    g = v_n + beta * (v_n - v_r)
    gap = (1 + beta) * (1 - alpha) * v_n
    t3 = p_r / v_r if v_r > 0 else (0.0 if p_r == 0 else math.inf)
    t2 = p_n / g if g > 0 else math.inf
    if gap > 0:
        t1 = (p_n - p_r) / gap
    else:
        t1 = math.inf if p_n > p_r else t3
    rate_n = max(0.0, (1 - min(1.0, max(t1, t2)))) * lam
    rate_r = max(0.0, min(1.0, t1) - min(1.0, t3)) * lam
    return rate_n, rate_r


def oracle_best_stock_value(p, rate, unit_cost, cap=None):
    """max_q [p E[min(D,q)] - cost q] via positive marginal increments."""
    if rate <= 0 or p <= unit_cost:
        return 0.0
    if cap is None:
        cap = int(rate + 8 * math.sqrt(rate)) + 12
    j = np.arange(1, cap + 1)
    marginal = p * stats.poisson.sf(j - 1, rate) - unit_cost
    return float(np.maximum(marginal, 0.0).sum())


def oracle_table_value(p, rate, unit_cost):
    """Reduced-form value at the min-k fractile, via scipy.stats."""
    if rate <= 0 or p <= unit_cost:
        return 0.0
    q = int(stats.poisson.ppf(1 - unit_cost / p, rate))
    if q <= 0:
        return 0.0
    return float(p * rate * stats.poisson.cdf(q - 1, rate))


def oracle_single_scan(v_eff, unit_cost, lam, step, objective):
    best = 0.0
    n = int(round((v_eff - unit_cost) / step))
    for i in range(1, n):
        p = unit_cost + i * step
        rate = (1 - p / v_eff) * lam
        if objective == TABLE:
            val = oracle_table_value(p, rate, unit_cost)
        else:
            val = oracle_best_stock_value(p, rate, unit_cost)
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# critical quantity
# ---------------------------------------------------------------------------

class TestCriticalQuantity:
    def test_published_approximate_point(self):
        assert critical_quantity(500.0, 200.0, 375.0) == 380

    def test_published_exact_point(self):
        rate = (1 - 497.74 / 800) * 1000
        assert critical_quantity(497.74, 200.0, rate) == 383

    def test_price_at_cost_stocks_nothing(self):
        # fractile below the no-demand mass e^{-rate}: nothing is worth stocking
        assert critical_quantity(200.0 / (1 - 1e-3), 200.0, 5.0) == 0
        # at or below cost the rule returns 0 rather than erroring
        assert critical_quantity(150.0, 200.0, 375.0) == 0
        assert critical_quantity(200.0, 200.0, 375.0) == 0

    def test_first_difference_sign_change(self):
        # increment profitable up to q*, unprofitable at q*
        for p, cost, rate in [(500, 200, 375), (333.33, 120, 211.5), (700, 650, 50)]:
            q = critical_quantity(p, cost, rate)
            if q > 0:
                assert p * (1 - poisson.cdf(q - 1, rate)) - cost > 0
            assert p * (1 - poisson.cdf(q, rate)) - cost <= 0

    def test_floor_rule_drops_at_most_one(self):
        for p, cost, rate in [(500, 200, 375), (430, 120, 333)]:
            mink = critical_quantity(p, cost, rate, "min-k")
            floor = critical_quantity(p, cost, rate, "floor")
            assert floor in (mink - 1, mink)


# ---------------------------------------------------------------------------
# profit functions
# ---------------------------------------------------------------------------

class TestProfitFunctions:
    def test_no_stock_no_profit(self):
        assert profit_model_n(400.0, 0, PAPER, COSTS) == 0.0

    def test_matches_series_oracle(self):
        rate = 375.0
        want = 500 * float(
            sum(min(k, 380) * stats.poisson.pmf(k, rate) for k in range(0, 700))
        ) - 200 * 380
        assert profit_model_n(500.0, 380, PAPER, COSTS) == pytest.approx(want, abs=1e-6)

    def test_rejects_out_of_support_price(self):
        with pytest.raises(ValueError):
            profit_model_n(900.0, 10, PAPER, COSTS)

    def test_model_o_zero_stock(self):
        perc = Perception(0.8, -0.1)
        assert profit_model_o(492.0, 0, 380.0, 0, PAPER, perc, COSTS) == 0.0

    def test_model_o_rejects_contrast(self):
        with pytest.raises(ValueError):
            profit_model_o(492.0, 1, 380.0, 1, PAPER, Perception(0.8, 0.1), COSTS)

    def test_new_only_prices_make_reman_stock_pure_cost(self):
        # region II: reman demand zero, stocking it only burns money
        perc = Perception(0.8, -0.1)
        p_n, p_r = 400.0, 390.0  # t1 well below t3
        with_stock = profit_model_o(p_n, 100, p_r, 25, PAPER, perc, COSTS)
        without = profit_model_o(p_n, 100, p_r, 0, PAPER, perc, COSTS)
        assert with_stock == pytest.approx(without - 25 * COSTS.reman_unit_cost)

    def test_sawtooth_concavity_in_quantity(self):
        # second difference equals -p * pmf(q+1, rate): negative wherever it
        # is representable at all in float64
        rng = np.random.default_rng(3)
        for _ in range(100):
            p = rng.uniform(210, 790)
            rate = (1 - p / 800) * 1000
            q_star = critical_quantity(p, 200.0, rate)
            prev = profit_model_n(p, 0, PAPER, COSTS)
            cur = profit_model_n(p, 1, PAPER, COSTS)
            for q in range(1, q_star + 20):
                nxt = profit_model_n(p, q + 1, PAPER, COSTS)
                second = nxt - 2 * cur + prev
                analytic = -p * poisson.pmf(q + 1, rate)
                # evaluation noise floor: relative error of the gamma-based
                # cdf scaled by p * rate
                noise = p * rate * 5e-12 + 1e-9
                assert second <= noise
                if -analytic > 10 * noise:
                    assert second < 0
                prev, cur = cur, nxt

    def test_critical_quantity_is_argmax(self):
        rng = np.random.default_rng(4)
        for _ in range(40):
            p = rng.uniform(210, 790)
            rate = (1 - p / 800) * 1000
            q = critical_quantity(p, 200.0, rate)
            here = profit_model_n(p, q, PAPER, COSTS)
            assert here >= profit_model_n(p, q + 1, PAPER, COSTS)
            if q > 0:
                assert here >= profit_model_n(p, q - 1, PAPER, COSTS)


# ---------------------------------------------------------------------------
# Model N optimizer
# ---------------------------------------------------------------------------

class TestOptimizeN:
    def test_published_optimum(self):
        t0 = time.perf_counter()
        out = optimize_model_n(PAPER, COSTS, 0.01)
        elapsed = time.perf_counter() - t0
        assert out.decision.p_n == pytest.approx(497.74, abs=0.01)
        assert out.decision.q_n == 383
        assert out.oem_profit == pytest.approx(112488.44, abs=0.5)
        assert elapsed < 5.0

    def test_no_profitable_price(self):
        params = MarketParams(lam=1000, V=1000, delta=0.15)  # new value 150 < c
        out = optimize_model_n(params, COSTS, 0.5)
        assert out.decision.q_n is None
        assert out.oem_profit == 0.0

    @pytest.mark.parametrize("objective", [TABLE, EXPECTATION])
    def test_small_market_matches_brute_force(self, objective):
        step = 0.5
        out = optimize_model_n(SMALL, COSTS, step, objective=objective)
        want = oracle_single_scan(800.0, 200.0, 50, step, objective)
        assert out.oem_profit == pytest.approx(want, rel=1e-12)

    def test_outcome_reevaluates(self):
        out = optimize_model_n(PAPER, COSTS, 0.05)
        again = evaluate_decision(out.decision, "N", PAPER, None, COSTS)
        assert again == pytest.approx(out.oem_profit, rel=1e-9)
        exp = evaluate_decision(
            out.decision, "N", PAPER, None, COSTS, objective=EXPECTATION
        )
        assert exp == pytest.approx(out.oem_expected_profit, rel=1e-9)


# ---------------------------------------------------------------------------
# Model O optimizer
# ---------------------------------------------------------------------------

class TestOptimizeO:
    def test_published_optimum(self):
        out = optimize_model_o(PAPER, Perception(0.8, -0.1), COSTS, 0.1)
        assert out.decision.p_n == pytest.approx(492.3, abs=0.1)
        assert out.decision.p_r == pytest.approx(380.0, abs=0.1)
        assert (out.decision.q_n, out.decision.q_r) == (224, 193)
        assert out.oem_profit == pytest.approx(112692.76, abs=1.0)
        assert out.region is Region.COEXISTENCE

    def test_worthless_reman_collapses_to_new_only(self):
        out = optimize_model_o(PAPER, Perception(0.0, -0.4), COSTS, 0.05)
        n = optimize_model_n(PAPER, COSTS, 0.05)
        assert out.oem_profit == pytest.approx(n.oem_profit, rel=1e-12)
        assert out.decision.p_r is None

    def test_rejects_contrast_perception(self):
        with pytest.raises(ValueError):
            optimize_model_o(PAPER, Perception(0.5, 0.2), COSTS, 0.1)

    @pytest.mark.parametrize("objective", [TABLE, EXPECTATION])
    def test_small_market_matches_brute_force(self, objective):
        step = 2.0
        alpha, beta = 0.7, -0.2
        perc = Perception(alpha, beta)
        out = optimize_model_o(SMALL, perc, COSTS, step, objective=objective)

        def value(p, rate, cost):
            if objective == TABLE:
                return oracle_table_value(p, rate, cost)
            return oracle_best_stock_value(p, rate, cost, cap=140)

        best = 0.0
        # single-product axes
        best = max(best, oracle_single_scan(800.0, 200.0, 50, step, objective))
        best = max(best, oracle_single_scan(0.7 * 800, 120.0, 50, step, objective))
        # coexistence pairs: a pair is on the market only if both sides
        # actually stock at least one unit at their critical fractiles
        n_n = int(round((800 * (1 + beta - alpha * beta) - 200) / step))
        n_r = int(round((0.7 * 800 - 120) / step))
        for i in range(1, n_n):
            p_n = 200 + i * step
            for j in range(1, n_r):
                p_r = 120 + j * step
                if p_r > p_n:
                    continue
                rate_n, rate_r = oracle_rates(p_n, p_r, alpha, beta, 800.0, 50)
                if rate_n <= 0 or rate_r <= 0:
                    continue
                if (
                    p_n * stats.poisson.sf(0, rate_n) <= 200.0
                    or p_r * stats.poisson.sf(0, rate_r) <= 120.0
                ):
                    continue  # a fractile of zero: side not on the market
                best = max(
                    best, value(p_n, rate_n, 200.0) + value(p_r, rate_r, 120.0)
                )
        assert out.oem_profit == pytest.approx(best, rel=1e-12)

    def test_outcome_reevaluates(self):
        perc = Perception(0.8, -0.1)
        out = optimize_model_o(PAPER, perc, COSTS, 0.1)
        again = evaluate_decision(out.decision, "O", PAPER, perc, COSTS)
        assert again == pytest.approx(out.oem_profit, rel=1e-9)


# ---------------------------------------------------------------------------
# Model T: follower and leader
# ---------------------------------------------------------------------------

class TestFollower:
    def test_huge_fixed_fee_declines(self):
        resp = tpr_best_response(
            600.0, PAPER, Perception(0.8, 0.2), COSTS, Contract(H=1e9, h=100), 0.1
        )
        assert resp is None

    def test_near_monopoly_closed_form(self):
        # tiny fees, leader priced out: response approaches (c_r + v_r)/2 = 360
        # up to the usual discrete-optimum deviation (same ~0.5% scale as the
        # published new-only row), and matches a brute-force scan exactly
        resp = tpr_best_response(
            5000.0,
            MarketParams(lam=1000, V=1000, delta=0.8),
            Perception(0.8, 0.0),
            COSTS,
            Contract(H=0.0, h=0.01),
            0.01,
        )
        assert resp is not None
        assert resp[0] == pytest.approx(360.0, abs=3.0)
        m_f = COSTS.c_r + 0.01
        p_grid = m_f + np.arange(1, int(round((640 - m_f) / 0.01))) * 0.01
        rates = (1 - p_grid / 640.0) * 1000
        vals = np.array(
            [oracle_table_value(p, r, m_f) for p, r in zip(p_grid, rates)]
        )
        i = int(np.argmax(vals))
        assert resp[0] == pytest.approx(p_grid[i], abs=1e-9)
        assert resp[2] == pytest.approx(vals[i], rel=1e-12)

    def test_idempotent_at_leader_optimum(self):
        perc = Perception(0.6, 0.3)
        out = optimize_model_t(PAPER, perc, COSTS, CONTRACT, 0.1)
        assert not out.authorization_declined
        resp = tpr_best_response(out.decision.p_n, PAPER, perc, COSTS, CONTRACT, 0.1)
        assert resp == (out.decision.p_r, out.decision.q_r, out.tpr_profit)

    def test_matches_brute_force(self):
        perc = Perception(0.7, 0.25)
        p_n = 520.0
        step = 0.5
        resp = tpr_best_response(p_n, PAPER, perc, COSTS, CONTRACT, step)
        m_f = COSTS.c_r + CONTRACT.h
        best = None
        n = int(round((min(p_n, 0.7 * 800) - m_f) / step))
        for i in range(1, n):
            p_r = m_f + i * step
            _, rate_r = oracle_rates(p_n, p_r, 0.7, 0.25, 800.0, 1000)
            val = oracle_table_value(p_r, rate_r, m_f) - CONTRACT.H
            if best is None or val > best[1]:
                q = int(stats.poisson.ppf(1 - m_f / p_r, rate_r)) if rate_r > 0 else 0
                best = (p_r, val, q)
        assert resp is not None
        assert resp[2] == pytest.approx(best[1], rel=1e-12)
        assert resp[0] == pytest.approx(best[0], abs=1e-9)


class TestOptimizeT:
    def test_beats_n_and_o_at_moderate_perception(self):
        perc_t = Perception(0.6, 0.3)
        t = optimize_model_t(PAPER, perc_t, COSTS, CONTRACT, 0.1)
        n = optimize_model_n(PAPER, COSTS, 0.1)
        o = optimize_model_o(PAPER, Perception(0.6, -0.3), COSTS, 0.1)
        assert not t.authorization_declined
        assert t.oem_profit > n.oem_profit
        assert t.oem_profit > o.oem_profit

    def test_vanishing_channel_degenerates_to_n(self):
        # worthless remanufactured product: follower cannot sell, leader
        # falls back to the plain new-only optimum
        out = optimize_model_t(
            PAPER, Perception(0.01, 0.0), COSTS, Contract(H=0.0, h=40.0), 0.1
        )
        n = optimize_model_n(PAPER, COSTS, 0.1)
        assert out.authorization_declined
        assert out.oem_profit == pytest.approx(n.oem_profit, rel=1e-12)
        assert out.model == "T"

    def test_rejects_fee_at_production_cost(self):
        with pytest.raises(ValueError):
            optimize_model_t(PAPER, Perception(0.6, 0.3), COSTS, Contract(0, 250), 0.1)

    def test_fast_equals_exhaustive(self):
        perc = Perception(0.6, 0.3)
        fast = optimize_model_t(PAPER, perc, COSTS, CONTRACT, 0.25)
        full = optimize_model_t(PAPER, perc, COSTS, CONTRACT, 0.25, exhaustive=True)
        assert fast.oem_profit == full.oem_profit
        assert fast.decision == full.decision

    def test_small_market_matches_nested_brute_force(self):
        step = 2.0
        alpha, beta = 0.6, 0.3
        perc = Perception(alpha, beta)
        contract = Contract(H=500, h=100)
        out = optimize_model_t(SMALL, perc, COSTS, contract, step)

        v_r = alpha * 800
        g = 800 * (1 + beta - alpha * beta)
        m_f = COSTS.c_r + contract.h
        n_value = oracle_single_scan(800.0, 200.0, 50, step, TABLE)
        best = n_value  # declined branch
        best_dec = None
        n_pn = int(round((g - 200) / step))
        for i in range(1, n_pn):
            p_n = 200 + i * step
            # follower best response on its own lattice
            resp = None
            n_pr = int(round((min(p_n, v_r) - m_f) / step))
            for j in range(1, n_pr):
                p_r = m_f + j * step
                _, rate_r = oracle_rates(p_n, p_r, alpha, beta, 800.0, 50)
                val = oracle_table_value(p_r, rate_r, m_f) - contract.H
                q_r = (
                    int(stats.poisson.ppf(1 - m_f / p_r, rate_r)) if rate_r > 0 else 0
                )
                if resp is None or val > resp[2]:
                    resp = (p_r, q_r, val)
            if resp is None or resp[2] < 0 or resp[1] == 0:
                continue
            rate_n, _ = oracle_rates(p_n, resp[0], alpha, beta, 800.0, 50)
            lead = (
                oracle_table_value(p_n, rate_n, 200.0)
                + contract.H
                + (contract.h - COSTS.c_coll) * resp[1]
            )
            if lead > best:
                best = lead
                best_dec = (p_n, resp)
        assert out.oem_profit == pytest.approx(best, rel=1e-12)
        if best_dec is not None:
            assert not out.authorization_declined
            assert out.decision.p_n == pytest.approx(best_dec[0], abs=1e-9)

    def test_leader_rationality_on_sample(self):
        perc = Perception(0.6, 0.3)
        out = optimize_model_t(PAPER, perc, COSTS, CONTRACT, 0.1)
        rng = np.random.default_rng(11)
        g = 800 * (1 + 0.3 - 0.6 * 0.3)
        for p_n in rng.uniform(201, g - 1, size=12):
            p_n = round((p_n - 200) / 0.1) * 0.1 + 200
            resp = tpr_best_response(p_n, PAPER, perc, COSTS, CONTRACT, 0.1)
            if resp is None:
                value = evaluate_decision(
                    Decision(
                        p_n=p_n,
                        q_n=critical_quantity(
                            p_n, 200.0, (1 - p_n / 800) * 1000 if p_n < 800 else 0.0
                        ),
                    ),
                    "N",
                    PAPER,
                    None,
                    COSTS,
                )
            else:
                rate_n, _ = oracle_rates(p_n, resp[0], 0.6, 0.3, 800.0, 1000)
                q_n = critical_quantity(p_n, 200.0, rate_n)
                value = (
                    evaluate_decision(
                        Decision(p_n=p_n, q_n=q_n, p_r=resp[0], q_r=resp[1]),
                        "T",
                        PAPER,
                        perc,
                        COSTS,
                        CONTRACT,
                    )
                )
            assert out.oem_profit >= value - 1e-9

    def test_tpr_expected_profit_consistency(self):
        perc = Perception(0.6, 0.3)
        out = optimize_model_t(PAPER, perc, COSTS, CONTRACT, 0.1)
        again = evaluate_tpr(out.decision, PAPER, perc, COSTS, CONTRACT, EXPECTATION)
        assert again == pytest.approx(out.tpr_expected_profit, rel=1e-9)
