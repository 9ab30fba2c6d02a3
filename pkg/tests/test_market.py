"""Utility model, demand rates, and price-region classification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remanopt.market import (
    Contract,
    CostStructure,
    MarketParams,
    Perception,
    Region,
    classify_region,
    demand_rates,
    perceived_values,
    single_product_rate,
)

PAPER = MarketParams(lam=1000, V=1000, delta=0.8)


class TestTypes:
    def test_market_params_validation(self):
        with pytest.raises(ValueError):
            MarketParams(lam=0, V=1000, delta=0.8)
        with pytest.raises(ValueError):
            MarketParams(lam=10, V=1000, delta=1.2)

    def test_cost_structure_requires_savings(self):
        with pytest.raises(ValueError):
            CostStructure(c=100, c_r=80, c_coll=40)
        costs = CostStructure(c=200, c_r=80, c_coll=40)
        assert costs.reman_unit_cost == 120

    def test_perception_bounds(self):
        with pytest.raises(ValueError):
            Perception(alpha=1.1, beta=0)
        with pytest.raises(ValueError):
            Perception(alpha=0.5, beta=-1.5)

    def test_contract_bounds(self):
        with pytest.raises(ValueError):
            Contract(H=-1, h=10)
        with pytest.raises(ValueError):
            Contract(H=0, h=0)


class TestPerceivedValues:
    def test_neutral_beta_leaves_new_value(self):
        v_n, v_r, g = perceived_values(PAPER, Perception(0.8, 0.0))
        assert (v_n, v_r, g) == (800, 640, 800)

    def test_assimilation_shrinks_new_value(self):
        v_n, v_r, g = perceived_values(PAPER, Perception(0.8, -0.1))
        assert v_n == pytest.approx(800)
        assert v_r == pytest.approx(640)
        assert g == pytest.approx(784)

    def test_equal_values_collapse_adjustment(self):
        v_n, v_r, g = perceived_values(PAPER, Perception(1.0, 0.5))
        assert (v_n, v_r, g) == (800, 800, 800)


class TestSingleProductRate:
    def test_free_product_attracts_everyone(self):
        assert single_product_rate(0, 800, PAPER) == 1000

    def test_choke_price(self):
        assert single_product_rate(800, 800, PAPER) == 0

    def test_published_midpoint(self):
        assert single_product_rate(500, 800, PAPER) == 375

    def test_rejects_negative_price(self):
        with pytest.raises(ValueError):
            single_product_rate(-1, 800, PAPER)


class TestDemandRates:
    def test_choke_value_kills_new_demand(self):
        perc = Perception(0.8, -0.1)
        g = 784.0
        rate_n, _ = demand_rates(g, 300.0, PAPER, perc)
        assert rate_n == 0.0

    def test_coexistence_hand_arithmetic(self):
        # thresholds at (492, 380): 112/144 and 380/640
        perc = Perception(0.8, -0.1)
        rate_n, rate_r = demand_rates(492.0, 380.0, PAPER, perc)
        assert rate_n == pytest.approx(1000 * (1 - 112 / 144), rel=1e-12)
        assert rate_r == pytest.approx(1000 * (112 / 144 - 380 / 640), rel=1e-12)

    def test_worthless_reman_attracts_nobody(self):
        rate_n, rate_r = demand_rates(400.0, 100.0, PAPER, Perception(0.0, -0.3))
        assert rate_r == 0.0
        assert rate_n > 0

    def test_rejects_inverted_prices(self):
        with pytest.raises(ValueError):
            demand_rates(300.0, 301.0, PAPER, Perception(0.8, -0.1))

    def test_identical_values_cheaper_wins(self):
        # alpha=1: remanufactured strictly cheaper takes the whole market
        rate_n, rate_r = demand_rates(500.0, 400.0, PAPER, Perception(1.0, -0.3))
        assert rate_n == 0.0
        assert rate_r == pytest.approx(1000 * (1 - 400 / 800))
        # price tie goes to the new product
        rate_n, rate_r = demand_rates(400.0, 400.0, PAPER, Perception(1.0, -0.3))
        assert rate_r == 0.0
        assert rate_n == pytest.approx(1000 * (1 - 400 / 800))


class TestRegions:
    def test_both_choked_is_infeasible(self):
        perc = Perception(0.8, -0.1)
        assert classify_region(790.0, 700.0, PAPER, perc) is Region.INFEASIBLE

    def test_published_point_coexists(self):
        assert classify_region(492.0, 380.0, PAPER, Perception(0.8, -0.1)) is Region.COEXISTENCE

    def test_boundary_tie_goes_to_new(self):
        # alpha=0.5, beta=0 keeps all three thresholds exactly representable:
        # at (600, 300) every cut point equals 0.75, a three-way tie
        perc = Perception(0.5, 0.0)
        region = classify_region(600.0, 300.0, PAPER, perc)
        assert region is Region.NEW_ONLY

    @given(
        st.floats(0.0, 1.0),
        st.floats(-1.0, 0.0),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_partition_matches_rate_signs(self, alpha, beta, x, y):
        perc = Perception(alpha, beta)
        p_n = x * 900.0
        p_r = y * p_n
        rate_n, rate_r = demand_rates(p_n, p_r, PAPER, perc)
        region = classify_region(p_n, p_r, PAPER, perc)
        want = {
            (False, False): Region.INFEASIBLE,
            (True, False): Region.NEW_ONLY,
            (False, True): Region.REMAN_ONLY,
            (True, True): Region.COEXISTENCE,
        }[(rate_n > 0, rate_r > 0)]
        assert region is want

    @given(
        st.floats(0.0, 1.0),
        st.floats(-1.0, 1.0),
        st.floats(0.0, 1.0),
        st.floats(0.0, 1.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_conservation(self, alpha, beta, x, y):
        perc = Perception(alpha, beta)
        p_n = x * 1500.0
        p_r = y * p_n
        rate_n, rate_r = demand_rates(p_n, p_r, PAPER, perc)
        assert 0.0 <= rate_n <= PAPER.lam
        assert 0.0 <= rate_r <= PAPER.lam
        assert rate_n + rate_r <= PAPER.lam + 1e-9

    def test_interior_monotonicity(self):
        perc = Perception(0.8, -0.1)
        eps = 0.5
        base_n, base_r = demand_rates(492.0, 380.0, PAPER, perc)
        up_pn_n, up_pn_r = demand_rates(492.0 + eps, 380.0, PAPER, perc)
        up_pr_n, up_pr_r = demand_rates(492.0, 380.0 + eps, PAPER, perc)
        assert up_pn_n < base_n and up_pn_r > base_r
        assert up_pr_n > base_n and up_pr_r < base_r

    def test_signed_zero_beta_equivalence(self):
        pos = Perception(0.7, 0.0)
        neg = Perception(0.7, -0.0)
        for p_n, p_r in [(500.0, 300.0), (700.0, 100.0), (450.0, 440.0)]:
            assert demand_rates(p_n, p_r, PAPER, pos) == demand_rates(p_n, p_r, PAPER, neg)


class TestBulkAgreement:
    def test_bulk_rates_match_scalar(self):
        from remanopt.models import _rates_bulk

        rng = np.random.default_rng(7)
        for alpha, beta in [(0.8, -0.1), (0.0, -0.5), (1.0, 0.4), (0.6, 0.3), (0.5, -1.0)]:
            perc = Perception(alpha, beta)
            p_n = rng.uniform(0, 900, size=50)
            p_r = p_n * rng.uniform(0, 1, size=50)
            bn, br = _rates_bulk(p_n, p_r, PAPER, perc)
            for i in range(50):
                sn, sr = demand_rates(p_n[i], p_r[i], PAPER, perc)
                assert bn[i] == pytest.approx(sn, abs=1e-9)
                assert br[i] == pytest.approx(sr, abs=1e-9)
