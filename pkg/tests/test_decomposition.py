import numpy as np
import pytest

from healthval import (
    CoefficientTriangle,
    FirstOrderBasis,
    PolicyData,
    SecondOrderBasis,
    aggregate,
    aggregate_triangles,
    be_from_blocks,
    building_blocks,
    deterministic_model,
    gross_coefficients,
    net_coefficients,
    oracle_be,
    project,
)
from healthval.decomposition import tri_offset, tri_size
from healthval.fixtures import toy_curve, toy_first_order, toy_policy
from healthval.pricing import InflationSpread

from conftest import random_inflation_path, random_policy, random_scenario_set


def toy_with_second_order_equal_first() -> PolicyData:
    """Toy contract whose projected cash flow includes the benefit leg."""
    fo = toy_first_order()
    so = SecondOrderBasis(k2=fo.k1, q2=fo.q1)
    return PolicyData(x0=0, fo=fo, so=so, id="toy-full")


class TestTriangleContainer:
    def test_packing_layout(self):
        assert tri_size(2) == 6
        assert tri_offset(2) == 3
        tri = CoefficientTriangle(2, np.arange(6.0), np.zeros(3))
        assert tri.row(0).tolist() == [0.0]
        assert tri.row(2).tolist() == [3.0, 4.0, 5.0]
        assert tri.entry(2, 1) == 4.0
        dense = tri.dense()
        assert dense[1, 2] == 0.0 and dense[2, 1] == 4.0

    def test_entry_bounds(self):
        tri = CoefficientTriangle.zeros(1)
        with pytest.raises(IndexError):
            tri.entry(0, 1)

    def test_padding_adds_zero_rows(self):
        tri = CoefficientTriangle(1, np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0]))
        padded = tri.padded(3)
        assert padded.horizon == 3
        assert padded.row(1).tolist() == [2.0, 3.0]
        assert padded.row(3).tolist() == [0.0, 0.0, 0.0, 0.0]
        assert padded.fixed.tolist() == [4.0, 5.0, 0.0, 0.0]


class TestNetCoefficients:
    def test_toy_rows(self):
        net, rs = net_coefficients(toy_policy())
        assert net.row(0).tolist() == [10.0]
        assert net.row(1).tolist() == [-5.0, 15.0]
        assert net.row(2).tolist() == [-5.0, -15.0, 30.0]
        assert rs.row(1)[:1].tolist() == [10.0]
        assert rs.row(2)[:2].tolist() == [5.0, 15.0]

    def test_level_benefits_have_diagonal_only(self):
        fo = FirstOrderBasis(k1=np.full(5, 25.0), q1=[0.2, 0.2, 0.2, 0.2, 1.0], r_calc=0.0)
        so = SecondOrderBasis(k2=np.full(5, 25.0), q2=[0.2, 0.2, 0.2, 0.2, 1.0])
        net, rs = net_coefficients(PolicyData(x0=0, fo=fo, so=so))
        for t in range(5):
            row = net.row(t)
            assert row[t] == pytest.approx(25.0, abs=1e-12)
            if t > 0:
                assert np.max(np.abs(row[:t])) <= 1e-12
        assert np.max(np.abs(rs.coeffs)) <= 1e-12

    def test_seasoned_provision_enters_first_column(self):
        net, rs = net_coefficients(toy_policy(rs0=6.0))
        assert rs.entry(0, 0) == 6.0
        assert net.entry(0, 0) == pytest.approx((30.0 - 6.0) / 3.0)

    def test_rows_reproduce_projected_premiums(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            policy = random_policy(rng, 5)
            i_med = random_inflation_path(rng, policy.run_off)
            net, rs = net_coefficients(policy)
            res = project(policy, i_med, i_med)
            scale = max(1.0, np.max(np.abs(res.premiums_net)))
            for t in range(policy.run_off + 1):
                from_coeffs = float(net.row(t) @ i_med[: t + 1])
                assert abs(from_coeffs - res.premiums_net[t]) <= 1e-10 * scale
                from_rs = float(rs.row(t) @ i_med[: t + 1])
                assert abs(from_rs - res.reserves[t]) <= 1e-10 * max(1.0, abs(res.reserves[t]))


class TestGrossCoefficients:
    def test_toy_rows_with_benefit_leg(self):
        tri = gross_coefficients(toy_with_second_order_equal_first())
        assert tri.row(0).tolist() == [10.0]
        assert tri.row(1).tolist() == [-5.0, 15.0]
        assert tri.row(2).tolist() == [-5.0, -15.0, 0.0]
        assert np.max(np.abs(tri.fixed)) == 0.0

    def test_cost_loading_cancellation(self):
        margin = 0.2
        fo = FirstOrderBasis(
            k1=[0.0, 30.0], q1=[0.0, 1.0], r_calc=0.0, c1=8.0, margin=margin
        )
        so = SecondOrderBasis(k2=[0.0, 30.0], q2=[0.0, 1.0], c2=8.0 / (1.0 - margin))
        tri = gross_coefficients(PolicyData(x0=0, fo=fo, so=so))
        assert np.max(np.abs(tri.fixed)) <= 1e-12

    def test_rows_reproduce_projected_cashflow(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            policy = random_policy(rng, 5)
            i_med = random_inflation_path(rng, policy.run_off)
            i_cost = random_inflation_path(rng, policy.run_off)
            tri = gross_coefficients(policy)
            res = project(policy, i_med, i_cost)
            scale = max(1.0, np.max(np.abs(res.cashflow)))
            for t in range(policy.run_off + 1):
                value = float(tri.row(t) @ i_med[: t + 1]) + tri.fixed[t] * i_cost[t]
                assert abs(value - res.cashflow[t]) <= 1e-10 * scale

    def test_cost_perturbation_only_moves_fixed_vector(self):
        rng = np.random.default_rng(37)
        policy = random_policy(rng, 8)
        bumped = PolicyData(
            x0=policy.x0,
            fo=FirstOrderBasis(
                k1=policy.fo.k1,
                q1=policy.fo.q1,
                r_calc=policy.fo.r_calc,
                c1=policy.fo.c1 + 5.0,
                margin=policy.fo.margin,
            ),
            so=SecondOrderBasis(k2=policy.so.k2, q2=policy.so.q2, c2=policy.so.c2 + 2.0),
            rs0=policy.rs0,
            id=policy.id,
        )
        base, moved = gross_coefficients(policy), gross_coefficients(bumped)
        assert np.array_equal(base.coeffs, moved.coeffs)
        assert np.max(np.abs(base.fixed - moved.fixed)) > 0.0

    def test_level_matched_benefits_zero_the_diagonal(self):
        # With level first-order benefits the fresh premium equals the
        # benefit, so a best-estimate benefit of k1/(1-margin) nets the
        # inflation-linked diagonal to zero.
        margin = 0.1
        level = np.full(6, 50.0)
        q = np.array([0.15, 0.15, 0.15, 0.15, 0.15, 1.0])
        fo = FirstOrderBasis(k1=level, q1=q, r_calc=0.02, margin=margin)
        so = SecondOrderBasis(k2=level / (1.0 - margin), q2=q)
        tri = gross_coefficients(PolicyData(x0=0, fo=fo, so=so))
        diagonal = np.array([tri.entry(t, t) for t in range(tri.horizon + 1)])
        assert np.max(np.abs(diagonal)) <= 1e-12


class TestAggregate:
    def test_singleton_is_identity(self):
        tri = gross_coefficients(toy_policy())
        agg = aggregate([toy_policy()])
        assert np.array_equal(agg.coeffs, tri.coeffs)
        assert np.array_equal(agg.fixed, tri.fixed)

    def test_duplicate_policy_doubles_entries(self):
        one = aggregate([toy_policy()])
        two = aggregate([toy_policy(), toy_policy()])
        assert np.array_equal(two.coeffs, 2.0 * one.coeffs)

    def test_two_variants_sum_entrywise(self):
        variant = toy_with_second_order_equal_first()
        base, other = gross_coefficients(toy_policy()), gross_coefficients(variant)
        agg = aggregate([toy_policy(), variant])
        assert agg.coeffs == pytest.approx(base.coeffs + other.coeffs, abs=1e-15)

    def test_mixed_horizons_pad_with_zeros(self):
        rng = np.random.default_rng(41)
        short = random_policy(rng, 2)
        long = random_policy(rng, 9)
        agg = aggregate([short, long])
        assert agg.horizon == max(short.run_off, long.run_off)
        tail = agg.row(agg.horizon)
        assert tail == pytest.approx(gross_coefficients(long).padded(agg.horizon).row(agg.horizon))

    def test_empty_portfolio_is_zero_triangle(self):
        agg = aggregate_triangles([])
        assert agg.horizon == 0
        assert np.max(np.abs(agg.coeffs)) == 0.0


class TestBeFromBlocks:
    def test_zero_triangle_prices_to_zero(self):
        blocks = building_blocks(deterministic_model(toy_curve()))
        assert be_from_blocks(CoefficientTriangle.zeros(2), blocks) == 0.0

    def test_toy_closed_form(self):
        curve = toy_curve()
        blocks = building_blocks(deterministic_model(curve))
        tri = aggregate([toy_policy()])
        pn, pr = curve.pn, curve.pr
        expected = (
            -10.0
            - 15.0 * pr[1]
            + 5.0 * pn[1]
            - 30.0 * pr[2]
            + 15.0 * blocks.med[2, 1]
            + 5.0 * pn[2]
        )
        assert be_from_blocks(tri, blocks) == pytest.approx(expected, abs=1e-12)

    def test_horizon_shortfall_raises(self):
        blocks = building_blocks(deterministic_model(toy_curve()))
        with pytest.raises(ValueError, match="shortfall"):
            be_from_blocks(CoefficientTriangle.zeros(10), blocks)

    def test_matches_brute_force_on_random_portfolios(self):
        rng = np.random.default_rng(53)
        for _ in range(30):
            portfolio = [random_policy(rng, 8, policy_id=f"p{j}") for j in range(rng.integers(1, 8))]
            horizon = max(p.run_off for p in portfolio)
            s = random_scenario_set(rng, horizon, int(rng.integers(2, 7)))
            spread = InflationSpread(float(rng.uniform(-0.01, 0.04)), float(rng.uniform(-0.01, 0.04)))
            via_blocks = be_from_blocks(aggregate(portfolio), building_blocks(s, spread))
            via_oracle = oracle_be(portfolio, s, spread)
            assert abs(via_blocks - via_oracle) / (1.0 + abs(via_oracle)) <= 1e-9
