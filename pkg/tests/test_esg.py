import numpy as np
import pytest

from healthval import (
    CurvePair,
    McModelParams,
    ScenarioSet,
    TwoScenarioParams,
    building_blocks,
    calibration_check,
    delayed_inflation_factor,
    deterministic_model,
    mc_model,
    two_scenario_model,
)

from conftest import random_curve

CURVE = CurvePair(pn=[1.0, 0.98, 0.95], pr=[1.0, 1.0, 1.0])
DETERMINISTIC_BLOCK = (1.0 / 0.98) * 0.95  # price of the delayed index payout


class TestDeterministicModel:
    def test_accounts_are_reciprocal_prices(self):
        s = deterministic_model(CURVE)
        assert s.n_paths == 1
        assert s.weights.tolist() == [1.0]
        assert s.bn[0] == pytest.approx([1.0, 1.0204081632653061, 1.0526315789473684], rel=1e-15)
        assert s.br[0].tolist() == [1.0, 1.0, 1.0]

    def test_flat_equal_curves_give_unit_index(self):
        curve = CurvePair(pn=[1.0, 0.97, 0.93], pr=[1.0, 0.97, 0.93])
        s = deterministic_model(curve)
        assert np.max(np.abs(s.i - 1.0)) == 0.0

    def test_delayed_block_price_closed_form(self):
        blocks = building_blocks(deterministic_model(CURVE))
        assert blocks.med[2, 1] == pytest.approx(DETERMINISTIC_BLOCK, abs=1e-15)
        assert blocks.med[2, 1] == pytest.approx(0.969388, abs=5e-7)

    def test_exact_calibration(self):
        report = calibration_check(deterministic_model(CURVE), CURVE, tolerance=1e-12)
        # 1/(1/p) re-rounds, so "zero" means one ulp here.
        assert report.max_error_nominal <= 1e-15
        assert report.max_error_real <= 1e-15
        assert report.passed


class TestTwoScenarioParams:
    def test_complementary_tilts(self):
        params = TwoScenarioParams(cn1=0.5, cr1=1.0, p1=0.5)
        assert params.cn2 == pytest.approx(1.5)
        assert params.cr2 == pytest.approx(1.0)

    def test_rejects_p1_beyond_nominal_bound(self):
        with pytest.raises(ValueError, match="1/cn1"):
            TwoScenarioParams(cn1=2.5, cr1=1.0, p1=0.5)

    def test_rejects_p1_beyond_real_bound(self):
        with pytest.raises(ValueError, match="1/cr1"):
            TwoScenarioParams(cn1=1.0, cr1=4.0, p1=0.3)

    def test_rejects_p1_outside_unit_interval(self):
        with pytest.raises(ValueError, match="p1"):
            TwoScenarioParams(cn1=0.5, cr1=0.5, p1=1.0)


class TestTwoScenarioModel:
    def test_unit_tilts_reduce_to_deterministic(self):
        s = two_scenario_model(CURVE, TwoScenarioParams(cn1=1.0, cr1=1.0, p1=0.3))
        det = deterministic_model(CURVE)
        for k in range(2):
            assert np.max(np.abs(s.bn[k] - det.bn[0])) < 1e-15
            assert np.max(np.abs(s.br[k] - det.br[0])) < 1e-15

    def test_demo_parameters_block_price(self):
        s = two_scenario_model(CURVE, TwoScenarioParams(cn1=0.5, cr1=1.0, p1=0.5))
        blocks = building_blocks(s)
        assert blocks.med[2, 1] == pytest.approx(DETERMINISTIC_BLOCK * 4.0 / 3.0, abs=1e-12)
        assert blocks.med[2, 1] == pytest.approx(1.292517, abs=5e-7)

    def test_block_price_unbounded_as_nominal_tilt_vanishes(self):
        factors = [
            delayed_inflation_factor(TwoScenarioParams(cn1=cn1, cr1=1.0, p1=0.5))
            for cn1 in (0.5, 0.1, 0.01, 1e-4)
        ]
        assert all(a < b for a, b in zip(factors, factors[1:]))
        assert factors[-1] > 1e3

    def test_closed_form_factor_matches_priced_block(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            curve = random_curve(rng, 3)
            params = TwoScenarioParams(
                cn1=float(rng.uniform(0.05, 1.8)),
                cr1=float(rng.uniform(0.05, 1.8)),
                p1=float(rng.uniform(0.05, 0.5)),
            )
            s = two_scenario_model(curve, params)
            det_value = (curve.pr[1] / curve.pn[1]) * curve.pn[2]
            priced = building_blocks(s).med[2, 1]
            assert priced == pytest.approx(det_value * delayed_inflation_factor(params), rel=1e-12)

    def test_exact_calibration_on_random_curves(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            curve = random_curve(rng, int(rng.integers(2, 12)))
            params = TwoScenarioParams(
                cn1=float(rng.uniform(0.02, 1.5)),
                cr1=float(rng.uniform(0.02, 1.5)),
                p1=float(rng.uniform(0.05, 0.6)),
            )
            report = calibration_check(two_scenario_model(curve, params), curve, tolerance=1e-12)
            assert report.passed, (report.max_error_nominal, report.max_error_real)

    def test_requires_two_year_curve(self):
        short = CurvePair(pn=[1.0, 0.98], pr=[1.0, 1.0])
        with pytest.raises(ValueError, match="T >= 2"):
            two_scenario_model(short, TwoScenarioParams(cn1=0.5, cr1=1.0, p1=0.5))


class TestMcModel:
    def test_zero_volatility_reproduces_deterministic(self):
        curve = random_curve(np.random.default_rng(1), 10)
        s = mc_model(curve, McModelParams(n_paths=7, vol_n=0.0, vol_r=0.0, corr=0.0, seed=4))
        det = deterministic_model(curve)
        assert np.max(np.abs(s.bn - det.bn[0])) < 1e-12
        assert np.max(np.abs(s.br - det.br[0])) < 1e-12

    def test_moment_matching_is_exact(self):
        rng = np.random.default_rng(8)
        for seed in range(5):
            curve = random_curve(rng, 20)
            params = McModelParams(n_paths=400, vol_n=0.03, vol_r=0.02, corr=-0.4, seed=seed)
            report = calibration_check(mc_model(curve, params), curve, tolerance=1e-12)
            assert report.passed, (report.max_error_nominal, report.max_error_real)

    def test_fixed_seed_is_bitwise_deterministic(self):
        curve = random_curve(np.random.default_rng(2), 15)
        params = McModelParams(n_paths=50, vol_n=0.02, vol_r=0.01, corr=0.5, seed=123)
        a, b = mc_model(curve, params), mc_model(curve, params)
        assert np.array_equal(a.bn, b.bn)
        assert np.array_equal(a.br, b.br)
        assert np.array_equal(a.weights, b.weights)

    def test_sampled_flag_and_weights(self):
        s = mc_model(CURVE, McModelParams(n_paths=8, vol_n=0.01, vol_r=0.01, corr=0.0, seed=0))
        assert s.sampled
        assert np.allclose(s.weights, 1.0 / 8.0)

    def test_delayed_block_strictly_ordered_in_correlation(self):
        # The correlation sensitivity of the delayed block is a
        # finite-sample effect under per-slice matching, so the ordering
        # is pinned at a fixed seed (generation is bitwise reproducible).
        values = [
            building_blocks(
                mc_model(CURVE, McModelParams(n_paths=4000, vol_n=0.05, vol_r=0.05, corr=c, seed=7))
            ).med[2, 1]
            for c in (-0.9, 0.0, 0.9)
        ]
        assert values[0] < values[1] < values[2]

    def test_rejects_explosive_volatility(self):
        with pytest.raises(ValueError, match="non-finite"):
            mc_model(CURVE, McModelParams(n_paths=4, vol_n=500.0, vol_r=0.0, corr=0.0, seed=1))

    def test_rejects_degenerate_path_count(self):
        with pytest.raises(ValueError, match="n_paths"):
            McModelParams(n_paths=1, vol_n=0.1, vol_r=0.1, corr=0.0, seed=1)


class TestCalibrationCheck:
    def test_perturbed_account_is_flagged(self):
        det = deterministic_model(CURVE)
        bn = det.bn.copy()
        bn[0, 1] += 1e-3
        perturbed = ScenarioSet(bn=bn, br=det.br, weights=det.weights)
        report = calibration_check(perturbed, CURVE, tolerance=1e-10)
        assert max(report.max_error_nominal, report.max_error_real) >= 1e-4
        assert not report.passed

    def test_horizon_mismatch_raises(self):
        longer = CurvePair(pn=[1.0, 0.98, 0.95, 0.93], pr=[1.0, 1.0, 1.0, 1.0])
        with pytest.raises(ValueError, match="horizon mismatch"):
            calibration_check(deterministic_model(CURVE), longer)
