"""Chain diagnostics: autocorrelation, effective sample size, displacement
statistics, and the small report helpers.

Closed-form anchor cases use exactly computable series (alternating signs,
AR(1) with known integrated time); stochastic cases run on frozen seeds with
precomputed margins noted inline.
"""

import numpy as np
import pytest
from scipy import signal

from wgibbs.diagnostics import (autocorrelation, autocorrelation_curve,
                                effective_sample_size, esjd_empirical,
                                esjd_empirical_se, ess_report,
                                mean_autocorrelation_curve, pca_project,
                                relative_l2_error)


# ------------------------------------------------------------ autocorrelation


class TestAutocorrelationCurve:
    def test_lag_zero_is_one(self, rng):
        curve = autocorrelation_curve(rng.normal(size=500), 10)
        assert curve[0] == pytest.approx(1.0)

    def test_matches_direct_convolution(self, rng):
        # FFT route against the quadratic-time definition
        x = rng.normal(size=257)
        curve = autocorrelation_curve(x, 30)
        centered = x - x.mean()
        full = np.correlate(centered, centered, mode="full")[x.size - 1:]
        direct = full[:31] / full[0]
        np.testing.assert_allclose(curve, direct, atol=1e-12)

    def test_alternating_series_has_exact_biased_estimate(self):
        # biased estimator: rho_k = (-1)^k (n-k)/n
        x = np.array([1.0, -1.0] * 5)
        curve = autocorrelation_curve(x, 3)
        np.testing.assert_allclose(curve, [1.0, -0.9, 0.8, -0.7], atol=1e-12)

    def test_single_lag_helper_agrees_with_curve(self, rng):
        x = rng.normal(size=400)
        curve = autocorrelation_curve(x, 5)
        assert autocorrelation(x, 3) == pytest.approx(curve[3], abs=1e-12)

    def test_iid_noise_lag_one_inside_bartlett_band(self):
        # 3/sqrt(1e5) = 0.00949; frozen seed lands at 0.00216
        x = np.random.default_rng(7).normal(size=100_000)
        assert abs(autocorrelation(x, 1)) <= 3 / np.sqrt(x.size)

    def test_ar1_lag_one_near_phi(self):
        rng = np.random.default_rng(123)
        x = signal.lfilter([1.0], [1.0, -0.5], rng.normal(size=100_000))
        assert autocorrelation(x, 1) == pytest.approx(0.5, abs=0.02)

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError):
            autocorrelation_curve(np.ones(100), 5)

    def test_max_lag_bounds(self, rng):
        x = rng.normal(size=50)
        with pytest.raises(ValueError):
            autocorrelation_curve(x, 50)
        with pytest.raises(ValueError):
            autocorrelation_curve(x, -1)


class TestMeanAutocorrelationCurve:
    def test_averages_per_coordinate_curves(self, rng):
        samples = rng.normal(size=(300, 2))
        mean_curve = mean_autocorrelation_curve(samples, 8)
        a = autocorrelation_curve(samples[:, 0], 8)
        b = autocorrelation_curve(samples[:, 1], 8)
        np.testing.assert_allclose(mean_curve, (a + b) / 2, atol=1e-12)

    def test_constant_columns_are_skipped(self, rng):
        noise = rng.normal(size=300)
        samples = np.column_stack([noise, np.full(300, 3.0)])
        np.testing.assert_allclose(mean_autocorrelation_curve(samples, 8),
                                   autocorrelation_curve(noise, 8), atol=1e-12)

    def test_all_constant_rejected(self):
        with pytest.raises(ValueError):
            mean_autocorrelation_curve(np.ones((100, 3)), 5)


# -------------------------------------------------------------------- ESS


class TestEffectiveSampleSize:
    def test_iid_data_within_twenty_percent_of_n(self):
        # frozen seed gives 9806 of 10000
        x = np.random.default_rng(42).normal(size=10_000)
        ess = effective_sample_size(x)
        assert abs(ess - x.size) <= 0.2 * x.size

    def test_ar1_matches_integrated_time(self):
        # tau = (1+phi)/(1-phi) = 3, so ESS should be near N/3;
        # frozen seed gives 34085 against 33333
        rng = np.random.default_rng(123)
        x = signal.lfilter([1.0], [1.0, -0.5], rng.normal(size=100_000))
        assert effective_sample_size(x) == pytest.approx(x.size / 3, rel=0.1)

    def test_antithetic_series_hits_the_floor_path(self):
        # alternating signs: biased rho sums to exactly -1/2, tau = 0,
        # estimator falls back to N with a warning
        x = np.array([1.0, -1.0] * 5)
        with pytest.warns(UserWarning):
            assert effective_sample_size(x) == pytest.approx(x.size)

    def test_constant_series_rejected(self):
        with pytest.raises(ValueError):
            effective_sample_size(np.full(100, 2.0))

    def test_report_has_min_and_nan_for_constant_columns(self, rng):
        samples = np.column_stack([rng.normal(size=500),
                                   np.full(500, 1.0),
                                   rng.normal(size=500)])
        report = ess_report(samples)
        per = report["per_coordinate"]
        assert per.shape == (3,)
        assert np.isnan(per[1])
        assert report["min"] == pytest.approx(np.nanmin(per))


# ----------------------------------------------------------------- ESJD


class TestEsjdEmpirical:
    def test_hand_computed_displacements(self):
        samples = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 2.0]])
        assert esjd_empirical(samples, 1) == pytest.approx(2.5)  # (1+4)/2
        assert esjd_empirical(samples, 2) == pytest.approx(5.0)

    def test_lag_zero_is_zero(self):
        samples = np.arange(12.0).reshape(6, 2)
        assert esjd_empirical(samples, 0) == 0.0

    def test_lag_bounds(self):
        samples = np.zeros((4, 2))
        with pytest.raises(ValueError):
            esjd_empirical(samples, 4)
        with pytest.raises(ValueError):
            esjd_empirical(samples, -1)

    def test_iid_rows_match_expected_displacement(self):
        # E||X - Y||^2 = 2d for iid standard normal rows; batch-means SE
        rng = np.random.default_rng(31)
        samples = rng.normal(size=(3000, 3))
        est = esjd_empirical(samples, 1)
        se = esjd_empirical_se(samples, 1)
        assert abs(est - 6.0) <= 3 * se

    def test_se_needs_enough_terms(self):
        with pytest.raises(ValueError):
            esjd_empirical_se(np.zeros((40, 2)), 1, n_batches=30)


# ----------------------------------------------------------------- helpers


class TestPcaProject:
    def test_rank_one_data_gets_zero_second_component(self):
        t = np.linspace(-1.0, 1.0, 40)
        samples = np.column_stack([3.0 * t, -3.0 * t])
        scores = pca_project(samples, 2)
        np.testing.assert_allclose(scores[:, 1], 0.0, atol=1e-10)
        # variance is preserved on the leading component
        assert scores[:, 0].var() == pytest.approx(samples[:, 0].var() * 2)

    def test_sign_convention_is_deterministic(self, rng):
        samples = rng.normal(size=(200, 3)) @ np.diag([3.0, 1.0, 0.1])
        a = pca_project(samples, 2)
        b = pca_project(samples[::-1] [::-1], 2)  # same rows, same answer
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_component_count_bounds(self, rng):
        samples = rng.normal(size=(10, 2))
        with pytest.raises(ValueError):
            pca_project(samples, 3)
        with pytest.raises(ValueError):
            pca_project(samples, 0)


class TestRelativeL2Error:
    def test_hand_values(self):
        ref = np.array([3.0, 4.0])
        assert relative_l2_error(ref, ref) == 0.0
        assert relative_l2_error(ref, np.zeros(2)) == pytest.approx(1.0)

    def test_shape_and_zero_norm_errors(self):
        with pytest.raises(ValueError):
            relative_l2_error(np.ones(3), np.ones(4))
        with pytest.raises(ValueError):
            relative_l2_error(np.zeros(3), np.ones(3))
