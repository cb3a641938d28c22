"""Scan scheduler unit tests.

The weight formula and the variance accumulator get exact hand-computed
examples plus property tests; the samplers themselves get frequency checks
with precomputed binomial bounds (all bounds noted inline, seeds frozen).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgibbs.schedulers import (FixedWeightScan, SystematicScan, UniformScan,
                               VarianceAccumulator, WeightedScan,
                               WeightedScanConfig, selection_weights,
                               systematic_index)

# ---------------------------------------------------------------- systematic


class TestSystematicIndex:
    # reports use 1-based variable numbering; the module is 0-based, so the
    # classic cycle examples are asserted through the +1 offset
    @pytest.mark.parametrize("step,dim,one_based", [
        (1, 5, 1),
        (5, 5, 5),
        (6, 5, 1),
        (12, 5, 2),
    ])
    def test_cycle(self, step, dim, one_based):
        assert systematic_index(step, dim) + 1 == one_based

    def test_full_period_covers_every_index_once(self):
        assert [systematic_index(t, 7) for t in range(1, 8)] == list(range(7))

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            systematic_index(0, 3)
        with pytest.raises(ValueError):
            systematic_index(1, 0)


# ---------------------------------------------------------- selection weights


class TestSelectionWeights:
    def test_equal_jump_sizes_give_uniform(self):
        np.testing.assert_allclose(selection_weights(np.array([1.0, 1.0, 1.0]), 0.0),
                                   [1 / 3, 1 / 3, 1 / 3], rtol=0, atol=1e-15)

    def test_four_to_one_gives_two_thirds(self):
        np.testing.assert_allclose(selection_weights(np.array([4.0, 1.0]), 0.0),
                                   [2 / 3, 1 / 3], rtol=0, atol=1e-15)

    def test_regularizer_rescues_zero_estimate(self):
        # (sqrt(0)+0.5, sqrt(1)+0.5) / 2 = (0.25, 0.75)
        np.testing.assert_allclose(selection_weights(np.array([0.0, 1.0]), 0.5),
                                   [0.25, 0.75], rtol=0, atol=1e-15)

    def test_zero_estimate_without_regularizer_is_an_error(self):
        with pytest.raises(ValueError):
            selection_weights(np.array([0.0, 1.0]), 0.0)
        with pytest.raises(ValueError):
            selection_weights(np.array([0.0, 0.0]), 0.0)

    def test_rejects_negative_inputs(self):
        with pytest.raises(ValueError):
            selection_weights(np.array([-1.0, 1.0]), 0.1)
        with pytest.raises(ValueError):
            selection_weights(np.array([1.0]), -0.1)

    def test_huge_regularizer_washes_out_to_uniform(self):
        # jump sizes up to 1e4 -> sqrt spread <= 100; against 1e12 the
        # deviation from uniform is ~1e-10, well under the 1e-9 requirement
        q = selection_weights(np.array([3.0, 1e4, 0.2, 11.0]), 1e12)
        assert np.abs(q - 0.25).max() <= 1e-9

    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=12),
           st.floats(1e-6, 1e6))
    def test_scale_invariance_without_regularizer(self, jumps, scale):
        jumps = np.array(jumps)
        base = selection_weights(jumps, 0.0)
        scaled = selection_weights(scale * jumps, 0.0)
        assert np.abs(base - scaled).max() <= 1e-9

    @given(st.lists(st.floats(0.0, 1e6), min_size=1, max_size=12),
           st.floats(1e-8, 1e3))
    def test_always_a_strictly_positive_distribution(self, jumps, reg):
        q = selection_weights(np.array(jumps), reg)
        assert abs(q.sum() - 1.0) <= 1e-12
        assert (q > 0).all()

    @given(st.lists(st.integers(1, 10**6), min_size=2, max_size=12, unique=True))
    def test_larger_jump_size_gets_larger_weight(self, jumps):
        jumps = np.array(jumps, dtype=np.float64) / 1e3
        q = selection_weights(jumps, 0.0)
        order = np.argsort(jumps)
        assert (np.diff(q[order]) > 0).all()


# ------------------------------------------------------- variance accumulator


class TestVarianceAccumulator:
    def test_constant_feed_has_zero_jump_size(self):
        acc = VarianceAccumulator(2)
        for _ in range(3):
            acc.feed(0, 1.0)
        assert acc.jump_sizes()[0] == 0.0

    def test_two_point_feed(self):
        # values 0, 2: mean 1, population variance 1, jump size 2
        acc = VarianceAccumulator(1)
        acc.feed(0, 0.0)
        acc.feed(0, 2.0)
        assert acc.means()[0] == pytest.approx(1.0)
        assert acc.jump_sizes()[0] == pytest.approx(2.0)

    def test_unfed_and_single_value_coordinates_report_zero(self):
        acc = VarianceAccumulator(3)
        acc.feed(1, 5.0)
        np.testing.assert_array_equal(acc.jump_sizes(), [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(acc.means(), [0.0, 5.0, 0.0])

    def test_standard_normal_feed_estimates_twice_unit_variance(self):
        # 1e4 draws: sd of the estimate is about 2*sqrt(2/n) ~ 0.028, so
        # [1.8, 2.2] is a ~7 sigma window; frozen seed lands at 2.0499
        acc = VarianceAccumulator(1)
        for v in np.random.default_rng(31).normal(size=10_000):
            acc.feed(0, v)
        assert 1.8 <= acc.jump_sizes()[0] <= 2.2

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=200))
    def test_one_pass_matches_two_pass_variance(self, values):
        acc = VarianceAccumulator(1)
        for v in values:
            acc.feed(0, v)
        two_pass = 2.0 * np.var(np.array(values))
        assert acc.jump_sizes()[0] == pytest.approx(two_pass, rel=1e-9, abs=1e-12)
        assert acc.means()[0] == pytest.approx(np.mean(values), rel=1e-9, abs=1e-12)

    def test_rejects_empty_dimension(self):
        with pytest.raises(ValueError):
            VarianceAccumulator(0)


# ------------------------------------------------------------------- samplers


class TestFixedWeightScan:
    def test_degenerate_weight_always_selects_it(self):
        sched = FixedWeightScan(np.array([1.0]))
        rng = np.random.default_rng(0)
        assert all(sched.next_index(t, rng) == 0 for t in range(1, 11))

    def test_even_split_frequency(self):
        # 1e5 draws at p=0.5: 3 sigma binomial band is +-0.0047, the
        # asserted [0.49, 0.51] window is ~6 sigma
        sched = FixedWeightScan(np.array([0.5, 0.5]))
        rng = np.random.default_rng(7)
        draws = np.array([sched.next_index(t, rng) for t in range(1, 100_001)])
        freq = (draws == 0).mean()
        assert 0.49 <= freq <= 0.51

    def test_skewed_split_frequency(self):
        # 3 sigma band around 2/3 at n=1e5: +-0.00447
        sched = FixedWeightScan(np.array([2 / 3, 1 / 3]))
        rng = np.random.default_rng(11)
        draws = np.array([sched.next_index(t, rng) for t in range(1, 100_001)])
        assert abs((draws == 0).mean() - 2 / 3) <= 3 * np.sqrt((2 / 9) / 100_000)

    def test_rejects_invalid_weights(self):
        with pytest.raises(ValueError):
            FixedWeightScan(np.array([0.5, 0.6]))
        with pytest.raises(ValueError):
            FixedWeightScan(np.array([1.0, 0.0]))


class TestUniformScan:
    def test_covers_all_indices(self):
        sched = UniformScan(3)
        rng = np.random.default_rng(1)
        draws = {sched.next_index(t, rng) for t in range(1, 200)}
        assert draws == {0, 1, 2}


class TestWeightedScan:
    def test_starts_uniform_without_data(self):
        sched = WeightedScan(4)
        rng = np.random.default_rng(0)
        sched.next_index(1, rng)
        np.testing.assert_allclose(sched.weights, 0.25)

    def test_learns_two_to_one_ratio_from_variances(self):
        # summaries with variances (4, 1): jump sizes (8, 2), sqrt ratio 2:1
        sched = WeightedScan(2, WeightedScanConfig(reg=1e-6))
        feed_rng = np.random.default_rng(17)
        for a, b in zip(feed_rng.normal(0, 2, 5000), feed_rng.normal(0, 1, 5000)):
            sched.observe(0, a)
            sched.observe(1, b)
        sched.next_index(1, np.random.default_rng(5))
        assert abs(sched.weights[0] - 2 / 3) <= 0.02
        assert abs(sched.weights[1] - 1 / 3) <= 0.02

    def test_identical_coordinates_stay_near_uniform(self):
        sched = WeightedScan(4)
        feed_rng = np.random.default_rng(9)
        indices = feed_rng.integers(0, 4, 20_000)
        values = feed_rng.normal(size=20_000)
        for i, v in zip(indices, values):
            sched.observe(int(i), v)
        sched.next_index(1, np.random.default_rng(5))
        assert np.abs(sched.weights - 0.25).max() <= 0.05

    def test_never_updating_keeps_the_initial_uniform_draw_law(self):
        n = 100_000
        sched = WeightedScan(4, WeightedScanConfig(update_period=n + 1))
        rng = np.random.default_rng(23)
        draws = np.array([sched.next_index(t, rng) for t in range(1, n + 1)])
        assert len(sched.weight_snapshots()) == 1
        np.testing.assert_allclose(sched.weights, 0.25)
        # 3 sigma band for p=0.25 at n=1e5: +-0.0041
        freqs = np.bincount(draws, minlength=4) / n
        assert np.abs(freqs - 0.25).max() <= 3 * np.sqrt(0.25 * 0.75 / n)

    def test_refresh_cadence_follows_update_period(self):
        sched = WeightedScan(3, WeightedScanConfig(update_period=5))
        rng = np.random.default_rng(2)
        for t in range(1, 21):
            sched.observe(t % 3, float(t))
            sched.next_index(t, rng)
        assert len(sched.weight_snapshots()) == 4  # draws 1, 6, 11, 16

    def test_freeze_at_burn_in_end_when_adaptation_is_off(self):
        sched = WeightedScan(2, WeightedScanConfig(adapt_after_burn_in=False))
        rng = np.random.default_rng(3)
        feed_rng = np.random.default_rng(4)
        for t in range(1, 11):
            sched.observe(t % 2, feed_rng.normal())
            sched.next_index(t, rng)
        sched.on_burn_in_end()
        frozen = sched.weights.copy()
        n_snapshots = len(sched.weight_snapshots())
        for t in range(11, 60):
            sched.observe(t % 2, feed_rng.normal(0, 10))
            sched.next_index(t, rng)
        np.testing.assert_array_equal(sched.weights, frozen)
        assert len(sched.weight_snapshots()) == n_snapshots

    def test_keeps_adapting_by_default(self):
        sched = WeightedScan(2, WeightedScanConfig(update_period=2))
        rng = np.random.default_rng(3)
        feed_rng = np.random.default_rng(4)
        for t in range(1, 11):
            sched.observe(t % 2, feed_rng.normal())
            sched.next_index(t, rng)
        sched.on_burn_in_end()
        before = len(sched.weight_snapshots())
        for t in range(11, 31):
            sched.observe(t % 2, feed_rng.normal(0, 10))
            sched.next_index(t, rng)
        assert len(sched.weight_snapshots()) > before

    def test_snapshots_record_valid_distributions(self):
        sched = WeightedScan(3, WeightedScanConfig(update_period=4))
        rng = np.random.default_rng(6)
        feed_rng = np.random.default_rng(8)
        for t in range(1, 41):
            sched.observe(int(feed_rng.integers(3)), feed_rng.normal())
            sched.next_index(t, rng)
        for step, q in sched.weight_snapshots():
            assert 1 <= step <= 40
            assert q.sum() == pytest.approx(1.0, abs=1e-12)
            assert (q > 0).all()

    def test_rejects_unknown_statistic(self):
        with pytest.raises(ValueError):
            WeightedScan(2, statistic="median")

    def test_config_validation(self):
        with pytest.raises(ValueError):
            WeightedScanConfig(update_period=0)
        with pytest.raises(ValueError):
            WeightedScanConfig(reg=-1.0)
