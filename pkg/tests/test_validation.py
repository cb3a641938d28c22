"""Exact-enumeration oracles: tabular targets, the augmented-chain
stationarity check, jump-size objectives, and the ESJD identities.

The closed forms tested here are derived independently in small hand
calculations noted inline; Monte Carlo comparisons use frozen seeds with
precomputed standard-error margins.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgibbs.validation import (FiniteChainSpec, TabularModel,
                               augmented_stationary,
                               augmented_transition_matrix, esjd_closed_form,
                               esjd_monte_carlo, optimal_weights_numeric,
                               random_finite_chain_spec, scan_objective,
                               stationarity_residual)

from conftest import pair_joint


# --------------------------------------------------------------- TabularModel


class TestTabularModel:
    def test_joint_is_normalized_on_construction(self):
        model = TabularModel(np.array([[2.0, 1.0], [1.0, 4.0]]))
        assert model.joint_vector().sum() == pytest.approx(1.0, abs=1e-12)

    def test_conditional_matches_bayes_rule_by_hand(self):
        # p(x0=1 | x1=0) = 0.15 / (0.35 + 0.15) = 0.3
        model = TabularModel(pair_joint())
        probs = model.conditional_probs(np.array([0.0, 0.0]), 0)
        np.testing.assert_allclose(probs, [0.7, 0.3], atol=1e-12)
        probs = model.conditional_probs(np.array([0.0, 1.0]), 1)
        np.testing.assert_allclose(probs, [0.7, 0.3], atol=1e-12)

    def test_states_enumerates_the_full_product_space(self):
        model = TabularModel(np.full((2, 3), 1.0 / 6.0))
        states = model.states()
        assert len(states) == 6
        assert (0, 0) in states and (1, 2) in states

    def test_site_kernels_are_stochastic_and_preserve_pi(self):
        model = TabularModel(pair_joint())
        pi = model.joint_vector()
        for i in range(2):
            k = model.site_kernel(i)
            np.testing.assert_allclose(k.sum(axis=1), 1.0, atol=1e-12)
            np.testing.assert_allclose(pi @ k, pi, atol=1e-12)

    def test_conditional_sample_frequencies(self, rng):
        # 4000 draws of p=0.3; 3 sigma = 0.0217
        model = TabularModel(pair_joint())
        draws = [model.conditional_sample(np.array([0.0, 0.0]), 0, rng)
                 for _ in range(4000)]
        assert abs(np.mean(draws) - 0.3) <= 0.022

    def test_rejects_negative_and_zero_mass(self):
        with pytest.raises(ValueError):
            TabularModel(np.array([[0.5, -0.1], [0.3, 0.3]]))
        with pytest.raises(ValueError):
            TabularModel(np.zeros((2, 2)))


# ----------------------------------------------------------- augmented chain


class TestAugmentedChain:
    def test_transition_matrix_is_row_stochastic(self):
        spec = FiniteChainSpec.from_tabular(TabularModel(pair_joint()),
                                            np.array([0.6, 0.4]))
        p = augmented_transition_matrix(spec)
        assert p.shape == (8, 8)
        assert (p >= 0).all()
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)

    def test_block_structure_carries_target_weights(self):
        spec = FiniteChainSpec.from_tabular(TabularModel(pair_joint()),
                                            np.array([0.6, 0.4]))
        p = augmented_transition_matrix(spec)
        np.testing.assert_allclose(p[0:4, 0:4], 0.6 * spec.kernels[0],
                                   atol=1e-15)
        np.testing.assert_allclose(p[4:8, 0:4], 0.6 * spec.kernels[1],
                                   atol=1e-15)

    def test_claimed_stationary_vector_is_stationary(self):
        spec = FiniteChainSpec.from_tabular(TabularModel(pair_joint()),
                                            np.array([0.25, 0.75]))
        assert stationarity_residual(spec) <= 1e-12
        pi_aug = augmented_stationary(spec)
        assert pi_aug.sum() == pytest.approx(1.0, abs=1e-12)

    def test_pair_marginal_over_coordinate_recovers_target(self):
        spec = FiniteChainSpec.from_tabular(TabularModel(pair_joint()),
                                            np.array([0.3, 0.7]))
        pi_aug = augmented_stationary(spec).reshape(2, -1)
        np.testing.assert_allclose(pi_aug.sum(axis=0), spec.pi, atol=1e-12)

    def test_randomized_specs_have_tiny_residual(self):
        # small version of the acceptance sweep
        rng = np.random.default_rng(2)
        for _ in range(10):
            spec = random_finite_chain_spec(rng)
            assert stationarity_residual(spec) <= 1e-10

    def test_mismatched_target_is_rejected_at_construction(self):
        model = TabularModel(pair_joint())
        other = TabularModel(np.array([[0.7, 0.1], [0.1, 0.1]]))
        with pytest.raises(ValueError):
            FiniteChainSpec(pi=other.joint_vector(),
                            kernels=[model.site_kernel(0), model.site_kernel(1)],
                            weights=np.array([0.5, 0.5]))

    def test_degenerate_weights_are_rejected(self):
        model = TabularModel(pair_joint())
        with pytest.raises(ValueError):
            FiniteChainSpec.from_tabular(model, np.array([1.0, 0.0]))


# ------------------------------------------------------------ scan objective


class TestScanObjective:
    def test_hand_values(self):
        # sum d_i / q_i
        assert scan_objective(np.array([0.5, 0.5]), np.array([1.0, 1.0])) \
            == pytest.approx(4.0)
        assert scan_objective(np.array([0.2, 0.8]), np.array([1.0, 0.0])) \
            == pytest.approx(5.0)
        # at the root-size optimum the objective hits (sum sqrt d)^2
        assert scan_objective(np.array([2 / 3, 1 / 3]), np.array([4.0, 1.0])) \
            == pytest.approx(9.0)

    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            scan_objective(np.array([1.0, 0.0]), np.array([1.0, 1.0]))

    @given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_cauchy_schwarz_lower_bound(self, dim, seed):
        rng = np.random.default_rng(seed)
        d = rng.uniform(0.01, 100.0, size=dim)
        q = rng.dirichlet(np.ones(dim)) * 0.9 + 0.1 / dim
        bound = np.sqrt(d).sum() ** 2
        assert scan_objective(q, d) >= bound * (1 - 1e-12)


# ------------------------------------------------------------- ESJD formulas


class TestEsjdClosedForm:
    def test_lag_one_is_weighted_jump_mass(self):
        q = np.array([0.1, 0.3, 0.6])
        d = np.array([2.0, 5.0, 1.0])
        assert esjd_closed_form(q, d, 1) == pytest.approx(float(q @ d))

    def test_two_step_hand_value(self):
        # each of two sites updated with prob 1-(1/2)^2 = 3/4; sizes 1 each
        assert esjd_closed_form(np.array([0.5, 0.5]), np.array([1.0, 1.0]), 2) \
            == pytest.approx(1.5)

    def test_large_lag_saturates_at_total_jump_mass(self):
        q = np.array([0.4, 0.6])
        d = np.array([3.0, 7.0])
        assert esjd_closed_form(q, d, 10_000) == pytest.approx(10.0)

    def test_monotone_in_lag(self):
        q = np.array([0.25, 0.75])
        d = np.array([1.0, 2.0])
        values = [esjd_closed_form(q, d, k) for k in range(1, 12)]
        assert all(b >= a for a, b in zip(values, values[1:]))

    def test_rejects_lag_below_one(self):
        with pytest.raises(ValueError):
            esjd_closed_form(np.array([1.0]), np.array([1.0]), 0)


class TestEsjdMonteCarlo:
    def test_two_site_frozen_run_matches_closed_form(self):
        # closed form 1.5; frozen run lands at 1.50268 with se 0.00181
        est, se = esjd_monte_carlo(np.array([0.5, 0.5]), np.array([1.0, 1.0]),
                                   2, 1_000_000, np.random.default_rng(2024))
        assert se <= 0.003
        assert abs(est - 1.5) <= 3 * se

    def test_single_site_certain_update(self):
        # one site always selected: closed form is d exactly
        est, se = esjd_monte_carlo(np.array([1.0]), np.array([5.0]), 1,
                                   200_000, np.random.default_rng(8))
        assert abs(est - 5.0) <= 3 * se

    def test_rejects_tiny_trial_counts(self):
        with pytest.raises(ValueError):
            esjd_monte_carlo(np.array([1.0]), np.array([1.0]), 1, 1,
                             np.random.default_rng(0))


# ----------------------------------------------------------- optimal weights


class TestOptimalWeights:
    def test_equal_sizes_give_uniform_weights(self):
        np.testing.assert_allclose(optimal_weights_numeric(np.array([1.0, 1.0])),
                                   [0.5, 0.5], atol=1e-8)

    def test_root_size_proportionality_by_hand(self):
        # sqrt([4,1]) -> 2:1; sqrt([9,4,1]) -> 3:2:1
        np.testing.assert_allclose(optimal_weights_numeric(np.array([4.0, 1.0])),
                                   [2 / 3, 1 / 3], atol=1e-6)
        np.testing.assert_allclose(
            optimal_weights_numeric(np.array([9.0, 4.0, 1.0])),
            [3 / 6, 2 / 6, 1 / 6], atol=1e-6)

    def test_optimum_objective_attains_the_bound(self):
        d = np.array([11.0, 0.4, 2.5, 7.0])
        q = optimal_weights_numeric(d)
        bound = np.sqrt(d).sum() ** 2
        assert scan_objective(q, d) == pytest.approx(bound, rel=1e-9)

    def test_optimum_dominates_random_weightings(self):
        rng = np.random.default_rng(13)
        d = rng.uniform(0.01, 100.0, size=6)
        q_star = optimal_weights_numeric(d)
        best = scan_objective(q_star, d)
        for _ in range(1000):
            q = rng.dirichlet(np.ones(6)) * 0.98 + 0.02 / 6
            assert best <= scan_objective(q, d) + 1e-9

    @given(st.integers(2, 10), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=80, deadline=None)
    def test_numeric_optimum_matches_root_size_rule(self, dim, seed):
        rng = np.random.default_rng(seed)
        d = rng.uniform(0.01, 100.0, size=dim)
        expected = np.sqrt(d) / np.sqrt(d).sum()
        np.testing.assert_allclose(optimal_weights_numeric(d), expected,
                                   atol=1e-6)

    def test_rejects_nonpositive_sizes(self):
        with pytest.raises(ValueError):
            optimal_weights_numeric(np.array([1.0, 0.0]))
