import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from replink import analytic
from replink.params import (
    ConfigurationError,
    Duration,
    MemoryBudget,
    ProtocolConfig,
    ProtocolKind,
)

US = Duration.from_us
NS = Duration.from_ns


def brute_force_sr_numerator(n_a, n_b, p):
    """Expected latched pairs per round by exhaustive outcome enumeration."""
    p = Fraction(p)
    total = Fraction(0)
    for outcome in itertools.product([0, 1], repeat=n_a):
        weight = Fraction(1)
        for hit in outcome:
            weight *= p if hit else (1 - p)
        total += weight * min(sum(outcome), n_b)
    return total


class TestRoundTime:
    def test_mitm_example(self):
        config = ProtocolConfig(ProtocolKind.MITM, MemoryBudget.symmetric(100))
        assert analytic.round_time(config, US(100), NS(1)).ps == 100_100_000

    def test_mitm_empty_round(self):
        config = ProtocolConfig(ProtocolKind.MITM, MemoryBudget.symmetric(0))
        assert analytic.round_time(config, US(100), NS(1)) == US(100)

    def test_sr_example(self):
        config = ProtocolConfig(ProtocolKind.SR, MemoryBudget.sender_receiver(184, 16))
        assert analytic.round_time(config, US(100), NS(1)).ps == 200_184_000

    def test_mps_counts_bin_width(self):
        config = ProtocolConfig(ProtocolKind.MPS, MemoryBudget.symmetric(3), k_attempts=6)
        assert analytic.round_time(config, US(100), NS(10)).ps == 100_000_000 + 3 * 6 * 10_000


class TestMitmRate:
    def test_worked_example(self):
        bundle = analytic.mitm_rate(100, 0.05, US(100), NS(1))
        assert bundle.rate_per_s == pytest.approx(4.995e4, rel=1e-3)
        assert bundle.utilization == pytest.approx(9.99e-4, rel=1e-3)

    def test_no_successes(self):
        assert analytic.mitm_rate(100, 0.0, US(100), NS(1)).rate_per_s == 0.0

    def test_zero_link_delay_saturates_the_bound(self):
        bundle = analytic.mitm_rate(10, 0.3, Duration(0), NS(1))
        assert bundle.utilization == 1.0
        assert bundle.rate_per_s == bundle.upper_bound_per_s

    @given(
        st.integers(min_value=0, max_value=500),
        st.floats(min_value=0.0, max_value=1.0),
        st.integers(min_value=0, max_value=10**9),
        st.integers(min_value=1, max_value=10**6),
    )
    def test_rate_is_exactly_utilization_times_bound(self, n, p, link_ps, clock_ps):
        if n == 0 and link_ps == 0:
            link_ps = 1  # a zero-length round is rejected outright
        bundle = analytic.mitm_rate(n, p, Duration(link_ps), Duration(clock_ps))
        assert bundle.rate_per_s == bundle.utilization * bundle.upper_bound_per_s
        assert 0.0 <= bundle.utilization <= 1.0


class TestSrRate:
    def test_small_case_against_brute_force(self):
        expected = brute_force_sr_numerator(2, 1, Fraction(1, 2))
        assert expected == Fraction(3, 4)
        assert analytic.sr_expected_pairs_per_round(2, 1, 0.5) == pytest.approx(0.75, abs=1e-12)

    @pytest.mark.parametrize("n_a,n_b", [(3, 1), (5, 2), (8, 3), (10, 10), (7, 0)])
    @pytest.mark.parametrize("p", [0.1, 0.35, 0.9])
    def test_matches_exhaustive_enumeration(self, n_a, n_b, p):
        expected = float(brute_force_sr_numerator(n_a, n_b, Fraction(p).limit_denominator(10**9)))
        assert analytic.sr_expected_pairs_per_round(n_a, n_b, p) == pytest.approx(expected, abs=1e-10)

    def test_uncapped_receiver_gives_exact_binomial_mean(self):
        assert analytic.sr_expected_pairs_per_round(40, 40, 0.37) == 40 * 0.37

    def test_zero_probability(self):
        assert analytic.sr_rate(4, 2, 0.0, US(100), NS(1)).rate_per_s == 0.0

    def test_large_sender_is_finite_and_bounded(self):
        bundle = analytic.sr_rate(5000, 100, 0.02, US(100), NS(1))
        assert 0.0 < bundle.rate_per_s <= bundle.upper_bound_per_s

    def test_requires_sender_at_least_receiver(self):
        with pytest.raises(ConfigurationError):
            analytic.sr_rate(2, 3, 0.5, US(100), NS(1))

    @given(
        st.integers(min_value=1, max_value=60),
        st.floats(min_value=1e-6, max_value=1.0),
        st.integers(min_value=1, max_value=10**9),
        st.integers(min_value=100, max_value=10**6),
        st.data(),
    )
    @settings(max_examples=60)
    def test_lower_rate_than_mitm_at_equal_budget(self, n, p, link_ps, clock_ps, data):
        # fixed budget 2N split so the sender has fewer than all 2N qubits
        n_a = data.draw(st.integers(min_value=n, max_value=2 * n - 1))
        n_b = 2 * n - n_a
        tau_link, tau_clock = Duration(link_ps), Duration(clock_ps)
        sr = analytic.sr_rate(n_a, n_b, p, tau_link, tau_clock)
        mitm = analytic.mitm_rate(n, p, tau_link, tau_clock)
        assert sr.rate_per_s < mitm.rate_per_s


class TestSrAllocation:
    def test_worked_example(self):
        budget = analytic.sr_receiver_allocation(100, 0.0504)
        assert (budget.n_receiver, budget.n_sender) == (16, 184)

    def test_zero_probability_floor(self):
        budget = analytic.sr_receiver_allocation(100, 0.0)
        assert (budget.n_receiver, budget.n_sender) == (6, 194)

    def test_budget_too_small(self):
        with pytest.raises(ConfigurationError, match="too small"):
            analytic.sr_receiver_allocation(2, 0.5)


class TestMpsAttempts:
    @pytest.mark.parametrize("p_l,p_m,expected", [(1.0, 1.0, 3), (0.5, 1.0, 6), (0.1, 0.1, 300)])
    def test_examples(self, p_l, p_m, expected):
        assert analytic.mps_attempts_per_bin(p_l, p_m) == expected

    def test_zero_product_rejected(self):
        with pytest.raises(ConfigurationError):
            analytic.mps_attempts_per_bin(0.0, 0.5)


class TestMpsEntanglement:
    def test_worked_example(self):
        ent = analytic.mps_entanglement(0.5, 0.5, 1.0, 6)
        assert ent.p_ent_sum == pytest.approx(0.333251953125, abs=1e-15)
        assert ent.p_ent_closed == pytest.approx(0.333251953125, abs=1e-15)
        assert ent.lower_bound == pytest.approx(0.2375)
        assert ent.upper_bound == pytest.approx(1.0 / 3.0)
        assert ent.p_latch == pytest.approx(0.984375, abs=1e-15)

    def test_single_attempt_reduces_to_joint_probability(self):
        ent = analytic.mps_entanglement(0.3, 0.3, 0.7, 1)
        assert ent.p_ent_sum == pytest.approx(0.3 * 0.7 * 0.3, abs=1e-15)

    def test_many_attempts_approach_geometric_limit(self):
        ent = analytic.mps_entanglement(0.5, 0.5, 1.0, 10**6)
        assert ent.p_ent_sum == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert ent.p_ent_closed == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_asymmetric_sides_fall_back_to_the_sum(self):
        ent = analytic.mps_entanglement(0.2, 0.6, 0.5, 10)
        manual = sum(
            (0.2 * 0.5 * 0.6) * (1 - 0.5 * (0.2 + 0.6) + 0.2 * 0.5 * 0.6) ** j for j in range(10)
        )
        assert ent.p_ent_sum == pytest.approx(manual, abs=1e-12)
        assert ent.p_ent_closed == ent.p_ent_sum

    @given(
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.01, max_value=1.0),
        st.integers(min_value=1, max_value=2000),
    )
    @settings(max_examples=200)
    def test_sum_and_closed_form_agree(self, p_l, p_m, k):
        ent = analytic.mps_entanglement(p_l, p_l, p_m, k)
        assert abs(ent.p_ent_sum - ent.p_ent_closed) <= 1e-12

    @given(st.floats(min_value=0.01, max_value=0.99), st.floats(min_value=0.01, max_value=1.0))
    @settings(max_examples=200)
    def test_bounds_and_latch_with_chosen_attempts(self, p_l, p_m):
        k = analytic.mps_attempts_per_bin(p_l, p_m)
        ent = analytic.mps_entanglement(p_l, p_l, p_m, k)
        assert ent.lower_bound < ent.p_ent_closed < ent.upper_bound
        assert ent.p_latch > 0.95

    @given(st.floats(min_value=0.001, max_value=0.095), st.floats(min_value=0.01, max_value=1.0))
    @settings(max_examples=100)
    def test_half_latch_approximation_for_small_sides(self, p_l, p_m):
        k = analytic.mps_attempts_per_bin(p_l, p_m)
        ent = analytic.mps_entanglement(p_l, p_l, p_m, k)
        assert abs(ent.p_ent_sum - p_l / 2.0) / (p_l / 2.0) <= 0.05


class TestMpsRate:
    def test_worked_example(self):
        ent = analytic.mps_entanglement(0.5, 0.5, 1.0, 6)
        bundle = analytic.mps_rate(3, ent, US(100), NS(10))
        assert bundle.round_time.ps == 100_180_000
        assert bundle.rate_per_s == pytest.approx(9.98e3, rel=1e-3)

    def test_zero_entanglement(self):
        ent = analytic.mps_entanglement(0.5, 0.5, 0.0, 6)
        assert analytic.mps_rate(3, ent, US(100), NS(10)).rate_per_s == 0.0

    def test_bin_utilization_matches_rational_brute_force(self):
        # direct sum with exact fractions: y = 1/2, K = 6
        y = Fraction(1, 2)
        expected = sum(k * y * (1 - y) ** k for k in range(1, 7)) / 6
        assert analytic.mps_bin_utilization(0.5, 1.0, 6) == pytest.approx(float(expected), abs=1e-15)
        assert float(expected) == 0.15625

    def test_bin_utilization_no_latch_possible(self):
        assert analytic.mps_bin_utilization(0.0, 1.0, 5) == 0.0

    def test_utilization_within_unit_interval(self):
        for p_l, p_m in [(0.9, 1.0), (0.05, 0.5), (0.3, 0.1)]:
            k = analytic.mps_attempts_per_bin(p_l, p_m)
            ent = analytic.mps_entanglement(p_l, p_l, p_m, k)
            bundle = analytic.mps_rate(50, ent, US(50), NS(1))
            assert 0.0 <= bundle.utilization <= 1.0


class TestFastClock:
    def test_crossover_ratio_is_exactly_one(self):
        est = analytic.fast_clock_estimates(100, 0.5, 0.5, US(100))
        assert est.ratio == 1.0

    def test_low_transmission_ratio(self):
        assert analytic.fast_clock_estimates(100, 0.5, 0.1, US(100)).ratio == pytest.approx(5.0)

    def test_consistent_with_full_rate_in_fast_clock_regime(self):
        p_bsa, p_opt = 0.5, 0.4
        est = analytic.fast_clock_estimates(100, p_bsa, p_opt, US(100))
        full = analytic.mitm_rate(100, p_bsa * p_opt**2, US(100), NS(1))
        assert est.r_mitm == pytest.approx(full.rate_per_s, rel=0.01)


class TestPurification:
    def test_exact_rational_values(self):
        eps = Fraction(1, 20)
        exact_out = 7 * eps**3 * (1 - eps) ** 4 + eps**7
        exact_success = (1 - eps) ** 7
        bounds = analytic.purification_bounds(0.05, 10)
        assert bounds.epsilon_out == pytest.approx(float(exact_out), abs=1e-12)
        assert bounds.p_success == pytest.approx(float(exact_success), abs=1e-12)
        assert bounds.epsilon_total == pytest.approx(10 * float(exact_out), abs=1e-12)

    def test_perfect_inputs(self):
        bounds = analytic.purification_bounds(0.0, 10)
        assert bounds.epsilon_out == 0.0
        assert bounds.p_success == 1.0
        assert bounds.epsilon_total == 0.0

    @given(st.floats(min_value=0.0, max_value=0.5))
    def test_purification_never_worsens_moderate_errors(self, eps):
        bounds = analytic.purification_bounds(eps, 1)
        assert bounds.epsilon_out <= eps + 1e-15


class TestMonotonicity:
    @pytest.mark.parametrize("protocol", ["mitm", "sr", "mps1", "mps01"])
    def test_rates_non_increasing_with_distance(self, protocol):
        from replink.params import (
            LinkGeometry,
            OpticalStack,
            hardware_preset,
            link_delay,
            link_success_probability,
            mps_success_probability,
            optical_transmission,
        )

        profile = hardware_preset("optimistic")
        stack = OpticalStack(0.5, profile.interface_efficiency, p_mid=1.0 if protocol == "mps1" else 0.1)
        previous = math.inf
        for km in range(1, 101, 1):
            geometry = LinkGeometry(km * 1000.0)
            tau_link = link_delay(geometry)
            p_opt = optical_transmission(profile, geometry)
            if protocol == "mitm":
                rate = analytic.mitm_rate(100, link_success_probability(stack, p_opt), tau_link, profile.cycle_time).rate_per_s
            elif protocol == "sr":
                p = link_success_probability(stack, p_opt)
                budget = analytic.sr_receiver_allocation(100, p)
                rate = analytic.sr_rate(budget.n_sender, budget.n_receiver, p, tau_link, profile.cycle_time).rate_per_s
            else:
                success = mps_success_probability(stack, p_opt)
                k = analytic.mps_attempts_per_bin(success.p_side, stack.p_mid)
                ent = analytic.mps_entanglement(success.p_side, success.p_side, stack.p_mid, k)
                rate = analytic.mps_rate(100, ent, tau_link, profile.cycle_time).rate_per_s
            assert rate <= previous + 1e-9
            previous = rate
