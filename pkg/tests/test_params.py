import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from replink.params import (
    ConfigurationError,
    Duration,
    HardwareProfile,
    LinkGeometry,
    MemoryBudget,
    OpticalStack,
    ProtocolConfig,
    ProtocolKind,
    hardware_preset,
    link_delay,
    link_success_probability,
    mps_success_probability,
    optical_transmission,
    preset_bsa_probability,
    validate_probability,
)


class TestDuration:
    def test_basic_arithmetic_is_exact(self):
        a = Duration(1_000_000)
        b = Duration(3)
        assert (a + b).ps == 1_000_003
        assert (a - b).ps == 999_997
        assert (7 * b).ps == 21
        assert a // b == 333_333
        assert Duration.from_us(100).ps == 100_000_000
        assert Duration.from_ns(1).ps == 1_000
        assert Duration.from_ms(10).ps == 10_000_000_000

    def test_negative_rejected(self):
        with pytest.raises(ConfigurationError):
            Duration(-1)
        with pytest.raises(ConfigurationError):
            Duration(5) - Duration(6)

    def test_float_ps_rejected(self):
        with pytest.raises(TypeError):
            Duration(1.5)

    def test_ordering(self):
        assert Duration(1) < Duration(2)
        assert max(Duration(5), Duration(3)) == Duration(5)

    def test_seconds(self):
        assert Duration.from_us(25).seconds == pytest.approx(25e-6)


class TestLinkDelay:
    def test_5_km_is_about_25_us(self):
        delay = link_delay(LinkGeometry(5_000))
        assert delay.seconds * 1e6 == pytest.approx(25.0, rel=1e-2)

    def test_zero_length(self):
        assert link_delay(LinkGeometry(0)).ps == 0

    def test_20_km_matches_exact_rational_evaluation(self):
        # 1.5 * 20000 m / c, in ps, rounded to nearest
        exact = Fraction(3 * 10**16, 299_792_458)
        expected = int(exact) + (1 if exact - int(exact) >= Fraction(1, 2) else 0)
        delay = link_delay(LinkGeometry(20_000))
        assert abs(delay.ps - expected) <= 1

    @given(st.floats(min_value=1.0, max_value=200_000.0))
    def test_linear_in_length(self, length):
        one = link_delay(LinkGeometry(length))
        two = link_delay(LinkGeometry(2 * length))
        assert abs(two.ps - 2 * one.ps) <= 1


class TestOpticalTransmission:
    def test_optimistic_prefactor_at_zero_distance(self):
        profile = hardware_preset("optimistic")
        assert optical_transmission(profile, LinkGeometry(0)) == pytest.approx(0.5)

    def test_qd_at_44_km_is_half_over_e(self):
        value = optical_transmission(hardware_preset("qd"), LinkGeometry(44_000))
        assert value == pytest.approx(0.5 * math.exp(-1.0), abs=1e-12)
        assert value == pytest.approx(0.18394, abs=1e-5)

    def test_ion_prefactor(self):
        assert optical_transmission(hardware_preset("ion"), LinkGeometry(0)) == pytest.approx(0.05)

    def test_nv_prefactor(self):
        assert optical_transmission(hardware_preset("nv"), LinkGeometry(0)) == pytest.approx(0.025)

    @given(st.floats(min_value=0.0, max_value=100_000.0), st.floats(min_value=100.0, max_value=100_000.0))
    def test_strictly_decreasing_in_length(self, length, extra):
        profile = hardware_preset("qd")
        near = optical_transmission(profile, LinkGeometry(length))
        far = optical_transmission(profile, LinkGeometry(length + extra))
        assert far < near
        assert 0.0 <= far <= 1.0


class TestSuccessProbabilities:
    def test_link_success_example(self):
        stack = OpticalStack(p_bsa=0.5, interface_efficiency=0.5)
        assert link_success_probability(stack, 0.5) == pytest.approx(0.125)

    def test_total_loss(self):
        stack = OpticalStack(p_bsa=0.5, interface_efficiency=0.5)
        assert link_success_probability(stack, 0.0) == 0.0

    def test_snspd_detector_model(self):
        stack = OpticalStack(p_bsa=0.24, interface_efficiency=0.05)
        assert link_success_probability(stack, 0.05) == pytest.approx(6.0e-4)

    def test_mps_success_example(self):
        stack = OpticalStack(p_bsa=0.5, interface_efficiency=0.5, p_mid=1.0)
        result = mps_success_probability(stack, 0.5)
        assert result.p_joint == pytest.approx(0.0625)
        assert result.p_side == pytest.approx(0.25)

    def test_mps_source_never_fires(self):
        stack = OpticalStack(p_bsa=0.5, interface_efficiency=0.5, p_mid=0.0)
        assert mps_success_probability(stack, 0.5).p_joint == 0.0

    def test_beamsplitter_source_halves_joint_probability(self):
        full = OpticalStack(p_bsa=0.5, interface_efficiency=0.5, p_mid=1.0)
        half = OpticalStack(p_bsa=0.5, interface_efficiency=0.5, p_mid=0.5)
        assert mps_success_probability(half, 0.3).p_joint == pytest.approx(
            0.5 * mps_success_probability(full, 0.3).p_joint
        )

    def test_mps_requires_p_mid(self):
        stack = OpticalStack(p_bsa=0.5, interface_efficiency=0.5)
        with pytest.raises(ConfigurationError):
            mps_success_probability(stack, 0.5)

    @given(
        st.floats(min_value=0.0, max_value=0.5),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_mps_joint_equals_p_mid_times_p_bsa_times_link_success(self, p_bsa, p_mid, p_opt):
        stack = OpticalStack(p_bsa=p_bsa, interface_efficiency=1.0, p_mid=p_mid)
        joint = mps_success_probability(stack, p_opt).p_joint
        p = link_success_probability(stack, p_opt)
        assert joint <= p_mid * p_bsa * p + 1e-15
        assert joint == pytest.approx(p_mid * p_bsa * p, abs=1e-15)
        assert 0.0 <= joint <= 1.0


class TestPresets:
    @pytest.mark.parametrize(
        "name,cycle_ps,emission,collection",
        [
            ("ion", 1_000_000, 1.00, 0.05),
            ("nv", 100_000, 0.05, 0.50),
            ("qd", 10_000, 1.00, 0.50),
            ("optimistic", 1_000, 1.00, 0.50),
            ("pessimistic", 1_000, 1.00, 0.10),
        ],
    )
    def test_table(self, name, cycle_ps, emission, collection):
        profile = hardware_preset(name)
        assert profile.cycle_time.ps == cycle_ps
        assert profile.emission_fraction == emission
        assert profile.collection_efficiency == collection

    def test_unknown_preset_lists_valid_names(self):
        with pytest.raises(ConfigurationError, match="ion"):
            hardware_preset("warpdrive")
        with pytest.raises(ConfigurationError):
            preset_bsa_probability("warpdrive")

    def test_bsa_defaults(self):
        assert preset_bsa_probability("optimistic") == 0.5
        assert preset_bsa_probability("pessimistic") == 0.1
        assert preset_bsa_probability("qd") == 0.24


class TestValidation:
    def test_probability_range(self):
        with pytest.raises(ConfigurationError):
            validate_probability(-0.1)
        with pytest.raises(ConfigurationError):
            validate_probability(1.1)
        with pytest.raises(ConfigurationError):
            validate_probability(float("nan"))
        assert validate_probability(0.3) == 0.3

    def test_bsa_ceiling(self):
        with pytest.raises(ConfigurationError, match="0.5"):
            OpticalStack(p_bsa=0.51, interface_efficiency=1.0)

    def test_geometry_invariants(self):
        with pytest.raises(ConfigurationError):
            LinkGeometry(-1.0)
        with pytest.raises(ConfigurationError):
            LinkGeometry(10.0, refractive_index=0.5)
        with pytest.raises(ConfigurationError):
            LinkGeometry(10.0, attenuation_length_m=0.0)

    def test_profile_needs_positive_cycle(self):
        with pytest.raises(ConfigurationError):
            HardwareProfile(Duration(0), 1.0, 1.0)

    def test_memory_budget_counts(self):
        with pytest.raises(ConfigurationError):
            MemoryBudget(n_per_side=-1)
        budget = MemoryBudget.sender_receiver(184, 16)
        assert (budget.n_sender, budget.n_receiver, budget.n_per_side) == (184, 16, 100)

    def test_protocol_config_k_attempts(self):
        with pytest.raises(ConfigurationError):
            ProtocolConfig(ProtocolKind.MPS, MemoryBudget.symmetric(3))
        with pytest.raises(ConfigurationError):
            ProtocolConfig(ProtocolKind.MITM, MemoryBudget.symmetric(3), k_attempts=5)
