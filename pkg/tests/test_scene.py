"""Tests for the steering manifold, channel and bias synthesis."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest_mock import MockerFixture

from quantum_music.exceptions import InvalidArgumentError
from quantum_music.models.channel import PolarizationMode
from quantum_music.models.geometry import AngleReference, ArrayGeometry, AtomicConstants, UserSet
from quantum_music.numerics.random import RngStream
from quantum_music.services.scene import (
    conventional_channel,
    dipole_projection_gain,
    expected_gain_power,
    gain_scale,
    generate_bias,
    generate_channel,
    rabi_excitation_probability,
    steering_matrix,
    steering_vector,
)


class TestSteeringVector:
    """Tests for the ULA manifold."""

    def test_unit_norm(self, geometry: ArrayGeometry) -> None:
        """Test steering vectors have unit norm."""
        assert np.linalg.norm(steering_vector(math.radians(73.0), geometry)) == pytest.approx(1.0)

    def test_reference_element(self, geometry: ArrayGeometry) -> None:
        """Test the first element carries no phase."""
        assert steering_vector(1.1, geometry)[0] == pytest.approx(1 / math.sqrt(16))

    def test_axis_broadside_is_flat(self, geometry: ArrayGeometry) -> None:
        """Test theta = 90 deg from the axis gives equal phases."""
        np.testing.assert_allclose(steering_vector(math.pi / 2, geometry), 0.25, atol=1e-12)

    def test_broadside_reference(self) -> None:
        """Test the sin convention is flat at theta = 0."""
        geom = ArrayGeometry.from_ratio(8, angle_reference=AngleReference.BROADSIDE)
        np.testing.assert_allclose(steering_vector(0.0, geom), 1 / math.sqrt(8), atol=1e-12)

    def test_axis_reference_unambiguous(self, geometry: ArrayGeometry) -> None:
        """Test 60 and 120 deg differ under the axis convention."""
        a60 = steering_vector(math.radians(60.0), geometry)
        a120 = steering_vector(math.radians(120.0), geometry)
        assert abs(np.vdot(a60, a120)) < 0.5

    def test_broadside_reference_folds(self) -> None:
        """Test 60 and 120 deg coincide under the sin convention."""
        geom = ArrayGeometry.from_ratio(8, angle_reference=AngleReference.BROADSIDE)
        np.testing.assert_allclose(
            steering_vector(math.radians(60.0), geom),
            steering_vector(math.radians(120.0), geom),
            atol=1e-12,
        )

    def test_matrix_columns(self, geometry: ArrayGeometry) -> None:
        """Test steering_matrix stacks steering vectors as columns."""
        thetas = np.radians([40.0, 100.0])
        matrix = steering_matrix(thetas, geometry)
        assert matrix.shape == (16, 2)
        np.testing.assert_allclose(matrix[:, 1], steering_vector(thetas[1], geometry))


class TestPolarizationGain:
    """Tests for the dipole projection gain."""

    def test_gain_variance(self, consts: AtomicConstants) -> None:
        """Test mu^T eps has variance |mu|^2 / 3."""
        rng = RngStream(4)
        draws = np.array([dipole_projection_gain(rng, consts) for _ in range(20_000)])
        assert np.var(draws) / (consts.dipole_norm**2 / 3) == pytest.approx(1.0, rel=0.05)

    def test_normalized_power(self, consts: AtomicConstants) -> None:
        """Test the normalized domain has E[g^2] = 1/3."""
        assert expected_gain_power(consts, physical_units=False) == pytest.approx(1 / 3)

    def test_physical_scale(self, consts: AtomicConstants) -> None:
        """Test physical units divide by hbar."""
        assert gain_scale(consts, physical_units=True) == pytest.approx(1 / consts.hbar)


class TestGenerateChannel:
    """Tests for generate_channel."""

    def test_shape(self, geometry: ArrayGeometry, users: UserSet, consts: AtomicConstants) -> None:
        """Test the channel is M x K."""
        channel = generate_channel(RngStream(1), geometry, users, consts)
        assert channel.entries.shape == (16, 2)
        assert channel.num_elements == 16
        assert channel.num_users == 2

    def test_columns_on_manifold(
        self,
        mocker: MockerFixture,
        geometry: ArrayGeometry,
        users: UserSet,
        consts: AtomicConstants,
    ) -> None:
        """Test conj(A) columns are scaled steering vectors when gains are fixed."""
        mocker.patch(
            'quantum_music.services.scene._draw_polarization_gains',
            return_value=np.full((16, 2), 0.5),
        )
        channel = generate_channel(RngStream(1), geometry, users, consts)
        amplitude = 0.5 * gain_scale(consts, False) * math.sqrt(users.per_user_power)
        for k, theta in enumerate(users.angles):
            expected = amplitude * math.sqrt(16) * steering_vector(theta, geometry)
            np.testing.assert_allclose(channel.assembled()[:, k], expected, rtol=1e-12)

    def test_per_user_gain_shared_across_cells(
        self, geometry: ArrayGeometry, users: UserSet, consts: AtomicConstants
    ) -> None:
        """Test per-user polarization is constant down each column."""
        channel = generate_channel(RngStream(2), geometry, users, consts)
        gains = channel.polarization_gains
        np.testing.assert_array_equal(gains, np.tile(gains[0], (16, 1)))

    def test_per_cell_gain(
        self, geometry: ArrayGeometry, users: UserSet, consts: AtomicConstants
    ) -> None:
        """Test per-cell polarization varies between cells."""
        channel = generate_channel(
            RngStream(2), geometry, users, consts, polarization_mode=PolarizationMode.PER_CELL
        )
        assert len(np.unique(channel.polarization_gains[:, 0])) == 16

    def test_no_users(self, geometry: ArrayGeometry, consts: AtomicConstants) -> None:
        """Test K = 0 gives an empty M x 0 channel."""
        channel = generate_channel(RngStream(3), geometry, UserSet.uniform((), 1e-18), consts)
        assert channel.entries.shape == (16, 0)

    def test_deterministic(
        self, geometry: ArrayGeometry, users: UserSet, consts: AtomicConstants
    ) -> None:
        """Test the same stream gives the same channel."""
        first = generate_channel(RngStream(9), geometry, users, consts)
        second = generate_channel(RngStream(9), geometry, users, consts)
        np.testing.assert_array_equal(first.entries, second.entries)

    def test_doubling_power_scales_columns(
        self, geometry: ArrayGeometry, consts: AtomicConstants
    ) -> None:
        """Test doubling P_k multiplies every column by sqrt(2) for the same seed."""
        angles = np.radians([60.0, 95.0, 130.0])
        base = generate_channel(RngStream(12), geometry, UserSet.uniform(angles, 3e-18), consts)
        louder = generate_channel(RngStream(12), geometry, UserSet.uniform(angles, 6e-18), consts)
        np.testing.assert_array_equal(louder.polarization_gains, base.polarization_gains)
        np.testing.assert_allclose(louder.entries, math.sqrt(2.0) * base.entries, rtol=1e-14)

    def test_conventional_unit_gain(self, geometry: ArrayGeometry, users: UserSet) -> None:
        """Test the conventional channel has constant magnitude sqrt(P_k)."""
        channel = conventional_channel(geometry, users)
        np.testing.assert_allclose(np.abs(channel.entries), math.sqrt(users.per_user_power))


class TestGenerateBias:
    """Tests for generate_bias."""

    def test_magnitude(self, geometry: ArrayGeometry, consts: AtomicConstants) -> None:
        """Test |b_m| = ratio * signal_rms for every cell."""
        bias = generate_bias(RngStream(5), geometry, consts, 5.0, 2e-9)
        np.testing.assert_allclose(np.abs(bias.entries), 1e-8)
        assert bias.num_elements == 16

    def test_random_phase(self, geometry: ArrayGeometry, consts: AtomicConstants) -> None:
        """Test the bias phases are not all equal."""
        bias = generate_bias(RngStream(5), geometry, consts, 5.0, 1.0)
        assert np.std(np.angle(bias.entries)) > 0.1

    def test_zero_ratio(self, geometry: ArrayGeometry, consts: AtomicConstants) -> None:
        """Test ratio 0 switches the reference off."""
        bias = generate_bias(RngStream(5), geometry, consts, 0.0, 1.0)
        np.testing.assert_array_equal(bias.entries, 0.0)

    def test_negative_ratio(self, geometry: ArrayGeometry, consts: AtomicConstants) -> None:
        """Test negative ratio is rejected."""
        with pytest.raises(InvalidArgumentError):
            generate_bias(RngStream(5), geometry, consts, -1.0, 1.0)


class TestRabiExcitation:
    """Tests for rabi_excitation_probability."""

    def test_pi_pulse(self) -> None:
        """Test Omega t = pi fully excites the atom."""
        assert rabi_excitation_probability(math.pi, 1.0) == pytest.approx(1.0)

    def test_zero_time(self) -> None:
        """Test no evolution at t = 0."""
        assert rabi_excitation_probability(1e7, 0.0) == 0.0

    def test_negative_time(self) -> None:
        """Test negative time is rejected."""
        with pytest.raises(InvalidArgumentError):
            rabi_excitation_probability(1.0, -1e-9)

    @settings(max_examples=200)
    @given(
        omega=st.floats(min_value=0.0, max_value=1e8, allow_nan=False),
        t=st.floats(min_value=0.0, max_value=1e-5, allow_nan=False),
    )
    def test_formula(self, omega: float, t: float) -> None:
        """Test the population equals sin^2(Omega t / 2)."""
        expected = math.sin(omega * t / 2.0) ** 2
        assert abs(rabi_excitation_probability(omega, t) - expected) <= 1e-15
        assert 0.0 <= rabi_excitation_probability(omega, t) <= 1.0
