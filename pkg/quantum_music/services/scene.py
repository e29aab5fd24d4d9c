"""Physical scenario synthesis: steering manifold, channel, bias and Rabi response."""

import math
from functools import lru_cache

import numpy as np

from quantum_music.exceptions import InvalidArgumentError
from quantum_music.models.channel import BiasVector, ChannelMatrix, PolarizationMode
from quantum_music.models.estimation import AngleGrid
from quantum_music.models.geometry import ArrayGeometry, AtomicConstants, UserSet
from quantum_music.numerics.random import RngStream, sample_unit_phases

POLARIZATION_VARIANCE = 1.0 / 3.0


def _phase_gradient(theta: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """2*pi*m*d*u(theta)/lambda for m = 0..M-1, shape (M, len(theta))."""
    m = np.arange(geom.num_elements)[:, None]
    u = geom.direction_cosine(np.atleast_1d(theta))[None, :]
    return 2 * np.pi * m * geom.d_over_lambda * u


def steering_vector(theta: float, geom: ArrayGeometry) -> np.ndarray:
    """ULA far-field steering vector a(theta), unit norm."""
    return steering_matrix(np.array([theta]), geom)[:, 0]


def steering_matrix(thetas: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """Steering vectors of several angles stacked as columns, shape (M, G)."""
    phases = _phase_gradient(np.asarray(thetas, dtype=float), geom)
    return np.exp(-1j * phases) / np.sqrt(geom.num_elements)


@lru_cache(maxsize=8)
def grid_manifold(geom: ArrayGeometry, grid: AngleGrid) -> np.ndarray:
    """Steering matrix over a search grid, cached per (geometry, grid)."""
    manifold = steering_matrix(grid.angles(), geom)
    manifold.setflags(write=False)
    return manifold


def dipole_projection_gain(rng: RngStream, consts: AtomicConstants) -> float:
    """mu_eg^T eps with each polarization component drawn from N(0, 1/3)."""
    eps = rng.generator.normal(0.0, np.sqrt(POLARIZATION_VARIANCE), size=3)
    return float(np.dot(consts.dipole_moment, eps))


def gain_scale(consts: AtomicConstants, physical_units: bool) -> float:
    """Factor turning a dipole projection into a channel amplitude.

    Physical units give the Rabi frequency in rad/s (1/hbar); the normalized
    domain divides by |mu_eg| so the projection has variance 1/3.
    """
    if physical_units:
        return 1.0 / consts.hbar
    return 1.0 / consts.dipole_norm


def expected_gain_power(consts: AtomicConstants, physical_units: bool) -> float:
    """E[g^2] of the scaled polarization gain."""
    return (consts.dipole_norm * gain_scale(consts, physical_units)) ** 2 * POLARIZATION_VARIANCE


def rabi_frequency_scale(consts: AtomicConstants) -> float:
    """|mu_eg| / hbar, the rad/s per unit field amplitude."""
    return consts.dipole_norm / consts.hbar


def _draw_polarization_gains(
    rng: RngStream,
    consts: AtomicConstants,
    num_elements: int,
    num_users: int,
    mode: PolarizationMode,
) -> np.ndarray:
    if mode is PolarizationMode.PER_CELL:
        draws = [
            dipole_projection_gain(rng, consts)
            for _ in range(num_elements * num_users)
        ]
        return np.asarray(draws, dtype=float).reshape(num_elements, num_users)
    per_user = np.array([dipole_projection_gain(rng, consts) for _ in range(num_users)])
    return np.tile(per_user, (num_elements, 1))


def generate_channel(
    rng: RngStream,
    geom: ArrayGeometry,
    users: UserSet,
    consts: AtomicConstants,
    polarization_mode: PolarizationMode = PolarizationMode.PER_USER,
    physical_units: bool = False,
) -> ChannelMatrix:
    """Effective channel a_{m,k} = g_{m,k} sqrt(P_k) alpha exp(+j 2 pi m d u_k / lambda).

    Columns pair with the conjugate steering vector, so the conjugate
    assembly used by channel recovery lies on the steering manifold.
    """
    num_users = users.num_users
    gains = _draw_polarization_gains(
        rng, consts, geom.num_elements, num_users, polarization_mode
    )
    if num_users == 0:
        return ChannelMatrix(
            entries=np.zeros((geom.num_elements, 0), dtype=complex),
            polarization_gains=gains.reshape(geom.num_elements, 0),
        )
    phases = _phase_gradient(np.asarray(users.angles), geom)
    amplitude = gain_scale(consts, physical_units) * np.sqrt(users.per_user_power) * users.alpha
    entries = amplitude * gains * np.exp(1j * phases)
    return ChannelMatrix(entries=entries, polarization_gains=gains)


def generate_bias(
    rng: RngStream,
    geom: ArrayGeometry,
    consts: AtomicConstants,
    bias_ratio: float,
    signal_rms: float,
) -> BiasVector:
    """Holographic reference with |b_m| = bias_ratio * signal_rms and random phase.

    The LO polarization draw only contributes its sign, which is a phase flip;
    the magnitude is pinned by the ratio.
    """
    if bias_ratio < 0:
        raise InvalidArgumentError(f'bias_ratio must be non-negative, got {bias_ratio}')
    if signal_rms <= 0:
        raise InvalidArgumentError(f'signal_rms must be positive, got {signal_rms}')
    num_elements = geom.num_elements
    phases = sample_unit_phases(rng, (num_elements,))
    signs = np.array([dipole_projection_gain(rng, consts) for _ in range(num_elements)])
    signs = np.where(signs < 0, -1.0, 1.0)
    entries = bias_ratio * signal_rms * signs * phases
    return BiasVector(entries=entries, bias_ratio=bias_ratio)


def rabi_excitation_probability(rabi_frequency: float, t: float) -> float:
    """Excited-state population sin^2(Omega t / 2) of a resonant Rabi drive."""
    if t < 0:
        raise InvalidArgumentError(f'time must be non-negative, got {t}')
    return math.sin(rabi_frequency * t / 2.0) ** 2


def conventional_channel(geom: ArrayGeometry, users: UserSet) -> ChannelMatrix:
    """Channel seen by a conventional antenna array: unit gain, no dipole projection."""
    gains = np.ones((geom.num_elements, users.num_users))
    if users.num_users == 0:
        return ChannelMatrix(
            entries=np.zeros((geom.num_elements, 0), dtype=complex),
            polarization_gains=gains,
        )
    phases = _phase_gradient(np.asarray(users.angles), geom)
    amplitude = np.sqrt(users.per_user_power) * users.alpha
    return ChannelMatrix(entries=amplitude * np.exp(1j * phases), polarization_gains=gains)
