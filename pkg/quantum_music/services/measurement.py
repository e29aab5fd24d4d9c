"""Receiver observation synthesis: pilots, magnitude panels and RF snapshots."""

import numpy as np

from quantum_music.exceptions import InvalidArgumentError
from quantum_music.models.channel import BiasVector, ChannelMatrix
from quantum_music.models.measurement import (
    ComplexPanel,
    MagnitudePanel,
    NoiseModel,
    PilotKind,
    PilotMatrix,
)
from quantum_music.numerics.linalg import LeastSquaresOperator
from quantum_music.numerics.random import (
    RngStream,
    sample_complex_gaussian,
    sample_unit_phases,
)

MAX_PILOT_CONDITION = 1e6
MAX_PILOT_ATTEMPTS = 16


def generate_pilots(
    rng: RngStream,
    num_users: int,
    num_snapshots: int,
    kind: PilotKind = PilotKind.UNIT_MODULUS,
) -> PilotMatrix:
    """Draw a K x P pilot matrix with cond(S S^H) <= 1e6.

    Ill-conditioned draws are redrawn from the same stream, which keeps the
    result deterministic for a given seed.
    """
    if num_users < 1:
        raise InvalidArgumentError(f'need at least one user, got K={num_users}')
    if num_snapshots < num_users:
        raise InvalidArgumentError(
            f'P ({num_snapshots}) must be at least K ({num_users}) for least squares'
        )
    shape = (num_users, num_snapshots)
    for _ in range(MAX_PILOT_ATTEMPTS):
        if kind is PilotKind.UNIT_MODULUS:
            entries = sample_unit_phases(rng, shape)
        else:
            entries = sample_complex_gaussian(rng, num_users * num_snapshots, 1.0).reshape(shape)
        gram = entries @ entries.conj().T
        if np.linalg.cond(gram) <= MAX_PILOT_CONDITION:
            return PilotMatrix(entries=entries, kind=kind)
    raise InvalidArgumentError(
        f'could not draw a well-conditioned {num_users}x{num_snapshots} pilot matrix'
    )


def _check_dimensions(channel: ChannelMatrix, pilots: PilotMatrix) -> None:
    if channel.num_users != pilots.num_users:
        raise InvalidArgumentError(
            f'user axis mismatch: channel has K={channel.num_users}, '
            f'pilots have K={pilots.num_users}'
        )


def noiseless_interior(channel: ChannelMatrix, pilots: PilotMatrix) -> np.ndarray:
    """M x P matrix of s_p^H a_m."""
    _check_dimensions(channel, pilots)
    return channel.entries @ pilots.entries.conj()


def synth_quantum_measurements(
    channel: ChannelMatrix,
    pilots: PilotMatrix,
    bias: BiasVector,
    noise: NoiseModel,
    rng: RngStream,
) -> MagnitudePanel:
    """z_{m,p} = |s_p^H a_m + b_m + n_{m,p}|, with n ~ CN(0, sigma_n^2)."""
    interior = noiseless_interior(channel, pilots)
    if bias.num_elements != channel.num_elements:
        raise InvalidArgumentError(
            f'element axis mismatch: channel has M={channel.num_elements}, '
            f'bias has M={bias.num_elements}'
        )
    noise_draws = sample_complex_gaussian(rng, interior.size, noise.sigma_n_sq)
    field = interior + bias.entries[:, None] + noise_draws.reshape(interior.shape)
    return MagnitudePanel(entries=np.abs(field))


def synth_rf_snapshots(
    channel: ChannelMatrix,
    pilots: PilotMatrix,
    noise: NoiseModel,
    rng: RngStream,
) -> ComplexPanel:
    """Y[m, p] = a_m^H s_p + n_{m,p}, with n ~ CN(0, sigma_t^2).

    The conventional array keeps the full complex baseband and needs no bias.
    Its orientation is the conjugate of the atomic interior (same magnitudes),
    which places the snapshots on the steering manifold.
    """
    interior = noiseless_interior(channel, pilots).conj()
    noise_draws = sample_complex_gaussian(rng, interior.size, noise.sigma_t_sq)
    return ComplexPanel(entries=interior + noise_draws.reshape(interior.shape))


def pilot_solver(pilots: PilotMatrix) -> LeastSquaresOperator:
    """Least-squares operator for the pilot Gram system."""
    return LeastSquaresOperator(pilots.entries, name=pilots.name)
