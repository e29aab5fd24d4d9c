"""Seeded, stream-separated random sampling."""

from typing import Optional

import numpy as np

from quantum_music.exceptions import InvalidArgumentError


class RngStream:
    """Deterministic random stream identified by (seed, stream_id, path).

    Streams are derived with numpy's SeedSequence spawn keys, so distinct
    stream ids (and distinct child paths) are statistically independent and
    reproducible regardless of the order in which they are consumed.
    """

    def __init__(self, seed: int, stream_id: int = 0, path: tuple[int, ...] = ()) -> None:
        if seed < 0 or stream_id < 0:
            raise InvalidArgumentError('seed and stream_id must be non-negative')
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.path = tuple(int(p) for p in path)
        self._generator: Optional[np.random.Generator] = None

    def __repr__(self) -> str:
        return f'RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})'

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            sequence = np.random.SeedSequence(
                entropy=self.seed,
                spawn_key=(self.stream_id, *self.path),
            )
            self._generator = np.random.Generator(np.random.PCG64(sequence))
        return self._generator

    def child(self, index: int) -> 'RngStream':
        """Independent sub-stream, e.g. one per purpose or per cell."""
        return RngStream(self.seed, self.stream_id, (*self.path, index))


def sample_complex_gaussian(rng: RngStream, n: int, variance: float) -> np.ndarray:
    """Draw n i.i.d. CN(0, variance) samples."""
    if variance < 0:
        raise InvalidArgumentError(f'variance must be non-negative, got {variance}')
    if n < 0:
        raise InvalidArgumentError(f'sample count must be non-negative, got {n}')
    draws = rng.generator.standard_normal((n, 2))
    return np.sqrt(variance / 2.0) * (draws[:, 0] + 1j * draws[:, 1])


def sample_unit_phases(rng: RngStream, shape: tuple[int, ...]) -> np.ndarray:
    """Unit-modulus samples with phases uniform on [0, 2*pi)."""
    return np.exp(1j * rng.generator.uniform(0.0, 2 * np.pi, size=shape))
