"""Phase-retrieval iterates and MUSIC estimation models."""

from typing import Any

import numpy as np
from pydantic import Field, field_validator, model_validator

from quantum_music.models.base import ArrayModel, as_complex_matrix, as_complex_vector


class GsState(ArrayModel):
    """Iterate a_m^n of the biased Gerchberg-Saxton recursion for one cell."""

    a_current: np.ndarray
    iteration: int = Field(default=0, ge=0)
    objective: float = Field(ge=0)

    @field_validator('a_current', mode='before')
    @classmethod
    def _coerce_iterate(cls, value: Any) -> np.ndarray:
        return as_complex_vector(value, 'a_current')


class ExpandedSystem(ArrayModel):
    """Expanded pilot matrix S_bar = [S^H, b_m]^H of one cell.

    The last row is conj(b_m) repeated, so S_bar^H [a_m; 1] = S^H a_m + b_m.
    """

    s_bar: np.ndarray
    bias: complex

    @field_validator('s_bar', mode='before')
    @classmethod
    def _coerce_s_bar(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 's_bar')

    @model_validator(mode='after')
    def _check_bias_row(self) -> 'ExpandedSystem':
        if not np.allclose(self.s_bar[-1], np.conj(self.bias)):
            raise ValueError('last row of s_bar must be the constant bias sequence')
        return self

    @classmethod
    def build(cls, pilots: np.ndarray, bias: complex) -> 'ExpandedSystem':
        pilots = np.asarray(pilots, dtype=complex)
        bias_row = np.full((1, pilots.shape[1]), np.conj(bias), dtype=complex)
        return cls(s_bar=np.vstack([pilots, bias_row]), bias=complex(bias))

    @property
    def num_users(self) -> int:
        return int(self.s_bar.shape[0] - 1)

    @property
    def num_snapshots(self) -> int:
        return int(self.s_bar.shape[1])


class SubspaceSplit(ArrayModel):
    """Signal / noise subspace partition of a covariance eigenbasis."""

    signal_basis: np.ndarray
    noise_basis: np.ndarray
    eigenvalues: np.ndarray

    @field_validator('signal_basis', 'noise_basis', mode='before')
    @classmethod
    def _coerce_basis(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 'subspace basis')

    @property
    def num_sources(self) -> int:
        return int(self.signal_basis.shape[1])


class Pseudospectrum(ArrayModel):
    """MUSIC pseudospectrum P(theta) sampled on a uniform angle grid."""

    grid_angles: np.ndarray
    values: np.ndarray

    @model_validator(mode='after')
    def _check_values(self) -> 'Pseudospectrum':
        if self.grid_angles.shape != self.values.shape:
            raise ValueError('grid and values must have the same length')
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValueError('pseudospectrum values must be finite and positive')
        return self

    @property
    def size(self) -> int:
        return int(self.grid_angles.shape[0])

    def to_db(self) -> np.ndarray:
        """Values normalized to the maximum, in dB."""
        return 10 * np.log10(self.values / self.values.max())


class AoAEstimate(ArrayModel):
    """K estimated angles of arrival, ascending, in radians."""

    angles: np.ndarray
    indices: np.ndarray
    padded: bool = False

    @field_validator('angles', 'indices', mode='before')
    @classmethod
    def _coerce_1d(cls, value: Any) -> np.ndarray:
        array = np.asarray(value)
        if array.ndim != 1:
            raise ValueError('estimate arrays must be 1-D')
        return array

    @property
    def degrees(self) -> np.ndarray:
        return np.degrees(self.angles)


class AngleGrid(ArrayModel):
    """Uniform search grid over [start, stop] radians, endpoints included."""

    start: float
    stop: float
    size: int = Field(ge=2)

    @model_validator(mode='after')
    def _check_range(self) -> 'AngleGrid':
        if not self.stop > self.start:
            raise ValueError('grid stop must exceed grid start')
        return self

    @classmethod
    def from_degrees(cls, start_deg: float, stop_deg: float, size: int) -> 'AngleGrid':
        return cls(start=np.radians(start_deg), stop=np.radians(stop_deg), size=size)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.size - 1)

    def angles(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.size)
