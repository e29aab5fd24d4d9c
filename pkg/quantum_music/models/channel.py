"""Effective quantum wireless channel and holographic bias models."""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import Field, field_validator

from quantum_music.models.base import ArrayModel, as_complex_matrix, as_complex_vector


class PolarizationMode(str, Enum):
    """Granularity of the random polarization draw."""

    PER_USER = 'per_user'
    PER_CELL = 'per_cell'


class ChannelMatrix(ArrayModel):
    """M x K matrix of effective atomic channel coefficients a_{m,k}.

    Row m holds the channel vector a_m of the m-th vapor cell.
    """

    entries: np.ndarray
    polarization_gains: np.ndarray

    @field_validator('entries', mode='before')
    @classmethod
    def _coerce_entries(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 'entries')

    @field_validator('polarization_gains', mode='before')
    @classmethod
    def _coerce_gains(cls, value: Any) -> np.ndarray:
        gains = np.asarray(value, dtype=float)
        if gains.ndim != 2:
            raise ValueError(f'polarization_gains must be 2-D, got shape {gains.shape}')
        return gains

    @property
    def num_elements(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.entries.shape[1])

    def cell(self, m: int) -> np.ndarray:
        """Channel vector a_m (length K) of cell m."""
        return self.entries[m]

    def assembled(self) -> np.ndarray:
        """Conjugate assembly [a_1, ..., a_M]^H, the matrix channel recovery targets."""
        return self.entries.conj()


class BiasVector(ArrayModel):
    """Per-cell holographic reference b_m, held fixed across pilot snapshots."""

    entries: np.ndarray
    bias_ratio: float = Field(ge=0)

    @field_validator('entries', mode='before')
    @classmethod
    def _coerce_entries(cls, value: Any) -> np.ndarray:
        return as_complex_vector(value, 'entries')

    @property
    def num_elements(self) -> int:
        return int(self.entries.shape[0])
