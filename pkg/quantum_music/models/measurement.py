"""Pilot, panel and noise models for both receivers."""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator

from quantum_music.models.base import ArrayModel, as_complex_matrix


class PilotKind(str, Enum):
    """Pilot symbol design."""

    UNIT_MODULUS = 'unit_modulus_random_phase'
    COMPLEX_GAUSSIAN = 'complex_gaussian'


class PilotMatrix(ArrayModel):
    """K x P pilot signals S = [s_1 ... s_P]."""

    entries: np.ndarray
    kind: PilotKind = PilotKind.UNIT_MODULUS
    name: str = 'S'

    @field_validator('entries', mode='before')
    @classmethod
    def _coerce_entries(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 'pilot entries')

    @property
    def num_users(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_snapshots(self) -> int:
        return int(self.entries.shape[1])


class MagnitudePanel(ArrayModel):
    """M x P Rabi-frequency magnitudes z_{m,p} observed by the atomic receiver."""

    entries: np.ndarray

    @field_validator('entries', mode='before')
    @classmethod
    def _check_entries(cls, value: Any) -> np.ndarray:
        array = np.asarray(value, dtype=float)
        if array.ndim != 2:
            raise ValueError(f'magnitude panel must be 2-D, got shape {array.shape}')
        if not np.all(np.isfinite(array)) or np.any(array < 0):
            raise ValueError('magnitude panel entries must be finite and non-negative')
        return array

    @property
    def num_elements(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_snapshots(self) -> int:
        return int(self.entries.shape[1])


class ComplexPanel(ArrayModel):
    """M x P complex snapshots of the conventional RF array."""

    entries: np.ndarray

    @field_validator('entries', mode='before')
    @classmethod
    def _coerce_entries(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 'snapshot panel')

    @property
    def num_elements(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_snapshots(self) -> int:
        return int(self.entries.shape[1])


class NoiseModel(BaseModel):
    """Noise powers of the two receivers (normalized linear domain)."""

    sigma_n_sq: float = Field(default=10 ** -19.1, ge=0)  # QSN, quantum path
    sigma_t_sq: float = Field(default=10 ** -17.6, ge=0)  # JNTN, RF path

    model_config = {'frozen': True}
