"""Experiment scenario model."""

import math
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from quantum_music.models.channel import PolarizationMode
from quantum_music.models.estimation import AngleGrid
from quantum_music.models.geometry import AngleReference, ArrayGeometry, AtomicConstants
from quantum_music.models.measurement import NoiseModel, PilotKind
from quantum_music.utils.units import parse_power


class Method(str, Enum):
    """Receiver / estimator pipeline."""

    QUANTUM = 'quantum_music'
    RF = 'rf_music'


class RfGainMode(str, Enum):
    """Channel gains seen by the conventional RF array."""

    SHARED = 'shared'  # same dipole-scaled channel as the atomic receiver
    CONVENTIONAL = 'conventional'  # unit antenna gain, no polarization factor


class InitMode(str, Enum):
    """How the expanded spectral initializer is reduced to K entries."""

    TRUNCATE = 'truncate'
    NORMALIZE_LAST = 'normalize_last'


class PairingMode(str, Enum):
    """Estimate-to-truth pairing for the RMSE."""

    SORTED = 'sorted'
    OPTIMAL = 'optimal'


class ScenarioConfig(BaseModel):
    """Complete description of one simulated experiment."""

    num_elements: int = Field(default=32, alias='M', ge=1)
    num_users: int = Field(default=3, alias='K', ge=1)
    num_pilots: int = Field(default=100, alias='P', ge=1)
    num_iterations: int = Field(default=50, alias='N', ge=0)
    grid_size: int = Field(default=2**14, ge=2)
    angle_range: tuple[float, float] = (30.0, 150.0)
    angles: Optional[tuple[float, ...]] = None  # fixed AoAs in degrees, else sampled
    min_separation: float = Field(default=2.0, ge=0)

    sigma_s_sq: float = Field(default=1e-18, ge=0)
    sigma_n_sq: float = Field(default=10 ** -19.1, ge=0)
    sigma_t_sq: float = Field(default=10 ** -17.6, ge=0)

    d_over_lambda: float = Field(default=0.5, gt=0)
    angle_reference: AngleReference = AngleReference.AXIS
    alpha: float = 1.0
    bias_ratio: float = Field(default=5.0, ge=0)
    pilot_kind: PilotKind = PilotKind.UNIT_MODULUS
    polarization_mode: PolarizationMode = PolarizationMode.PER_USER
    rf_gain_mode: RfGainMode = RfGainMode.SHARED
    init_mode: InitMode = InitMode.TRUNCATE
    gs_tolerance: Optional[float] = Field(default=None, gt=0)
    pairing: PairingMode = PairingMode.SORTED
    physical_units: bool = False
    dwell_time_s: float = Field(default=1e-6, ge=0)

    trials: int = Field(default=200, alias='Q', ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    model_config = {'frozen': True, 'populate_by_name': True, 'extra': 'forbid'}

    @field_validator('sigma_s_sq', 'sigma_n_sq', 'sigma_t_sq', mode='before')
    @classmethod
    def _parse_power(cls, value: Any) -> float:
        return parse_power(value)

    @field_validator('angle_range')
    @classmethod
    def _check_range(cls, value: tuple[float, float]) -> tuple[float, float]:
        lo, hi = value
        if not 0.0 < lo < hi < 180.0:
            raise ValueError(f'angle_range must satisfy 0 < lo < hi < 180, got {value}')
        return value

    @model_validator(mode='after')
    def _check_counts(self) -> 'ScenarioConfig':
        if self.num_users >= self.num_elements:
            raise ValueError(
                f'K ({self.num_users}) must be smaller than M ({self.num_elements})'
            )
        if self.num_pilots < self.num_users:
            raise ValueError(
                f'P ({self.num_pilots}) must be at least K ({self.num_users})'
            )
        if self.angles is not None:
            if len(self.angles) != self.num_users:
                raise ValueError(
                    f'{len(self.angles)} fixed angles given for K={self.num_users}'
                )
            lo, hi = self.angle_range
            if any(not lo <= angle <= hi for angle in self.angles):
                raise ValueError(f'fixed angles {self.angles} fall outside {self.angle_range}')
        span = self.angle_range[1] - self.angle_range[0]
        if (self.num_users - 1) * self.min_separation > span:
            raise ValueError(
                f'{self.num_users} users cannot be {self.min_separation} deg apart '
                f'inside {self.angle_range}'
            )
        return self

    def with_updates(self, **changes: Any) -> 'ScenarioConfig':
        """Return a validated copy with some fields replaced."""
        data = self.model_dump()
        data.update(changes)
        return ScenarioConfig.model_validate(data)

    def constants(self) -> AtomicConstants:
        return AtomicConstants()

    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry.from_ratio(
            self.num_elements,
            d_over_lambda=self.d_over_lambda,
            wavelength=self.constants().wavelength,
            angle_reference=self.angle_reference,
        )

    def grid(self) -> AngleGrid:
        return AngleGrid.from_degrees(*self.angle_range, size=self.grid_size)

    def noise(self) -> NoiseModel:
        return NoiseModel(sigma_n_sq=self.sigma_n_sq, sigma_t_sq=self.sigma_t_sq)

    @property
    def min_separation_rad(self) -> float:
        return math.radians(self.min_separation)
