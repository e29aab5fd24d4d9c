"""Array geometry, atomic constants and user placement models."""

import math
from enum import Enum
from itertools import combinations

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

SPEED_OF_LIGHT = 299_792_458.0
PLANCK = 6.62607015e-34
ELECTRON_CHARGE = 1.602176634e-19
BOHR_RADIUS = 5.29177210903e-11

# 52D_{5/2} -> 53P_{3/2} transition dipole, in units of q * a0
TRANSITION_DIPOLE_QA0 = 1785.9


class AngleReference(str, Enum):
    """How an angle of arrival maps to the inter-element phase gradient."""

    BROADSIDE = 'broadside'  # phase uses sin(theta)
    AXIS = 'axis'  # theta measured from the array axis, phase uses cos(theta)


class AtomicConstants(BaseModel):
    """Physical constants of the Rydberg transition used for sensing."""

    hbar: float = Field(default=PLANCK / (2 * math.pi), gt=0)
    planck: float = Field(default=PLANCK, gt=0)
    dipole_moment: tuple[float, float, float] = (
        0.0,
        TRANSITION_DIPOLE_QA0 * ELECTRON_CHARGE * BOHR_RADIUS,
        0.0,
    )
    omega: float = Field(default=2 * math.pi * 5e9, gt=0)
    electron_charge: float = ELECTRON_CHARGE
    bohr_radius: float = BOHR_RADIUS

    model_config = {'frozen': True}

    @field_validator('dipole_moment')
    @classmethod
    def _dipole_nonzero(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if not any(component != 0 for component in value):
            raise ValueError('dipole_moment must have at least one nonzero component')
        return value

    @property
    def dipole_norm(self) -> float:
        """Euclidean norm of the transition dipole, C*m."""
        return float(np.linalg.norm(self.dipole_moment))

    @property
    def wavelength(self) -> float:
        """Carrier wavelength 2*pi*c/omega, meters."""
        return 2 * math.pi * SPEED_OF_LIGHT / self.omega


class ArrayGeometry(BaseModel):
    """Uniform linear array of vapor cells."""

    num_elements: int = Field(alias='M', ge=1)
    spacing: float = Field(gt=0)
    wavelength: float = Field(gt=0)
    angle_reference: AngleReference = AngleReference.BROADSIDE

    model_config = {'frozen': True, 'populate_by_name': True}

    @classmethod
    def from_ratio(
        cls,
        num_elements: int,
        d_over_lambda: float = 0.5,
        wavelength: float = 1.0,
        angle_reference: AngleReference = AngleReference.BROADSIDE,
    ) -> 'ArrayGeometry':
        """Build a geometry from the spacing expressed in wavelengths."""
        return cls(
            num_elements=num_elements,
            spacing=d_over_lambda * wavelength,
            wavelength=wavelength,
            angle_reference=angle_reference,
        )

    @property
    def d_over_lambda(self) -> float:
        return self.spacing / self.wavelength

    def direction_cosine(self, theta: np.ndarray | float) -> np.ndarray:
        """Map angles (radians) to the quantity multiplying 2*pi*m*d/lambda."""
        theta = np.asarray(theta, dtype=float)
        if self.angle_reference is AngleReference.AXIS:
            return np.cos(theta)
        return np.sin(theta)


class UserSet(BaseModel):
    """Single-antenna users impinging on the array."""

    angles: tuple[float, ...]
    per_user_power: float = Field(ge=0)
    alpha: float = 1.0
    min_separation: float = Field(default=math.radians(2.0), ge=0)

    model_config = {'frozen': True}

    @model_validator(mode='after')
    def _check_separation(self) -> 'UserSet':
        for first, second in combinations(self.angles, 2):
            if abs(first - second) < self.min_separation - 1e-12:
                raise ValueError(
                    f'Angles {math.degrees(first):.3f} and {math.degrees(second):.3f} deg '
                    f'are closer than {math.degrees(self.min_separation):.3f} deg'
                )
        return self

    @classmethod
    def uniform(
        cls,
        angles: tuple[float, ...] | list[float],
        total_power: float,
        alpha: float = 1.0,
        min_separation: float = math.radians(2.0),
    ) -> 'UserSet':
        """Split the total transmit power evenly, P_k = sigma_s^2 / K."""
        angles = tuple(float(a) for a in angles)
        per_user = total_power / len(angles) if angles else total_power
        return cls(
            angles=angles,
            per_user_power=per_user,
            alpha=alpha,
            min_separation=min_separation,
        )

    @property
    def num_users(self) -> int:
        return len(self.angles)
