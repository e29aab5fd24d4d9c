"""Scenario file loading.

A scenario file is TOML with a ``[scenario]`` table mirroring ScenarioConfig
field names (or their symbol aliases) and an optional ``[sweep]`` table:

    [scenario]
    K = 3
    sigma_n_sq = "-191dBm"

    [sweep]
    powers = ["-185dBm", "-180dBm"]
    users = [1, 2, 3, 4]
    snr_db = 10
"""

import sys
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

from quantum_music.exceptions import ConfigError
from quantum_music.models.scenario import ScenarioConfig
from quantum_music.utils.units import parse_power

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


DEFAULT_POWERS = tuple(10.0 ** exponent for exponent in (-20.0, -19.5, -19.0, -18.5, -18.0, -17.5))
DEFAULT_USERS = (1, 2, 3, 4)


class SweepKind(str, Enum):
    """Which experiment a sweep produces."""

    POWER = 'power'
    USERS = 'users'
    SPECTRUM = 'spectrum'


class SweepSpec(BaseModel):
    """Sweep values read from the ``[sweep]`` table."""

    kind: SweepKind = SweepKind.POWER
    powers: list[float] = Field(default_factory=lambda: list(DEFAULT_POWERS))
    users: list[int] = Field(default_factory=lambda: list(DEFAULT_USERS))
    snr_db: float = 10.0
    bootstrap: int = Field(default=1000, ge=0)

    model_config = {'extra': 'forbid'}

    @field_validator('powers', mode='before')
    @classmethod
    def _parse_powers(cls, value: Any) -> list[float]:
        if isinstance(value, (str, int, float)):
            value = [value]
        powers = [parse_power(item) for item in value]
        if not powers:
            raise ValueError('powers must not be empty')
        return powers

    @field_validator('users')
    @classmethod
    def _check_users(cls, value: list[int]) -> list[int]:
        if not value or min(value) < 1:
            raise ValueError(f'users must be a non-empty list of positive counts, got {value}')
        return value


def _read_toml(path: Path) -> dict[str, Any]:
    try:
        with open(path, 'rb') as f:
            return tomllib.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f'Config file not found: {path}') from exc
    except OSError as exc:
        raise ConfigError(f'Could not read config file {path}: {exc}') from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f'Invalid TOML in {path}: {exc}') from exc


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        location = '.'.join(str(item) for item in error['loc']) or '<root>'
        parts.append(f"{location}: {error['msg']}")
    return '; '.join(parts)


def parse_config(data: dict[str, Any], source: str = '<memory>') -> tuple[ScenarioConfig, SweepSpec]:
    """Validate already-parsed config tables."""
    unknown = set(data) - {'scenario', 'sweep'}
    if unknown:
        raise ConfigError(f'{source}: unknown top-level table(s): {", ".join(sorted(unknown))}')
    try:
        scenario = ScenarioConfig.model_validate(data.get('scenario', {}))
    except ValidationError as exc:
        raise ConfigError(f'{source} [scenario]: {_validation_message(exc)}') from exc
    try:
        sweep = SweepSpec.model_validate(data.get('sweep', {}))
    except ValidationError as exc:
        raise ConfigError(f'{source} [sweep]: {_validation_message(exc)}') from exc
    return scenario, sweep


def load_config(path: Optional[Path]) -> tuple[ScenarioConfig, SweepSpec]:
    """Load a scenario file, or the defaults when no path is given.

    Raises:
        ConfigError: If the file is missing, unparseable or fails validation.
    """
    if path is None:
        return ScenarioConfig(), SweepSpec()
    return parse_config(_read_toml(Path(path)), source=str(path))
