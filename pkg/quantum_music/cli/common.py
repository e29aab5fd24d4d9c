"""Option parsing and error handling shared by the CLI commands."""

from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import typer
from pydantic import ValidationError

from quantum_music.config.loader import SweepSpec, load_config
from quantum_music.config.settings import Settings
from quantum_music.exceptions import (
    ConfigError,
    InvalidArgumentError,
    NumericalError,
    ResultsIOError,
)
from quantum_music.models.scenario import Method, ScenarioConfig
from quantum_music.utils.display import print_error

EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


class MethodChoice(str, Enum):
    """Receivers selectable from the command line."""

    QUANTUM = 'quantum'
    RF = 'rf'
    BOTH = 'both'

    def methods(self) -> tuple[Method, ...]:
        if self is MethodChoice.QUANTUM:
            return (Method.QUANTUM,)
        if self is MethodChoice.RF:
            return (Method.RF,)
        return (Method.QUANTUM, Method.RF)


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn package errors into a printed message and the matching exit code."""
    try:
        yield
    except ResultsIOError as e:
        print_error(str(e))
        raise typer.Exit(EXIT_IO)
    except NumericalError as e:
        print_error(f'Numerical failure: {e}')
        raise typer.Exit(EXIT_NUMERICAL)
    except ValidationError as e:
        print_error(f'Invalid scenario: {e}')
        raise typer.Exit(EXIT_CONFIG)
    except (ConfigError, InvalidArgumentError) as e:
        print_error(str(e))
        raise typer.Exit(EXIT_CONFIG)


def load_scenario(
    settings: Settings,
    config: Optional[Path],
    seed: Optional[int],
    trials: Optional[int],
    **overrides: Any,
) -> tuple[ScenarioConfig, SweepSpec]:
    """Scenario file plus command-line overrides.

    Without a scenario file the trial count falls back to the
    ``QMUSIC_DEFAULT_TRIALS`` setting.
    """
    scenario, sweep = load_config(config)
    changes = {key: value for key, value in overrides.items() if value is not None}
    if seed is not None:
        changes['seed'] = seed
    if trials is not None:
        changes['trials'] = trials
    elif config is None:
        changes['trials'] = settings.default_trials
    if changes:
        try:
            scenario = scenario.with_updates(**changes)
        except ValidationError as e:
            raise ConfigError(f'Invalid option: {e}') from e
    return scenario, sweep
