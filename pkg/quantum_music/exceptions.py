"""Error hierarchy shared by the services and the CLI."""

from pathlib import Path
from typing import Any, Optional


class QuantumMusicError(Exception):
    """Base class for all quantum-music errors."""


class InvalidArgumentError(QuantumMusicError, ValueError):
    """An operation received arguments outside its contract."""


class ConfigError(InvalidArgumentError):
    """A scenario file or CLI option could not be turned into a valid scenario."""


class NumericalError(QuantumMusicError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""

    def __init__(self, message: str, **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context: dict[str, Any] = dict(context)

    def with_context(self, **context: Any) -> 'NumericalError':
        """Attach location details (trial id, cell index, ...) and return self."""
        for key, value in context.items():
            self.context.setdefault(key, value)
        return self

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ', '.join(f'{k}={v}' for k, v in self.context.items())
        return f'{self.message} [{details}]'


class IllConditionedError(NumericalError):
    """The pilot Gram matrix is too ill-conditioned to invert."""

    def __init__(self, name: str, condition_number: float, **context: Any) -> None:
        super().__init__(
            f"Pilot matrix '{name}' is ill-conditioned "
            f'(cond(SS^H) = {condition_number:.3e})',
            **context,
        )
        self.name = name
        self.condition_number = condition_number


class DegeneratePilotError(NumericalError):
    """The expanded pilot matrix annihilates the spectral direction."""


class ResultsIOError(QuantumMusicError, OSError):
    """Reading or writing a results file failed."""

    def __init__(self, path: Path, reason: Optional[str] = None) -> None:
        message = f'I/O failure on {path}'
        if reason:
            message += f': {reason}'
        super().__init__(message)
        self.path = path
