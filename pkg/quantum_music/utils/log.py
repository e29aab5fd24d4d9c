"""Logging setup backed by rich."""

import logging

from rich.logging import RichHandler

from quantum_music.utils.display import console

_ROOT = 'quantum_music'


def get_logger(name: str) -> logging.Logger:
    """Get a package logger; handlers are attached once by :func:`configure_logging`."""
    return logging.getLogger(name)


def configure_logging(level: str = 'WARNING') -> None:
    """Route package logs through a RichHandler on the shared console."""
    root = logging.getLogger(_ROOT)
    root.setLevel(level.upper())
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        handler = RichHandler(console=console, show_path=False, rich_tracebacks=False)
        handler.setFormatter(logging.Formatter('%(message)s'))
        root.addHandler(handler)
    root.propagate = False
