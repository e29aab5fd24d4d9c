"""Utility functions for quantum-music."""

from quantum_music.utils.display import (
    console,
    print_error,
    print_info,
    print_success,
    print_warning,
)
from quantum_music.utils.units import parse_power

__all__ = [
    'console',
    'parse_power',
    'print_error',
    'print_info',
    'print_success',
    'print_warning',
]
