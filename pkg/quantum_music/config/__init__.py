"""Configuration module for quantum-music."""

from quantum_music.config.loader import SweepKind, SweepSpec, load_config, parse_config
from quantum_music.config.settings import Settings, get_settings

__all__ = [
    'Settings',
    'SweepKind',
    'SweepSpec',
    'get_settings',
    'load_config',
    'parse_config',
]
