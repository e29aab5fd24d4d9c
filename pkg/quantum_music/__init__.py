"""Quantum MUSIC - multi-user AoA estimation for Rydberg atomic receivers."""

__version__ = '0.1.0'
