"""CLI module for quantum-music."""
