"""Storage module for quantum-music."""

from quantum_music.storage.results_store import ResultFormat, ResultsStore

__all__ = ['ResultFormat', 'ResultsStore']
