"""Services for quantum-music."""

from quantum_music.services.experiment import ExperimentService, rmse, run_trial
from quantum_music.services.music import estimate_aoa
from quantum_music.services.phase_retrieval import recover_channel_matrix

__all__ = [
    'ExperimentService',
    'estimate_aoa',
    'recover_channel_matrix',
    'rmse',
    'run_trial',
]
