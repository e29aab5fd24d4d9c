"""Trial, RMSE and spectrum result models."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, Field

from quantum_music.models.base import ArrayModel
from quantum_music.models.estimation import AoAEstimate, Pseudospectrum
from quantum_music.models.scenario import Method

RMSE_COLUMNS = (
    'sweep_var',
    'sweep_value',
    'method',
    'K',
    'M',
    'P',
    'N',
    'sigma_s_sq',
    'sigma_n_sq',
    'sigma_t_sq',
    'trials',
    'rmse_deg',
    'flagged_trials',
    'seed',
)

SPECTRUM_COLUMNS = ('K', 'theta_deg', 'p_q_value')


class TrialDiagnostics(BaseModel):
    """Side information reported for a single end-to-end draw."""

    signal_rms: float
    bias_magnitude: float = 0.0
    rabi_frequency_rms: float = 0.0  # rad/s
    excitation_probability: float = 0.0
    channel_relative_error: Optional[float] = None
    padded_peaks: bool = False


class TrialResult(ArrayModel):
    """Outcome of one Monte-Carlo trial for one method."""

    trial_id: int
    method: Method
    truths: np.ndarray  # radians, ascending
    estimate: AoAEstimate
    diagnostics: TrialDiagnostics

    @property
    def flagged(self) -> bool:
        return self.estimate.padded


class RmseRecord(BaseModel):
    """Aggregated RMSE for one sweep point and one method."""

    sweep_var: str
    sweep_value: float
    method: Method
    num_users: int = Field(alias='K')
    num_elements: int = Field(alias='M')
    num_pilots: int = Field(alias='P')
    num_iterations: int = Field(alias='N')
    sigma_s_sq: float
    sigma_n_sq: float
    sigma_t_sq: float
    trials_used: int = Field(alias='trials', ge=0)
    rmse_deg: float = Field(ge=0)
    flagged_trials: int = Field(default=0, ge=0)
    seed: int
    failed_trials: int = Field(default=0, ge=0)
    ci_low_deg: Optional[float] = None
    ci_high_deg: Optional[float] = None

    model_config = {'populate_by_name': True, 'frozen': True}


class SpectrumTable(ArrayModel):
    """One seeded pseudospectrum realization, as written by the spectrum command."""

    num_users: int
    truths: np.ndarray  # radians
    spectrum: Pseudospectrum
    estimate: AoAEstimate
    snr_db: float
    sigma_s_sq: float

    def rows(self) -> list[tuple[int, float, float]]:
        theta_deg = np.degrees(self.spectrum.grid_angles)
        return [
            (self.num_users, float(theta), float(value))
            for theta, value in zip(theta_deg, self.spectrum.values)
        ]
