"""Pytest fixtures for quantum-music tests."""

import tempfile
from pathlib import Path
from typing import Generator

import numpy as np
import pytest

from quantum_music.config.settings import Settings
from quantum_music.models.geometry import ArrayGeometry, AtomicConstants, UserSet
from quantum_music.models.measurement import PilotMatrix
from quantum_music.models.results import RmseRecord
from quantum_music.models.scenario import Method, ScenarioConfig
from quantum_music.numerics.random import RngStream
from quantum_music.services.measurement import generate_pilots
from quantum_music.storage.results_store import ResultsStore


@pytest.fixture
def temp_data_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for result files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def test_settings(temp_data_dir: Path) -> Settings:
    """Create test settings writing into the temporary directory."""
    return Settings(output_dir=temp_data_dir, workers=1, default_trials=2)


@pytest.fixture
def test_store() -> ResultsStore:
    """Create a CSV results store."""
    return ResultsStore()


@pytest.fixture
def consts() -> AtomicConstants:
    """Default Rydberg transition constants."""
    return AtomicConstants()


@pytest.fixture
def geometry() -> ArrayGeometry:
    """Half-wavelength 16-element array, angles measured from the array axis."""
    return ScenarioConfig(num_elements=16, num_users=2).geometry()


@pytest.fixture
def users() -> UserSet:
    """Two users well inside the default angular range."""
    return UserSet.uniform(np.radians([70.0, 110.0]), total_power=1e-18)


@pytest.fixture
def pilots() -> PilotMatrix:
    """Unit-modulus 2 x 60 pilot matrix."""
    return generate_pilots(RngStream(11), num_users=2, num_snapshots=60)


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Fast noisy scenario for harness tests."""
    return ScenarioConfig(
        num_elements=16,
        num_users=2,
        num_pilots=40,
        num_iterations=30,
        grid_size=2048,
        trials=3,
        seed=7,
    )


@pytest.fixture
def noiseless_config() -> ScenarioConfig:
    """M=32, K=3, P=100 with both noise powers off and fixed angles."""
    return ScenarioConfig(
        angles=(60.0, 90.0, 120.0),
        grid_size=4096,
        sigma_n_sq=0.0,
        sigma_t_sq=0.0,
        trials=2,
        seed=3,
    )


@pytest.fixture
def sample_record() -> RmseRecord:
    """Create a sample RMSE record."""
    return RmseRecord(
        sweep_var='sigma_s_sq',
        sweep_value=1e-18,
        method=Method.QUANTUM,
        K=3,
        M=32,
        P=100,
        N=50,
        sigma_s_sq=1e-18,
        sigma_n_sq=10 ** -19.1,
        sigma_t_sq=10 ** -17.6,
        trials=200,
        rmse_deg=0.123456789,
        flagged_trials=1,
        seed=0,
    )
