"""Data models for quantum-music."""

from quantum_music.models.channel import BiasVector, ChannelMatrix, PolarizationMode
from quantum_music.models.estimation import (
    AngleGrid,
    AoAEstimate,
    ExpandedSystem,
    GsState,
    Pseudospectrum,
    SubspaceSplit,
)
from quantum_music.models.geometry import (
    AngleReference,
    ArrayGeometry,
    AtomicConstants,
    UserSet,
)
from quantum_music.models.measurement import (
    ComplexPanel,
    MagnitudePanel,
    NoiseModel,
    PilotKind,
    PilotMatrix,
)
from quantum_music.models.numerics import HermitianEigenResult
from quantum_music.models.results import (
    RmseRecord,
    SpectrumTable,
    TrialDiagnostics,
    TrialResult,
)
from quantum_music.models.scenario import (
    InitMode,
    Method,
    PairingMode,
    RfGainMode,
    ScenarioConfig,
)

__all__ = [
    'AngleGrid',
    'AngleReference',
    'AoAEstimate',
    'ArrayGeometry',
    'AtomicConstants',
    'BiasVector',
    'ChannelMatrix',
    'ComplexPanel',
    'ExpandedSystem',
    'GsState',
    'HermitianEigenResult',
    'InitMode',
    'MagnitudePanel',
    'Method',
    'NoiseModel',
    'PairingMode',
    'PilotKind',
    'PilotMatrix',
    'PolarizationMode',
    'Pseudospectrum',
    'RfGainMode',
    'RmseRecord',
    'ScenarioConfig',
    'SpectrumTable',
    'SubspaceSplit',
    'TrialDiagnostics',
    'TrialResult',
    'UserSet',
]
