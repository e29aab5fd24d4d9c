"""MUSIC subspace estimation shared by the atomic and RF pipelines."""

from typing import Union

import numpy as np

from quantum_music.exceptions import InvalidArgumentError
from quantum_music.models.estimation import AngleGrid, AoAEstimate, Pseudospectrum, SubspaceSplit
from quantum_music.models.geometry import ArrayGeometry
from quantum_music.models.measurement import ComplexPanel
from quantum_music.numerics.linalg import hermitian_eig
from quantum_music.services.scene import grid_manifold, steering_matrix
from quantum_music.utils.log import get_logger

logger = get_logger(__name__)

DENOMINATOR_FLOOR = 1e-12

MusicSource = Union[np.ndarray, ComplexPanel]


def channel_covariance(a_hat: np.ndarray, num_pilots: int) -> np.ndarray:
    """R = (1/P) A_hat A_hat^H, normalized by the pilot count as in the recovery loop."""
    if num_pilots < 1:
        raise InvalidArgumentError(f'P must be at least 1, got {num_pilots}')
    a_hat = np.asarray(a_hat, dtype=complex)
    if a_hat.ndim != 2:
        raise InvalidArgumentError(f'A_hat must be 2-D, got shape {a_hat.shape}')
    return (a_hat @ a_hat.conj().T) / num_pilots


def snapshot_covariance(panel: ComplexPanel) -> np.ndarray:
    """Sample covariance (1/P) Y Y^H of RF snapshots."""
    if panel.num_snapshots < 1:
        raise InvalidArgumentError('snapshot panel has no snapshots')
    y = panel.entries
    return (y @ y.conj().T) / panel.num_snapshots


def subspace_split(covariance: np.ndarray, num_sources: int) -> SubspaceSplit:
    """Split the eigenbasis into the K dominant (signal) and M-K remaining (noise) columns."""
    size = np.asarray(covariance).shape[0]
    if not 1 <= num_sources < size:
        raise InvalidArgumentError(
            f'need 1 <= K < M for a noise subspace, got K={num_sources}, M={size}'
        )
    eig = hermitian_eig(covariance)
    return SubspaceSplit(
        signal_basis=eig.eigenvectors[:, :num_sources],
        noise_basis=eig.eigenvectors[:, num_sources:],
        eigenvalues=eig.eigenvalues,
    )


def pseudospectrum(split: SubspaceSplit, geom: ArrayGeometry, grid: AngleGrid) -> Pseudospectrum:
    """P(theta) = 1 / (a^H U_N U_N^H a) on the grid, denominator floored at 1e-12."""
    manifold = grid_manifold(geom, grid)
    projection = split.noise_basis.conj().T @ manifold
    denominator = np.sum(np.abs(projection) ** 2, axis=0)
    values = 1.0 / np.maximum(denominator, DENOMINATOR_FLOOR)
    return Pseudospectrum(grid_angles=grid.angles(), values=values)


def _plateau_peaks(values: np.ndarray) -> np.ndarray:
    """Leftmost index of every run of equal values that exceeds its neighbouring runs."""
    starts = np.flatnonzero(np.r_[True, values[1:] != values[:-1]])
    run_values = values[starts]
    if run_values.size < 2:
        return np.zeros(0, dtype=int)
    left_ok = np.r_[True, run_values[1:] > run_values[:-1]]
    right_ok = np.r_[run_values[:-1] > run_values[1:], True]
    return starts[left_ok & right_ok]


def find_peaks(spectrum: Pseudospectrum, num_sources: int) -> AoAEstimate:
    """The K highest local maxima of the spectrum, sorted by angle.

    Grid endpoints count when they exceed their single neighbour. If fewer
    than K maxima exist, the highest remaining grid values fill the gap and
    the estimate is flagged as padded.
    """
    values = spectrum.values
    if spectrum.size <= 2 * num_sources:
        raise InvalidArgumentError(
            f'grid of {spectrum.size} points is too coarse for K={num_sources} peaks'
        )
    peaks = _plateau_peaks(values)
    order = np.lexsort((peaks, -values[peaks]))
    chosen = list(peaks[order][:num_sources])
    padded = len(chosen) < num_sources
    if padded:
        logger.debug('only %d peak(s) for K=%d, padding', len(chosen), num_sources)
        taken = set(chosen)
        for index in np.lexsort((np.arange(values.size), -values)):
            if len(chosen) == num_sources:
                break
            if int(index) not in taken:
                chosen.append(int(index))
                taken.add(int(index))
    indices = np.sort(np.asarray(chosen, dtype=int))
    return AoAEstimate(angles=spectrum.grid_angles[indices], indices=indices, padded=padded)


def source_covariance(source: MusicSource, num_pilots: int = 1) -> np.ndarray:
    """Covariance of either a recovered channel matrix or an RF snapshot panel."""
    if isinstance(source, ComplexPanel):
        return snapshot_covariance(source)
    return channel_covariance(source, num_pilots)


def compute_spectrum(
    source: MusicSource,
    num_sources: int,
    geom: ArrayGeometry,
    grid: AngleGrid,
    num_pilots: int = 1,
) -> Pseudospectrum:
    """Covariance, subspace split and pseudospectrum in one call."""
    split = subspace_split(source_covariance(source, num_pilots), num_sources)
    return pseudospectrum(split, geom, grid)


def estimate_aoa(
    source: MusicSource,
    num_sources: int,
    geom: ArrayGeometry,
    grid: AngleGrid,
    num_pilots: int = 1,
) -> AoAEstimate:
    """End-to-end MUSIC: covariance -> split -> spectrum -> peaks."""
    return find_peaks(compute_spectrum(source, num_sources, geom, grid, num_pilots), num_sources)


def noise_subspace_leakage(
    split: SubspaceSplit, geom: ArrayGeometry, angles: np.ndarray
) -> float:
    """max_k ||a(theta_k)^H U_N||, zero when every source is orthogonal to the noise span."""
    manifold = steering_matrix(np.asarray(angles, dtype=float), geom)
    projection = split.noise_basis.conj().T @ manifold
    return float(np.max(np.linalg.norm(projection, axis=0))) if manifold.shape[1] else 0.0
