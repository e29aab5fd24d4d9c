"""Small dense linear algebra: Hermitian eigenpairs and row-rank least squares."""

import numpy as np
from scipy import linalg

from quantum_music.exceptions import IllConditionedError, InvalidArgumentError
from quantum_music.models.numerics import HermitianEigenResult

MAX_GRAM_CONDITION = 1e12


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and non-negative."""
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    anchors = vectors[pivots, np.arange(vectors.shape[1])]
    magnitudes = np.abs(anchors)
    rotations = np.where(magnitudes > 0, anchors.conj() / np.where(magnitudes > 0, magnitudes, 1), 1)
    return vectors * rotations


def _square(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidArgumentError(f'expected a square matrix, got shape {matrix.shape}')
    return matrix


def hermitian_eig(matrix: np.ndarray) -> HermitianEigenResult:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized as (R + R^H) / 2 first. Each eigenvector's phase
    is fixed so that its largest entry is real and non-negative.
    """
    matrix = _square(matrix)
    hermitian = (matrix + matrix.conj().T) / 2
    if hermitian.shape[0] == 0:
        return HermitianEigenResult(eigenvalues=np.zeros(0), eigenvectors=np.zeros((0, 0)))
    values, vectors = linalg.eigh(hermitian)
    order = np.arange(values.shape[0])[::-1]
    return HermitianEigenResult(
        eigenvalues=values[order],
        eigenvectors=_fix_phases(vectors[:, order]),
    )


def principal_eigenvector(matrix: np.ndarray) -> np.ndarray:
    """Unit eigenvector of the largest eigenvalue, phase-normalized."""
    result = hermitian_eig(matrix)
    if result.size == 0:
        raise InvalidArgumentError('principal eigenvector of an empty matrix is undefined')
    return result.eigenvectors[:, 0]


class LeastSquaresOperator:
    """Reusable solver for min_a ||S^H a - rhs||, i.e. (S S^H)^-1 S rhs.

    Factorizes the pilot Gram matrix once so the Gerchberg-Saxton loop can
    solve against the same pilots repeatedly.
    """

    def __init__(self, pilots: np.ndarray, name: str = 'S') -> None:
        pilots = np.asarray(pilots, dtype=complex)
        if pilots.ndim != 2:
            raise InvalidArgumentError(f'pilot matrix must be 2-D, got shape {pilots.shape}')
        num_rows, num_snapshots = pilots.shape
        if num_snapshots < num_rows:
            raise InvalidArgumentError(
                f'least squares needs P >= K, got K={num_rows}, P={num_snapshots}'
            )
        self.pilots = pilots
        self.name = name
        gram = pilots @ pilots.conj().T
        self.condition_number = float(np.linalg.cond(gram)) if num_rows else 1.0
        if not np.isfinite(self.condition_number) or self.condition_number > MAX_GRAM_CONDITION:
            raise IllConditionedError(name, self.condition_number)
        self._factor = linalg.cho_factor(gram) if num_rows else None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=complex)
        if rhs.shape != (self.pilots.shape[1],):
            raise InvalidArgumentError(
                f'rhs must have length P={self.pilots.shape[1]}, got shape {rhs.shape}'
            )
        if self._factor is None:
            return np.zeros(0, dtype=complex)
        return np.asarray(linalg.cho_solve(self._factor, self.pilots @ rhs))


def least_squares_solve(pilots: np.ndarray, rhs: np.ndarray, name: str = 'S') -> np.ndarray:
    """Minimizer of ||S^H a - rhs||_2 for a full-row-rank K x P matrix S."""
    return LeastSquaresOperator(pilots, name=name).solve(rhs)
