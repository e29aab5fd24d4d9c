"""Results of the dense linear-algebra kernels."""

from typing import Any

import numpy as np
from pydantic import field_validator

from quantum_music.models.base import ArrayModel, as_complex_matrix


class HermitianEigenResult(ArrayModel):
    """Eigenpairs of a Hermitian matrix, eigenvalues in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @field_validator('eigenvalues', mode='before')
    @classmethod
    def _check_eigenvalues(cls, value: Any) -> np.ndarray:
        values = np.asarray(value, dtype=float)
        if values.ndim != 1:
            raise ValueError('eigenvalues must be 1-D')
        if np.any(np.diff(values) > 0):
            raise ValueError('eigenvalues must be sorted in descending order')
        return values

    @field_validator('eigenvectors', mode='before')
    @classmethod
    def _coerce_vectors(cls, value: Any) -> np.ndarray:
        return as_complex_matrix(value, 'eigenvectors')

    @property
    def size(self) -> int:
        return int(self.eigenvalues.shape[0])
