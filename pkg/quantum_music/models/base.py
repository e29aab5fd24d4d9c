"""Base model for containers that carry numpy arrays."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict


class ArrayModel(BaseModel):
    """Frozen pydantic model whose fields may hold numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def as_complex_matrix(value: Any, name: str) -> np.ndarray:
    """Coerce to a 2-D complex array, rejecting non-finite entries."""
    array = np.asarray(value, dtype=complex)
    if array.ndim != 2:
        raise ValueError(f'{name} must be 2-D, got shape {array.shape}')
    if not np.all(np.isfinite(array)):
        raise ValueError(f'{name} contains non-finite entries')
    return array


def as_complex_vector(value: Any, name: str) -> np.ndarray:
    """Coerce to a 1-D complex array, rejecting non-finite entries."""
    array = np.asarray(value, dtype=complex)
    if array.ndim != 1:
        raise ValueError(f'{name} must be 1-D, got shape {array.shape}')
    if not np.all(np.isfinite(array)):
        raise ValueError(f'{name} contains non-finite entries')
    return array
