"""Numerical kernels shared by the scene, recovery and MUSIC services."""

from quantum_music.numerics.linalg import (
    LeastSquaresOperator,
    hermitian_eig,
    least_squares_solve,
    principal_eigenvector,
)
from quantum_music.numerics.random import (
    RngStream,
    sample_complex_gaussian,
    sample_unit_phases,
)

__all__ = [
    'LeastSquaresOperator',
    'RngStream',
    'hermitian_eig',
    'least_squares_solve',
    'principal_eigenvector',
    'sample_complex_gaussian',
    'sample_unit_phases',
]
