"""
Jacobi Service Package

This package handles Jacobi matrices: their characteristic polynomials, the
truncated matrices J^(1), and the bijection with finite spectral measures.
"""

from ..common.models import JacobiMatrix, SpectralMeasure
from .service import (
    char_polys,
    char_poly_values,
    truncate_first,
    measure_to_jacobi,
    jacobi_to_measure,
    measure_poly_values,
    positive_eigenvalue_count,
)

__all__ = [
    'JacobiMatrix',
    'SpectralMeasure',
    'char_polys',
    'char_poly_values',
    'truncate_first',
    'measure_to_jacobi',
    'jacobi_to_measure',
    'measure_poly_values',
    'positive_eigenvalue_count',
]
