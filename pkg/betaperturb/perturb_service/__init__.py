"""
Perturb Service

This module builds rank-one multiplicative and additive non-Hermitian
perturbations of Jacobi matrices, computes their spectra and applies the
chiral and symplectic structure maps.
"""

from .dense import (
    chiral_block_matrix,
    dense_additive,
    dense_multiplicative,
    laguerre_tridiagonal_dense,
    quaternion_block_matrix,
    quaternion_embed,
)
from .models import EigenConfiguration, PerturbationKind, Quaternion
from .service import (
    additive_charpoly,
    chiral_spectrum,
    eigenvalues_additive,
    eigenvalues_additive_from_measure,
    eigenvalues_from_measure,
    eigenvalues_multiplicative,
    forward_map,
    full_wishart_zero_count,
    multiplicative_charpoly,
    symplectic_double,
)

__all__ = [
    'EigenConfiguration',
    'PerturbationKind',
    'Quaternion',
    'multiplicative_charpoly',
    'additive_charpoly',
    'eigenvalues_multiplicative',
    'eigenvalues_additive',
    'eigenvalues_from_measure',
    'eigenvalues_additive_from_measure',
    'forward_map',
    'chiral_spectrum',
    'symplectic_double',
    'full_wishart_zero_count',
    'quaternion_embed',
    'dense_multiplicative',
    'dense_additive',
    'quaternion_block_matrix',
    'chiral_block_matrix',
    'laguerre_tridiagonal_dense',
]
