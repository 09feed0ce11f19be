"""
Dense Realizations

Explicit matrices of the perturbed operators, used as independent oracles for
the polynomial route to their spectra.
"""

import numpy as np

from ..common.errors import DomainError
from ..common.models import JacobiMatrix
from ..ensemble_service.models import BidiagonalFactor
from .models import Quaternion


def quaternion_embed(q: Quaternion) -> np.ndarray:
    """2 x 2 complex representation [[q1+iq2, q3+iq4], [-q3+iq4, q1-iq2]]."""
    return np.array([
        [complex(q.q1, q.q2), complex(q.q3, q.q4)],
        [complex(-q.q3, q.q4), complex(q.q1, -q.q2)],
    ])


def dense_multiplicative(J: JacobiMatrix, l: float) -> np.ndarray:
    """(I + i l e1 e1*) J as a dense complex matrix."""
    dense = J.to_dense().astype(complex)
    dense[0, :] *= 1.0 + 1j * l
    return dense


def dense_additive(J: JacobiMatrix, l: float) -> np.ndarray:
    """J + i l e1 e1* as a dense complex matrix."""
    dense = J.to_dense().astype(complex)
    dense[0, 0] += 1j * l
    return dense


def quaternion_block_matrix(J: JacobiMatrix, l: float) -> np.ndarray:
    """2n x 2n complex realization of (I + l i e1 e1*) J over the quaternions.

    Every entry of J is a real quaternion; the first row is multiplied on the
    left by 1 + l i, and each quaternion is replaced by its 2 x 2 block.
    """
    n = J.n
    dense = J.to_dense()
    blocks = np.zeros((2 * n, 2 * n), dtype=complex)
    for row in range(n):
        for column in range(n):
            entry = dense[row, column]
            if entry == 0.0:
                continue
            if row == 0:
                q = Quaternion(q1=entry, q2=l * entry)
            else:
                q = Quaternion(q1=entry)
            blocks[2 * row: 2 * row + 2, 2 * column: 2 * column + 2] = quaternion_embed(q)
    return blocks


def chiral_block_matrix(X: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """The (m+n) x (m+n) matrix [[0, (I + i Gamma) X*], [X, 0]].

    Args:
        X: m x n matrix
        gamma: n x n Hermitian rank-one matrix

    Returns:
        Dense complex matrix
    """
    X = np.asarray(X)
    gamma = np.asarray(gamma)
    m, n = X.shape
    if gamma.shape != (n, n):
        raise DomainError(f"Gamma must be {n} x {n}, got {gamma.shape}")
    blocks = np.zeros((m + n, m + n), dtype=complex)
    blocks[:n, n:] = (np.eye(n) + 1j * gamma) @ X.conj().T
    blocks[n:, :n] = X
    return blocks


def laguerre_tridiagonal_dense(B: BidiagonalFactor) -> np.ndarray:
    """B*B computed as an explicit matrix product."""
    dense = B.to_dense()
    return dense.T @ dense
