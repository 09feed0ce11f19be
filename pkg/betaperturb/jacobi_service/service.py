"""
Jacobi Matrices

Characteristic polynomials of Jacobi matrices and their truncations, and the
bijection between Jacobi matrices and finite spectral measures.
"""

import logging
from typing import Tuple

import numpy as np
from numpy.polynomial import Polynomial

from ..common.errors import ConditioningError, SizeError
from ..common.models import JacobiMatrix, RealPolynomial, SpectralMeasure
from ..common.numerics import symm_tridiag_eigen

logger = logging.getLogger(__name__)

COINCIDENT_ATOM_TOLERANCE = 1e-12
REORTHOGONALIZATION_PASSES = 2


def char_polys(J: JacobiMatrix) -> Tuple[RealPolynomial, RealPolynomial]:
    """Characteristic polynomials of J and of J^(1).

    The three-term recurrence runs from the bottom-right corner upward, so
    the second-to-last iterate is the polynomial of J with its first row and
    column deleted.

    Args:
        J: Jacobi matrix

    Returns:
        (p, q): monic polynomials of degree n and n-1
    """
    n = J.n
    previous = Polynomial([1.0])
    current = Polynomial([-J.b[n - 1], 1.0])
    for k in range(2, n + 1):
        previous, current = current, Polynomial([-J.b[n - k], 1.0]) * current - J.a[n - k] ** 2 * previous
    return current, previous


def char_poly_values(J: JacobiMatrix, z: np.ndarray):
    """Evaluate p, q, their derivatives and a rounding bound for p at many points.

    The bound is the same recurrence run on magnitudes; it dominates the
    rounding error committed while evaluating p and q.

    Args:
        J: Jacobi matrix
        z: Complex evaluation points

    Returns:
        (p, dp, q, dq, bound) arrays shaped like z
    """
    z = np.asarray(z, dtype=complex)
    absz = np.abs(z)
    n = J.n
    p_prev = np.ones_like(z)
    dp_prev = np.zeros_like(z)
    m_prev = np.ones(z.shape)
    p = z - J.b[n - 1]
    dp = np.ones_like(z)
    m = absz + abs(J.b[n - 1])
    for k in range(2, n + 1):
        shift = z - J.b[n - k]
        coupling = J.a[n - k] ** 2
        p_next = shift * p - coupling * p_prev
        dp_next = p + shift * dp - coupling * dp_prev
        m_next = (absz + abs(J.b[n - k])) * m + coupling * m_prev
        p_prev, dp_prev, m_prev = p, dp, m
        p, dp, m = p_next, dp_next, m_next
    return p, dp, p_prev, dp_prev, np.maximum(m, m_prev)


def truncate_first(J: JacobiMatrix) -> JacobiMatrix:
    """Delete the first row and column.

    Raises:
        SizeError: If J is 1 x 1
    """
    if J.n < 2:
        raise SizeError("Cannot truncate a 1 x 1 Jacobi matrix")
    return JacobiMatrix(b=J.b[1:], a=J.a[1:])


def measure_to_jacobi(mu: SpectralMeasure) -> JacobiMatrix:
    """Jacobi matrix whose spectral measure is mu, by Lanczos on the atoms.

    Runs Lanczos on diag(atoms) from the start vector sqrt(weights) with full
    reorthogonalization.

    Args:
        mu: Finite spectral measure with N atoms

    Returns:
        N x N Jacobi matrix

    Raises:
        ConditioningError: If two atoms are closer than the coincidence tolerance
    """
    atoms = mu.atoms
    size = mu.size
    span = float(atoms[-1] - atoms[0]) if size > 1 else 0.0
    if size > 1 and np.min(np.diff(atoms)) < COINCIDENT_ATOM_TOLERANCE * max(span, 1.0):
        raise ConditioningError("Spectral measure has nearly coincident atoms", best_iterate=atoms.copy())

    basis = np.zeros((size, size))
    basis[:, 0] = np.sqrt(mu.weights)
    b = np.zeros(size)
    a = np.zeros(max(size - 1, 0))
    for j in range(size):
        v = atoms * basis[:, j]
        b[j] = basis[:, j] @ v
        if j == size - 1:
            break
        v = v - b[j] * basis[:, j]
        if j > 0:
            v = v - a[j - 1] * basis[:, j - 1]
        for _ in range(REORTHOGONALIZATION_PASSES):
            v = v - basis[:, : j + 1] @ (basis[:, : j + 1].T @ v)
        a[j] = np.linalg.norm(v)
        if a[j] <= COINCIDENT_ATOM_TOLERANCE * max(span, 1.0):
            raise ConditioningError(f"Lanczos breakdown at step {j + 1}", best_iterate=b[: j + 1].copy())
        basis[:, j + 1] = v / a[j]
    return JacobiMatrix(b=b, a=a)


def jacobi_to_measure(J: JacobiMatrix) -> SpectralMeasure:
    """Spectral measure of J; delegates to the tridiagonal eigensolver."""
    return symm_tridiag_eigen(J)


def measure_poly_values(atoms: np.ndarray, weights: np.ndarray, z: np.ndarray):
    """Evaluate the polynomials p and q of a measure in product form.

    p(z) = prod (z - atom_k) and q(z) = sum_j w_j prod_{k != j} (z - atom_k), so
    that q/p is the Stieltjes transform sum_j w_j / (z - atom_j). Both are
    accumulated factor by factor without forming coefficients.

    Args:
        atoms: Real atoms
        weights: Matching weights
        z: Complex evaluation points

    Returns:
        (p, dp, q, dq, bound) arrays shaped like z
    """
    z = np.asarray(z, dtype=complex)
    absz = np.abs(z)
    p = np.ones_like(z)
    dp = np.zeros_like(z)
    q = np.zeros_like(z)
    dq = np.zeros_like(z)
    bound = np.ones(z.shape)
    for atom, weight in zip(np.asarray(atoms, dtype=float), np.asarray(weights, dtype=float)):
        shift = z - atom
        dq = q + shift * dq + weight * dp
        q = shift * q + weight * p
        dp = p + shift * dp
        p = shift * p
        bound = (absz + abs(atom)) * bound
    return p, dp, q, dq, bound


def positive_eigenvalue_count(J: JacobiMatrix) -> int:
    """Number of positive eigenvalues of J, by Sylvester inertia of the LDL^T pivots.

    An interior zero pivot is replaced by a tiny positive one, which leaves the
    inertia unchanged; a zero final pivot is a zero eigenvalue.
    """
    shift = np.finfo(float).eps * (1.0 + float(np.max(np.abs(J.b))) + 2.0 * (float(np.max(J.a)) if J.a.size else 0.0))
    negative = 0
    pivot = 1.0
    for k in range(J.n):
        coupling = J.a[k - 1] ** 2 / pivot if k > 0 else 0.0
        pivot = J.b[k] - coupling
        if pivot == 0.0:
            if k == J.n - 1:
                return J.n - 1 - negative
            pivot = shift
        elif pivot < 0.0:
            negative += 1
    return J.n - negative
