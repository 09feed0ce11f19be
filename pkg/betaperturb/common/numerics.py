"""
Numerical Kernels

Kernels shared by every package: the half-period argument, simultaneous
polynomial root finding, the symmetric tridiagonal eigensolver and log-gamma.
"""

import logging
import math
from typing import Callable, Tuple

import numpy as np

from .errors import DomainError, NumericError
from .models import ComplexPolynomial, JacobiMatrix, SpectralMeasure

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_MAX_ITER = 500
QL_MAX_SWEEPS = 60

# Lanczos approximation, g = 7, nine terms
LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# evaluate(z) -> (p(z), p'(z), running magnitude bound of p at z)
Evaluator = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


def arg_half_period(z):
    """Angle of z in [0, pi), measured from R+ in the upper and R- in the lower half-plane.

    Args:
        z: Complex scalar or array

    Returns:
        float for scalar input, ndarray otherwise

    Raises:
        DomainError: If any input is not finite
    """
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("arg_half_period needs finite input")
    angle = np.angle(arr)
    result = np.where(arr.imag > 0, angle, np.where(arr.imag < 0, np.pi + angle, 0.0))
    if result.ndim == 0:
        return float(result)
    return result


def canonical_order(z: np.ndarray) -> np.ndarray:
    """Sort complex values lexicographically by (Re, Im)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    return z[np.lexsort((z.imag, z.real))]


def aberth(
    evaluate: Evaluator,
    degree: int,
    center: complex,
    radius: float,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Aberth-Ehrlich simultaneous iteration for all roots of a degree-d function.

    A root is frozen once its correction falls below ``tol * |z|`` or once its
    residual reaches the rounding floor reported by the evaluator. One Newton
    pass polishes the result.

    Args:
        evaluate: Vectorized evaluator returning value, derivative and magnitude bound
        degree: Number of roots
        center: Center of the starting circle
        radius: Radius of the starting circle
        tol: Relative correction tolerance
        max_iter: Iteration cap

    Returns:
        The roots in canonical order

    Raises:
        NumericError: If some root has not converged after ``max_iter`` sweeps
    """
    if degree < 1:
        return np.zeros(0, dtype=complex)
    radius = max(float(radius), 1e-300)
    k = np.arange(degree)
    z = center + radius * np.exp(1j * (2.0 * np.pi * k / degree + 0.4))
    active = np.ones(degree, dtype=bool)
    floor = 4.0 * degree * EPS

    for iteration in range(max_iter):
        value, derivative, magnitude = evaluate(z)
        at_floor = np.abs(value) <= floor * magnitude
        active &= ~at_floor
        if not np.any(active):
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(derivative != 0, value / derivative, value)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            repulsion = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * repulsion)
        step = np.where(np.isfinite(step), step, ratio)
        step = np.where(active, step, 0.0)
        z = z - step
        active &= np.abs(step) > tol * np.abs(z)
        if not np.any(active):
            break
    else:
        raise NumericError(f"Aberth iteration did not converge in {max_iter} sweeps", best_iterate=canonical_order(z))

    value, derivative, _ = evaluate(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        polish = np.where(derivative != 0, value / derivative, 0.0)
    polish = np.where(np.isfinite(polish) & (np.abs(polish) < 1e-3 * (np.abs(z) + radius)), polish, 0.0)
    logger.debug(f"Aberth converged after {iteration + 1} sweeps (degree {degree})")
    return canonical_order(z - polish)


def horner_evaluator(coefficients: np.ndarray) -> Evaluator:
    """Evaluator for a polynomial given by ascending coefficients."""
    coefficients = np.asarray(coefficients, dtype=complex)
    magnitudes = np.abs(coefficients)

    def evaluate(z: np.ndarray):
        value = np.full_like(z, coefficients[-1], dtype=complex)
        derivative = np.zeros_like(z, dtype=complex)
        magnitude = np.full(z.shape, magnitudes[-1])
        absz = np.abs(z)
        for c, m in zip(coefficients[-2::-1], magnitudes[-2::-1]):
            derivative = derivative * z + value
            value = value * z + c
            magnitude = magnitude * absz + m
        return value, derivative, magnitude

    return evaluate


def poly_roots(p: ComplexPolynomial, tol: float = DEFAULT_ROOT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> np.ndarray:
    """All roots of a polynomial, with multiplicity, in canonical order.

    Args:
        p: Polynomial with ascending complex coefficients
        tol: Relative correction tolerance, must be positive
        max_iter: Iteration cap

    Returns:
        Array of ``deg p`` complex roots

    Raises:
        DomainError: If the degree is below one or tol is not positive
        NumericError: If the iteration cap is exceeded
    """
    if tol <= 0:
        raise DomainError("poly_roots needs a positive tolerance")
    coefficients = np.asarray(p.trim().coef, dtype=complex)
    degree = coefficients.size - 1
    if degree < 1:
        raise DomainError("poly_roots needs a polynomial of degree at least one")
    monic = coefficients / coefficients[-1]
    if degree == 1:
        return np.array([-monic[0]], dtype=complex)
    center = -monic[-2] / degree
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    return aberth(horner_evaluator(monic), degree, center, radius, tol=tol, max_iter=max_iter)


def tridiagonal_ql(diagonal, off_diagonal) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit QL with Wilkinson-type shifts; only the first row of the
    eigenvector matrix is accumulated.

    Args:
        diagonal: n diagonal entries
        off_diagonal: n-1 off-diagonal entries

    Returns:
        (eigenvalues ascending, first components)

    Raises:
        NumericError: If an eigenvalue needs more than the sweep cap
    """
    d = np.array(diagonal, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = np.asarray(off_diagonal, dtype=float)
    z = np.zeros(n)
    z[0] = 1.0
    if n == 1:
        return d, z

    for index in range(n):
        sweeps = 0
        while True:
            m = index
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == index:
                break
            if sweeps == QL_MAX_SWEEPS:
                raise NumericError(f"Tridiagonal QL exceeded {QL_MAX_SWEEPS} sweeps at index {index}", best_iterate=np.sort(d))
            sweeps += 1

            g = (d[index + 1] - d[index]) / (2.0 * e[index])
            r = math.hypot(g, 1.0)
            g = d[m] - d[index] + e[index] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, index - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b

                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
            if underflow:
                continue
            d[index] -= p
            e[index] = g
            e[m] = 0.0

    order = np.argsort(d, kind="stable")
    return d[order], z[order]


def symm_tridiag_eigen(J: JacobiMatrix) -> SpectralMeasure:
    """Spectral measure of a Jacobi matrix: eigenvalues and squared first components.

    Args:
        J: Jacobi matrix

    Returns:
        Measure with ascending atoms and weights summing to one

    Raises:
        NumericError: If the eigensolver does not converge
    """
    eigenvalues, first = tridiagonal_ql(J.b, J.a)
    weights = first ** 2
    weights = weights / np.sum(weights)
    if np.any(weights <= 0) or np.any(np.diff(eigenvalues) <= 0):
        raise NumericError("Eigensolver produced a degenerate spectral measure", best_iterate=eigenvalues)
    return SpectralMeasure(atoms=eigenvalues, weights=weights)


def log_gamma(x):
    """ln Gamma(x) for x > 0 by the Lanczos approximation.

    Args:
        x: Positive real scalar or array

    Returns:
        float for scalar input, ndarray otherwise

    Raises:
        DomainError: If any input is not positive and finite
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("log_gamma needs positive finite input")
    small = arr < 0.5
    shifted = np.where(small, 1.0 - arr, arr) - 1.0
    series = np.full(shifted.shape, LANCZOS_COEFFICIENTS[0])
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        series = series + c / (shifted + i)
    t = shifted + LANCZOS_G + 0.5
    result = HALF_LOG_TWO_PI + (shifted + 0.5) * np.log(t) - t + np.log(series)
    # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    result = np.where(small, np.log(np.pi / np.abs(np.sin(np.pi * arr))) - result, result)
    if result.ndim == 0:
        return float(result)
    return result


def product_values(roots: np.ndarray, z: np.ndarray):
    """Evaluate prod (z - r_k), its derivative and a magnitude bound, factor by factor."""
    z = np.asarray(z, dtype=complex)
    absz = np.abs(z)
    value = np.ones_like(z)
    derivative = np.zeros_like(z)
    bound = np.ones(z.shape)
    for root in np.asarray(roots, dtype=complex):
        shift = z - root
        derivative = value + shift * derivative
        value = shift * value
        bound = (absz + abs(root)) * bound
    return value, derivative, bound
