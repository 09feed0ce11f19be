import logging
import math
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from ..common.ensemble_kinds import EnsembleKind
from ..common.errors import ConsistencyError, DomainError, SizeError
from ..common.models import ComplexPolynomial, JacobiMatrix, SpectralMeasure
from ..common.numerics import DEFAULT_MAX_ITER, DEFAULT_ROOT_TOL, aberth
from ..ensemble_service.models import EnsembleSpec
from ..jacobi_service.service import char_poly_values, char_polys, measure_poly_values, positive_eigenvalue_count
from .models import EigenConfiguration, PerturbationKind

logger = logging.getLogger(__name__)

MAX_DEGREE = 50
CONDITIONING_WARNING_DEGREE = 30
ZERO_TOLERANCE = 1e-8
# bound per root; the argument sum of n roots is checked against n times this
ANGLE_TOLERANCE = 1e-8
TRACE_TOLERANCE = 1e-8


def multiplicative_charpoly(J: JacobiMatrix, l: float) -> ComplexPolynomial:
    """det(zI - (I + i l e1 e1*) J) = (1 + i l) p(z) - i l z q(z).

    Args:
        J: Jacobi matrix
        l: Perturbation scale

    Returns:
        Monic complex polynomial of degree n
    """
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    p, q = char_polys(J)
    return (1.0 + 1j * l) * p - 1j * l * Polynomial([0.0, 1.0]) * q


def additive_charpoly(J: JacobiMatrix, l: float) -> ComplexPolynomial:
    """det(zI - (J + i l e1 e1*)) = p(z) - i l q(z)."""
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    p, q = char_polys(J)
    return p - 1j * l * q


def _check_degree(degree: int) -> None:
    if degree > MAX_DEGREE:
        raise SizeError(f"Perturbed spectra are supported up to n = {MAX_DEGREE}, got n = {degree}")
    if degree > CONDITIONING_WARNING_DEGREE:
        logger.warning(f"n = {degree} exceeds {CONDITIONING_WARNING_DEGREE}; root accuracy may degrade")


def _jacobi_evaluator(J: JacobiMatrix, l: float, kind: PerturbationKind):
    def evaluate(z):
        p, dp, q, dq, bound = char_poly_values(J, z)
        if kind == PerturbationKind.ADDITIVE:
            return p - 1j * l * q, dp - 1j * l * dq, (1.0 + l) * bound
        value = (1.0 + 1j * l) * p - 1j * l * z * q
        derivative = (1.0 + 1j * l) * dp - 1j * l * (q + z * dq)
        return value, derivative, (math.hypot(1.0, l) + l * np.abs(z)) * bound

    return evaluate


def _measure_evaluator(atoms: np.ndarray, weights: np.ndarray, l: float, zero_weight: float, kind: PerturbationKind):
    def evaluate(z):
        p, dp, q, dq, bound = measure_poly_values(atoms, weights, z)
        if kind == PerturbationKind.ADDITIVE:
            return p - 1j * l * q, dp - 1j * l * dq, (1.0 + l) * bound
        c = 1.0 + 1j * l * (1.0 - zero_weight)
        value = c * p - 1j * l * z * q
        derivative = c * dp - 1j * l * (q + z * dq)
        return value, derivative, (abs(c) + l * np.abs(z)) * bound

    return evaluate


def _gershgorin(J: JacobiMatrix, l: float, kind: PerturbationKind) -> Tuple[complex, float]:
    dense = J.to_dense().astype(complex)
    if kind == PerturbationKind.ADDITIVE:
        dense[0, 0] += 1j * l
    else:
        dense[0, :] *= 1.0 + 1j * l
    diagonal = np.diag(dense)
    radii = np.sum(np.abs(dense), axis=1) - np.abs(diagonal)
    center = complex(np.mean(diagonal))
    return center, float(np.max(np.abs(diagonal - center) + radii))


def _split_zeros(z: np.ndarray) -> Tuple[np.ndarray, int]:
    if z.size == 0:
        return z, 0
    scale = 1.0 + float(np.max(np.abs(z)))
    zero = np.abs(z) <= ZERO_TOLERANCE * scale
    return z[~zero], int(np.count_nonzero(zero))


def _assert_multiplicative(config: EigenConfiguration, positive_count: Optional[int] = None) -> None:
    target = math.atan(config.l)
    z = config.z
    if config.spec is not None and config.spec.is_hard:
        if config.zero_count != 1:
            raise ConsistencyError(f"Rank-deficient configuration needs one structural zero, found {config.zero_count}")
        if np.any(z.imag <= 0):
            raise ConsistencyError("Rank-deficient configuration has eigenvalues outside the upper half-plane")
        total = float(np.sum(np.angle(z)))
        if not total < target + ANGLE_TOLERANCE:
            raise ConsistencyError(f"Argument sum {total!r} is not below arctan l = {target!r}")
        return
    if config.zero_count:
        logger.debug("Singular Jacobi matrix; configuration laws not asserted")
        return
    total = config.angle_sum()
    if not total < math.pi / 2:
        raise ConsistencyError(f"Half-period argument sum {total!r} is not below pi/2")
    if abs(total - target) > ANGLE_TOLERANCE * max(1, config.size):
        raise ConsistencyError(f"Half-period argument sum {total!r} differs from arctan l = {target!r}")
    laguerre = config.spec is not None and config.spec.kind != EnsembleKind.GAUSSIAN
    if laguerre and np.any(z.imag <= 0):
        raise ConsistencyError("Laguerre configuration has eigenvalues outside the upper half-plane")
    if positive_count is not None and config.upper_count() != positive_count:
        raise ConsistencyError(
            f"{config.upper_count()} eigenvalues in the upper half-plane but {positive_count} positive eigenvalues of J"
        )


def _assert_additive(config: EigenConfiguration) -> None:
    scale = 1.0 + config.l + float(np.max(np.abs(config.z)))
    if np.any(config.z.imag < -TRACE_TOLERANCE * scale):
        raise ConsistencyError("Additive configuration has eigenvalues in the lower half-plane")
    total = float(np.sum(config.z.imag))
    if abs(total - config.l) > TRACE_TOLERANCE * scale:
        raise ConsistencyError(f"Imaginary parts sum to {total!r}, expected l = {config.l!r}")


def eigenvalues_multiplicative(
    J: JacobiMatrix,
    l: float,
    spec: Optional[EnsembleSpec] = None,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenConfiguration:
    """Spectrum of (I + i l e1 e1*) J.

    Roots are found by simultaneous iteration on the perturbed three-term
    recurrence. A root within the zero tolerance is reported through
    ``zero_count`` and left out of ``z``.

    Args:
        J: Jacobi matrix
        l: Perturbation scale
        spec: Ensemble J was drawn from, selects the configuration law checked
        tol: Root-finder tolerance
        max_iter: Root-finder iteration cap

    Returns:
        Eigenvalue configuration

    Raises:
        DomainError: If l is not positive
        SizeError: If n exceeds the supported degree
        NumericError: If the root finder does not converge
        ConsistencyError: If the configuration law is violated
    """
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    _check_degree(J.n)
    kind = PerturbationKind.MULTIPLICATIVE
    center, radius = _gershgorin(J, l, kind)
    roots = aberth(_jacobi_evaluator(J, l, kind), J.n, center, radius, tol=tol, max_iter=max_iter)
    z, zero_count = _split_zeros(roots)
    config = EigenConfiguration(z=z, l=l, spec=spec, zero_count=zero_count, kind=kind)
    _assert_multiplicative(config, positive_eigenvalue_count(J))
    return config


def eigenvalues_additive(
    J: JacobiMatrix,
    l: float,
    spec: Optional[EnsembleSpec] = None,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenConfiguration:
    """Spectrum of J + i l e1 e1*, the roots of p(z) - i l q(z)."""
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    _check_degree(J.n)
    kind = PerturbationKind.ADDITIVE
    center, radius = _gershgorin(J, l, kind)
    roots = aberth(_jacobi_evaluator(J, l, kind), J.n, center, radius, tol=tol, max_iter=max_iter)
    config = EigenConfiguration(z=roots, l=l, spec=spec, kind=kind)
    _assert_additive(config)
    return config


def forward_map(
    atoms: np.ndarray,
    weights: np.ndarray,
    l: float,
    zero_weight: Optional[float] = None,
    kind: PerturbationKind = PerturbationKind.MULTIPLICATIVE,
    tol: float = DEFAULT_ROOT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> np.ndarray:
    """Perturbed eigenvalues straight from spectral data.

    Uses det = p(z) (1 + i l - i l w0 + i l z sum_j w_j / (atom_j - z)) for the
    multiplicative perturbation, with the factor z of the atom at 0 divided
    out, and det = p(z) - i l q(z) for the additive one. No input validation
    is done, so finite-difference callers may pass raw coordinates.

    Args:
        atoms: Nonzero atoms
        weights: Their weights
        l: Perturbation scale
        zero_weight: Weight w0 of the atom at 0, if any
        kind: Perturbation type
        tol: Root-finder tolerance
        max_iter: Root-finder iteration cap

    Returns:
        The roots in canonical order
    """
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    degree = atoms.size
    evaluate = _measure_evaluator(atoms, weights, l, zero_weight or 0.0, kind)
    spread = float(np.max(np.abs(atoms))) if degree else 0.0
    if kind == PerturbationKind.ADDITIVE:
        center = complex(np.mean(atoms), l / max(degree, 1))
        radius = spread + l
    else:
        center = complex(np.mean(atoms))
        radius = math.hypot(1.0, l) * spread + abs(center)
    return aberth(evaluate, degree, center, radius, tol=tol, max_iter=max_iter)


def eigenvalues_from_measure(mu: SpectralMeasure, l: float, spec: Optional[EnsembleSpec] = None) -> EigenConfiguration:
    """Multiplicative spectrum computed from (lambda, w[, w0], l) without rebuilding J."""
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    atoms, weights, zero_weight = mu.split_zero()
    _check_degree(atoms.size)
    roots = forward_map(atoms, weights, l, zero_weight=zero_weight)
    if zero_weight is None:
        z, zero_count = _split_zeros(roots)
    else:
        z, zero_count = roots, 1
    config = EigenConfiguration(z=z, l=l, spec=spec, zero_count=zero_count)
    positive_count = None if zero_weight is not None else int(np.count_nonzero(atoms > 0))
    _assert_multiplicative(config, positive_count)
    return config


def eigenvalues_additive_from_measure(mu: SpectralMeasure, l: float, spec: Optional[EnsembleSpec] = None) -> EigenConfiguration:
    """Additive spectrum computed from (lambda, w, l) without rebuilding J."""
    if l <= 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    if mu.zero_atom:
        raise DomainError("Additive perturbations take measures without a pinned zero atom")
    _check_degree(mu.size)
    kind = PerturbationKind.ADDITIVE
    roots = forward_map(mu.atoms, mu.weights, l, kind=kind)
    config = EigenConfiguration(z=roots, l=l, spec=spec, kind=kind)
    _assert_additive(config)
    return config


def chiral_spectrum(config: EigenConfiguration, m: int, n: int) -> EigenConfiguration:
    """Spectrum of the perturbed chiral matrix from the perturbed Laguerre spectrum.

    Nonzero eigenvalues are the pairs +-sqrt(z_j); the remaining |m - n|
    eigenvalues are zero, which absorbs the structural zero of the m <= n-1
    regime.

    Args:
        config: Multiplicative Laguerre configuration
        m: Rows of the Wishart factor
        n: Columns of the Wishart factor

    Returns:
        Chiral configuration with m + n eigenvalues in total
    """
    spec = config.spec
    if spec is not None and (spec.kind == EnsembleKind.GAUSSIAN or spec.m != m or spec.n != n):
        raise DomainError(f"Configuration of {spec.label} does not come from a Laguerre ensemble with (m, n) = ({m}, {n})")
    expected = min(m, n)
    if config.size != expected:
        raise DomainError(f"Expected {expected} nonzero Laguerre eigenvalues, got {config.size}")
    roots = np.sqrt(config.z)
    chiral = None
    if spec is not None:
        chiral = EnsembleSpec(kind=EnsembleKind.CHIRAL, beta=spec.beta, n=n, m=m)
    return EigenConfiguration(
        z=np.concatenate([roots, -roots]),
        l=config.l,
        spec=chiral,
        zero_count=abs(m - n),
        kind=config.kind,
    )


def symplectic_double(config: EigenConfiguration) -> EigenConfiguration:
    """Spectrum of the quaternionic perturbation: the configuration joined with its conjugates."""
    if config.spec is not None and config.spec.beta != 4:
        raise DomainError(f"Symplectic doubling needs beta = 4, got beta = {config.spec.beta}")
    return EigenConfiguration(
        z=np.concatenate([config.z, np.conj(config.z)]),
        l=config.l,
        spec=config.spec,
        zero_count=2 * config.zero_count,
        kind=config.kind,
    )


def full_wishart_zero_count(m: int, n: int) -> int:
    """Zero eigenvalues of the n x n perturbed Wishart matrix.

    For m <= n-1 there are n - m of them: n - m - 1 from the zero block that
    the tridiagonal model leaves out, plus the structural zero.
    """
    if m < 1 or n < 1:
        raise DomainError(f"Sizes must be positive, got m={m}, n={n}")
    return max(n - m, 0)
