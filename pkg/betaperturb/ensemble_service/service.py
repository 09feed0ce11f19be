import logging
import math
from typing import Tuple, Union

import numpy as np

from ..common.ensemble_kinds import EnsembleKind
from ..common.errors import DomainError
from ..common.models import JacobiMatrix, SpectralMeasure
from ..common.numerics import symm_tridiag_eigen
from .models import BidiagonalFactor, EnsembleSpec, RngStream
from .scale_laws import ScaleLaw

logger = logging.getLogger(__name__)

RandomSource = Union[RngStream, np.random.Generator]


def _generator(rng: RandomSource) -> np.random.Generator:
    return rng.generator if isinstance(rng, RngStream) else rng


def chi_sample(k, rng: RandomSource, size=None):
    """Draw from the chi distribution with k degrees of freedom.

    A chi_k variate is the square root of a gamma(k/2, scale 2) variate.

    Args:
        k: Positive degrees of freedom, scalar or array
        rng: Random stream
        size: Optional output shape, as for numpy generators

    Returns:
        float for scalar k without size, ndarray otherwise

    Raises:
        DomainError: If some k is not positive
    """
    dof = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(dof)) or np.any(dof <= 0):
        raise DomainError(f"chi distribution needs positive degrees of freedom, got {k!r}")
    draws = np.sqrt(_generator(rng).gamma(dof / 2.0, 2.0, size=size))
    if np.ndim(draws) == 0:
        return float(draws)
    return draws


def sample_gauss_beta(beta: float, n: int, rng: RandomSource) -> JacobiMatrix:
    """Tridiagonal model of the Gaussian beta-ensemble.

    b_j are standard normal and a_j = chi_{beta(n-j)} / sqrt(2), matching the
    coefficient density proportional to a^{beta(n-j)-1} exp(-a^2).
    """
    if beta <= 0 or n < 1:
        raise DomainError(f"Gaussian ensemble needs beta > 0 and n >= 1, got beta={beta}, n={n}")
    generator = _generator(rng)
    b = generator.standard_normal(n)
    a = np.zeros(0)
    if n > 1:
        a = chi_sample(beta * (n - np.arange(1, n)), generator) / math.sqrt(2.0)
    return JacobiMatrix(b=b, a=a)


def sample_laguerre_beta(beta: float, m: int, n: int, rng: RandomSource) -> BidiagonalFactor:
    """Bidiagonal factor B of the Laguerre beta-ensemble.

    For m >= n, B is n x n with x_j ~ chi_{beta(m-j+1)} and y_j ~ chi_{beta(n-j)}.
    For m <= n-1, B is (m+1) x (m+1) with a zero last row, x_j (j <= m) and
    y_j (j <= m) drawn with the same degrees of freedom.
    """
    if beta <= 0 or m < 1 or n < 1:
        raise DomainError(f"Laguerre ensemble needs beta > 0 and m, n >= 1, got beta={beta}, m={m}, n={n}")
    generator = _generator(rng)
    rows = min(m, n)
    x = chi_sample(beta * (m - np.arange(1, rows + 1) + 1), generator)
    columns = n - 1 if m >= n else m
    y = np.zeros(0)
    if columns > 0:
        y = chi_sample(beta * (n - np.arange(1, columns + 1)), generator)
    return BidiagonalFactor(x=np.atleast_1d(x), y=np.atleast_1d(y))


def bidiag_to_jacobi(B: BidiagonalFactor) -> JacobiMatrix:
    """The Jacobi matrix B*B.

    b_j = x_j^2 + y_{j-1}^2 and a_j = x_j y_j; in the m <= n-1 layout the
    trailing entry is b_{m+1} = y_m^2.
    """
    size = B.size
    x = np.zeros(size)
    x[: B.x.size] = B.x
    shifted = np.zeros(size)
    shifted[1:] = B.y
    return JacobiMatrix(b=x ** 2 + shifted ** 2, a=x[: size - 1] * B.y)


def sample_scale(law: ScaleLaw, rng: RandomSource) -> float:
    """Draw the perturbation scale l from its law."""
    return law.sample(_generator(rng))


def sample_jacobi(spec: EnsembleSpec, rng: RandomSource) -> JacobiMatrix:
    """Sample the Jacobi matrix of the ensemble described by spec.

    Chiral ensembles share the Laguerre tridiagonal model.
    """
    if spec.kind == EnsembleKind.GAUSSIAN:
        return sample_gauss_beta(spec.beta, spec.n, rng)
    return bidiag_to_jacobi(sample_laguerre_beta(spec.beta, spec.m, spec.n, rng))


def sample_spectral_data(spec: EnsembleSpec, law: ScaleLaw, rng: RandomSource) -> Tuple[SpectralMeasure, float]:
    """Sample the spectral measure of a Jacobi matrix together with an independent scale.

    In the m <= n-1 regime the smallest atom of B*B is pinned to exactly 0.

    Args:
        spec: Ensemble description
        law: Scale law
        rng: Random stream

    Returns:
        (measure, l)
    """
    generator = _generator(rng)
    J = sample_jacobi(spec, generator)
    mu = symm_tridiag_eigen(J)
    if spec.is_hard:
        atoms = mu.atoms.copy()
        atoms[np.argmin(np.abs(atoms))] = 0.0
        mu = SpectralMeasure(atoms=atoms, weights=mu.weights, zero_atom=True)
    l = sample_scale(law, generator)
    logger.debug(f"Sampled spectral data for {spec.label} n={spec.n} with l={l:.6g}")
    return mu, l
