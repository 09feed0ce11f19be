import logging
import math
from typing import Optional, Tuple

import numpy as np

from ..common.ensemble_kinds import EnsembleKind
from ..common.errors import DomainError, SingularityError
from ..common.models import SpectralMeasure
from ..ensemble_service.models import EnsembleSpec
from ..ensemble_service.scale_laws import ScaleLaw
from ..perturb_service.models import EigenConfiguration
from .models import LogDensityReport
from .normalizations import laguerre_parameter, log_norm_gauss, log_norm_laguerre

logger = logging.getLogger(__name__)

POINT_MASS_TOLERANCE = 1e-6


def _pairwise_terms(z: np.ndarray, beta: float) -> float:
    """(beta/2 - 1) sum_{j,k} log|z_j - conj z_k| + 2 sum_{j<k} log|z_j - z_k|."""
    total = 0.0
    if beta != 2:
        cross = np.abs(z[:, None] - np.conj(z)[None, :])
        total += (beta / 2.0 - 1.0) * float(np.sum(np.log(cross)))
    upper = np.triu_indices(z.size, k=1)
    total += 2.0 * float(np.sum(np.log(np.abs(z[:, None] - z[None, :])[upper])))
    return total


def _product_parts(z: np.ndarray) -> Tuple[float, float]:
    """(log|prod z|, sum of principal arguments)."""
    return float(np.sum(np.log(np.abs(z)))), float(np.sum(np.angle(z)))


def _log_abs_real_product(z: np.ndarray) -> float:
    log_modulus, theta = _product_parts(z)
    cosine = abs(math.cos(theta))
    if cosine == 0.0 or not math.isfinite(log_modulus):
        raise SingularityError("Re prod z vanishes")
    return log_modulus + math.log(cosine)


def _require_off_axis(z: np.ndarray) -> None:
    if np.any(z.imag == 0):
        raise SingularityError("Eigenvalue on the real axis")


def _require_upper(z: np.ndarray) -> None:
    _require_off_axis(z)
    if np.any(z.imag < 0):
        raise DomainError("Eigenvalues must lie in the upper half-plane")


def _scale_terms(law: ScaleLaw, l: float, beta: float, n: int) -> Tuple[float, bool]:
    """(1 - beta n/2) log l + log F(l), and whether F is present."""
    power = (1.0 - beta * n / 2.0) * math.log(l)
    if law.is_point_mass:
        l0 = law.support[0]
        if abs(l - l0) > POINT_MASS_TOLERANCE * (1.0 + l0):
            raise DomainError(f"Configuration scale l = {l!r} differs from the fixed scale {l0!r}")
        return power, False
    if not law.contains(l):
        raise DomainError(f"Configuration scale l = {l!r} lies outside the support of {law.describe()}")
    log_f = law.log_density(l)
    if not math.isfinite(log_f):
        raise DomainError(f"Scale density {law.describe()} vanishes at l = {l!r}")
    return power + log_f, True


def _multiplicative_scale(z: np.ndarray, upper_only: bool) -> float:
    """l = tan of the (half-period) argument sum, which must lie in (0, pi/2)."""
    if upper_only:
        total = float(np.sum(np.angle(z)))
    else:
        total = float(np.sum(np.where(z.imag > 0, np.angle(z), np.pi + np.angle(z))))
    if not 0.0 < total < math.pi / 2:
        raise DomainError(f"Argument sum {total!r} is outside (0, pi/2); not a multiplicative configuration")
    return math.tan(total)


def _beta_of(config: EigenConfiguration, beta: Optional[float]) -> float:
    if beta is not None:
        return beta
    if config.spec is None:
        raise DomainError("beta is needed for configurations without an ensemble")
    return config.spec.beta


def _gauss_exponential(z: np.ndarray) -> float:
    """-1/2 [(sum Re z)^2 - sum_{j != k} Re(z_j z_k)], which equals -1/2 sum lambda^2."""
    total = np.sum(z)
    off_diagonal = total ** 2 - np.sum(z ** 2)
    return -0.5 * (float(np.sum(z.real)) ** 2 - float(off_diagonal.real))


def log_density_gauss_mult(config: EigenConfiguration, law: ScaleLaw, beta: Optional[float] = None) -> LogDensityReport:
    """Log-density of the spectrum of (I + i l e1 e1*) J for J from the Gaussian beta-ensemble.

    Args:
        config: Configuration with no eigenvalue on the real axis
        law: Law of l; a point mass drops F and the constant
        beta: Dyson index, read from config.spec when omitted

    Returns:
        Log-density report

    Raises:
        SingularityError: If some z is real or Re prod z = 0
        DomainError: If l lies outside the law's support
    """
    beta = _beta_of(config, beta)
    z = config.z
    n = z.size
    _require_off_axis(z)
    log_real_product = _log_abs_real_product(z)
    l = _multiplicative_scale(z, upper_only=False)
    scale, has_density = _scale_terms(law, l, beta, n)
    return LogDensityReport(
        normalized=has_density,
        exponential=_gauss_exponential(z),
        product=-(beta / 2.0) * log_real_product,
        pairwise=_pairwise_terms(z, beta),
        scale=scale,
        constant=-log_norm_gauss(beta, n).log_C if has_density else 0.0,
    )


def log_density_gauss_add(config: EigenConfiguration, law: ScaleLaw, beta: Optional[float] = None) -> LogDensityReport:
    """Unnormalized log-density of the spectrum of J + i l e1 e1*, with l = sum Im z."""
    beta = _beta_of(config, beta)
    z = config.z
    _require_upper(z)
    l = float(np.sum(z.imag))
    scale, _ = _scale_terms(law, l, beta, z.size)
    return LogDensityReport(
        normalized=False,
        exponential=_gauss_exponential(z),
        pairwise=_pairwise_terms(z, beta),
        scale=scale,
    )


def _check_laguerre(config: EigenConfiguration, beta: float, m: int, n: int, size: int) -> np.ndarray:
    if not beta > 0 or m < 1 or n < 1:
        raise DomainError(f"Invalid Laguerre parameters beta={beta}, m={m}, n={n}")
    z = config.z
    if z.size != size:
        raise DomainError(f"Expected {size} nonzero eigenvalues, got {z.size}")
    _require_upper(z)
    return z


def log_density_laguerre_mult(config: EigenConfiguration, beta: float, m: int, n: int, law: ScaleLaw) -> LogDensityReport:
    """Log-density of the perturbed Laguerre spectrum for m >= n, with l = tan(sum Arg z)."""
    if m < n:
        raise DomainError(f"Full-rank Laguerre density needs m >= n, got m={m}, n={n}")
    z = _check_laguerre(config, beta, m, n, n)
    a = laguerre_parameter(beta, m, n)
    l = _multiplicative_scale(z, upper_only=True)
    scale, has_density = _scale_terms(law, l, beta, n)
    return LogDensityReport(
        normalized=has_density,
        exponential=-0.5 * float(np.sum(z.real)),
        product=(a * beta / 2.0 - beta / 2.0) * _log_abs_real_product(z),
        pairwise=_pairwise_terms(z, beta),
        scale=scale,
        constant=-log_norm_laguerre(beta, m, n).log_C if has_density else 0.0,
    )


def log_density_laguerre_hard(config: EigenConfiguration, beta: float, m: int, n: int, l: float) -> LogDensityReport:
    """Log-density of the m nonzero perturbed Laguerre eigenvalues for m <= n-1 and fixed l.

    Raises:
        DomainError: If the regime is wrong or sum Arg z is not below arctan l
        SingularityError: If Im prod z - l Re prod z vanishes with a negative exponent
    """
    if m > n - 1:
        raise DomainError(f"Rank-deficient Laguerre density needs m <= n-1, got m={m}, n={n}")
    if not l > 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    z = _check_laguerre(config, beta, m, n, m)
    log_modulus, theta = _product_parts(z)
    if not theta < math.atan(l):
        raise DomainError(f"Argument sum {theta!r} is not below arctan l = {math.atan(l)!r}")
    exponent = beta * (n - m) / 2.0 - 1.0
    product = 0.0
    if exponent != 0.0:
        gap = abs(math.sin(theta) - l * math.cos(theta))
        if gap == 0.0:
            if exponent < 0:
                raise SingularityError("Im prod z - l Re prod z vanishes")
            product = -math.inf
        else:
            product = exponent * (log_modulus + math.log(gap))
    return LogDensityReport(
        normalized=True,
        exponential=-0.5 * float(np.sum(z.real)),
        product=product,
        pairwise=_pairwise_terms(z, beta),
        scale=(1.0 - beta * n / 2.0) * math.log(l),
        constant=-log_norm_laguerre(beta, m, n).log_C,
    )


def log_density_laguerre_add(config: EigenConfiguration, beta: float, m: int, n: int, law: ScaleLaw) -> LogDensityReport:
    """Unnormalized log-density of the additive Laguerre perturbation for m >= n, with l = sum Im z."""
    if m < n:
        raise DomainError(f"Additive Laguerre density needs m >= n, got m={m}, n={n}")
    z = _check_laguerre(config, beta, m, n, n)
    a = laguerre_parameter(beta, m, n)
    l = float(np.sum(z.imag))
    scale, _ = _scale_terms(law, l, beta, n)
    return LogDensityReport(
        normalized=False,
        exponential=-0.5 * float(np.sum(z.real)),
        product=(a * beta / 2.0) * _log_abs_real_product(z),
        pairwise=_pairwise_terms(z, beta),
        scale=scale,
    )


def _vandermonde(atoms: np.ndarray, beta: float) -> float:
    upper = np.triu_indices(atoms.size, k=1)
    return beta * float(np.sum(np.log(np.abs(atoms[:, None] - atoms[None, :])[upper])))


def log_base_density(mu: SpectralMeasure, spec: EnsembleSpec, law: ScaleLaw, l: float) -> LogDensityReport:
    """Joint log-density of the spectral data (lambda, w[, w0]) and l.

    In the m <= n-1 Laguerre regime l is fixed and contributes no term.

    Args:
        mu: Spectral measure, with the atom at 0 pinned in the m <= n-1 regime
        spec: Ensemble the measure belongs to
        law: Law of l
        l: Scale value

    Returns:
        Log-density report

    Raises:
        DomainError: If the data does not fit the regime
    """
    beta = spec.beta
    atoms, weights, zero_weight = mu.split_zero()
    weight_term = (beta / 2.0 - 1.0) * float(np.sum(np.log(weights)))
    scale = 0.0
    has_density = True
    if not spec.is_hard:
        if zero_weight is not None:
            raise DomainError("Only the m <= n-1 Laguerre regime carries an atom pinned at 0")
        if law.is_point_mass:
            has_density = False
        else:
            if not law.contains(l):
                raise DomainError(f"l = {l!r} lies outside the support of {law.describe()}")
            scale = law.log_density(l)

    if spec.kind == EnsembleKind.GAUSSIAN:
        if atoms.size != spec.n:
            raise DomainError(f"Expected {spec.n} atoms, got {atoms.size}")
        norm = log_norm_gauss(beta, spec.n)
        return LogDensityReport(
            normalized=has_density,
            exponential=-0.5 * float(np.sum(atoms ** 2)),
            pairwise=_vandermonde(atoms, beta),
            weights=weight_term,
            scale=scale,
            constant=-(norm.log_g + norm.log_c),
        )

    m, n = spec.m, spec.n
    expected = m if spec.is_hard else n
    if atoms.size != expected:
        raise DomainError(f"Expected {expected} nonzero atoms, got {atoms.size}")
    if np.any(atoms <= 0):
        raise DomainError("Laguerre atoms must be positive")
    if spec.is_hard:
        if zero_weight is None:
            raise DomainError("The m <= n-1 Laguerre regime needs an atom pinned at 0")
        weight_term += (beta * (n - m) / 2.0 - 1.0) * math.log(zero_weight)
    norm = log_norm_laguerre(beta, m, n)
    a = laguerre_parameter(beta, m, n)
    return LogDensityReport(
        normalized=has_density,
        exponential=-0.5 * float(np.sum(atoms)),
        product=(beta * a / 2.0) * float(np.sum(np.log(atoms))),
        pairwise=_vandermonde(atoms, beta),
        weights=weight_term,
        scale=scale,
        constant=-(norm.log_t if spec.is_hard else norm.log_s),
    )
