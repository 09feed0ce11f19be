import logging
import math
from typing import Tuple

import numpy as np
from numpy.polynomial import Polynomial

from ..common.errors import ConsistencyError, DomainError, SingularityError
from ..common.models import ComplexPolynomial, SpectralMeasure
from ..common.numerics import aberth, product_values
from ..perturb_service.models import EigenConfiguration, PerturbationKind
from .models import RecoveredSpectralData

logger = logging.getLogger(__name__)

REALNESS_TOLERANCE = 1e-8
WEIGHT_SUM_TOLERANCE = 1e-8


def averaged_polynomial(z: np.ndarray) -> ComplexPolynomial:
    """1/2 prod (x - z_j) + 1/2 prod (x - conj z_j), the real-part polynomial of prod (x - z_j)."""
    z = np.asarray(z, dtype=complex)
    upper = np.poly(z)[::-1]
    lower = np.poly(np.conj(z))[::-1]
    return Polynomial(0.5 * (upper + lower))


def _averaged_evaluator(z: np.ndarray):
    conjugate = np.conj(z)

    def evaluate(x):
        value, derivative, bound = product_values(z, x)
        value_c, derivative_c, _ = product_values(conjugate, x)
        return 0.5 * (value + value_c), 0.5 * (derivative + derivative_c), bound

    return evaluate


def _real_atoms(z: np.ndarray) -> np.ndarray:
    """Roots of the averaged polynomial; they are real and simple for perturbed spectra."""
    center = complex(np.mean(z.real))
    radius = 2.0 * float(np.max(np.abs(z - center))) + 1e-12
    roots = aberth(_averaged_evaluator(z), z.size, center, radius)
    scale = 1.0 + float(np.max(np.abs(roots)))
    if np.any(np.abs(roots.imag) > REALNESS_TOLERANCE * scale):
        raise ConsistencyError(f"Averaged polynomial has non-real roots (|Im| up to {np.max(np.abs(roots.imag))!r})")
    atoms = np.sort(roots.real)
    if atoms.size > 1 and np.any(np.diff(atoms) <= 0):
        raise ConsistencyError("Recovered atoms are not distinct")
    return atoms


def _residue_log_moduli(atoms: np.ndarray, z: np.ndarray) -> np.ndarray:
    """log |prod_k (atom_j - z_k)| - log prod_{k != j} |atom_j - atom_k|."""
    numerator = np.sum(np.log(np.abs(atoms[:, None] - z[None, :])), axis=1)
    gaps = np.abs(atoms[:, None] - atoms[None, :])
    np.fill_diagonal(gaps, 1.0)
    return numerator - np.sum(np.log(gaps), axis=1)


def _checked_weights(log_weights: np.ndarray, extra: float = 0.0) -> np.ndarray:
    weights = np.exp(log_weights)
    if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
        raise ConsistencyError("Recovered weights are not positive")
    total = float(np.sum(weights)) + extra
    if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ConsistencyError(f"Recovered weights sum to {total!r}, not 1")
    return weights


def _product_parts(z: np.ndarray) -> Tuple[float, float]:
    log_modulus = float(np.sum(np.log(np.abs(z))))
    theta = float(np.sum(np.angle(z)))
    if math.cos(theta) == 0.0:
        raise SingularityError("Re prod z vanishes")
    return log_modulus, theta


def recover_spectral_data(config: EigenConfiguration) -> RecoveredSpectralData:
    """Invert the multiplicative eigenvalue map for nonsingular J.

    l = Im(prod z) / Re(prod z), lambda are the roots of the averaged polynomial
    and w_j = |prod_k (lambda_j - z_k)| / (l |lambda_j| prod_{k != j} |lambda_j - lambda_k|).

    Args:
        config: Multiplicative configuration without structural zeros

    Returns:
        Recovered measure and scale

    Raises:
        DomainError: If the configuration is additive or carries a zero
        SingularityError: If Re prod z = 0 or some lambda vanishes
        ConsistencyError: If the recovered data violates the structural laws
    """
    if config.kind != PerturbationKind.MULTIPLICATIVE:
        raise DomainError("recover_spectral_data takes multiplicative configurations")
    if config.zero_count:
        raise DomainError("Configurations with a structural zero need recover_spectral_data_hard")
    z = config.z
    _, theta = _product_parts(z)
    l = math.tan(theta)
    if not l > 0:
        raise ConsistencyError(f"Recovered scale l = {l!r} is not positive")
    atoms = _real_atoms(z)
    if np.any(atoms == 0):
        raise SingularityError("Recovered atom at 0")
    weights = _checked_weights(_residue_log_moduli(atoms, z) - math.log(l) - np.log(np.abs(atoms)))
    logger.debug(f"Recovered {atoms.size} atoms with l={l:.6g}")
    return RecoveredSpectralData(measure=SpectralMeasure(atoms=atoms, weights=weights / np.sum(weights)), l=l)


def recover_spectral_data_hard(config: EigenConfiguration, l: float) -> RecoveredSpectralData:
    """Invert the multiplicative eigenvalue map in the rank-deficient Laguerre regime.

    w0 = |Im prod z - l Re prod z| / (l Re prod z) and the remaining weights
    follow from the residues of the perturbed Stieltjes transform.

    Args:
        config: The m nonzero eigenvalues
        l: The fixed perturbation scale

    Returns:
        Recovered measure with its atom at 0, and l

    Raises:
        ConsistencyError: If w0 falls outside (0, 1) or the weights do not sum to 1
    """
    if not l > 0:
        raise DomainError(f"Perturbation scale must be positive, got {l}")
    z = config.z
    if z.size < 1 or np.any(z.imag <= 0):
        raise DomainError("Rank-deficient configurations lie in the upper half-plane")
    _, theta = _product_parts(z)
    if not theta < math.atan(l):
        raise DomainError(f"Argument sum {theta!r} is not below arctan l = {math.atan(l)!r}")
    zero_weight = abs(math.tan(theta) - l) / l
    if not 0.0 < zero_weight < 1.0:
        raise ConsistencyError(f"Recovered zero-atom weight {zero_weight!r} is outside (0, 1)")
    atoms = _real_atoms(z)
    if np.any(atoms == 0):
        raise SingularityError("Recovered atom at 0")
    weights = _checked_weights(_residue_log_moduli(atoms, z) - math.log(l) - np.log(np.abs(atoms)), extra=zero_weight)
    total = float(np.sum(weights)) + zero_weight
    measure = SpectralMeasure.from_atoms(
        np.append(atoms, 0.0),
        np.append(weights, zero_weight) / total,
        zero_atom=True,
    )
    return RecoveredSpectralData(measure=measure, l=l)


def recover_spectral_data_additive(config: EigenConfiguration) -> RecoveredSpectralData:
    """Invert the additive eigenvalue map: l = sum Im z and w_j from the residues of q/p."""
    if config.kind != PerturbationKind.ADDITIVE:
        raise DomainError("recover_spectral_data_additive takes additive configurations")
    z = config.z
    l = float(np.sum(z.imag))
    if not l > 0:
        raise ConsistencyError(f"Recovered scale l = {l!r} is not positive")
    atoms = _real_atoms(z)
    weights = _checked_weights(_residue_log_moduli(atoms, z) - math.log(l))
    return RecoveredSpectralData(measure=SpectralMeasure(atoms=atoms, weights=weights / np.sum(weights)), l=l)


def sum_lambda_squared_from_config(config: EigenConfiguration) -> float:
    """(sum Re z)^2 - sum_{j != k} Re(z_j z_k), which equals sum lambda_j^2."""
    z = config.z
    total = np.sum(z)
    return float(np.sum(z.real)) ** 2 - float((total ** 2 - np.sum(z ** 2)).real)


def weights_product_from_config(config: EigenConfiguration, atoms: np.ndarray) -> float:
    """Closed form of prod w_j in terms of the eigenvalues and the atoms.

    prod_{j,k} |z_j - conj z_k| / ((2l)^N prod_{j<k} |lambda_j - lambda_k|^2 D),
    with D = |Re prod z| for multiplicative and D = 1 for additive
    configurations, and l the scale stored on the configuration.
    """
    z = config.z
    atoms = np.asarray(atoms, dtype=float)
    size = z.size
    cross = float(np.sum(np.log(np.abs(z[:, None] - np.conj(z)[None, :]))))
    upper = np.triu_indices(atoms.size, k=1)
    vandermonde = 2.0 * float(np.sum(np.log(np.abs(atoms[:, None] - atoms[None, :])[upper])))
    log_value = cross - size * math.log(2.0 * config.l) - vandermonde
    if config.kind == PerturbationKind.MULTIPLICATIVE:
        log_modulus, theta = _product_parts(z)
        log_value -= log_modulus + math.log(abs(math.cos(theta)))
    return math.exp(log_value)
