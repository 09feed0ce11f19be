"""
Oracles

Independent references for the verification suites: finite-difference and
closed-form Jacobians of the eigenvalue map, root matching and the
Kolmogorov-Smirnov test.
"""

import logging
import math
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..common.errors import ConditioningError, DomainError
from ..common.models import SpectralMeasure
from ..perturb_service.models import PerturbationKind
from ..perturb_service.service import forward_map

logger = logging.getLogger(__name__)

FD_STEP = 1e-5
KS_MIN_SAMPLES = 100
KOLMOGOROV_TERMS = 100


def match_roots(reference: np.ndarray, candidate: np.ndarray) -> Tuple[np.ndarray, float]:
    """Reorder candidate to best match reference; returns (reordered, max distance)."""
    reference = np.asarray(reference, dtype=complex)
    candidate = np.asarray(candidate, dtype=complex)
    if reference.size != candidate.size:
        raise DomainError(f"Cannot match {candidate.size} roots against {reference.size}")
    if reference.size == 0:
        return candidate, 0.0
    cost = np.abs(reference[:, None] - candidate[None, :])
    rows, columns = linear_sum_assignment(cost)
    reordered = np.empty_like(candidate)
    reordered[rows] = candidate[columns]
    return reordered, float(np.max(np.abs(reordered - reference)))


def _free_coordinates(mu: SpectralMeasure, l: float):
    """Free coordinates of the spectral data and the map back to (atoms, weights, w0, l)."""
    atoms, weights, zero_weight = mu.split_zero()
    size = atoms.size
    if zero_weight is not None:
        x = np.concatenate([atoms, weights])

        def unpack(v):
            w = v[size:]
            return v[:size], w, 1.0 - float(np.sum(w)), l

        return x, unpack

    x = np.concatenate([atoms, weights[:-1], [l]])

    def unpack(v):
        w = v[size: 2 * size - 1]
        return v[:size], np.append(w, 1.0 - float(np.sum(w))), None, float(v[-1])

    return x, unpack


def log_jacobian_fd(
    mu: SpectralMeasure,
    l: float,
    kind: PerturbationKind = PerturbationKind.MULTIPLICATIVE,
    step: float = FD_STEP,
) -> float:
    """log |det| of the derivative of (lambda, w, l) -> (Re z, Im z) by central differences.

    Free coordinates are lambda_1..lambda_n, w_1..w_{n-1} and l; with an atom
    pinned at 0 they are lambda_1..lambda_m, w_1..w_m at fixed l. Each step is
    step * (1 + |coordinate|); perturbed roots are matched to the base roots.

    Args:
        mu: Spectral measure
        l: Perturbation scale
        kind: Perturbation type
        step: Relative step

    Returns:
        log |det J|

    Raises:
        ConditioningError: If a step would leave the simplex interior or the determinant vanishes
    """
    x, unpack = _free_coordinates(mu, l)
    steps = step * (1.0 + np.abs(x))
    _, weights, zero_weight, _ = unpack(x)
    smallest = min(float(np.min(weights)), zero_weight if zero_weight is not None else math.inf)
    if smallest < 2.0 * float(np.max(steps)):
        raise ConditioningError(f"Weight {smallest!r} too close to the simplex boundary for step {np.max(steps)!r}")

    def evaluate(v) -> np.ndarray:
        atoms, w, w0, scale = unpack(v)
        return forward_map(atoms, w, scale, zero_weight=w0, kind=kind)

    base = evaluate(x)
    columns = []
    for index in range(x.size):
        shift = np.zeros_like(x)
        shift[index] = steps[index]
        plus, _ = match_roots(base, evaluate(x + shift))
        minus, _ = match_roots(base, evaluate(x - shift))
        difference = (plus - minus) / (2.0 * steps[index])
        columns.append(np.concatenate([difference.real, difference.imag]))
    sign, log_det = np.linalg.slogdet(np.column_stack(columns))
    if sign == 0:
        raise ConditioningError("Finite-difference Jacobian is singular")
    return float(log_det)


def jacobian_fd(mu: SpectralMeasure, l: float, kind: PerturbationKind = PerturbationKind.MULTIPLICATIVE, step: float = FD_STEP) -> float:
    """|det| of the eigenvalue map's derivative by central differences."""
    return math.exp(log_jacobian_fd(mu, l, kind=kind, step=step))


def _log_vandermonde(values: np.ndarray) -> float:
    upper = np.triu_indices(values.size, k=1)
    return float(np.sum(np.log(np.abs(values[:, None] - values[None, :])[upper])))


def log_jacobian_closed_form(
    mu: SpectralMeasure,
    l: float,
    z: np.ndarray,
    kind: PerturbationKind = PerturbationKind.MULTIPLICATIVE,
) -> float:
    """log of the closed-form Jacobian of the eigenvalue map.

    Multiplicative: l^{n-1} prod|lambda_j - lambda_k|^2 |prod lambda| / prod|z_j - z_k|^2,
    with l^m instead of l^{n-1} when an atom is pinned at 0 (nonzero atoms only).
    Additive: l^{n-1} prod|lambda_j - lambda_k|^2 / prod|z_j - z_k|^2.
    """
    atoms, _, zero_weight = mu.split_zero()
    z = np.asarray(z, dtype=complex)
    size = atoms.size
    power = size if zero_weight is not None else size - 1
    value = power * math.log(l) + 2.0 * _log_vandermonde(atoms) - 2.0 * _log_vandermonde(z)
    if kind == PerturbationKind.MULTIPLICATIVE:
        value += float(np.sum(np.log(np.abs(atoms))))
    return value


class KSResult(NamedTuple):
    statistic: float
    p_value: float


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution, 2 sum (-1)^{j-1} exp(-2 j^2 t^2)."""
    if t < 0.05:
        return 1.0
    j = np.arange(1, KOLMOGOROV_TERMS + 1)
    series = 2.0 * float(np.sum((-1.0) ** (j - 1) * np.exp(-2.0 * j ** 2 * t ** 2)))
    return min(max(series, 0.0), 1.0)


def ks_test(samples, cdf: Callable[[np.ndarray], np.ndarray]) -> KSResult:
    """Two-sided one-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    Args:
        samples: At least 100 real samples
        cdf: Vectorized reference CDF

    Returns:
        (statistic, p-value)

    Raises:
        DomainError: If fewer than 100 samples are given
    """
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    count = x.size
    if count < KS_MIN_SAMPLES:
        raise DomainError(f"KS test needs at least {KS_MIN_SAMPLES} samples, got {count}")
    values = np.asarray(cdf(x), dtype=float)
    ranks = np.arange(1, count + 1)
    statistic = float(max(np.max(ranks / count - values), np.max(values - (ranks - 1) / count)))
    return KSResult(statistic, kolmogorov_sf(math.sqrt(count) * statistic))


def relative_error(value: complex, reference: complex, floor: Optional[float] = None) -> float:
    scale = max(abs(reference), floor or 0.0)
    if scale == 0.0:
        return abs(value)
    return abs(value - reference) / scale
