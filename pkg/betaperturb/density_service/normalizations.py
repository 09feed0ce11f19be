"""
Normalization Constants

Log-space normalization constants of the Gaussian and Laguerre spectral
measure densities and of the induced eigenvalue densities.
"""

import math

import numpy as np

from ..common.errors import DomainError
from ..common.numerics import log_gamma
from .models import GaussNormalization, LaguerreNormalization

LOG_TWO = math.log(2.0)


def _check_beta(beta: float) -> None:
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")


def laguerre_parameter(beta: float, m: int, n: int) -> float:
    """a = |m - n| + 1 - 2/beta."""
    return abs(m - n) + 1.0 - 2.0 / beta


def log_norm_gauss(beta: float, n: int) -> GaussNormalization:
    """Normalization constants of the Gaussian beta-ensemble.

    g = (2 pi)^{n/2} prod_j Gamma(1 + beta j/2) / Gamma(1 + beta/2) and
    c = Gamma(beta/2)^n / Gamma(beta n/2).
    """
    _check_beta(beta)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    j = np.arange(1, n + 1)
    log_g = 0.5 * n * math.log(2.0 * math.pi) + float(np.sum(log_gamma(1.0 + beta * j / 2.0))) - n * log_gamma(1.0 + beta / 2.0)
    log_c = n * log_gamma(beta / 2.0) - log_gamma(beta * n / 2.0)
    return GaussNormalization(log_g, log_c, log_g + log_c + n * (beta / 2.0 - 1.0) * LOG_TWO)


def _laguerre_core(beta: float, a: float, k: int, n: int) -> float:
    j = np.arange(1, k + 1)
    terms = log_gamma(1.0 + beta * j / 2.0) + log_gamma(1.0 + beta * a / 2.0 + beta * (j - 1) / 2.0) - log_gamma(1.0 + beta / 2.0)
    power = k * (a * beta / 2.0 + 1.0 + (k - 1) * beta / 2.0) * LOG_TWO
    return power + k * log_gamma(beta / 2.0) - log_gamma(beta * n / 2.0) + float(np.sum(terms))


def log_norm_laguerre_s(beta: float, m: int, n: int) -> float:
    """log s of the m >= n Laguerre spectral measure density."""
    _check_beta(beta)
    if m < n:
        raise DomainError(f"s is defined for m >= n, got m={m}, n={n}")
    return _laguerre_core(beta, laguerre_parameter(beta, m, n), n, n)


def log_norm_laguerre_t(beta: float, m: int, n: int) -> float:
    """log t of the m <= n-1 Laguerre spectral measure density, including Gamma(beta(n-m)/2)."""
    _check_beta(beta)
    if m > n - 1:
        raise DomainError(f"t is defined for m <= n-1, got m={m}, n={n}")
    return _laguerre_core(beta, laguerre_parameter(beta, m, n), m, n) + log_gamma(beta * (n - m) / 2.0)


def log_norm_laguerre(beta: float, m: int, n: int) -> LaguerreNormalization:
    """Normalization constants for the regime selected by (m, n).

    C = s 2^{n(beta/2-1)} for m >= n and C = t 2^{m(beta/2-1)} for m <= n-1.
    """
    if m < 1 or n < 1:
        raise DomainError(f"m and n must be positive, got m={m}, n={n}")
    if m >= n:
        log_s = log_norm_laguerre_s(beta, m, n)
        return LaguerreNormalization(log_s, None, log_s + n * (beta / 2.0 - 1.0) * LOG_TWO)
    log_t = log_norm_laguerre_t(beta, m, n)
    return LaguerreNormalization(None, log_t, log_t + m * (beta / 2.0 - 1.0) * LOG_TWO)
