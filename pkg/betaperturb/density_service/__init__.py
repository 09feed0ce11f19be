"""
Density Service

Closed-form log-densities of perturbed eigenvalue configurations, the base
densities of the spectral data, and their normalization constants.
"""

from .models import GaussNormalization, LaguerreNormalization, LogDensityReport
from .normalizations import (
    laguerre_parameter,
    log_norm_gauss,
    log_norm_laguerre,
    log_norm_laguerre_s,
    log_norm_laguerre_t,
)
from .service import (
    log_base_density,
    log_density_gauss_add,
    log_density_gauss_mult,
    log_density_laguerre_add,
    log_density_laguerre_hard,
    log_density_laguerre_mult,
)

__all__ = [
    'LogDensityReport',
    'GaussNormalization',
    'LaguerreNormalization',
    'laguerre_parameter',
    'log_norm_gauss',
    'log_norm_laguerre',
    'log_norm_laguerre_s',
    'log_norm_laguerre_t',
    'log_density_gauss_mult',
    'log_density_gauss_add',
    'log_density_laguerre_mult',
    'log_density_laguerre_hard',
    'log_density_laguerre_add',
    'log_base_density',
]
