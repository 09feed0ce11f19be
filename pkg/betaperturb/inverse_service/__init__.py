"""
Inverse Service

Recovers the spectral data (lambda, w[, w0]) and the scale l from a perturbed
eigenvalue configuration, and exposes the structural identities used on the way.
"""

from .models import RecoveredSpectralData
from .service import (
    averaged_polynomial,
    recover_spectral_data,
    recover_spectral_data_additive,
    recover_spectral_data_hard,
    sum_lambda_squared_from_config,
    weights_product_from_config,
)

__all__ = [
    'RecoveredSpectralData',
    'recover_spectral_data',
    'recover_spectral_data_hard',
    'recover_spectral_data_additive',
    'averaged_polynomial',
    'sum_lambda_squared_from_config',
    'weights_product_from_config',
]
