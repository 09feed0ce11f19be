"""
Ensemble Service

This module samples the tridiagonal and bidiagonal models of the Gaussian,
Laguerre and chiral beta-ensembles, and the perturbation scale l.
"""

from .models import BidiagonalFactor, EnsembleSpec, Regime, RngStream
from .scale_laws import (
    DensityLaw,
    ExponentialLaw,
    HalfNormalLaw,
    PointMassLaw,
    ScaleLaw,
    TabulatedDensityLaw,
    UniformLaw,
    get_scale_law,
)
from .service import (
    bidiag_to_jacobi,
    chi_sample,
    sample_gauss_beta,
    sample_jacobi,
    sample_laguerre_beta,
    sample_scale,
    sample_spectral_data,
)

__all__ = [
    'BidiagonalFactor',
    'EnsembleSpec',
    'Regime',
    'RngStream',
    'ScaleLaw',
    'PointMassLaw',
    'DensityLaw',
    'TabulatedDensityLaw',
    'ExponentialLaw',
    'UniformLaw',
    'HalfNormalLaw',
    'get_scale_law',
    'chi_sample',
    'sample_gauss_beta',
    'sample_laguerre_beta',
    'bidiag_to_jacobi',
    'sample_scale',
    'sample_jacobi',
    'sample_spectral_data',
]
