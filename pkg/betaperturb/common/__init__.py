"""
Shared building blocks for betaperturb: the error hierarchy, settings,
ensemble families, the Jacobi matrix and spectral measure records, numerics
kernels and the CSV/JSON record formats.
"""

from .ensemble_kinds import EnsembleKind, get_classical_name, get_kind_from_string
from .errors import (
    BetaPerturbError,
    ConditioningError,
    ConfigurationError,
    ConsistencyError,
    DataError,
    DomainError,
    NumericError,
    SingularityError,
    SizeError,
    UsageError,
)
from .models import JacobiMatrix, SpectralMeasure
from .records import SampleMeta, TrialRecord, read_csv, read_json, write_csv, write_json
from .settings import Settings, read_config_file

__all__ = [
    'EnsembleKind',
    'get_classical_name',
    'get_kind_from_string',
    'BetaPerturbError',
    'DomainError',
    'SizeError',
    'SingularityError',
    'NumericError',
    'ConditioningError',
    'ConsistencyError',
    'ConfigurationError',
    'UsageError',
    'DataError',
    'JacobiMatrix',
    'SpectralMeasure',
    'SampleMeta',
    'TrialRecord',
    'read_csv',
    'write_csv',
    'read_json',
    'write_json',
    'Settings',
    'read_config_file',
]
