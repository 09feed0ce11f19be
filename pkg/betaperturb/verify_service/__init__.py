"""
Verify Service

Certification harness: finite-difference and closed-form Jacobians, density
pushforward checks, roundtrip and configuration suites and Kolmogorov-Smirnov
goodness-of-fit tests, aggregated into JSON-serializable reports.
"""

from .models import CheckResult, Measurement, SuiteName, TrialFailure, VerificationReport, get_suite_from_string
from .oracles import (
    KSResult,
    jacobian_fd,
    kolmogorov_sf,
    ks_test,
    log_jacobian_closed_form,
    log_jacobian_fd,
    match_roots,
)
from .service import SUITES, VerificationService, pushforward_check, pushforward_discrepancy, run_suite

__all__ = [
    'SuiteName',
    'get_suite_from_string',
    'Measurement',
    'TrialFailure',
    'CheckResult',
    'VerificationReport',
    'KSResult',
    'match_roots',
    'jacobian_fd',
    'log_jacobian_fd',
    'log_jacobian_closed_form',
    'kolmogorov_sf',
    'ks_test',
    'SUITES',
    'VerificationService',
    'pushforward_check',
    'pushforward_discrepancy',
    'run_suite',
]
