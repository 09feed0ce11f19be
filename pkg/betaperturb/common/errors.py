"""
Error Types

This module defines the exception hierarchy shared by every betaperturb package.
The CLI maps these onto exit codes, so library code raises the most specific type.
"""

from typing import Any, Optional


class BetaPerturbError(Exception):
    """Base class for all betaperturb errors."""


class DomainError(BetaPerturbError, ValueError):
    """An argument lies outside the domain of an operation."""


class SizeError(DomainError):
    """A matrix or measure has a size the operation cannot accept."""


class SingularityError(DomainError):
    """A density was evaluated on its singular set (Im z = 0 or Re prod z = 0)."""


class NumericError(BetaPerturbError, ArithmeticError):
    """An iterative kernel did not converge within its iteration cap."""

    def __init__(self, message: str, best_iterate: Optional[Any] = None):
        super().__init__(message)
        self.best_iterate = best_iterate


class ConditioningError(NumericError):
    """The problem is too ill-conditioned for the requested accuracy."""


class ConsistencyError(BetaPerturbError):
    """Computed data violates a structural law it must satisfy."""


class ConfigurationError(BetaPerturbError, ValueError):
    """A scale law or run configuration is invalid."""


class UsageError(ConfigurationError):
    """The command line asked for something that does not exist."""


class DataError(BetaPerturbError):
    """An input record could not be parsed or is inconsistent with its regime."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
