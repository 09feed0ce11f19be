"""
Shared Models

Domain records used by more than one package: polynomial aliases, Jacobi
matrices and their finite spectral measures.
"""

from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import DomainError

# Ascending-degree coefficient containers. Complex coefficients are allowed by
# numpy's Polynomial, so both aliases share one implementation.
ComplexPolynomial = Polynomial
RealPolynomial = Polynomial

WEIGHT_SUM_TOLERANCE = 1e-9


def _frozen_array(value, dtype=float) -> np.ndarray:
    array = np.array(value, dtype=dtype).reshape(-1)
    array.setflags(write=False)
    return array


class JacobiMatrix(BaseModel):
    """Real symmetric tridiagonal matrix with positive off-diagonal."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    b: np.ndarray = Field(..., description="Diagonal entries b_1..b_n")
    a: np.ndarray = Field(..., description="Off-diagonal entries a_1..a_{n-1}, all positive")

    @field_validator("b", "a", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_invariants(self) -> "JacobiMatrix":
        if self.b.size < 1:
            raise DomainError("Jacobi matrix needs at least one diagonal entry")
        if self.a.size != self.b.size - 1:
            raise DomainError(f"Expected {self.b.size - 1} off-diagonal entries, got {self.a.size}")
        if not (np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.a))):
            raise DomainError("Jacobi coefficients must be finite")
        if np.any(self.a <= 0):
            raise DomainError("Jacobi off-diagonal entries must be positive")
        return self

    @property
    def n(self) -> int:
        return int(self.b.size)

    def to_dense(self) -> np.ndarray:
        """Return the n x n dense matrix."""
        return np.diag(self.b) + np.diag(self.a, 1) + np.diag(self.a, -1)

    def trace(self) -> float:
        return float(np.sum(self.b))


class SpectralMeasure(BaseModel):
    """Finite atomic probability measure, optionally with an atom pinned at 0."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    atoms: np.ndarray = Field(..., description="Distinct real atoms, ascending")
    weights: np.ndarray = Field(..., description="Positive weights summing to one")
    zero_atom: bool = Field(default=False, description="Whether one atom is pinned at 0 (hard Laguerre regime)")

    @field_validator("atoms", "weights", mode="before")
    @classmethod
    def _as_array(cls, value):
        return _frozen_array(value)

    @model_validator(mode="after")
    def _check_invariants(self) -> "SpectralMeasure":
        if self.atoms.size < 1 or self.atoms.size != self.weights.size:
            raise DomainError("Measure needs matching, non-empty atoms and weights")
        if not (np.all(np.isfinite(self.atoms)) and np.all(np.isfinite(self.weights))):
            raise DomainError("Measure data must be finite")
        if np.any(self.weights <= 0):
            raise DomainError("Measure weights must be positive")
        if abs(float(np.sum(self.weights)) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise DomainError(f"Measure weights sum to {np.sum(self.weights)!r}, not 1")
        if np.any(np.diff(self.atoms) <= 0):
            raise DomainError("Measure atoms must be strictly increasing")
        if self.zero_atom and int(np.count_nonzero(self.atoms == 0.0)) != 1:
            raise DomainError("Zero-atom flag set but no atom equals 0")
        return self

    @classmethod
    def from_atoms(cls, atoms, weights, zero_atom: bool = False) -> "SpectralMeasure":
        """Build a measure from unsorted atoms, sorting and renormalizing the weights.

        Args:
            atoms: Real atoms in any order
            weights: Matching positive weights
            zero_atom: Whether one atom is exactly 0

        Returns:
            Validated measure
        """
        atoms = np.asarray(atoms, dtype=float).reshape(-1)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        order = np.argsort(atoms, kind="stable")
        weights = weights[order]
        return cls(atoms=atoms[order], weights=weights / np.sum(weights), zero_atom=zero_atom)

    @property
    def size(self) -> int:
        return int(self.atoms.size)

    def moment(self, k: int) -> float:
        """Return the k-th moment, the integral of x^k."""
        return float(np.sum(self.weights * self.atoms ** k))

    def split_zero(self) -> Tuple[np.ndarray, np.ndarray, Optional[float]]:
        """Return (nonzero atoms, their weights, w0), w0 None without a zero atom."""
        if not self.zero_atom:
            return self.atoms.copy(), self.weights.copy(), None
        mask = self.atoms != 0.0
        return self.atoms[mask].copy(), self.weights[mask].copy(), float(self.weights[~mask][0])
