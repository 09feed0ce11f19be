from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from ..common.ensemble_kinds import EnsembleKind, get_classical_name
from ..common.errors import DomainError


class Regime(str, Enum):
    """Laguerre regime: full rank (m >= n) or rank deficient (m <= n-1)."""
    FULL_RANK = "m>=n"
    RANK_DEFICIENT = "m<=n-1"


class EnsembleSpec(BaseModel):
    """Ensemble family, Dyson index and sizes."""
    model_config = ConfigDict(frozen=True)

    kind: EnsembleKind = Field(..., description="Ensemble family")
    beta: float = Field(..., gt=0, description="Dyson index")
    n: int = Field(..., ge=1, description="Size of the Hermitian matrix (Gaussian, Laguerre) or of its n-block (chiral)")
    m: Optional[int] = Field(None, ge=1, description="Number of rows of the Wishart factor X (Laguerre, chiral)")

    @model_validator(mode="after")
    def _check_m(self) -> "EnsembleSpec":
        if self.kind == EnsembleKind.GAUSSIAN:
            if self.m is not None:
                raise DomainError("Gaussian ensembles take no m parameter")
        elif self.m is None:
            raise DomainError(f"{self.kind.value} ensembles need the m parameter")
        return self

    @property
    def a(self) -> Optional[float]:
        """Laguerre exponent parameter |m-n| + 1 - 2/beta."""
        if self.m is None:
            return None
        return abs(self.m - self.n) + 1.0 - 2.0 / self.beta

    @property
    def regime(self) -> Optional[Regime]:
        if self.m is None:
            return None
        return Regime.FULL_RANK if self.m >= self.n else Regime.RANK_DEFICIENT

    @property
    def is_hard(self) -> bool:
        return self.regime == Regime.RANK_DEFICIENT

    @property
    def matrix_size(self) -> int:
        """Order of the tridiagonal model: n, or min(n, m+1) for Laguerre."""
        if self.m is None:
            return self.n
        return min(self.n, self.m + 1)

    @property
    def label(self) -> str:
        return get_classical_name(self.kind, self.beta)


class BidiagonalFactor(BaseModel):
    """Upper bidiagonal factor B of a Laguerre Jacobi matrix B*B."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: np.ndarray = Field(..., description="Diagonal of B")
    y: np.ndarray = Field(..., description="Superdiagonal of B")

    @field_validator("x", "y", mode="before")
    @classmethod
    def _as_array(cls, value):
        array = np.array(value, dtype=float).reshape(-1)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_invariants(self) -> "BidiagonalFactor":
        if self.x.size < 1 or self.y.size not in (self.x.size - 1, self.x.size):
            raise DomainError(f"Bidiagonal factor has incompatible sizes {self.x.size}, {self.y.size}")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise DomainError("Bidiagonal entries must be finite")
        if np.any(self.x < 0) or np.any(self.y < 0):
            raise DomainError("Bidiagonal entries must be nonnegative")
        return self

    @property
    def is_hard(self) -> bool:
        """Whether B carries the trailing zero row of the m <= n-1 layout."""
        return self.y.size == self.x.size

    @property
    def size(self) -> int:
        return self.x.size + 1 if self.is_hard else self.x.size

    def to_dense(self) -> np.ndarray:
        """Return B as a dense square matrix."""
        size = self.size
        dense = np.zeros((size, size))
        dense[np.arange(self.x.size), np.arange(self.x.size)] = self.x
        dense[np.arange(self.y.size), np.arange(1, self.y.size + 1)] = self.y
        return dense


class RngStream(BaseModel):
    """Reproducible random stream identified by (seed, stream index)."""
    seed: int = Field(..., ge=0, lt=2 ** 64, description="Master seed")
    stream: int = Field(default=0, ge=0, description="Stream index, the trial number in the harness")

    _generator: Optional[np.random.Generator] = PrivateAttr(default=None)

    @property
    def generator(self) -> np.random.Generator:
        """The underlying generator, created on first use and advanced by every draw."""
        if self._generator is None:
            sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
            self._generator = np.random.Generator(np.random.PCG64(sequence))
        return self._generator
