from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..common.numerics import arg_half_period, canonical_order
from ..ensemble_service.models import EnsembleSpec


class PerturbationKind(str, Enum):
    """Rank-one perturbations of a Jacobi matrix J."""
    MULTIPLICATIVE = "multiplicative"  # (I + i l e1 e1*) J
    ADDITIVE = "additive"  # J + i l e1 e1*


class EigenConfiguration(BaseModel):
    """Eigenvalues of a perturbed Jacobi matrix, structural zeros counted apart."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    z: np.ndarray = Field(..., description="Complex eigenvalues in canonical (Re, Im) order, structural zeros excluded")
    l: float = Field(..., gt=0, description="Perturbation scale")
    spec: Optional[EnsembleSpec] = Field(None, description="Ensemble the unperturbed matrix came from")
    zero_count: int = Field(default=0, ge=0, description="Number of structural zero eigenvalues")
    kind: PerturbationKind = Field(default=PerturbationKind.MULTIPLICATIVE, description="Perturbation type")

    @field_validator("z", mode="before")
    @classmethod
    def _canonical(cls, value):
        z = canonical_order(np.asarray(value, dtype=complex))
        if not np.all(np.isfinite(z)):
            raise ValueError("eigenvalues must be finite")
        z.setflags(write=False)
        return z

    @property
    def size(self) -> int:
        return int(self.z.size)

    @property
    def total_count(self) -> int:
        """Eigenvalue count including structural zeros."""
        return self.size + self.zero_count

    def angle_sum(self) -> float:
        """Sum of half-period arguments of the eigenvalues."""
        return float(np.sum(arg_half_period(self.z))) if self.size else 0.0

    def upper_count(self) -> int:
        """Number of eigenvalues in the open upper half-plane."""
        return int(np.count_nonzero(self.z.imag > 0))


class Quaternion(BaseModel):
    """Real quaternion q1 + q2 i + q3 j + q4 k."""
    model_config = ConfigDict(frozen=True)

    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0
    q4: float = 0.0

    @field_validator("q1", "q2", "q3", "q4")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not np.isfinite(value):
            raise ValueError("quaternion components must be finite")
        return value

    def norm(self) -> float:
        return float(np.sqrt(self.q1 ** 2 + self.q2 ** 2 + self.q3 ** 2 + self.q4 ** 2))

    def conjugate(self) -> "Quaternion":
        return Quaternion(q1=self.q1, q2=-self.q2, q3=-self.q3, q4=-self.q4)
