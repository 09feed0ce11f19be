from typing import NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field


class LogDensityReport(BaseModel):
    """A log-density split into its constituent terms."""
    model_config = ConfigDict(frozen=True)

    normalized: bool = Field(..., description="False when the normalization constant is unknown or omitted")
    exponential: float = Field(default=0.0, description="Exponential (Gaussian or Laguerre weight) part")
    product: float = Field(default=0.0, description="Power of |Re prod z|, |Im prod z - l Re prod z| or prod lambda")
    pairwise: float = Field(default=0.0, description="Pairwise products over eigenvalues or atoms")
    weights: float = Field(default=0.0, description="Powers of the spectral weights")
    scale: float = Field(default=0.0, description="Powers of l and the scale density F(l)")
    constant: float = Field(default=0.0, description="Minus the log normalization constant")

    @computed_field
    @property
    def log_value(self) -> float:
        return self.exponential + self.product + self.pairwise + self.weights + self.scale + self.constant


class GaussNormalization(NamedTuple):
    """log g, log c and log C = log g + log c + n (beta/2 - 1) log 2."""
    log_g: float
    log_c: float
    log_C: float


class LaguerreNormalization(NamedTuple):
    """log s (m >= n) or log t (m <= n-1), and the matching log C."""
    log_s: Optional[float]
    log_t: Optional[float]
    log_C: float
