from pydantic import BaseModel, ConfigDict, Field

from ..common.models import SpectralMeasure


class RecoveredSpectralData(BaseModel):
    """Spectral data (lambda, w[, w0]) and scale l recovered from a configuration."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    measure: SpectralMeasure = Field(..., description="Recovered spectral measure, atom at 0 pinned in the rank-deficient regime")
    l: float = Field(..., gt=0, description="Recovered or given perturbation scale")

    @property
    def atoms(self):
        return self.measure.atoms

    @property
    def weights(self):
        return self.measure.weights
