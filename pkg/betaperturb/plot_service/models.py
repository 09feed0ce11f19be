from typing import Optional, Tuple

from pydantic import BaseModel, Field


class PlotStyle(BaseModel):
    """Appearance of the eigenvalue scatter."""
    figsize: Tuple[float, float] = Field(default=(6.0, 6.0), description="Figure size in inches")
    marker_size: float = Field(default=9.0, gt=0, description="Scatter marker area in points^2")
    color: str = Field(default="tab:blue", description="Colour of the nonzero eigenvalues")
    zero_color: str = Field(default="tab:red", description="Colour of the structural zeros")
    margin: float = Field(default=1.1, ge=1.0, description="Axis half-width relative to the largest coordinate")
    title: Optional[str] = Field(None, description="Optional title above the axes")
