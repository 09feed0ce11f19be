"""
Plot Service

SVG scatter plots of perturbed spectra in the complex plane.
"""

from .models import PlotStyle
from .service import build_caption, render_scatter

__all__ = [
    'PlotStyle',
    'build_caption',
    'render_scatter',
]
