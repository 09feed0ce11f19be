import logging
from typing import IO, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from ..common.records import SampleMeta, TrialRecord
from .models import PlotStyle

logger = logging.getLogger(__name__)

SVG_SETTINGS = {
    "svg.hashsalt": "betaperturb",
    "svg.fonttype": "none",
}


def build_caption(meta: SampleMeta, records: Sequence[TrialRecord]) -> str:
    """Caption echoing ensemble, beta, n and l (or the law when l varies)."""
    scales = sorted({record.l for record in records})
    scale = f"l={scales[0]:g}" if len(scales) == 1 else f"l~{meta.law}"
    sizes = f"n={meta.n}" if meta.m is None else f"m={meta.m}, n={meta.n}"
    return f"{meta.ensemble}, beta={meta.beta:g}, {sizes}, {scale}, trials={len(records)}"


def render_scatter(records: Sequence[TrialRecord], caption: str, stream: IO[str], style: Optional[PlotStyle] = None) -> None:
    """Write an SVG scatter of (Re z, Im z) with the axes through the origin.

    Structural zeros are drawn at the origin in a second colour. Empty input
    gives empty axes. Output is deterministic for equal input.

    Args:
        records: Sampled configurations
        caption: Text placed under the axes
        stream: Text stream receiving the SVG
        style: Plot appearance
    """
    style = style or PlotStyle()
    z = np.concatenate([record.z for record in records]) if records else np.zeros(0, dtype=complex)
    zeros = sum(record.zero_count for record in records)
    extent = float(np.max(np.abs(np.concatenate([z.real, z.imag])))) if z.size else 1.0
    limit = style.margin * max(extent, 1e-12)

    with matplotlib.rc_context(SVG_SETTINGS):
        fig, ax = plt.subplots(figsize=style.figsize)
        try:
            ax.set_xlim(-limit, limit)
            ax.set_ylim(-limit, limit)
            ax.set_aspect("equal")
            ax.spines["left"].set_position("zero")
            ax.spines["bottom"].set_position("zero")
            ax.spines["right"].set_visible(False)
            ax.spines["top"].set_visible(False)
            ax.grid(True, linestyle=":", linewidth=0.5)
            ax.axhline(0.0, color="0.5", linewidth=0.8, linestyle="--")
            ax.axvline(0.0, color="0.5", linewidth=0.8, linestyle="--")
            if z.size:
                ax.scatter(z.real, z.imag, s=style.marker_size, color=style.color, linewidths=0)
            if zeros:
                ax.scatter([0.0], [0.0], s=2 * style.marker_size, color=style.zero_color, marker="x")
            if style.title:
                ax.set_title(style.title)
            fig.text(0.5, 0.02, caption, ha="center", va="bottom")
            fig.savefig(stream, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    logger.debug(f"Rendered {z.size} eigenvalues and {zeros} zeros")
