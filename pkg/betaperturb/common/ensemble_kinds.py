"""
Ensemble Kinds

This module defines the ensemble families used throughout betaperturb.
It provides a central place to manage the family names, their classical
(beta = 1, 2, 4) labels and the string aliases accepted on the command line.
"""

from enum import Enum
from typing import Dict, Optional


class EnsembleKind(str, Enum):
    """Enumeration of ensemble families."""
    GAUSSIAN = "gauss"
    LAGUERRE = "laguerre"
    CHIRAL = "chiral"


# Classical names by family and Dyson index
CLASSICAL_NAMES: Dict[EnsembleKind, Dict[int, str]] = {
    EnsembleKind.GAUSSIAN: {1: "GOE", 2: "GUE", 4: "GSE"},
    EnsembleKind.LAGUERRE: {1: "LOE", 2: "LUE", 4: "LSE"},
    EnsembleKind.CHIRAL: {1: "chGOE", 2: "chGUE", 4: "chGSE"},
}


# Accepted spellings for each family
ALIASES: Dict[str, EnsembleKind] = {
    "gauss": EnsembleKind.GAUSSIAN,
    "gaussian": EnsembleKind.GAUSSIAN,
    "hermite": EnsembleKind.GAUSSIAN,
    "laguerre": EnsembleKind.LAGUERRE,
    "wishart": EnsembleKind.LAGUERRE,
    "chiral": EnsembleKind.CHIRAL,
    "chiral-gauss": EnsembleKind.CHIRAL,
}


def get_classical_name(kind: EnsembleKind, beta: float) -> str:
    """Get the classical ensemble label for a family and Dyson index.

    Args:
        kind: Ensemble family
        beta: Dyson index

    Returns:
        Classical name such as ``GUE``, or a ``G(beta)E``-style label otherwise
    """
    if float(beta).is_integer():
        name = CLASSICAL_NAMES.get(kind, {}).get(int(beta))
        if name:
            return name
    prefix = {EnsembleKind.GAUSSIAN: "G", EnsembleKind.LAGUERRE: "L", EnsembleKind.CHIRAL: "chG"}[kind]
    return f"{prefix}(beta={beta:g})E"


def get_kind_from_string(kind_str: str) -> Optional[EnsembleKind]:
    """Get an EnsembleKind from a string.

    Args:
        kind_str: Family name or alias

    Returns:
        EnsembleKind or None if not found
    """
    return ALIASES.get(kind_str.strip().lower())
