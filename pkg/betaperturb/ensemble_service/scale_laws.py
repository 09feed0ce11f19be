"""
Scale Laws

This module implements the distributions of the perturbation scale l: a point
mass for deterministic l and absolutely continuous laws dnu(l) = F(l) dl.
"""

import logging
import math
import re
from abc import ABC, abstractmethod
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr
from scipy import stats

from ..common.errors import ConfigurationError

logger = logging.getLogger(__name__)

GRID_POINTS = 4096
TAIL_MASS_LIMIT = 1e-2


class ScaleLawName(str, Enum):
    """Scale laws available by name on the command line."""
    POINT = "point"
    EXPONENTIAL = "exp"
    UNIFORM = "uniform"
    HALFNORMAL = "halfnormal"


class ScaleLaw(BaseModel, ABC):
    """Base class for distributions of the perturbation scale l."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    @abstractmethod
    def is_point_mass(self) -> bool:
        """Whether l is deterministic."""

    @property
    @abstractmethod
    def support(self) -> Tuple[float, float]:
        """Closed hull (lower, upper) of the support; upper may be inf."""

    @abstractmethod
    def sample(self, rng: np.random.Generator) -> float:
        """Draw one value of l."""

    @abstractmethod
    def log_density(self, l: float) -> Optional[float]:
        """log F(l), or None for a point mass."""

    @abstractmethod
    def describe(self) -> str:
        """Compact textual form, parseable by ``get_scale_law``."""

    def contains(self, l: float) -> bool:
        lower, upper = self.support
        return lower <= l <= upper


class PointMassLaw(ScaleLaw):
    """Deterministic scale l = l0."""
    l0: float = Field(..., gt=0, description="The fixed value of l")

    @property
    def is_point_mass(self) -> bool:
        return True

    @property
    def support(self) -> Tuple[float, float]:
        return (self.l0, self.l0)

    def sample(self, rng: np.random.Generator) -> float:
        return self.l0

    def log_density(self, l: float) -> Optional[float]:
        return None

    def describe(self) -> str:
        return f"point({self.l0!r})"


class DensityLaw(ScaleLaw):
    """Absolutely continuous law on [lower, upper], sampled by inverse CDF.

    Subclasses provide ``pdf``; the quantile function defaults to linear
    interpolation of the CDF tabulated on a fixed grid. For an unbounded
    support the grid is uniform in t = (l - lower) / (1 + l - lower).
    """
    lower: float = Field(default=0.0, ge=0, description="Left end of the support")
    upper: float = Field(default=math.inf, description="Right end of the support, may be inf")

    _table: Optional[Tuple[np.ndarray, np.ndarray]] = PrivateAttr(default=None)

    @property
    def is_point_mass(self) -> bool:
        return False

    @property
    def support(self) -> Tuple[float, float]:
        return (self.lower, self.upper)

    @abstractmethod
    def pdf(self, l):
        """Density F at l (vectorized)."""

    def log_density(self, l: float) -> Optional[float]:
        value = float(self.pdf(np.asarray(l, dtype=float)))
        return math.log(value) if value > 0 else -math.inf

    def quantile(self, u: float) -> float:
        edges, cdf = self._tabulate()
        t = float(np.interp(u, cdf, edges))
        return self._from_grid(t)

    def sample(self, rng: np.random.Generator) -> float:
        return self.quantile(float(rng.random()))

    def _bounded(self) -> bool:
        return math.isfinite(self.upper)

    def _from_grid(self, t):
        if self._bounded():
            return self.lower + t * (self.upper - self.lower)
        return self.lower + t / (1.0 - t)

    def _tabulate(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._table is not None:
            return self._table
        if not self.upper > self.lower:
            raise ConfigurationError(f"Empty support [{self.lower}, {self.upper}]")
        edges = np.linspace(0.0, 1.0, GRID_POINTS + 1)
        mids = 0.5 * (edges[1:] + edges[:-1])
        if self._bounded():
            mass = self.pdf(self._from_grid(mids)) * (self.upper - self.lower)
        else:
            mass = self.pdf(self._from_grid(mids)) / (1.0 - mids) ** 2
        mass = np.asarray(mass, dtype=float) / GRID_POINTS
        total = float(np.sum(mass))
        if not np.all(np.isfinite(mass)) or np.any(mass < 0) or not total > 0:
            raise ConfigurationError(f"Scale density {self.describe()} is not a nonnegative integrable function")
        if not self._bounded() and mass[-1] > TAIL_MASS_LIMIT * total:
            raise ConfigurationError(f"Scale density {self.describe()} is not integrable on its support")
        if abs(total - 1.0) > 1e-3:
            logger.warning(f"Scale density {self.describe()} integrates to {total:.6g}; sampling renormalizes")
        cdf = np.concatenate([[0.0], np.cumsum(mass)]) / total
        self._table = (edges, cdf)
        return self._table


class TabulatedDensityLaw(DensityLaw):
    """Law given by an arbitrary density callable."""
    density: Callable[[np.ndarray], np.ndarray] = Field(..., description="Density F, vectorized over l")
    name: str = Field(default="custom", description="Label used in reports")

    def pdf(self, l):
        return self.density(l)

    def describe(self) -> str:
        return self.name


class ExponentialLaw(DensityLaw):
    """F(l) = rate exp(-rate l) on (0, inf)."""
    rate: float = Field(default=1.0, gt=0, description="Rate parameter")

    def pdf(self, l):
        l = np.asarray(l, dtype=float)
        return np.where(l > 0, self.rate * np.exp(-self.rate * l), 0.0)

    def quantile(self, u: float) -> float:
        return -math.log1p(-u) / self.rate

    def describe(self) -> str:
        return f"exp({self.rate!r})"


class UniformLaw(DensityLaw):
    """F(l) = 1/(high - low) on [low, high]."""

    def pdf(self, l):
        l = np.asarray(l, dtype=float)
        inside = (l >= self.lower) & (l <= self.upper)
        return np.where(inside, 1.0 / (self.upper - self.lower), 0.0)

    def quantile(self, u: float) -> float:
        return self.lower + u * (self.upper - self.lower)

    def describe(self) -> str:
        return f"uniform({self.lower!r},{self.upper!r})"


class HalfNormalLaw(DensityLaw):
    """Half-normal law with scale sigma on (0, inf)."""
    sigma: float = Field(default=1.0, gt=0, description="Scale parameter")

    def pdf(self, l):
        return stats.halfnorm.pdf(l, scale=self.sigma)

    def quantile(self, u: float) -> float:
        return float(stats.halfnorm.ppf(u, scale=self.sigma))

    def describe(self) -> str:
        return f"halfnormal({self.sigma!r})"


_LAW_PATTERN = re.compile(r"^\s*([a-z]+)\s*\(\s*([^)]*)\)\s*$")


def get_scale_law(law_str: str) -> ScaleLaw:
    """Get a scale law from its textual form.

    Accepted forms: a bare positive number or ``point(l0)`` for a point mass,
    ``exp(rate)``, ``uniform(a,b)`` and ``halfnormal(sigma)``.

    Args:
        law_str: Textual law

    Returns:
        Scale law

    Raises:
        ConfigurationError: If the law is unknown or its parameters are invalid
    """
    text = law_str.strip().lower()
    try:
        return PointMassLaw(l0=float(text))
    except ValueError:
        pass
    match = _LAW_PATTERN.match(text)
    if not match:
        raise ConfigurationError(f"Unsupported scale law: {law_str}")
    name, raw_args = match.groups()
    try:
        args = [float(arg) for arg in raw_args.split(",") if arg.strip()]
        law_name = ScaleLawName(name)
        if law_name == ScaleLawName.POINT:
            return PointMassLaw(l0=args[0])
        elif law_name == ScaleLawName.EXPONENTIAL:
            return ExponentialLaw(rate=args[0] if args else 1.0)
        elif law_name == ScaleLawName.UNIFORM:
            if len(args) != 2 or not 0 <= args[0] < args[1]:
                raise ConfigurationError(f"uniform(a,b) needs 0 <= a < b, got {raw_args}")
            return UniformLaw(lower=args[0], upper=args[1])
        else:
            return HalfNormalLaw(sigma=args[0] if args else 1.0)
    except ConfigurationError:
        raise
    except (ValueError, IndexError) as e:
        raise ConfigurationError(f"Unsupported scale law: {law_str} ({e})") from e
