"""
Settings

Environment-driven configuration. Values are read after ``load_dotenv()`` so a
local ``.env`` file can provide them; CLI flags override whatever is found here.
"""

import os
from typing import Dict, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field

from .errors import ConfigurationError

ENV_PREFIX = "BETAPERTURB_"
ENV_NAMES = {
    "root_tolerance": "ROOT_TOL",
    "max_iterations": "MAX_ITER",
}


class Settings(BaseModel):
    """Process-wide knobs for numerics, logging and the verify harness."""
    log_level: str = Field(default="INFO", description="Logging level for the betaperturb logger tree")
    fault: bool = Field(default=False, description="Enable the verify self-test fault hook")
    jobs: int = Field(default=1, ge=1, description="Worker processes for trial execution")
    root_tolerance: float = Field(default=1e-12, gt=0, description="Relative step tolerance of the root finders")
    max_iterations: int = Field(default=500, ge=10, description="Iteration cap of the iterative kernels")

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Build settings from ``BETAPERTURB_*`` environment variables.

        Args:
            environ: Mapping to read instead of ``os.environ``

        Returns:
            Settings instance

        Raises:
            ConfigurationError: If a variable cannot be converted
        """
        environ = os.environ if environ is None else environ
        values = {}
        for name in cls.model_fields:
            raw = environ.get(ENV_PREFIX + ENV_NAMES.get(name, name.upper()))
            if raw is not None and raw != "":
                values[name] = raw
        if "fault" in values:
            values["fault"] = str(values["fault"]).strip().lower() not in ("0", "false", "no", "off")
        try:
            return cls(**values)
        except ValueError as e:
            raise ConfigurationError(f"Invalid environment configuration: {e}") from e


def read_config_file(path: str) -> Dict[str, str]:
    """Read a flat ``key=value`` file into a dict keyed by underscore names.

    Args:
        path: Path to the config file

    Returns:
        Mapping from option name (dashes replaced by underscores) to raw string

    Raises:
        ConfigurationError: If the file cannot be read
    """
    if not os.path.isfile(path):
        raise ConfigurationError(f"Config file not found: {path}")
    raw = dotenv_values(path)
    return {
        key.strip().lstrip("-").replace("-", "_").lower(): value
        for key, value in raw.items()
        if value is not None
    }
