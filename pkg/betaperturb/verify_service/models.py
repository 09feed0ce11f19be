from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..common.errors import UsageError


class SuiteName(str, Enum):
    """Verification suites runnable by name."""
    CHARPOLY = "charpoly"
    CONFIGURATION = "configuration"
    JACOBIAN = "jacobian"
    PUSHFORWARD = "pushforward"
    ROUNDTRIP = "roundtrip"
    STATISTICS = "statistics"
    CHIRAL = "chiral"
    SYMPLECTIC = "symplectic"
    ALL = "all"


def get_suite_from_string(name: str) -> SuiteName:
    """Get a suite from its name.

    Raises:
        UsageError: If the name is unknown
    """
    try:
        return SuiteName(name.strip().lower())
    except ValueError:
        known = ", ".join(suite.value for suite in SuiteName)
        raise UsageError(f"Unknown suite '{name}' (expected one of: {known})")


class Measurement(BaseModel):
    """One check evaluated on one trial."""
    check: str
    trial: int
    error: float = 0.0
    passed: bool = True
    detail: Optional[str] = None
    value: Optional[float] = Field(None, description="Sample fed to a statistical check")
    resampled: int = Field(default=0, ge=0, description="Points redrawn by the simplex interior guard")


class TrialFailure(BaseModel):
    """A failing trial, reproducible from (seed, trial); trial is None for suite-level failures."""
    trial: Optional[int] = None
    detail: str


class CheckResult(BaseModel):
    """Aggregated outcome of one check."""
    model_config = ConfigDict(populate_by_name=True)

    name: str
    passed: bool = Field(..., serialization_alias="pass")
    worst_error: float = 0.0
    p_value: Optional[float] = None
    statistic: Optional[float] = None
    evaluated: int = 0
    failures: List[TrialFailure] = Field(default_factory=list)


class VerificationReport(BaseModel):
    """Machine-readable result of a suite run."""
    suite: str
    ensemble: str
    law: str
    seed: int
    trials: int
    resampled: int = 0
    checks: List[CheckResult] = Field(default_factory=list)
    wall_time: float = Field(default=0.0, exclude=True, description="Seconds; kept out of the serialized report")

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failing_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2)
