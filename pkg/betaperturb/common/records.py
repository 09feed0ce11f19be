"""
Records

Reading and writing sampled eigenvalue configurations. CSV rows are
``trial,l,k,re,im`` with one row per eigenvalue; structural zeros are written
as exact ``0.0,0.0`` rows after the nonzero eigenvalues. JSON documents carry a
``meta`` block describing the ensemble. Floats use the shortest round-trip
representation, so equal inputs give byte-identical files.
"""

import csv
import json
import logging
from typing import IO, Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import DataError
from .numerics import canonical_order

logger = logging.getLogger(__name__)

CSV_HEADER = ["trial", "l", "k", "re", "im"]


class TrialRecord(BaseModel):
    """One sampled configuration."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    trial: int = Field(..., ge=0, description="Trial index, also the random stream index")
    l: float = Field(..., gt=0, description="Perturbation scale")
    z: np.ndarray = Field(..., description="Nonzero eigenvalues in canonical order")
    zero_count: int = Field(default=0, ge=0, description="Structural zero eigenvalues")

    @field_validator("z", mode="before")
    @classmethod
    def _as_array(cls, value):
        z = canonical_order(np.asarray(value, dtype=complex).reshape(-1))
        z.setflags(write=False)
        return z


class SampleMeta(BaseModel):
    """Ensemble description stored in JSON documents."""
    ensemble: str = Field(..., description="Ensemble family name")
    beta: float = Field(..., gt=0, description="Dyson index")
    n: int = Field(..., ge=1, description="Matrix size")
    m: Optional[int] = Field(None, ge=1, description="Rows of the Wishart factor")
    seed: int = Field(..., ge=0, description="Master seed")
    law: str = Field(..., description="Scale law")


class _TrialDocument(BaseModel):
    l: float = Field(..., gt=0)
    z: List[Tuple[float, float]]
    zero_count: int = Field(default=0, ge=0)


class _SampleDocument(BaseModel):
    meta: SampleMeta
    trials: List[_TrialDocument]


def format_float(value: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(value))


def write_csv(records: Iterable[TrialRecord], stream: IO[str]) -> None:
    """Write records as ``trial,l,k,re,im`` rows with LF line endings."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        values = list(record.z) + [0j] * record.zero_count
        for k, value in enumerate(values):
            writer.writerow([
                record.trial,
                format_float(record.l),
                k,
                format_float(value.real),
                format_float(value.imag),
            ])


def _parse_row(row: List[str], line_number: int) -> Tuple[int, float, int, complex]:
    if len(row) != len(CSV_HEADER):
        raise DataError(f"expected {len(CSV_HEADER)} columns, got {len(row)}", line_number)
    try:
        trial, k = int(row[0]), int(row[2])
        l, re, im = float(row[1]), float(row[3]), float(row[4])
    except ValueError as e:
        raise DataError(f"unparseable value ({e})", line_number) from e
    if not np.isfinite([l, re, im]).all():
        raise DataError("non-finite value", line_number)
    return trial, l, k, complex(re, im)


def read_csv(stream: IO[str]) -> List[TrialRecord]:
    """Read records written by ``write_csv``.

    Rows of one trial must be contiguous, share l and number k = 0, 1, ...

    Raises:
        DataError: Naming the first offending line
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None:
        return []
    if [column.strip() for column in header] != CSV_HEADER:
        raise DataError(f"expected header {','.join(CSV_HEADER)}", 1)

    records: List[TrialRecord] = []
    current: Optional[Tuple[int, float]] = None
    values: List[complex] = []
    first_line = 2

    def flush():
        if current is None:
            return
        nonzero = [value for value in values if value != 0]
        try:
            records.append(TrialRecord(trial=current[0], l=current[1], z=nonzero, zero_count=len(values) - len(nonzero)))
        except ValidationError as e:
            raise DataError(f"invalid trial record ({e.errors()[0]['msg']})", first_line) from e

    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        trial, l, k, value = _parse_row(row, line_number)
        if current is None or trial != current[0]:
            flush()
            if any(record.trial == trial for record in records):
                raise DataError(f"rows of trial {trial} are not contiguous", line_number)
            current, values, first_line = (trial, l), [], line_number
        elif l != current[1]:
            raise DataError(f"trial {trial} changes l from {current[1]!r} to {l!r}", line_number)
        if k != len(values):
            raise DataError(f"expected eigenvalue index {len(values)}, got {k}", line_number)
        values.append(value)
    flush()
    logger.debug(f"Read {len(records)} trials from CSV")
    return records


def write_json(meta: SampleMeta, records: Iterable[TrialRecord], stream: IO[str]) -> None:
    """Write ``{meta, trials: [{l, z: [[re, im], ...], zero_count}]}``."""
    document = {
        "meta": meta.model_dump(exclude_none=True),
        "trials": [
            {
                "l": float(record.l),
                "z": [[float(value.real), float(value.imag)] for value in record.z],
                "zero_count": record.zero_count,
            }
            for record in records
        ],
    }
    stream.write(json.dumps(document, indent=2))
    stream.write("\n")


def read_json(stream: IO[str]) -> Tuple[SampleMeta, List[TrialRecord]]:
    """Read a document written by ``write_json``; trial indices follow document order.

    Raises:
        DataError: If the document is not valid JSON or does not match the layout
    """
    try:
        raw = json.load(stream)
    except json.JSONDecodeError as e:
        raise DataError(f"invalid JSON ({e.msg})", e.lineno) from e
    try:
        document = _SampleDocument.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"])
        raise DataError(f"{location}: {error['msg']}") from e
    records = [
        TrialRecord(trial=index, l=trial.l, z=[complex(re, im) for re, im in trial.z], zero_count=trial.zero_count)
        for index, trial in enumerate(document.trials)
    ]
    return document.meta, records
