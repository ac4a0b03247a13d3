"""Maximal gaps between prime k-tuplets."""

import os
from pathlib import Path

from ._core import (
    CheckpointError,
    Error,
    GapForecast,
    GapRecord,
    HLConstant,
    InputError,
    Pattern,
    PreconditionError,
    ReferenceTable,
    VerificationReport,
    builtin_patterns,
    check_bound,
    expected_max_gap,
    find_maximal_gaps,
    hl_constant,
    is_admissible,
    is_prime,
    parse_pattern,
    primes,
    residue_count,
    tuple_starts,
    verify_against_reference,
)
from ._core import reference_table as _reference_table

__all__ = [
    "CheckpointError",
    "Error",
    "GapForecast",
    "GapRecord",
    "HLConstant",
    "InputError",
    "Pattern",
    "PreconditionError",
    "ReferenceTable",
    "VerificationReport",
    "builtin_patterns",
    "check_bound",
    "data_dir",
    "expected_max_gap",
    "find_maximal_gaps",
    "hl_constant",
    "is_admissible",
    "is_prime",
    "parse_pattern",
    "primes",
    "reference_table",
    "residue_count",
    "tuple_starts",
    "verify",
    "verify_against_reference",
]


def data_dir() -> Path:
    """$KTGAPS_DATA_DIR, else the tables shipped inside the package."""
    env = os.environ.get("KTGAPS_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def reference_table(pattern_id: str, data_dir_path=None) -> ReferenceTable:
    return _reference_table(pattern_id, Path(data_dir_path) if data_dir_path else data_dir())


def verify(pattern, limit: int, workers: int = 0) -> VerificationReport:
    """Scan `pattern` to `limit` and compare with its reference table."""
    if isinstance(pattern, str):
        pattern = parse_pattern(pattern)
    records = find_maximal_gaps(pattern, limit, workers=workers)
    return verify_against_reference(records, reference_table(pattern.id), limit)
