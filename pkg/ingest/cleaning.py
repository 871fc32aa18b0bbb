"""Record-level cleaning: year filter, duplicate timestamps, invalid speeds."""

import logging
import re
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

import config
from ingest.parser import CleaningLog, RawRecord
from ingest.sample import Sample
from utils.errors import DomainError, EmptyResultError

log = logging.getLogger(__name__)

YearRange = Tuple[int, int]

_YEARS_RE = re.compile(r"^\s*(\d{4})\s*(?:[-:]\s*(\d{4})\s*)?$")


def parse_years(text: str) -> YearRange:
    """'2010-2020' -> (2010, 2020); '2015' -> (2015, 2015)."""
    match = _YEARS_RE.match(str(text))
    if not match:
        raise DomainError(f"year range must look like 2015 or 2010-2020, got {text!r}")
    first = int(match.group(1))
    last = int(match.group(2) or first)
    if last < first:
        raise DomainError(f"year range is reversed: {text!r}")
    return first, last


def _frame(records: List[RawRecord], height_m: int) -> pd.DataFrame:
    return pd.DataFrame({
        "timestamp": pd.Series([r.timestamp for r in records], dtype="datetime64[ns]"),
        "speed": pd.Series([r.speeds_by_height.get(height_m) for r in records], dtype=float),
    })


def clean_records(
    records: List[RawRecord],
    height_m: int,
    years: YearRange,
    sentinel: float = config.SENTINEL,
) -> Tuple[List[RawRecord], CleaningLog]:
    """Apply the cleaning rules at one height; returns kept records and the log.

    Duplicate timestamps keep the first occurrence with a usable speed;
    when no occurrence is usable, all of them are dropped as duplicates.
    Running it again on its own output removes nothing.
    """
    clean_log = CleaningLog(rows_read=len(records))
    first, last = years
    frame = _frame(records, height_m)

    in_range = frame["timestamp"].dt.year.between(first, last)
    clean_log.out_of_range_rows = int((~in_range).sum())
    frame = frame[in_range]

    speed = frame["speed"]
    usable = speed.notna() & (speed != sentinel)
    repeated = frame["timestamp"].duplicated(keep=False)
    # One survivor per repeated timestamp: its first usable row, if any
    survivor = ~frame[repeated & usable]["timestamp"].duplicated(keep="first")
    keep = ~repeated
    keep.loc[survivor[survivor].index] = True
    clean_log.duplicates_removed = int(repeated.sum() - survivor.sum())
    if clean_log.duplicates_removed:
        log.info(f"Removed {clean_log.duplicates_removed} duplicate-timestamp rows at {height_m} m")
    frame = frame[keep]

    speed = frame["speed"]
    missing = speed.isna()
    flagged = speed == sentinel
    nonpositive = ~missing & ~flagged & ~(speed > 0)
    clean_log.missing_rows_removed = int(missing.sum())
    clean_log.sentinel_rows_removed = int(flagged.sum())
    clean_log.nonpositive_rows_removed = int(nonpositive.sum())

    kept = [records[i] for i in frame.index[~(missing | flagged | nonpositive).to_numpy()]]
    clean_log.rows_kept = len(kept)
    return kept, clean_log


def clean(
    records: List[RawRecord],
    height_m: int,
    years: YearRange,
    sentinel: float = config.SENTINEL,
    parse_log: Optional[CleaningLog] = None,
    source: str = "",
) -> Tuple[Sample, CleaningLog]:
    """Clean parsed records into a Sample for one height and year range.

    When ``parse_log`` is given its row count and malformed rows are
    folded in, so the returned log reconciles against the raw file.
    """
    kept, clean_log = clean_records(records, height_m, years, sentinel)
    if parse_log is not None:
        clean_log.rows_read = parse_log.rows_read
        clean_log.malformed_rows = parse_log.malformed_rows
        clean_log.malformed_lines = list(parse_log.malformed_lines)
    if not kept:
        raise EmptyResultError(f"no rows left at {height_m} m for years {years[0]}-{years[1]}")
    # Chronological order, stable for equal keys
    kept.sort(key=lambda r: r.timestamp)
    values = np.array([r.speeds_by_height[height_m] for r in kept], dtype=float)
    log.info(
        f"Cleaned {height_m} m {years[0]}-{years[1]}: kept {clean_log.rows_kept} of {clean_log.rows_read} "
        f"(dup {clean_log.duplicates_removed}, sentinel {clean_log.sentinel_rows_removed}, "
        f"out of range {clean_log.out_of_range_rows})"
    )
    return Sample(values, height_m, years, source), clean_log
