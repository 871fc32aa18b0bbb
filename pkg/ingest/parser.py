"""Parser for delimiter-separated tower exports."""

import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import pandas as pd

import config
from utils.errors import DomainError, IngestError, MappingError

log = logging.getLogger(__name__)


@dataclass
class ColumnMapping:
    delimiter: str = config.DELIMITER
    timestamp_columns: Tuple[str, ...] = config.TIMESTAMP_COLUMNS
    timestamp_format: str = config.TIMESTAMP_FORMAT
    speed_columns: Dict[int, str] = field(default_factory=lambda: dict(config.SPEED_COLUMNS))
    sentinel: float = config.SENTINEL

    @classmethod
    def from_config(cls, values: Mapping[str, str]) -> "ColumnMapping":
        """Build a mapping from key=value overrides (see config.CONFIG_KEYS)."""
        mapping = cls()
        if "delimiter" in values:
            delim = values["delimiter"]
            mapping.delimiter = "\t" if delim in ("\\t", "tab") else delim
        if "timestamp_columns" in values:
            mapping.timestamp_columns = tuple(c.strip() for c in values["timestamp_columns"].split("|") if c.strip())
        if "timestamp_format" in values:
            mapping.timestamp_format = values["timestamp_format"]
        if "sentinel" in values:
            mapping.sentinel = float(values["sentinel"])
        for key, value in values.items():
            if key.startswith("speed_column_"):
                try:
                    height = int(key[len("speed_column_"):])
                except ValueError as exc:
                    raise DomainError(f"bad height in config key {key!r}") from exc
                mapping.speed_columns[height] = value
        return mapping


@dataclass
class RawRecord:
    timestamp: datetime
    # None marks an empty cell; the sentinel passes through unchanged
    speeds_by_height: Dict[int, Optional[float]]
    line_number: int = 0


@dataclass
class CleaningLog:
    rows_read: int = 0
    malformed_rows: int = 0
    out_of_range_rows: int = 0
    duplicates_removed: int = 0
    sentinel_rows_removed: int = 0
    missing_rows_removed: int = 0
    nonpositive_rows_removed: int = 0
    rows_kept: int = 0
    malformed_lines: List[int] = field(default_factory=list)

    @property
    def removals(self) -> int:
        return (
            self.malformed_rows + self.out_of_range_rows + self.duplicates_removed
            + self.sentinel_rows_removed + self.missing_rows_removed + self.nonpositive_rows_removed
        )

    def reconciles(self) -> bool:
        return self.rows_kept + self.removals == self.rows_read


def _check_header(fieldnames: List[str], mapping: ColumnMapping,
                  heights: Iterable[int], path: str) -> None:
    present = set(fieldnames)
    needed = list(mapping.timestamp_columns)
    for h in heights:
        if h not in mapping.speed_columns:
            raise MappingError(f"no speed column configured for height {h} m")
        needed.append(mapping.speed_columns[h])
    missing = [c for c in needed if c not in present]
    if missing:
        raise MappingError(f"{path}: column(s) not in header: {', '.join(repr(c) for c in missing)}")


def _read_header(path: str, mapping: ColumnMapping) -> List[str]:
    try:
        head = pd.read_csv(path, sep=mapping.delimiter, nrows=0, encoding="utf-8-sig")
    except OSError as exc:
        raise IngestError(f"cannot open input: {exc.strerror}", path) from exc
    except pd.errors.EmptyDataError as exc:
        raise IngestError("file has no header row", path, 1) from exc
    return [str(c) for c in head.columns]


def _speed_column(text: pd.Series) -> Tuple[pd.Series, pd.Series]:
    """(values, unparseable) for one speed column; empty cells give NaN."""
    stripped = text.fillna("").str.strip()
    empty = stripped == ""
    values = pd.to_numeric(stripped.where(~empty), errors="coerce")
    return values, values.isna() & ~empty


def parse_csv(path: str, mapping: Optional[ColumnMapping] = None,
              heights: Optional[Iterable[int]] = None) -> Tuple[List[RawRecord], CleaningLog]:
    """Parse every data row into a RawRecord.

    Rows with an unparseable timestamp or speed, or a wrong field count,
    are skipped and their line numbers kept in the log.
    """
    mapping = mapping or ColumnMapping()
    heights = sorted(mapping.speed_columns) if heights is None else list(heights)
    columns = _read_header(path, mapping)
    _check_header(columns, mapping, heights, path)

    # Overlong rows are blanked in place so positions still map to file lines
    try:
        frame = pd.read_csv(
            path, sep=mapping.delimiter, dtype=str, keep_default_na=False, skip_blank_lines=False,
            encoding="utf-8-sig", engine="python", index_col=False,
            on_bad_lines=lambda fields: [""] * len(columns),
        )
    except pd.errors.ParserError as exc:
        raise IngestError(f"unreadable table: {exc}", path) from exc
    frame.index = pd.RangeIndex(2, len(frame) + 2, name="line")
    frame = frame[frame.notna().any(axis=1)]
    if frame.empty:
        log.info(f"No data rows in {path}")
        return [], CleaningLog()

    ts_cols = list(mapping.timestamp_columns)
    short = frame[ts_cols + [mapping.speed_columns[h] for h in heights]].isna().any(axis=1)
    stamp = frame[ts_cols].fillna("").apply(lambda col: col.str.strip()).agg(" ".join, axis=1)
    timestamps = pd.to_datetime(stamp, format=mapping.timestamp_format, errors="coerce")
    malformed = short | timestamps.isna()
    speeds = {}
    for h in heights:
        speeds[h], bad = _speed_column(frame[mapping.speed_columns[h]])
        malformed |= bad

    parse_log = CleaningLog(rows_read=len(frame))
    parse_log.malformed_lines = [int(n) for n in frame.index[malformed.to_numpy()]]
    parse_log.malformed_rows = len(parse_log.malformed_lines)
    for line_number in parse_log.malformed_lines:
        log.warning(f"{path}:{line_number}: skipping malformed row")

    good = ~malformed
    values = {h: speeds[h][good].to_numpy() for h in heights}
    records = [
        RawRecord(
            ts.to_pydatetime(),
            {h: (None if math.isnan(values[h][i]) else float(values[h][i])) for h in heights},
            int(line_number),
        )
        for i, (ts, line_number) in enumerate(zip(timestamps[good], frame.index[good.to_numpy()]))
    ]

    parse_log.rows_kept = len(records)
    log.info(f"Parsed {len(records)} rows from {path} ({parse_log.malformed_rows} malformed)")
    return records, parse_log
