"""Cleaned wind-speed sample and its one-value-per-line file layout."""

import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from utils.errors import DomainError, IngestError


@dataclass(frozen=True, eq=False)
class Sample:
    values: np.ndarray
    height_m: Optional[int] = None
    year_range: Optional[Tuple[int, int]] = None
    source: str = ""
    _sorted: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("sample must contain at least one value")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError("sample values must be finite and > 0")
        arr.setflags(write=False)
        ordered = np.sort(arr, kind="stable")
        ordered.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "_sorted", ordered)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def sorted_values(self) -> np.ndarray:
        return self._sorted

    def subsample(self, size: int, seed: int) -> "Sample":
        """Seeded draw without replacement, original order preserved."""
        if size >= self.n:
            return self
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(self.n, size=size, replace=False))
        return Sample(self.values[idx], self.height_m, self.year_range, f"{self.source} (subsample {size})")


def write_sample(sample: Sample, path: str) -> str:
    """Write one speed per line at full precision."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for v in sample.values.tolist():
            f.write(f"{v!r}\n")
    return path


def read_sample(path: str, height_m: Optional[int] = None,
                year_range: Optional[Tuple[int, int]] = None) -> Sample:
    values = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise IngestError(f"not a number: {text!r}", path, line_number) from exc
    if not values:
        raise IngestError("no values in sample file", path)
    try:
        return Sample(np.array(values), height_m, year_range, path)
    except DomainError as exc:
        raise IngestError(str(exc), path) from exc
