import csv
import os
from typing import List, Sequence, Tuple

import numpy as np

from config import PLOT_BINS, PLOT_GRID_POINTS
from distributions.core import FamilySpec, pdf
from ingest.sample import Sample
from utils.errors import DomainError
from utils.numeric_utils import empirical_quantile

GRID_LEVEL = 0.999


def histogram(sample: Sample, bins: int = PLOT_BINS) -> Tuple[np.ndarray, np.ndarray]:
    """Density-normalized histogram over [0, max]; returns (edges, densities)."""
    if bins < 2:
        raise DomainError(f"bins must be >= 2, got {bins}")
    x = sample.sorted_values
    densities, edges = np.histogram(x, bins=bins, range=(0.0, float(x[-1])), density=True)
    return edges, densities


def density_grid(sample: Sample, points: int = PLOT_GRID_POINTS, rule: str = "type7") -> np.ndarray:
    """``points`` equal steps over (0, q_0.999]; x = 0 itself is excluded."""
    top = empirical_quantile(sample.sorted_values, GRID_LEVEL, rule)
    return np.linspace(0.0, top, points + 1)[1:]


def write_histogram(sample: Sample, output_dir: str, bins: int = PLOT_BINS) -> str:
    edges, densities = histogram(sample, bins)
    os.makedirs(output_dir, exist_ok=True)
    filepath = os.path.join(output_dir, "histogram.csv")
    with open(filepath, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["left", "right", "density"])
        for left, right, d in zip(edges[:-1], edges[1:], densities):
            writer.writerow([float(left), float(right), float(d)])
    return filepath


def write_density_grid(sample: Sample, specs: Sequence[FamilySpec], output_dir: str,
                       points: int = PLOT_GRID_POINTS, rule: str = "type7") -> str:
    grid = density_grid(sample, points, rule)
    columns: List[np.ndarray] = [np.atleast_1d(pdf(spec, grid)) for spec in specs]
    os.makedirs(output_dir, exist_ok=True)
    filepath = os.path.join(output_dir, "density_grid.csv")
    with open(filepath, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["x"] + [spec.family.value for spec in specs])
        for i, x in enumerate(grid):
            writer.writerow([float(x)] + [float(col[i]) for col in columns])
    return filepath
