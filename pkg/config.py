# config.py: tunable parameters for ingest, fitting and reports

import logging
import os
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv

load_dotenv()

log = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, default))


# === Tower data (public M2 hourly export) ===
SENTINEL = -99999.0
HEIGHTS = (10, 20, 50, 80)
DELIMITER = ","
TIMESTAMP_COLUMNS = ("DATE (MM/DD/YYYY)", "MST")
TIMESTAMP_FORMAT = "%m/%d/%Y %H:%M"
SPEED_COLUMNS: Dict[int, str] = {
    h: f"Avg Wind Speed @ {h}m [m/s]" for h in HEIGHTS
}
DEFAULT_YEARS = (2010, 2020)

# === Parameter domain ===
PARAM_MIN = 1e-8
PARAM_MAX = 1e8

# === Fitting (env overrides: WINDFIT_MAX_ITERATIONS, ...) ===
FIT_MAX_ITERATIONS = _env_int("WINDFIT_MAX_ITERATIONS", 2000)
FIT_GRADIENT_TOLERANCE = _env_float("WINDFIT_GRADIENT_TOLERANCE", 1e-7)
FIT_N_STARTS = _env_int("WINDFIT_N_STARTS", 12)
FIT_SEED = _env_int("WINDFIT_SEED", 20240101)
FIT_OPTIMIZER = os.getenv("WINDFIT_OPTIMIZER", "hybrid")  # "simplex" | "quasi_newton" | "hybrid"
FIT_WORKERS = _env_int("WINDFIT_WORKERS", 1)

# === Goodness of fit ===
AD_CLAMP_LOW = 1e-300
AD_CLAMP_HIGH = 1.0 - 1e-16
PERCENTILE_RULE = os.getenv("WINDFIT_PERCENTILE_RULE", "type7")  # "type7" | "step"
PERCENTILE_LEVELS = (0.95, 0.99)

# === Output ===
OUTPUT_DIR = os.getenv("WINDFIT_OUTPUT_DIR", "outputs")
PLOT_GRID_POINTS = 512
PLOT_BINS = 60
FAST_SUBSAMPLE_SIZE = 10000

# Keys accepted in a --config key=value file
CONFIG_KEYS = (
    "delimiter",
    "timestamp_columns",
    "timestamp_format",
    "sentinel",
    "max_iterations",
    "gradient_tolerance",
    "n_starts",
    "optimizer",
    "workers",
    "percentile_rule",
)


def load_config_file(path: Optional[str]) -> Dict[str, str]:
    """Read a key=value run config; unknown keys are logged and dropped."""
    if not path:
        return {}
    if not os.path.isfile(path):
        raise FileNotFoundError(f"config file not found: {path}")
    raw = dotenv_values(path)
    accepted: Dict[str, str] = {}
    for key, value in raw.items():
        key = key.strip().lower()
        if value is None:
            continue
        if key in CONFIG_KEYS or key.startswith("speed_column_"):
            accepted[key] = value
        else:
            log.warning(f"Ignoring unknown config key '{key}' in {path}")
    return accepted
