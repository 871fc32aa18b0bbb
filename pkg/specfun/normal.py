import math

import numpy as np

from utils.errors import DomainError

_SQRT_HALF = math.sqrt(0.5)
_erfc = np.frompyfunc(math.erfc, 1, 1)


def _check(z) -> np.ndarray:
    arr = np.asarray(z, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError(f"normal CDF argument must not be NaN, got {z!r}")
    return arr


def _half_erfc(arr: np.ndarray):
    # frompyfunc hands back a bare Python float for 0-d input
    out = 0.5 * np.asarray(_erfc(arr), dtype=float)
    return float(out) if np.ndim(arr) == 0 else out


def std_normal_cdf(z):
    """Φ(z) = erfc(-z/√2)/2; erfc keeps both tails at full relative precision."""
    return _half_erfc(-_check(z) * _SQRT_HALF)


def std_normal_sf(z):
    """1 - Φ(z) = Φ(-z)."""
    return _half_erfc(_check(z) * _SQRT_HALF)
