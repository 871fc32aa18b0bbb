import math
from typing import Iterable

import numpy as np

from utils.errors import DomainError

_LOG_HALF = -math.log(2.0)


def compensated_sum(values: Iterable[float]) -> float:
    """Sum with compensated (exactly rounded) accumulation.

    Likelihood sums run over ~1e5 terms; math.fsum keeps the result
    independent of summation order, so permuted samples give equal sums.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size and not np.all(np.isfinite(arr)):
        # fsum raises on inf - inf; mirror numpy semantics instead
        return float(np.sum(arr))
    return math.fsum(arr.tolist())


def log1mexp(s: np.ndarray) -> np.ndarray:
    """Return log(1 - exp(s)) for s <= 0 without cancellation.

    Uses log(-expm1(s)) near zero and log1p(-exp(s)) further out.
    For s > -1e-8 the leading series term log(-s) - s/2 is used directly.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    near = s > _LOG_HALF
    tiny = s > -1e-8
    mid = near & ~tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        out[~near] = np.log1p(-np.exp(s[~near]))
        out[mid] = np.log(-np.expm1(s[mid]))
        st = s[tiny]
        out[tiny] = np.log(-st) + st / 2.0
    return out


def empirical_quantile(values: np.ndarray, level: float, rule: str = "type7") -> float:
    """Empirical quantile of a sample.

    type7: linear interpolation between order statistics at plotting
           position (i-1)/(n-1).
    step:  the i/n empirical step rule, x_(ceil(n*level)).
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {level}")
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise DomainError("empirical quantile of an empty sample")
    if rule == "type7":
        return float(np.quantile(arr, level, method="linear"))
    if rule == "step":
        k = max(int(math.ceil(arr.size * level)), 1)
        return float(arr[k - 1])
    raise DomainError(f"unknown percentile rule {rule!r} (expected 'type7' or 'step')")
