import math
from dataclasses import asdict, dataclass
from typing import Dict, Union

import numpy as np

from ingest.sample import Sample
from utils.errors import DegenerateSampleError, DomainError
from utils.numeric_utils import compensated_sum, empirical_quantile


@dataclass
class Descriptives:
    n: int
    min: float
    max: float
    median: float
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    p95: float
    p99: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def describe(sample: Union[Sample, np.ndarray], rule: str = "type7") -> Descriptives:
    """Summary statistics of a wind-speed sample.

    Variance uses 1/(n-1); skewness m3/m2^1.5 and kurtosis m4/m2^2 use
    1/n central moments.
    """
    x = sample.sorted_values if isinstance(sample, Sample) else np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n < 2:
        raise DomainError(f"describe needs at least 2 values, got {n}")
    mean = compensated_sum(x) / n
    dev = x - mean
    ss = compensated_sum(dev * dev)
    if ss == 0:
        raise DegenerateSampleError("sample variance is zero; skewness and kurtosis are undefined")
    m2 = ss / n
    m3 = compensated_sum(dev ** 3) / n
    m4 = compensated_sum(dev ** 4) / n
    return Descriptives(
        n=n,
        min=float(x[0]),
        max=float(x[-1]),
        median=float(np.median(x)),
        mean=mean,
        variance=ss / (n - 1),
        skewness=m3 / math.pow(m2, 1.5),
        kurtosis=m4 / (m2 * m2),
        p95=empirical_quantile(x, 0.95, rule),
        p99=empirical_quantile(x, 0.99, rule),
    )
