"""Goodness-of-fit distances and tail diagnostics.

KS and AD are used as distances between the fitted model and the
sample; no p-values are computed.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from config import AD_CLAMP_HIGH, AD_CLAMP_LOW, PERCENTILE_RULE
from distributions.core import FamilySpec, cdf, quantile, sf
from fitting.likelihood import log_likelihood
from ingest.sample import Sample
from utils.errors import DomainError
from utils.numeric_utils import compensated_sum, empirical_quantile

log = logging.getLogger(__name__)

_SF_FLOOR = 1.0 - AD_CLAMP_HIGH


@dataclass
class GofReport:
    neg2_log_lik: float
    aic: float
    bic: float
    ks: float
    ad: float
    p: int
    n: int
    ad_clamped: int = 0
    ties: int = 0


@dataclass
class PercentileBias:
    level: float
    observed: float
    estimated: float
    bias: float


def _sorted(sample: Union[Sample, np.ndarray]) -> np.ndarray:
    if isinstance(sample, Sample):
        return sample.sorted_values
    arr = np.sort(np.asarray(sample, dtype=float).ravel(), kind="stable")
    if arr.size == 0:
        raise DomainError("goodness-of-fit metrics need a nonempty sample")
    return arr


def ks_statistic(spec: FamilySpec, sample) -> float:
    """sup |F_n - F| = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n)."""
    x = _sorted(sample)
    n = x.size
    f = np.atleast_1d(cdf(spec, x))
    i = np.arange(1, n + 1, dtype=float)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1.0) / n)
    return float(min(max(d_plus, d_minus, 0.0), 1.0))


def _ad_with_clamps(spec: FamilySpec, sample) -> Tuple[float, int]:
    x = _sorted(sample)
    n = x.size
    f = np.atleast_1d(cdf(spec, x))
    s = np.atleast_1d(sf(spec, x))
    low = f < AD_CLAMP_LOW
    high = s < _SF_FLOOR
    clamped = int(np.sum(low) + np.sum(high))
    log_f = np.log(np.maximum(f, AD_CLAMP_LOW))
    log_s = np.log(np.maximum(s, _SF_FLOOR))
    weights = 2.0 * np.arange(1, n + 1, dtype=float) - 1.0
    # ln(1 - F(x_(n+1-i))) is the reversed upper-tail vector
    total = compensated_sum(weights * (log_f + log_s[::-1]))
    if clamped:
        log.warning(f"AD for {spec}: {clamped} tail probabilities clamped (tail underflow)")
    return -n - total / n, clamped


def ad_statistic(spec: FamilySpec, sample) -> float:
    """Ordered-sample Anderson-Darling distance.

    AD = -n - (1/n) Σ (2i-1) [ln F(x_(i)) + ln(1 - F(x_(n+1-i)))]
    """
    return _ad_with_clamps(spec, sample)[0]


def information_criteria(neg2ll: float, p: int, n: int) -> Tuple[float, float]:
    if p < 1 or n < 1:
        raise DomainError(f"information criteria need p >= 1 and n >= 1, got p={p}, n={n}")
    aic = 2 * p + neg2ll
    bic = p * math.log(n) + neg2ll
    return aic, bic


def percentile_bias(spec: FamilySpec, sample, level: float,
                    rule: str = PERCENTILE_RULE) -> PercentileBias:
    """Fitted quantile minus empirical quantile at ``level``."""
    observed = empirical_quantile(_sorted(sample), level, rule)
    estimated = float(quantile(spec, level))
    return PercentileBias(level, observed, estimated, estimated - observed)


def evaluate(spec: FamilySpec, sample, neg2_log_lik: Optional[float] = None) -> GofReport:
    x = _sorted(sample)
    n = x.size
    neg2 = -2.0 * log_likelihood(spec, x) if neg2_log_lik is None else neg2_log_lik
    aic, bic = information_criteria(neg2, spec.p, n)
    ad, clamped = _ad_with_clamps(spec, x)
    ties = int(np.sum(np.diff(x) == 0))
    if ties:
        log.debug(f"{ties} tied values in sample of {n}")
    return GofReport(
        neg2_log_lik=neg2,
        aic=aic,
        bic=bic,
        ks=ks_statistic(spec, x),
        ad=ad,
        p=spec.p,
        n=n,
        ad_clamped=clamped,
        ties=ties,
    )
