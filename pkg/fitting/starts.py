"""Starting points for the multi-start MLE search.

Three sources, in this order: moment-style seeds with closed forms,
warm seeds built from already-fitted submodels, and seeded log-uniform
random draws that fill the remaining slots.
"""

import math
from typing import Dict, List, Mapping, Tuple

import numpy as np

from config import PARAM_MAX, PARAM_MIN
from distributions.families import FAMILIES, FAMILY_ORDER, Family
from specfun import log_gamma

Params = Tuple[float, ...]

SHAPE_RANGE = (0.05, 100.0)
RATE_RANGE = (0.05, 10.0)
RIDGE_FACTORS = (10.0, 30.0)

# Direct submodels whose optima seed the parent
NESTING: Dict[Family, List[Family]] = {
    Family.BGL: [Family.GL, Family.BL],
    Family.GL: [Family.L],
    Family.BL: [Family.L],
    Family.BW: [Family.W, Family.BE],
}


def _clip(params) -> Params:
    return tuple(float(min(max(v, PARAM_MIN), PARAM_MAX)) for v in params)


def _moments(values: np.ndarray) -> Tuple[float, float]:
    m = float(np.mean(values))
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    # Degenerate samples still need a usable seed
    return m, max(sd, 1e-3 * m)


def lindley_rate_seed(mean: float) -> float:
    """λ solving the Lindley mean (λ+2)/(λ(λ+1)) = m."""
    m = mean
    return (-(m - 1.0) + math.sqrt((m - 1.0) ** 2 + 8.0 * m)) / (2.0 * m)


def weibull_seed(mean: float, sd: float) -> Params:
    alpha = (sd / mean) ** -1.086
    lam = math.exp(log_gamma(1.0 + 1.0 / alpha)) / mean
    return alpha, lam


def moment_seeds(family: Family, values: np.ndarray) -> List[Params]:
    m, sd = _moments(values)
    lam_l = lindley_rate_seed(m)
    if family == Family.L:
        seeds = [(lam_l,)]
    elif family == Family.GL:
        seeds = [(1.0, lam_l)]
    elif family == Family.BL:
        seeds = [(lam_l, 1.0, 1.0)]
    elif family == Family.BGL:
        seeds = [(1.0, lam_l, 1.0, 1.0)]
    elif family == Family.GAM:
        seeds = [((m / sd) ** 2, m / (sd * sd))]
    elif family == Family.W:
        seeds = [weibull_seed(m, sd)]
    elif family == Family.BW:
        seeds = [weibull_seed(m, sd) + (1.0, 1.0)]
    elif family == Family.BE:
        seeds = [(1.0 / m, 1.0, 1.0)]
    else:
        logs = np.log(values)
        log_sd = float(np.std(logs, ddof=1)) if values.size > 1 else 0.0
        return [(float(np.mean(logs)), max(log_sd, 1e-3))]
    return [_clip(s) for s in seeds]


def warm_seeds(family: Family, fitted: Mapping[Family, Params]) -> List[Params]:
    """Parent-space images of fitted submodel optima."""
    seeds: List[Params] = []
    for child in NESTING.get(family, []):
        params = fitted.get(child)
        if params is None:
            continue
        if family == Family.BGL and child == Family.GL:
            alpha, lam = params
            seeds.append((alpha, lam, 1.0, 1.0))
            # The likelihood is nearly flat along fixed aα; move weight from a to α
            for k in RIDGE_FACTORS:
                seeds.append((alpha * k, lam, 1.0 / k, 1.0))
        elif family == Family.BGL and child == Family.BL:
            seeds.append((1.0,) + tuple(params))
        elif family == Family.GL:
            seeds.append((1.0, params[0]))
        elif family == Family.BL:
            seeds.append((params[0], 1.0, 1.0))
        elif family == Family.BW and child == Family.W:
            seeds.append(tuple(params) + (1.0, 1.0))
        elif family == Family.BW and child == Family.BE:
            seeds.append((1.0,) + tuple(params))
    return [_clip(s) for s in seeds]


def random_seeds(family: Family, count: int, seed: int, values: np.ndarray) -> List[Params]:
    """Log-uniform draws; shapes in SHAPE_RANGE, rates in RATE_RANGE.

    Draws are generated one start at a time from a stream keyed by
    (seed, family), so asking for more starts only appends points.
    """
    if count <= 0:
        return []
    fam = FAMILIES[family]
    rng = np.random.default_rng([seed, FAMILY_ORDER.index(family)])
    logs = np.log(values)
    log_mean = float(np.mean(logs))
    seeds = []
    for _ in range(count):
        point = []
        for i, name in enumerate(fam.param_names):
            if i == fam.real_param:
                point.append(float(rng.uniform(log_mean - 2.0, log_mean + 2.0)))
                continue
            lo, hi = RATE_RANGE if name == "lambda" else SHAPE_RANGE
            point.append(float(math.exp(rng.uniform(math.log(lo), math.log(hi)))))
        seeds.append(tuple(point))
    return seeds


def build_starts(family: Family, values: np.ndarray, n_starts: int, seed: int,
                 fitted: Mapping[Family, Params]) -> List[Params]:
    """All deterministic seeds, then random ones up to ``n_starts`` in total."""
    starts: List[Params] = []
    for point in moment_seeds(family, values) + warm_seeds(family, fitted):
        if point not in starts:
            starts.append(point)
    starts.extend(random_seeds(family, n_starts - len(starts), seed, values))
    return starts
