"""Public distribution operations dispatched through the family registry."""

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from distributions.families import FAMILIES, Family, FamilyDef, Params, get_family, validate_params
from utils.errors import DivergenceError, DomainError, NumericalOverflowError, WindFitError

log = logging.getLogger(__name__)

REDUCTION_TOL = 1e-12
MOMENT_RTOL = 1e-9
MOMENT_ACCEPT_RTOL = 1e-8
MOMENT_CUT_LEVELS = np.array([
    1e-12, 1e-8, 1e-5, 1e-3, 0.05, 0.25, 0.5, 0.75, 0.95, 1 - 1e-3, 1 - 1e-5, 1 - 1e-8, 1 - 1e-12,
])
_MOMENT_X_FLOOR = 1e-280
_MOMENT_T_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    params: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        fam = self.family if isinstance(self.family, Family) else Family.parse(str(self.family))
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", validate_params(fam, self.params))

    @property
    def definition(self) -> FamilyDef:
        return FAMILIES[self.family]

    @property
    def p(self) -> int:
        return len(self.params)

    def as_dict(self):
        return dict(zip(self.definition.param_names, self.params))

    def __str__(self) -> str:
        body = ", ".join(f"{v:.6g}" for v in self.params)
        return f"{self.family.value}({body})"


def make_spec(family, params: Sequence[float]) -> FamilySpec:
    return FamilySpec(get_family(family).family, tuple(params))


def _unwrap(out: np.ndarray, like):
    return float(np.asarray(out).reshape(())) if np.ndim(like) == 0 else np.asarray(out).reshape(np.shape(like))


def _positive_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise DomainError(f"density is defined for x > 0 only, got {x!r}")
    return arr


def _nonnegative_x(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"distribution function argument must be >= 0, got {x!r}")
    return arr


def log_pdf(spec: FamilySpec, x):
    """ln f(x) for x > 0. -inf is a legal value (zero density)."""
    arr = _positive_x(x)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.asarray(spec.definition.log_pdf(spec.params, np.atleast_1d(arr)), dtype=float)
    if np.any(np.isnan(out)) or np.any(out == np.inf):
        raise NumericalOverflowError(f"log density of {spec} is not finite at some of x={x!r}")
    return _unwrap(out, x)


def pdf(spec: FamilySpec, x):
    return _unwrap(np.exp(np.atleast_1d(log_pdf(spec, x))), x)


def cdf(spec: FamilySpec, x):
    arr = np.atleast_1d(_nonnegative_x(x))
    out = np.asarray(spec.definition.cdf(spec.params, arr), dtype=float)
    out = np.where(arr == 0, 0.0, np.clip(out, 0.0, 1.0))
    return _unwrap(out, x)


def sf(spec: FamilySpec, x):
    """1 - F(x), evaluated on the upper tail directly."""
    arr = np.atleast_1d(_nonnegative_x(x))
    out = np.asarray(spec.definition.sf(spec.params, arr), dtype=float)
    out = np.where(arr == 0, 1.0, np.clip(out, 0.0, 1.0))
    return _unwrap(out, x)


def quantile(spec: FamilySpec, p):
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0) or np.any(arr >= 1):
        raise DomainError(f"quantile level must lie in (0, 1), got {p!r}")
    out = spec.definition.quantile(spec.params, np.atleast_1d(arr))
    return _unwrap(out, p)


def _moment_cuts(spec: FamilySpec) -> List[float]:
    """Quantiles at MOMENT_CUT_LEVELS that are representable and increasing."""
    try:
        qs = list(np.atleast_1d(quantile(spec, MOMENT_CUT_LEVELS)))
    except WindFitError as exc:
        log.debug(f"{spec}: vector quantile failed ({exc}), cutting level by level")
        qs = []
        for p in MOMENT_CUT_LEVELS:
            try:
                qs.append(quantile(spec, float(p)))
            except WindFitError:
                continue
    cuts: List[float] = []
    for q in qs:
        q = float(q)
        if math.isfinite(q) and q > _MOMENT_X_FLOOR and (not cuts or q > cuts[-1]):
            cuts.append(q)
    if len(cuts) < 2:
        raise DivergenceError(f"no usable quantile cut points for the moments of {spec}")
    return cuts


def moment(spec: FamilySpec, s: int) -> float:
    """E[X^s] = ∫₀^∞ x^s f(x) dx by adaptive quadrature in t = ln x.

    The t axis is split at quantiles from 1e-12 to 1 - 1e-12 so every
    piece holds a known share of the mass whatever the scale or tail
    weight. For s = 0 (total probability) the mass outside the outer
    cuts is taken from cdf and sf; for s >= 1 the upper tail is
    integrated to infinity and the part below the first cut, at most
    x_lo^s F(x_lo), is dropped.
    """
    if s < 0 or int(s) != s:
        raise DomainError(f"moment order must be a nonnegative integer, got {s!r}")
    s = int(s)
    params = spec.params
    fn = spec.definition.log_pdf

    def integrand(t: float) -> float:
        if t > _MOMENT_T_MAX:
            return 0.0
        x = math.exp(t)
        if x <= 0.0:
            return 0.0
        with np.errstate(all="ignore"):
            lp = float(np.asarray(fn(params, np.array([x])))[0])
        if not math.isfinite(lp):
            return 0.0
        value = lp + (s + 1) * t
        return math.exp(value) if value < _MOMENT_T_MAX else math.inf

    cuts = _moment_cuts(spec)
    ts = [math.log(c) for c in cuts]
    pieces = list(zip(ts[:-1], ts[1:]))
    if s > 0:
        pieces.append((ts[-1], math.inf))

    total, error = 0.0, 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        for left, right in pieces:
            value, err = quad(integrand, left, right, epsabs=0.0, epsrel=MOMENT_RTOL, limit=100)
            total += value
            error += err
    if s == 0:
        total += float(cdf(spec, cuts[0])) + float(sf(spec, cuts[-1]))

    if not (math.isfinite(total) and math.isfinite(error)) or error > MOMENT_ACCEPT_RTOL * abs(total):
        detail = "; ".join(str(w.message).splitlines()[0] for w in caught)
        raise DivergenceError(
            f"moment {s} of {spec} did not converge (error estimate {error:.3g})"
            + (f": {detail}" if detail else "")
        )
    return total


# ──────────────────── Submodel reductions ────────────────────

def _is_one(v: float) -> bool:
    return abs(v - 1.0) <= REDUCTION_TOL


@dataclass
class Reduction:
    target: Family
    condition: Callable[[Params], bool]
    mapper: Callable[[Params], Params]
    description: str = ""


# Rules are tried in order; the first one that holds wins.
REDUCTIONS: Dict[Family, List[Reduction]] = {
    Family.BGL: [
        Reduction(Family.L, lambda t: _is_one(t[0]) and _is_one(t[2]) and _is_one(t[3]),
                  lambda t: (t[1],), "α = a = b = 1"),
        Reduction(Family.BL, lambda t: _is_one(t[0]), lambda t: (t[1], t[2], t[3]), "α = 1"),
        Reduction(Family.GL, lambda t: _is_one(t[2]) and _is_one(t[3]), lambda t: (t[0], t[1]), "a = b = 1"),
    ],
    Family.BL: [
        Reduction(Family.L, lambda t: _is_one(t[1]) and _is_one(t[2]), lambda t: (t[0],), "a = b = 1"),
    ],
    Family.GL: [
        Reduction(Family.L, lambda t: _is_one(t[0]), lambda t: (t[1],), "α = 1"),
    ],
    Family.BW: [
        Reduction(Family.W, lambda t: _is_one(t[2]) and _is_one(t[3]), lambda t: (t[0], t[1]), "a = b = 1"),
        Reduction(Family.BE, lambda t: _is_one(t[0]), lambda t: (t[1], t[2], t[3]), "α = 1"),
    ],
}


def reduce_to_submodel(spec: FamilySpec) -> Optional[FamilySpec]:
    """Return the equivalent lower-parameter spec, or None if no rule holds."""
    for rule in REDUCTIONS.get(spec.family, []):
        if rule.condition(spec.params):
            child = FamilySpec(rule.target, rule.mapper(spec.params))
            log.debug(f"{spec} reduces to {child} ({rule.description})")
            return child
    return None

