"""Family definitions for the nine wind-speed distributions.

Each family is a FamilyDef holding its parameter names and four
vectorized callables over (params, x) or (params, p). Parameters are
ordered (α, λ, a, b) restricted to the family's subset; λ is always a
rate. All callables assume validated parameters and x > 0 (log_pdf)
or x >= 0 (cdf, sf).
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from config import PARAM_MAX, PARAM_MIN
from distributions.lindley import LindleyCore
from specfun import (
    log_beta,
    log_gamma,
    reg_inc_beta,
    reg_inc_beta_c,
    reg_inc_beta_inv,
    reg_inc_gamma_lower,
    reg_inc_gamma_upper,
    std_normal_cdf,
    std_normal_sf,
)
from utils.errors import DomainError
from utils.numeric_utils import log1mexp
from utils.rootfinding import bracket_upper, solve_increasing

Params = Tuple[float, ...]
DensityFn = Callable[[Params, np.ndarray], np.ndarray]


class Family(str, Enum):
    BGL = "BGL"
    BL = "BL"
    GL = "GL"
    L = "L"
    GAM = "GAM"
    BW = "BW"
    W = "W"
    BE = "BE"
    LOGN = "LogN"

    @classmethod
    def parse(cls, name: str) -> "Family":
        for fam in cls:
            if fam.value.lower() == name.strip().lower():
                return fam
        raise DomainError(f"unknown family {name!r} (expected one of {', '.join(f.value for f in cls)})")


@dataclass
class FamilyDef:
    family: Family
    description: str
    param_names: Tuple[str, ...]
    log_pdf: DensityFn
    cdf: DensityFn
    sf: DensityFn
    quantile: DensityFn
    # Index of a parameter allowed to be any finite real, -1 if none
    real_param: int = -1

    @property
    def p(self) -> int:
        return len(self.param_names)


# ──────────────────── Helpers ────────────────────

def _beta_parts(p: np.ndarray, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Return (ln t, ln(1 - t)) for t = I⁻¹(p; a, b), each without cancellation."""
    t, y = reg_inc_beta_inv(p, a, b, return_complement=True)
    t = np.atleast_1d(t)
    y = np.atleast_1d(y)
    with np.errstate(divide="ignore"):
        log_t = np.where(t <= 0.5, np.log(t), np.log1p(-y))
        log_y = np.where(y <= 0.5, np.log(y), np.log1p(-t))
    return log_t, log_y


def _lindley_hint(lam: float, alpha: float = 1.0) -> float:
    core = LindleyCore(lam)
    return max(alpha, 1.0) * (core.mean + 20.0 * core.std)


# ──────────────────── Lindley hierarchy ────────────────────

def _bgl_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    core = LindleyCore(lam)
    lu = core.log_u(x)
    lv = core.log_v(x, lu)
    with np.errstate(invalid="ignore"):
        tail = (b - 1.0) * core.log1m_v_pow(x, alpha, lu) if b != 1.0 else 0.0
    return (
        math.log(alpha) - log_beta(a, b) + core.log_dv_dx(x)
        + (a * alpha - 1.0) * lv + tail
    )


def _bgl_parts(params: Params, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(V^α, 1 - V^α) at x."""
    alpha, lam = params[0], params[1]
    core = LindleyCore(lam)
    s = alpha * core.log_v(x)
    with np.errstate(divide="ignore"):
        return np.exp(s), np.exp(core.log1m_v_pow(x, alpha))


def _bgl_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    g, gc = _bgl_parts(params, x)
    return reg_inc_beta(g, params[2], params[3], one_minus_x=gc)


def _bgl_sf(params: Params, x: np.ndarray) -> np.ndarray:
    g, gc = _bgl_parts(params, x)
    return reg_inc_beta_c(g, params[2], params[3], one_minus_x=gc)


def _bgl_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    log_t, _ = _beta_parts(p, a, b)
    log_v = log_t / alpha
    with np.errstate(divide="ignore"):
        log_u = log1mexp(log_v)
    return LindleyCore(lam).invert(log_v, log_u, _lindley_hint(lam, alpha))


def _bl_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    lam, a, b = params
    core = LindleyCore(lam)
    lu = core.log_u(x)
    return -log_beta(a, b) + core.log_dv_dx(x) + (a - 1.0) * core.log_v(x, lu) + (b - 1.0) * lu


def _bl_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    core = LindleyCore(params[0])
    lu = core.log_u(x)
    return reg_inc_beta(-np.expm1(lu), params[1], params[2], one_minus_x=np.exp(lu))


def _bl_sf(params: Params, x: np.ndarray) -> np.ndarray:
    core = LindleyCore(params[0])
    lu = core.log_u(x)
    return reg_inc_beta_c(-np.expm1(lu), params[1], params[2], one_minus_x=np.exp(lu))


def _bl_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    lam, a, b = params
    log_t, log_y = _beta_parts(p, a, b)
    return LindleyCore(lam).invert(log_t, log_y, _lindley_hint(lam))


def _gl_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam = params
    core = LindleyCore(lam)
    return math.log(alpha) + core.log_dv_dx(x) + (alpha - 1.0) * core.log_v(x)


def _gl_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam = params
    with np.errstate(divide="ignore"):
        return np.exp(alpha * LindleyCore(lam).log_v(x))


def _gl_sf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam = params
    with np.errstate(divide="ignore"):
        return np.exp(LindleyCore(lam).log1m_v_pow(x, alpha))


def _gl_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    alpha, lam = params
    log_v = np.log(p) / alpha
    with np.errstate(divide="ignore"):
        log_u = np.where(alpha == 1.0, np.log1p(-p), log1mexp(log_v))
    return LindleyCore(lam).invert(log_v, log_u, _lindley_hint(lam, alpha))


def _l_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    return LindleyCore(params[0]).log_dv_dx(x)


def _l_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    return LindleyCore(params[0]).v(x)


def _l_sf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.exp(LindleyCore(params[0]).log_u(x))


def _l_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    lam = params[0]
    return LindleyCore(lam).invert(np.log(p), np.log1p(-p), _lindley_hint(lam))


# ──────────────────── Gamma ────────────────────

def _gam_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam = params
    return alpha * math.log(lam) + (alpha - 1.0) * np.log(x) - lam * x - log_gamma(alpha)


def _gam_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.asarray(reg_inc_gamma_lower(params[0], params[1] * np.asarray(x)))


def _gam_sf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.asarray(reg_inc_gamma_upper(params[0], params[1] * np.asarray(x)))


def _gam_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    alpha, lam = params
    p = np.atleast_1d(p)
    log_norm = log_gamma(alpha)
    lower = p <= 0.5
    # Lower half solves P(α, e^z) = p, upper half 1 - p = Q(α, e^z)
    targets = np.where(lower, p, 1.0 - p)

    def func(z, idx):
        y = np.exp(z)
        lo_half = lower[idx]
        tail = np.where(
            lo_half,
            np.asarray(reg_inc_gamma_lower(alpha, y)) - targets[idx],
            targets[idx] - np.asarray(reg_inc_gamma_upper(alpha, y)),
        )
        dens = np.exp(alpha * z - y - log_norm)
        return tail, dens

    lo = np.full(p.shape, math.log(1e-300))
    out = np.full(p.shape, 1e-300)
    g_lo, _ = func(lo, np.arange(p.size))
    idx = np.flatnonzero(g_lo < 0)
    if idx.size:
        def sub(z, j):
            return func(z, idx[j])

        start = math.log(alpha + 20.0 * math.sqrt(alpha) + 10.0)
        hi = bracket_upper(sub, np.full(idx.size, start), lambda z: z + math.log(2.0))
        out[idx] = np.exp(solve_increasing(sub, lo[idx], hi))
    return out / lam


# ──────────────────── Weibull hierarchy ────────────────────

def _weibull_w(alpha: float, lam: float, x: np.ndarray) -> np.ndarray:
    return (lam * np.asarray(x, dtype=float)) ** alpha


def _bw_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    w = _weibull_w(alpha, lam, x)
    with np.errstate(divide="ignore"):
        log_g = log1mexp(-w)
    return (
        math.log(alpha) + alpha * math.log(lam) + (alpha - 1.0) * np.log(x)
        - b * w + (a - 1.0) * log_g - log_beta(a, b)
    )


def _bw_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    w = _weibull_w(alpha, lam, x)
    return reg_inc_beta(-np.expm1(-w), a, b, one_minus_x=np.exp(-w))


def _bw_sf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    w = _weibull_w(alpha, lam, x)
    return reg_inc_beta_c(-np.expm1(-w), a, b, one_minus_x=np.exp(-w))


def _bw_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    alpha, lam, a, b = params
    log_t, log_y = _beta_parts(p, a, b)
    # w = -ln(1 - t), taken from whichever of t and 1 - t is accurate
    with np.errstate(divide="ignore"):
        w = np.where(log_t < math.log(0.5), -np.log1p(-np.exp(log_t)), -log_y)
    return w ** (1.0 / alpha) / lam


def _be_params(params: Params) -> Params:
    lam, a, b = params
    return (1.0, lam, a, b)


def _w_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    alpha, lam = params
    return math.log(alpha) + alpha * math.log(lam) + (alpha - 1.0) * np.log(x) - _weibull_w(alpha, lam, x)


def _w_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    return -np.expm1(-_weibull_w(params[0], params[1], x))


def _w_sf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.exp(-_weibull_w(params[0], params[1], x))


def _w_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    alpha, lam = params
    return (-np.log1p(-np.asarray(p, dtype=float))) ** (1.0 / alpha) / lam


# ──────────────────── Log-normal ────────────────────

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lognormal_z(params: Params, x: np.ndarray) -> np.ndarray:
    mu, sigma = params
    with np.errstate(divide="ignore"):
        return (np.log(x) - mu) / sigma


def _logn_log_pdf(params: Params, x: np.ndarray) -> np.ndarray:
    z = _lognormal_z(params, x)
    return -np.log(x) - math.log(params[1]) - _HALF_LOG_2PI - 0.5 * z * z


def _logn_cdf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.asarray(std_normal_cdf(_lognormal_z(params, x)))


def _logn_sf(params: Params, x: np.ndarray) -> np.ndarray:
    return np.asarray(std_normal_sf(_lognormal_z(params, x)))


def _logn_quantile(params: Params, p: np.ndarray) -> np.ndarray:
    mu, sigma = params
    p = np.atleast_1d(p)
    upper = p > 0.5
    # Φ(-z) = 1 - Φ(z): solve in the lower half only, where 1 - p is exact
    targets = np.where(upper, 1.0 - p, p)

    def func(z, idx):
        return np.asarray(std_normal_cdf(z)) - targets[idx], np.exp(-0.5 * z * z - _HALF_LOG_2PI)

    lo = np.full(p.shape, -40.0)
    hi = np.zeros(p.shape)
    z = solve_increasing(func, lo, hi)
    return np.exp(mu + sigma * np.where(upper, -z, z))


# ──────────────────── Registry ────────────────────

FAMILY_ORDER: List[Family] = [
    Family.BGL, Family.BL, Family.GL, Family.L, Family.GAM,
    Family.BW, Family.W, Family.BE, Family.LOGN,
]

FAMILIES: Dict[Family, FamilyDef] = {
    Family.BGL: FamilyDef(
        family=Family.BGL,
        description="Beta-generalized Lindley: I_{V(x)^α}(a, b)",
        param_names=("alpha", "lambda", "a", "b"),
        log_pdf=_bgl_log_pdf,
        cdf=_bgl_cdf,
        sf=_bgl_sf,
        quantile=_bgl_quantile,
    ),
    Family.BL: FamilyDef(
        family=Family.BL,
        description="Beta-Lindley: I_{V(x)}(a, b)",
        param_names=("lambda", "a", "b"),
        log_pdf=_bl_log_pdf,
        cdf=_bl_cdf,
        sf=_bl_sf,
        quantile=_bl_quantile,
    ),
    Family.GL: FamilyDef(
        family=Family.GL,
        description="Generalized Lindley: V(x)^α",
        param_names=("alpha", "lambda"),
        log_pdf=_gl_log_pdf,
        cdf=_gl_cdf,
        sf=_gl_sf,
        quantile=_gl_quantile,
    ),
    Family.L: FamilyDef(
        family=Family.L,
        description="Lindley: V(x)",
        param_names=("lambda",),
        log_pdf=_l_log_pdf,
        cdf=_l_cdf,
        sf=_l_sf,
        quantile=_l_quantile,
    ),
    Family.GAM: FamilyDef(
        family=Family.GAM,
        description="Gamma with shape α and rate λ",
        param_names=("alpha", "lambda"),
        log_pdf=_gam_log_pdf,
        cdf=_gam_cdf,
        sf=_gam_sf,
        quantile=_gam_quantile,
    ),
    Family.BW: FamilyDef(
        family=Family.BW,
        description="Beta-Weibull: I_{1-exp(-(λx)^α)}(a, b)",
        param_names=("alpha", "lambda", "a", "b"),
        log_pdf=_bw_log_pdf,
        cdf=_bw_cdf,
        sf=_bw_sf,
        quantile=_bw_quantile,
    ),
    Family.W: FamilyDef(
        family=Family.W,
        description="Weibull with shape α and rate λ",
        param_names=("alpha", "lambda"),
        log_pdf=_w_log_pdf,
        cdf=_w_cdf,
        sf=_w_sf,
        quantile=_w_quantile,
    ),
    Family.BE: FamilyDef(
        family=Family.BE,
        description="Beta-exponential: I_{1-exp(-λx)}(a, b)",
        param_names=("lambda", "a", "b"),
        log_pdf=lambda params, x: _bw_log_pdf(_be_params(params), x),
        cdf=lambda params, x: _bw_cdf(_be_params(params), x),
        sf=lambda params, x: _bw_sf(_be_params(params), x),
        quantile=lambda params, p: _bw_quantile(_be_params(params), p),
    ),
    Family.LOGN: FamilyDef(
        family=Family.LOGN,
        description="Log-normal with log-mean α and log-sd λ",
        param_names=("alpha", "lambda"),
        log_pdf=_logn_log_pdf,
        cdf=_logn_cdf,
        sf=_logn_sf,
        quantile=_logn_quantile,
        real_param=0,
    ),
}


def get_family(family) -> FamilyDef:
    if not isinstance(family, Family):
        family = Family.parse(str(family))
    return FAMILIES[family]


def validate_params(family: Family, params: Sequence[float]) -> Params:
    """Check length and bounds; return the parameters as a float tuple."""
    fam = FAMILIES[family]
    values = tuple(float(v) for v in params)
    if len(values) != fam.p:
        raise DomainError(f"{family.value} takes {fam.p} parameters {fam.param_names}, got {len(values)}")
    for i, (name, v) in enumerate(zip(fam.param_names, values)):
        if not math.isfinite(v):
            raise DomainError(f"{family.value} parameter {name} must be finite, got {v}")
        if i == fam.real_param:
            continue
        if not PARAM_MIN <= v <= PARAM_MAX:
            raise DomainError(
                f"{family.value} parameter {name} must lie in [{PARAM_MIN:g}, {PARAM_MAX:g}], got {v}"
            )
    return values
