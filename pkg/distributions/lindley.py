"""Log-domain arithmetic for the one-parameter Lindley CDF.

    u(x) = ((1 + λ + λx) / (1 + λ)) e^{-λx}
    V(x) = 1 - u(x)

V carries every member of the Lindley hierarchy (L, GL, BL, BGL), so
its logarithm and the logarithm of its complement are both computed
without cancellation: near the origin V is tiny, far out u is tiny.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import lambertw

from utils.errors import ConvergenceError
from utils.numeric_utils import log1mexp
from utils.rootfinding import bracket_upper, solve_increasing

_LOG1P_SERIES_CUTOFF = 1e-2
_LOG_X_FLOOR = math.log(1e-300)
_LN2 = math.log(2.0)


def _log1p_minus(y: np.ndarray) -> np.ndarray:
    """log1p(y) - y for y >= 0, by series where the direct form cancels."""
    out = np.empty_like(y)
    small = y < _LOG1P_SERIES_CUTOFF
    ys = y[small]
    acc = np.zeros_like(ys)
    for k in range(12, 1, -1):
        acc = ((-1.0) ** (k + 1)) / k + ys * acc
    out[small] = ys * ys * acc
    yl = y[~small]
    out[~small] = np.log1p(yl) - yl
    return out


@dataclass(frozen=True)
class LindleyCore:
    lam: float

    @property
    def mean(self) -> float:
        lam = self.lam
        return (lam + 2.0) / (lam * (lam + 1.0))

    @property
    def std(self) -> float:
        lam = self.lam
        return math.sqrt(lam * lam + 4.0 * lam + 2.0) / (lam * (lam + 1.0))

    def log_u(self, x) -> np.ndarray:
        """ln u(x), written as (log1p(cx) - cx) - λcx with c = λ/(1+λ).

        Both terms are non-positive, so no digits are lost near x = 0.
        """
        x = np.asarray(x, dtype=float)
        lam = self.lam
        cx = (lam / (1.0 + lam)) * x
        flat = np.atleast_1d(cx)
        out = np.full(flat.shape, -np.inf)
        finite = np.isfinite(flat)
        out[finite] = _log1p_minus(flat[finite]) - lam * flat[finite]
        return out.reshape(x.shape)

    def v(self, x) -> np.ndarray:
        return -np.expm1(self.log_u(x))

    def log_v(self, x, log_u: Optional[np.ndarray] = None) -> np.ndarray:
        lu = self.log_u(x) if log_u is None else log_u
        with np.errstate(divide="ignore"):
            return log1mexp(lu)

    def log_dv_dx(self, x) -> np.ndarray:
        """ln V'(x): the Lindley log-density 2lnλ - ln(1+λ) + ln(1+x) - λx."""
        x = np.asarray(x, dtype=float)
        lam = self.lam
        return 2.0 * math.log(lam) - math.log1p(lam) + np.log1p(x) - lam * x

    def log_dv_dlam(self, x) -> np.ndarray:
        """ln ∂V/∂λ = ln(λx(2 + λ + x + λx) e^{-λx} / (1+λ)^2), for x > 0."""
        x = np.asarray(x, dtype=float)
        lam = self.lam
        return (
            math.log(lam) + np.log(x) + np.log(2.0 + lam + x + lam * x)
            - lam * x - 2.0 * math.log1p(lam)
        )

    def log1m_v_pow(self, x, alpha: float, log_u: Optional[np.ndarray] = None) -> np.ndarray:
        """ln(1 - V(x)^α).

        Falls back to the leading series ln α + ln u - (α-1)u/2 once αu is
        too small for exp(α lnV) to differ from 1.
        """
        lu = self.log_u(x) if log_u is None else np.asarray(log_u, dtype=float)
        shape = np.shape(lu)
        lu = np.atleast_1d(lu)
        u = np.exp(lu)
        out = np.empty_like(lu)
        series = alpha * u < 1e-10
        out[series] = math.log(alpha) + lu[series] - 0.5 * (alpha - 1.0) * u[series]
        rest = ~series
        if np.any(rest):
            with np.errstate(divide="ignore"):
                out[rest] = log1mexp(alpha * log1mexp(lu[rest]))
        return out.reshape(shape)

    def _lambertw_guess(self, log_u_target: np.ndarray) -> np.ndarray:
        """Closed-form inverse via the lower Lambert W branch, as ln x."""
        lam = self.lam
        arg = -(1.0 + lam) * np.exp(log_u_target - (1.0 + lam))
        with np.errstate(all="ignore"):
            w = lambertw(arg, k=-1).real
            x = -1.0 - 1.0 / lam - w / lam
            return np.log(x)

    def invert(self, log_v_target, log_u_target, scale_hint: Optional[float] = None) -> np.ndarray:
        """Solve V(x) = t given ln t and ln(1 - t), vectorized.

        Roots with t < 1/2 are found on ln V, the rest on ln u, both in
        z = ln x. Targets below V(1e-300) are reported at 1e-300.
        """
        lvt = np.atleast_1d(np.asarray(log_v_target, dtype=float))
        lut = np.atleast_1d(np.asarray(log_u_target, dtype=float))
        hint = scale_hint if scale_hint is not None else self.mean + 20.0 * self.std
        out = np.full(lvt.shape, 1e-300)

        lower = lvt < -_LN2
        idx = np.flatnonzero(lower)
        if idx.size:
            idx = idx[self.log_v(np.full(idx.size, 1e-300)) < lvt[idx]]
        if idx.size:
            targets = lvt[idx]

            def g_lower(z, j):
                x = np.exp(z)
                lv = self.log_v(x)
                # d lnV / dz = x V'(x) / V
                return lv - targets[j], np.exp(z + self.log_dv_dx(x) - lv)

            hi = bracket_upper(g_lower, np.full(idx.size, math.log(hint)), lambda z: z + _LN2)
            lo = np.full(idx.size, _LOG_X_FLOOR)
            x0 = self._lambertw_guess(log1mexp(targets))
            out[idx] = np.exp(solve_increasing(g_lower, lo, hi, x0=x0))

        upper = ~lower
        if np.any(upper):
            idx = np.flatnonzero(upper)
            targets = lut[idx]
            if not np.all(np.isfinite(targets)):
                raise ConvergenceError("Lindley inversion target is at the upper support limit")

            def g_upper(z, j):
                x = np.exp(z)
                lu = self.log_u(x)
                # d(-ln u)/dz = x V'(x) / u
                dg = np.exp(z + self.log_dv_dx(x) - lu)
                return targets[j] - lu, dg

            hi = bracket_upper(g_upper, np.full(idx.size, math.log(hint)), lambda z: z + _LN2)
            lo = np.full(idx.size, _LOG_X_FLOOR)
            x0 = self._lambertw_guess(targets)
            out[idx] = np.exp(solve_increasing(g_upper, lo, hi, x0=x0))

        return out.reshape(np.shape(log_v_target))
