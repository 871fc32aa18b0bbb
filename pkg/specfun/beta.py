"""Beta-function family: ln B, the regularized incomplete beta and its inverse."""

import numpy as np

from specfun.gamma import log_gamma
from utils.errors import ConvergenceError, DomainError
from utils.rootfinding import solve_increasing

_CF_MAX_ITER = 300
_CF_EPS = 1e-15
_TINY = 1e-300
_LOG_X_FLOOR = np.log(1e-300)


def _check_shapes(a, b):
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    for name, v in (("a", a_arr), ("b", b_arr)):
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise DomainError(f"beta shape {name} must be finite and > 0, got {v!r}")
    return a_arr, b_arr


def log_beta(a, b):
    """ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b).

    Symmetric by construction: the two single-argument terms are
    added in sorted order so log_beta(a, b) == log_beta(b, a) bit-for-bit.
    """
    a_arr, b_arr = _check_shapes(a, b)
    lo = np.minimum(a_arr, b_arr)
    hi = np.maximum(a_arr, b_arr)
    out = log_gamma(lo) + log_gamma(hi) - log_gamma(lo + hi)
    return float(out) if np.ndim(out) == 0 else out


def _betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a,b), modified Lentz, vectorized over x."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        h *= np.where(active, d * c, 1.0)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = np.where(active, d * c, 1.0)
        h *= delta
        active &= np.abs(delta - 1.0) >= _CF_EPS
        if not np.any(active):
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge in {_CF_MAX_ITER} iterations (a={a}, b={b})"
    )


def _inc_beta_pair(x, a: float, b: float, one_minus_x=None):
    """Return (I_x(a,b), 1 - I_x(a,b)) each computed without cancellation."""
    a_arr, b_arr = _check_shapes(a, b)
    if a_arr.ndim or b_arr.ndim:
        raise DomainError("incomplete beta shapes must be scalars")
    a, b = float(a_arr), float(b_arr)

    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0) or np.any(x_arr > 1):
        raise DomainError(f"incomplete beta argument must lie in [0, 1], got {x!r}")
    xs = np.atleast_1d(x_arr)
    if one_minus_x is None:
        ys = 1.0 - xs
    else:
        ys = np.atleast_1d(np.asarray(one_minus_x, dtype=float))
        ys = np.broadcast_to(ys, xs.shape)

    lower = np.zeros_like(xs)
    upper = np.ones_like(xs)
    # x may round to 1 while the supplied 1 - x is still positive
    at_one = ys <= 0
    lower[at_one], upper[at_one] = 1.0, 0.0
    interior = (xs > 0) & ~at_one
    if np.any(interior):
        xi, yi = xs[interior], ys[interior]
        log_front = a * np.log(xi) + b * np.log(yi) - log_beta(a, b)
        front = np.exp(log_front)
        direct = xi < (a + 1.0) / (a + b + 2.0)
        lo_i = np.empty_like(xi)
        up_i = np.empty_like(xi)
        if np.any(direct):
            v = front[direct] * _betacf(a, b, xi[direct]) / a
            lo_i[direct], up_i[direct] = v, 1.0 - v
        flip = ~direct
        if np.any(flip):
            # Symmetry I_x(a,b) = 1 - I_{1-x}(b,a) keeps the fraction convergent
            v = front[flip] * _betacf(b, a, yi[flip]) / b
            up_i[flip], lo_i[flip] = v, 1.0 - v
        lower[interior] = np.clip(lo_i, 0.0, 1.0)
        upper[interior] = np.clip(up_i, 0.0, 1.0)

    scalar = np.ndim(x_arr) == 0
    if scalar:
        return float(lower[0]), float(upper[0])
    return lower.reshape(x_arr.shape), upper.reshape(x_arr.shape)


def reg_inc_beta(x, a: float, b: float, one_minus_x=None):
    """I_x(a, b) = B(x; a, b) / B(a, b) for x in [0, 1].

    ``one_minus_x`` may carry an accurately computed 1 - x when x is
    within rounding of 1.
    """
    return _inc_beta_pair(x, a, b, one_minus_x)[0]


def reg_inc_beta_c(x, a: float, b: float, one_minus_x=None):
    """1 - I_x(a, b), computed directly rather than by subtraction."""
    return _inc_beta_pair(x, a, b, one_minus_x)[1]


def _solve_lower_tail(targets: np.ndarray, a: float, b: float) -> np.ndarray:
    """Solve I_x(a,b) = p for x in (0, 1/2] working in ln x."""
    lb = log_beta(a, b)

    def func(z, idx):
        x = np.exp(z)
        g = reg_inc_beta(x, a, b) - targets[idx]
        dens = np.exp(a * z + (b - 1.0) * np.log1p(-x) - lb)
        return g, dens

    lo = np.full(targets.shape, _LOG_X_FLOOR)
    hi = np.full(targets.shape, np.log(0.5))
    out = np.full(targets.shape, np.exp(_LOG_X_FLOOR))
    # Roots below the floor (tiny a with tiny p) are reported at the floor
    g_lo, _ = func(lo, np.arange(targets.size))
    solvable = g_lo < 0
    if np.any(solvable):
        idx = np.flatnonzero(solvable)
        # Small-x asymptote I_x ~ x^a / (a B(a,b))
        z0 = (np.log(targets[idx]) + np.log(a) + lb) / a

        def sub_func(z, j):
            return func(z, idx[j])

        out[idx] = np.exp(solve_increasing(sub_func, lo[idx], hi[idx], x0=z0))
    return out


def reg_inc_beta_inv(p, a: float, b: float, return_complement: bool = False):
    """Inverse of I_x(a, b) in x.

    Bracketed Newton/bisection on ln x for whichever tail holds the
    root, so tiny x or tiny 1 - x keep full relative precision. With
    ``return_complement`` the pair (x, 1 - x) is returned.
    """
    a_arr, b_arr = _check_shapes(a, b)
    a, b = float(a_arr), float(b_arr)
    p_arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(p_arr)) or np.any(p_arr < 0) or np.any(p_arr > 1):
        raise DomainError(f"probability must lie in [0, 1], got {p!r}")
    ps = np.atleast_1d(p_arr)
    x = np.zeros_like(ps)
    y = np.ones_like(ps)
    x[ps >= 1], y[ps >= 1] = 1.0, 0.0

    interior = (ps > 0) & (ps < 1)
    if np.any(interior):
        pi = ps[interior]
        p_half = reg_inc_beta(0.5, a, b)
        left = pi <= p_half
        xi = np.empty_like(pi)
        yi = np.empty_like(pi)
        if np.any(left):
            xi[left] = _solve_lower_tail(pi[left], a, b)
            yi[left] = 1.0 - xi[left]
        if np.any(~left):
            # I_x(a,b) = p  <=>  I_{1-x}(b,a) = 1 - p
            yi[~left] = _solve_lower_tail(1.0 - pi[~left], b, a)
            xi[~left] = 1.0 - yi[~left]
        x[interior], y[interior] = xi, yi

    if np.ndim(p_arr) == 0:
        x, y = float(x[0]), float(y[0])
    else:
        x, y = x.reshape(p_arr.shape), y.reshape(p_arr.shape)
    return (x, y) if return_complement else x
