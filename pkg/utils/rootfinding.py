"""Vectorized bracketed root finding.

Every solver here works on increasing functions given as
``func(x, idx) -> (g, dg)`` where ``idx`` selects which elements of the
problem the trial points ``x`` belong to. Each element carries its own
bracket, so one call solves a whole vector of independent equations.
"""

import logging
from typing import Callable, Optional, Tuple

import numpy as np

from utils.errors import ConvergenceError

log = logging.getLogger(__name__)

RootFn = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def bracket_upper(
    func: RootFn,
    hi: np.ndarray,
    grow: Callable[[np.ndarray], np.ndarray],
    max_expansions: int = 200,
) -> np.ndarray:
    """Move each upper bound with ``grow`` until func(hi) >= 0."""
    hi = np.array(hi, dtype=float, copy=True)
    idx = np.arange(hi.size)
    for _ in range(max_expansions + 1):
        g, _ = func(hi[idx], idx)
        short = ~(g >= 0)
        if not np.any(short):
            return hi
        idx = idx[short]
        hi[idx] = grow(hi[idx])
    raise ConvergenceError(
        f"could not bracket {idx.size} root(s) after {max_expansions} expansions"
    )


def solve_increasing(
    func: RootFn,
    lo: np.ndarray,
    hi: np.ndarray,
    x0: Optional[np.ndarray] = None,
    xtol: float = 1e-14,
    max_iter: int = 400,
) -> np.ndarray:
    """Safeguarded Newton iteration with bisection fallback (rtsafe).

    Requires g(lo) <= 0 <= g(hi) elementwise. Newton steps that leave the
    bracket or fail to halve the previous step are replaced by bisection.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    if x0 is None:
        x = 0.5 * (lo + hi)
    else:
        x = np.clip(np.asarray(x0, dtype=float), lo, hi)
        x = np.where(np.isfinite(x), x, 0.5 * (lo + hi))
    dx_old = hi - lo
    active = np.arange(x.size)

    for _ in range(max_iter):
        if active.size == 0:
            return x
        xa = x[active]
        g, dg = func(xa, active)

        exact = g == 0
        below = g < 0
        lo[active[below]] = xa[below]
        hi[active[~below & ~exact]] = xa[~below & ~exact]

        la, ha = lo[active], hi[active]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            newton = xa - g / dg
        use_newton = (
            np.isfinite(newton)
            & (dg > 0)
            & (newton > la)
            & (newton < ha)
            & (np.abs(2.0 * g) <= np.abs(dx_old[active] * dg))
        )
        x_new = np.where(use_newton, newton, 0.5 * (la + ha))
        step = np.abs(x_new - xa)
        dx_old[active] = step

        tol = xtol * (1.0 + np.abs(xa))
        done = exact | (step <= tol) | ((ha - la) <= tol)
        x[active] = np.where(exact, xa, x_new)
        active = active[~done]

    if active.size:
        raise ConvergenceError(f"{active.size} root(s) did not converge in {max_iter} iterations")
    return x
