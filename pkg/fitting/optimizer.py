"""Transformed-scale objective and the per-start optimizer.

The search runs on θ = log(parameter) for every positive parameter and
θ = parameter for the log-normal log-mean. The objective is the mean
negative log-likelihood -LL/n, so tolerances do not scale with n.
"""

import logging
import math
import threading
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from config import PARAM_MAX, PARAM_MIN
from distributions.core import FamilySpec
from distributions.families import Family, FamilyDef
from fitting.likelihood import bgl_score, log_likelihood
from utils.errors import WindFitError

log = logging.getLogger(__name__)

PENALTY = 1e30
SIMPLEX_XATOL = 1e-9
SIMPLEX_FATOL = 1e-13
FD_STEP = 1e-6
POLISH_ROUNDS = 3

OPTIMIZERS = ("simplex", "quasi_newton", "hybrid")

_LOG_MIN = math.log(PARAM_MIN)
_LOG_MAX = math.log(PARAM_MAX)


class Objective:
    """-LL/n and its gradient on the transformed scale for one family.

    Each start gets its own instance so the evaluation counter is not
    shared between threads.
    """

    def __init__(self, fam: FamilyDef, values: np.ndarray) -> None:
        self.fam = fam
        self.values = values
        self.n = values.size
        self.n_evaluations = 0
        self._lock = threading.Lock()

    # ── Parameter transform ──

    def to_theta(self, params) -> np.ndarray:
        return np.array([
            v if i == self.fam.real_param else math.log(v) for i, v in enumerate(params)
        ], dtype=float)

    def to_params(self, theta: np.ndarray) -> Tuple[float, ...]:
        out = []
        for i, t in enumerate(theta):
            if i == self.fam.real_param:
                out.append(float(t))
            else:
                out.append(float(min(max(math.exp(t), PARAM_MIN), PARAM_MAX)))
        return tuple(out)

    def bounds(self) -> List[Tuple[Optional[float], Optional[float]]]:
        return [
            (None, None) if i == self.fam.real_param else (_LOG_MIN, _LOG_MAX)
            for i in range(self.fam.p)
        ]

    def theta_limits(self) -> Tuple[np.ndarray, np.ndarray]:
        lower = np.array([-np.inf if lo is None else lo for lo, _ in self.bounds()])
        upper = np.array([np.inf if hi is None else hi for _, hi in self.bounds()])
        return lower, upper

    def spec(self, theta: np.ndarray) -> FamilySpec:
        return FamilySpec(self.fam.family, self.to_params(theta))

    # ── Objective and gradient ──

    def __call__(self, theta: np.ndarray) -> float:
        with self._lock:
            self.n_evaluations += 1
        if not np.all(np.isfinite(theta)):
            return PENALTY
        try:
            with np.errstate(all="ignore"):
                value = -log_likelihood(self.spec(theta), self.values) / self.n
        except WindFitError:
            return PENALTY
        return value if math.isfinite(value) else PENALTY

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.fam.family == Family.BGL:
            try:
                with np.errstate(all="ignore"):
                    score = bgl_score(self.spec(theta), self.values)
                with self._lock:
                    self.n_evaluations += 1
                # dθ chain rule: ∂/∂ln(p) = p ∂/∂p
                return -score * np.array(self.to_params(theta)) / self.n
            except WindFitError:
                pass
        return self.fd_gradient(theta)

    def fd_gradient(self, theta: np.ndarray) -> np.ndarray:
        """Central differences with step 1e-6·max(1, |θ_i|)."""
        grad = np.empty_like(theta)
        for i in range(theta.size):
            h = FD_STEP * max(1.0, abs(theta[i]))
            up = theta.copy()
            down = theta.copy()
            up[i] += h
            down[i] -= h
            grad[i] = (self(up) - self(down)) / (2.0 * h)
        return grad


@dataclass
class StartOutcome:
    index: int
    theta: np.ndarray
    fun: float
    initial_fun: float
    n_evaluations: int
    gradient_norm: float
    converged: bool
    message: str


def _simplex(obj: Objective, theta: np.ndarray, max_iterations: int):
    res = minimize(
        obj, theta, method="Nelder-Mead", bounds=obj.bounds(),
        options={
            "maxiter": max_iterations,
            "maxfev": 4 * max_iterations,
            "xatol": SIMPLEX_XATOL,
            "fatol": SIMPLEX_FATOL,
            "adaptive": theta.size > 2,
        },
    )
    simplex = res.final_simplex[0]
    diameter = float(np.max(np.abs(simplex - simplex[0]))) if simplex.size else 0.0
    return res.x, float(res.fun), diameter, str(res.message)


def _quasi_newton(obj: Objective, theta: np.ndarray, max_iterations: int, gtol: float):
    res = minimize(
        obj, theta, jac=obj.gradient, method="L-BFGS-B", bounds=obj.bounds(),
        options={"maxiter": max_iterations, "gtol": gtol, "ftol": 1e-15, "maxcor": 20},
    )
    return res.x, float(res.fun), str(res.message)


def run_start(
    obj: Objective,
    index: int,
    start: Tuple[float, ...],
    optimizer: str,
    max_iterations: int,
    gradient_tolerance: float,
) -> StartOutcome:
    """Optimize from one start; never worse than the start itself."""
    lower, upper = obj.theta_limits()
    theta0 = np.clip(obj.to_theta(start), lower, upper)
    initial = obj(theta0)
    theta, fun = theta0, initial
    diameter = math.inf
    messages = []

    if optimizer in ("simplex", "hybrid"):
        theta, fun, diameter, msg = _simplex(obj, theta, max_iterations)
        messages.append(f"simplex: {msg}")
    if optimizer in ("quasi_newton", "hybrid"):
        for _ in range(POLISH_ROUNDS):
            new_theta, new_fun, msg = _quasi_newton(obj, theta, max_iterations, gradient_tolerance)
            messages.append(f"quasi-newton: {msg}")
            improved = new_fun < fun
            if new_fun <= fun:
                theta, fun = new_theta, new_fun
            if not improved or np.linalg.norm(obj.gradient(theta)) <= gradient_tolerance:
                break

    if initial < fun:
        theta, fun = theta0, initial
        messages.append("kept starting point")

    grad_norm = float(np.linalg.norm(obj.gradient(theta))) if fun < PENALTY else math.inf
    if optimizer == "simplex":
        converged = diameter < SIMPLEX_XATOL or grad_norm <= gradient_tolerance
    else:
        converged = grad_norm <= gradient_tolerance
    converged = converged and fun < PENALTY

    return StartOutcome(
        index=index,
        theta=np.asarray(theta, dtype=float),
        fun=fun,
        initial_fun=initial,
        n_evaluations=obj.n_evaluations,
        gradient_norm=grad_norm,
        converged=converged,
        message="; ".join(messages),
    )

