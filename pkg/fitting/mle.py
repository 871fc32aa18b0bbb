"""Multi-start maximum-likelihood fitting."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np

import config
from distributions.core import FamilySpec
from distributions.families import Family, get_family
from fitting.likelihood import log_likelihood
from fitting.optimizer import OPTIMIZERS, PENALTY, Objective, StartOutcome, run_start
from fitting.starts import NESTING, build_starts
from ingest.sample import Sample
from utils.errors import DomainError, WindFitError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = config.FIT_MAX_ITERATIONS
    gradient_tolerance: float = config.FIT_GRADIENT_TOLERANCE
    n_starts: int = config.FIT_N_STARTS
    seed: int = config.FIT_SEED
    optimizer: str = config.FIT_OPTIMIZER
    workers: int = config.FIT_WORKERS

    def __post_init__(self) -> None:
        for name in ("max_iterations", "n_starts", "workers"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"FitConfig.{name} must be a positive integer, got {value!r}")
        if not self.gradient_tolerance > 0:
            raise DomainError(f"FitConfig.gradient_tolerance must be > 0, got {self.gradient_tolerance!r}")
        if self.optimizer not in OPTIMIZERS:
            raise DomainError(f"FitConfig.optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")


@dataclass
class FitResult:
    family: Family
    spec: FamilySpec
    neg2_log_lik: float
    converged: bool
    n_evaluations: int
    start_index_of_best: int
    gradient_norm_at_optimum: float
    message: str = ""
    start_objectives: List[float] = field(default_factory=list)


def _as_sample(sample: Union[Sample, np.ndarray]) -> Sample:
    return sample if isinstance(sample, Sample) else Sample(np.asarray(sample, dtype=float))


def _best(outcomes: List[StartOutcome]) -> StartOutcome:
    # Ties go to the lowest start index
    return min(outcomes, key=lambda o: (o.fun, o.index))


def _degenerate_result(family: Family, sample: Sample, cfg: FitConfig) -> FitResult:
    values = sample.values
    start = build_starts(family, values, 1, cfg.seed, {})[0]
    spec = FamilySpec(family, start)
    try:
        neg2 = -2.0 * log_likelihood(spec, values)
    except WindFitError:
        neg2 = math.inf
    msg = f"degenerate sample: all {sample.n} values equal {values[0]:g}"
    log.warning(f"{family.value}: {msg}")
    return FitResult(family, spec, neg2, False, 0, 0, math.inf, msg, [])


def fit_mle(
    family: Union[Family, str],
    sample: Union[Sample, np.ndarray],
    cfg: Optional[FitConfig] = None,
    submodel_results: Optional[Dict[Family, FitResult]] = None,
) -> FitResult:
    """Fit ``family`` by maximum likelihood.

    Direct submodels are fitted first (or taken from ``submodel_results``)
    and their optima seed the parent, so a parent never ends worse than a
    nested child. Non-convergence is reported, not raised.
    """
    fam = get_family(family)
    cfg = cfg or FitConfig()
    sample = _as_sample(sample)
    values = sample.values
    cache = submodel_results if submodel_results is not None else {}

    if np.ptp(values) == 0:
        return _degenerate_result(fam.family, sample, cfg)

    fitted = {}
    for child in NESTING.get(fam.family, []):
        if child not in cache:
            cache[child] = fit_mle(child, sample, cfg, cache)
        fitted[child] = cache[child].spec.params

    starts = build_starts(fam.family, values, cfg.n_starts, cfg.seed, fitted)
    log.debug(f"{fam.family.value}: {len(starts)} starts")

    def run(index: int) -> StartOutcome:
        obj = Objective(fam, values)
        outcome = run_start(obj, index, starts[index], cfg.optimizer, cfg.max_iterations, cfg.gradient_tolerance)
        log.debug(
            f"{fam.family.value} start {index}: -LL/n {outcome.initial_fun:.6f} -> {outcome.fun:.8f}, "
            f"|g|={outcome.gradient_norm:.2e}, {outcome.n_evaluations} evals"
        )
        return outcome

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(run, range(len(starts))))
    else:
        outcomes = [run(i) for i in range(len(starts))]

    best = _best(outcomes)
    n = sample.n
    n_evaluations = sum(o.n_evaluations for o in outcomes)
    start_objectives = [2.0 * n * o.fun if o.fun < PENALTY else math.inf for o in outcomes]
    spec = Objective(fam, values).spec(best.theta)

    try:
        neg2 = -2.0 * log_likelihood(spec, values)
    except WindFitError as exc:
        log.warning(f"{fam.family.value}: likelihood failed at the optimum: {exc}")
        return FitResult(fam.family, spec, math.inf, False, n_evaluations, best.index,
                         best.gradient_norm, f"likelihood failed at optimum: {exc}", start_objectives)

    converged = best.converged and math.isfinite(neg2)
    message = best.message
    if not converged:
        message = f"not converged (|g|={best.gradient_norm:.2e}); {message}"
        log.warning(f"{fam.family.value}: {message}")
    log.info(
        f"{fam.family.value}: -2lnL={neg2:.3f} at {spec} "
        f"(start {best.index}/{len(starts)}, {n_evaluations} evals, converged={converged})"
    )
    return FitResult(
        family=fam.family,
        spec=spec,
        neg2_log_lik=neg2,
        converged=converged,
        n_evaluations=n_evaluations,
        start_index_of_best=best.index,
        gradient_norm_at_optimum=best.gradient_norm,
        message=message,
        start_objectives=start_objectives,
    )
