"""Tests for likelihoods, starting points and multi-start MLE."""

import sys
import os
import math

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from distributions import FAMILY_ORDER, Family, log_pdf, make_spec, sample
from distributions.families import FAMILIES
from fitting import FitConfig, bgl_score, fit_mle, log_likelihood
from fitting.optimizer import PENALTY, Objective, run_start
from fitting.starts import build_starts, lindley_rate_seed, random_seeds, warm_seeds
from utils.errors import DomainError

FAST = FitConfig(max_iterations=400, n_starts=3, seed=7)


def _draws(family, params, n, seed=1):
    return sample(make_spec(family, params), n, seed)


# ──────────────────── Likelihood ────────────────────

def test_log_likelihood_is_sum_of_log_density():
    spec = make_spec("GAM", (2.0, 0.5))
    x = np.array([0.5, 1.0, 3.0, 7.5])
    assert log_likelihood(spec, x) == pytest.approx(float(np.sum(log_pdf(spec, x))), rel=1e-14)


def test_log_likelihood_is_permutation_invariant():
    spec = make_spec("BGL", (1.5, 0.8, 2.0, 0.7))
    x = _draws("BGL", (1.5, 0.8, 2.0, 0.7), 500).values
    rng = np.random.default_rng(0)
    assert log_likelihood(spec, x) == log_likelihood(spec, rng.permutation(x))


@pytest.mark.parametrize("params", [
    (1.5, 0.8, 2.0, 0.7),
    (3.8, 0.5, 0.081, 30.0),
    (0.6, 1.4, 3.0, 2.0),
])
def test_bgl_score_matches_finite_differences(params):
    spec = make_spec("BGL", params)
    x = _draws("BGL", params, 200, seed=3).values
    score = bgl_score(spec, x)
    fd = np.empty(4)
    for i in range(4):
        h = 1e-6 * params[i]
        up = list(params)
        down = list(params)
        up[i] += h
        down[i] -= h
        fd[i] = (log_likelihood(make_spec("BGL", up), x) - log_likelihood(make_spec("BGL", down), x)) / (2 * h)
    np.testing.assert_allclose(score, fd, rtol=1e-4, atol=1e-3)


def _score_fd(params, x):
    fd = np.empty(4)
    for i in range(4):
        h = 1e-6 * max(1.0, abs(params[i]))
        up = list(params)
        down = list(params)
        up[i] += h
        down[i] -= h
        fd[i] = (log_likelihood(make_spec("BGL", up), x) - log_likelihood(make_spec("BGL", down), x)) / (2 * h)
    return fd


def test_bgl_score_matches_finite_differences_on_random_cases():
    rng = np.random.default_rng(2718)
    lows = np.log([0.5, 0.2, 0.2, 0.2])
    highs = np.log([5.0, 2.0, 5.0, 5.0])
    for case in range(50):
        params = tuple(float(v) for v in np.exp(rng.uniform(lows, highs)))
        x = _draws("BGL", params, 200, seed=100 + case).values
        fd = _score_fd(params, x)
        score = bgl_score(make_spec("BGL", params), x)
        assert np.all(np.abs(score - fd) <= 1e-4 * np.maximum(1.0, np.abs(fd))), (params, score, fd)


def test_bgl_score_rejects_other_families():
    with pytest.raises(DomainError):
        bgl_score(make_spec("GL", (2.0, 0.8)), np.array([1.0, 2.0]))


# ──────────────────── Starts ────────────────────

def test_lindley_rate_seed_inverts_mean():
    for lam in (0.1, 0.8, 3.0):
        m = (lam + 2.0) / (lam * (lam + 1.0))
        assert lindley_rate_seed(m) == pytest.approx(lam, rel=1e-12)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_build_starts_count_and_validity(family):
    values = _draws("W", (2.0, 0.2), 300).values
    starts = build_starts(family, values, 8, seed=5, fitted={})
    assert len(starts) == 8
    for point in starts:
        make_spec(family, point)


def test_random_seeds_extend_as_a_prefix():
    values = _draws("W", (2.0, 0.2), 100).values
    few = random_seeds(Family.BGL, 3, 11, values)
    many = random_seeds(Family.BGL, 6, 11, values)
    assert many[:3] == few


def test_warm_seeds_embed_submodel_optima():
    seeds = warm_seeds(Family.BGL, {Family.GL: (4.0, 0.5), Family.BL: (0.5, 2.0, 3.0)})
    assert (4.0, 0.5, 1.0, 1.0) in seeds
    assert (1.0, 0.5, 2.0, 3.0) in seeds
    # Ridge seeds keep aα fixed
    assert (40.0, 0.5, 0.1, 1.0) in seeds
    assert warm_seeds(Family.BW, {Family.W: (2.0, 0.2)}) == [(2.0, 0.2, 1.0, 1.0)]


# ──────────────────── Objective and per-start runs ────────────────────

def test_objective_penalizes_non_finite_theta():
    obj = Objective(FAMILIES[Family.W], np.array([1.0, 2.0, 3.0]))
    assert obj(np.array([np.nan, 0.0])) == PENALTY
    assert obj(np.array([0.0, 0.0])) < PENALTY


def test_run_start_never_worse_than_start():
    values = _draws("GAM", (2.5, 0.6), 400).values
    obj = Objective(FAMILIES[Family.GAM], values)
    start = (2.0, 0.5)
    outcome = run_start(obj, 0, start, "hybrid", 400, 1e-7)
    assert outcome.fun <= obj(obj.to_theta(start))
    assert outcome.initial_fun == pytest.approx(obj(obj.to_theta(start)))


# ──────────────────── fit_mle ────────────────────

def test_fit_lindley_matches_closed_form_and_grid():
    draws = _draws("L", (0.8,), 2000, seed=9)
    result = fit_mle("L", draws, FAST)
    lam_hat = result.spec.params[0]
    # The Lindley MLE solves the mean equation exactly
    assert lam_hat == pytest.approx(lindley_rate_seed(float(np.mean(draws.values))), rel=1e-5)
    grid = np.linspace(0.01, 10.0, 9991)
    lls = [log_likelihood(make_spec("L", (g,)), draws) for g in grid]
    assert abs(grid[int(np.argmax(lls))] - lam_hat) < 1.1e-3
    assert result.converged
    assert result.neg2_log_lik == pytest.approx(-2.0 * log_likelihood(result.spec, draws))


def test_fit_weibull_recovers_parameters():
    draws = _draws("W", (2.0, 0.2), 5000, seed=4)
    result = fit_mle(Family.W, draws, FAST)
    alpha, lam = result.spec.params
    assert alpha == pytest.approx(2.0, rel=0.05)
    assert lam == pytest.approx(0.2, rel=0.05)
    assert result.converged


def test_fit_generalized_lindley_recovers_truth():
    truth = make_spec("GL", (1.785, 0.576))
    draws = sample(truth, 10_000, seed=20)
    result = fit_mle(Family.GL, draws, FAST)
    alpha, lam = result.spec.params
    assert result.converged
    assert alpha == pytest.approx(1.785, rel=0.05)
    assert lam == pytest.approx(0.576, rel=0.05)
    assert result.neg2_log_lik <= -2.0 * log_likelihood(truth, draws) + 1e-6


def test_fit_lognormal_matches_log_moments():
    draws = _draws("LogN", (1.2, 0.5), 3000, seed=8)
    result = fit_mle("LogN", draws, FAST)
    logs = np.log(draws.values)
    assert result.spec.params[0] == pytest.approx(float(np.mean(logs)), abs=1e-5)
    assert result.spec.params[1] == pytest.approx(float(np.std(logs)), rel=1e-5)


def test_nested_fits_never_lose_to_submodels():
    draws = _draws("BGL", (2.0, 0.9, 1.5, 0.8), 300, seed=2)
    cache = {}
    bgl = fit_mle("BGL", draws, FAST, cache)
    assert {Family.GL, Family.BL, Family.L} <= set(cache)
    assert bgl.neg2_log_lik <= cache[Family.GL].neg2_log_lik + 1e-3
    assert bgl.neg2_log_lik <= cache[Family.BL].neg2_log_lik + 1e-3
    assert cache[Family.GL].neg2_log_lik <= cache[Family.L].neg2_log_lik + 1e-3
    assert cache[Family.BL].neg2_log_lik <= cache[Family.L].neg2_log_lik + 1e-3


def test_beta_weibull_beats_its_submodels():
    draws = _draws("W", (2.0, 0.2), 300, seed=6)
    cache = {}
    bw = fit_mle("BW", draws, FAST, cache)
    assert bw.neg2_log_lik <= min(cache[Family.W].neg2_log_lik, cache[Family.BE].neg2_log_lik) + 1e-3


def test_fit_is_deterministic_and_thread_count_independent():
    draws = _draws("GAM", (2.5, 0.6), 500, seed=12)
    serial = fit_mle("GL", draws, FAST)
    again = fit_mle("GL", draws, FAST)
    threaded = fit_mle("GL", draws, FitConfig(max_iterations=400, n_starts=3, seed=7, workers=3))
    assert serial.spec == again.spec == threaded.spec
    assert serial.start_objectives == threaded.start_objectives


def test_fit_reports_every_start():
    draws = _draws("W", (2.0, 0.2), 200)
    result = fit_mle("W", draws, FitConfig(n_starts=5, max_iterations=200))
    assert len(result.start_objectives) == 5
    assert result.neg2_log_lik == pytest.approx(min(result.start_objectives), rel=1e-12)
    assert 0 <= result.start_index_of_best < 5


def test_degenerate_sample_is_flagged_not_raised():
    result = fit_mle("L", np.full(10, 2.0), FAST)
    assert not result.converged
    assert "degenerate" in result.message


def test_fit_config_validation():
    with pytest.raises(DomainError):
        FitConfig(n_starts=0)
    with pytest.raises(DomainError):
        FitConfig(optimizer="newton")
    with pytest.raises(DomainError):
        FitConfig(gradient_tolerance=0.0)


@pytest.mark.parametrize("optimizer", ["simplex", "quasi_newton", "hybrid"])
def test_every_optimizer_fits_gamma(optimizer):
    draws = _draws("GAM", (2.5, 0.6), 1000, seed=21)
    cfg = FitConfig(max_iterations=2000, n_starts=2, seed=1, optimizer=optimizer)
    result = fit_mle("GAM", draws, cfg)
    assert math.isfinite(result.neg2_log_lik)
    assert result.spec.params[0] == pytest.approx(2.5, rel=0.15)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
