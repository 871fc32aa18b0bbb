"""Tests for the distribution families, reductions and sampling."""

import sys
import os
import math

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest
from scipy import integrate, stats

from distributions import (
    FAMILY_ORDER,
    Family,
    FamilySpec,
    cdf,
    log_pdf,
    make_spec,
    moment,
    pdf,
    quantile,
    reduce_to_submodel,
    sample,
    sf,
)
from distributions.lindley import LindleyCore
from utils.errors import DomainError

SPECS = {
    Family.BGL: (1.5, 0.8, 2.0, 0.7),
    Family.BL: (0.8, 2.0, 0.7),
    Family.GL: (2.0, 0.8),
    Family.L: (0.8,),
    Family.GAM: (2.5, 0.6),
    Family.BW: (1.8, 0.2, 1.5, 0.8),
    Family.W: (2.0, 0.2),
    Family.BE: (0.5, 2.0, 1.5),
    Family.LOGN: (1.2, 0.5),
}


def _spec(family: Family) -> FamilySpec:
    return make_spec(family, SPECS[family])


# ──────────────────── Spec validation ────────────────────

def test_family_parse_is_case_insensitive():
    assert Family.parse("logn") == Family.LOGN
    assert Family.parse(" bgl ") == Family.BGL
    with pytest.raises(DomainError):
        Family.parse("Rayleigh")


def test_spec_rejects_wrong_arity_and_bounds():
    with pytest.raises(DomainError):
        make_spec("BGL", (1.0, 1.0))
    with pytest.raises(DomainError):
        make_spec("W", (0.0, 1.0))
    with pytest.raises(DomainError):
        make_spec("GL", (float("inf"), 1.0))


def test_lognormal_location_may_be_negative():
    spec = make_spec("LogN", (-3.0, 0.4))
    assert spec.params[0] == -3.0
    assert str(spec) == "LogN(-3, 0.4)"


def test_spec_as_dict_uses_parameter_names():
    assert _spec(Family.BGL).as_dict() == {"alpha": 1.5, "lambda": 0.8, "a": 2.0, "b": 0.7}
    assert _spec(Family.BGL).p == 4


# ──────────────────── Lindley core ────────────────────

def test_lindley_log_v_near_origin():
    # V(x) = x/2 - x^3/12 + ... for λ = 1
    core = LindleyCore(1.0)
    x = 1e-6
    assert float(core.log_v(np.array([x]))[0]) == pytest.approx(math.log(0.5 * x), abs=1e-12)


def test_lindley_log_u_far_tail_is_finite():
    core = LindleyCore(2.0)
    lu = core.log_u(np.array([1e3]))
    assert np.isfinite(lu[0])
    assert lu[0] < -1900


def test_lindley_log_dv_dlam_matches_finite_difference():
    x = np.array([0.1, 1.0, 4.0, 12.0])
    lam, h = 0.7, 1e-6
    fd = (LindleyCore(lam + h).v(x) - LindleyCore(lam - h).v(x)) / (2 * h)
    np.testing.assert_allclose(np.exp(LindleyCore(lam).log_dv_dlam(x)), fd, rtol=1e-6)


def test_lindley_invert_both_tails():
    core = LindleyCore(0.8)
    x = np.array([1e-4, 0.3, 2.0, 15.0, 60.0])
    lu = core.log_u(x)
    lv = core.log_v(x, lu)
    np.testing.assert_allclose(core.invert(lv, lu), x, rtol=1e-10)


# ──────────────────── Known values ────────────────────

def test_weibull_quantile_known_value():
    spec = make_spec("W", (1.0, 1.0))
    assert quantile(spec, 1.0 - math.exp(-1.0)) == pytest.approx(1.0, rel=1e-12)


def test_lognormal_pdf_known_value():
    assert pdf(make_spec("LogN", (0.0, 1.0)), 1.0) == pytest.approx(0.398942, abs=1e-6)


def test_lindley_mean_by_moment():
    assert moment(make_spec("L", (1.0,)), 1) == pytest.approx(1.5, rel=1e-7)


def test_weibull_second_moment():
    assert moment(make_spec("W", (2.0, 1.0)), 2) == pytest.approx(1.0, rel=1e-7)


def test_gamma_mean_and_variance():
    spec = make_spec("GAM", (2.5, 0.6))
    m1 = moment(spec, 1)
    assert m1 == pytest.approx(2.5 / 0.6, rel=1e-7)
    assert moment(spec, 2) - m1 * m1 == pytest.approx(2.5 / 0.36, rel=1e-6)


@pytest.mark.parametrize("family", [Family.GAM, Family.W, Family.LOGN])
def test_reference_families_match_scipy(family):
    x = np.array([0.05, 0.7, 3.0, 9.0, 25.0])
    spec = _spec(family)
    if family == Family.GAM:
        ref = stats.gamma(a=2.5, scale=1 / 0.6)
    elif family == Family.W:
        ref = stats.weibull_min(c=2.0, scale=1 / 0.2)
    else:
        ref = stats.lognorm(s=0.5, scale=math.exp(1.2))
    np.testing.assert_allclose(log_pdf(spec, x), ref.logpdf(x), rtol=1e-10)
    np.testing.assert_allclose(cdf(spec, x), ref.cdf(x), rtol=1e-9, atol=1e-300)
    np.testing.assert_allclose(sf(spec, x), ref.sf(x), rtol=1e-9, atol=1e-300)


# ──────────────────── Properties over all families ────────────────────

@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_density_integrates_to_one(family):
    assert moment(_spec(family), 0) == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_cdf_is_monotone_and_bounded(family):
    spec = _spec(family)
    rng = np.random.default_rng(11)
    x = np.sort(rng.uniform(0.0, 60.0, 400))
    f = cdf(spec, x)
    assert np.all(np.diff(f) >= 0)
    assert np.all((f >= 0) & (f <= 1))
    assert cdf(spec, 0.0) == 0.0
    assert sf(spec, 0.0) == 1.0


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_cdf_derivative_is_density(family):
    spec = _spec(family)
    x = np.array(quantile(spec, np.array([0.1, 0.4, 0.7, 0.95])))
    h = 1e-5 * x
    fd = (cdf(spec, x + h) - cdf(spec, x - h)) / (2 * h)
    np.testing.assert_allclose(fd, pdf(spec, x), rtol=1e-5)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_quantile_inverts_cdf(family):
    spec = _spec(family)
    p = np.array([1e-6, 0.01, 0.3, 0.5, 0.9, 0.999])
    np.testing.assert_allclose(cdf(spec, quantile(spec, p)), p, rtol=1e-8)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_quantile_upper_tail_uses_survival(family):
    spec = _spec(family)
    p = 1.0 - 1e-9
    assert sf(spec, quantile(spec, p)) == pytest.approx(1.0 - p, rel=1e-6)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_cdf_plus_sf_is_one(family):
    spec = _spec(family)
    x = np.array([0.01, 0.5, 2.0, 8.0, 30.0])
    np.testing.assert_allclose(cdf(spec, x) + sf(spec, x), 1.0, rtol=1e-12)


def test_scalar_in_scalar_out():
    spec = _spec(Family.BGL)
    assert isinstance(log_pdf(spec, 2.0), float)
    assert isinstance(cdf(spec, 2.0), float)
    assert isinstance(quantile(spec, 0.5), float)
    assert np.shape(cdf(spec, np.ones((2, 3)))) == (2, 3)


def test_domain_errors():
    spec = _spec(Family.L)
    with pytest.raises(DomainError):
        log_pdf(spec, 0.0)
    with pytest.raises(DomainError):
        cdf(spec, -1.0)
    with pytest.raises(DomainError):
        quantile(spec, 1.0)
    with pytest.raises(DomainError):
        moment(spec, -1)


def test_bgl_near_origin_density_follows_power_law():
    # With aα < 1 the density diverges like x^(aα - 1) at the origin
    spec = make_spec("BGL", (3.8, 0.5, 0.081, 30.0))
    lp = log_pdf(spec, np.array([1e-8, 1e-7]))
    slope = (lp[1] - lp[0]) / math.log(10.0)
    assert slope == pytest.approx(0.081 * 3.8 - 1.0, abs=1e-3)


# ──────────────────── Reductions ────────────────────

@pytest.mark.parametrize("parent,params,child,child_params", [
    ("BGL", (1.0, 0.7, 1.0, 1.0), Family.L, (0.7,)),
    ("BGL", (1.0, 0.7, 2.0, 3.0), Family.BL, (0.7, 2.0, 3.0)),
    ("BGL", (2.0, 0.7, 1.0, 1.0), Family.GL, (2.0, 0.7)),
    ("BL", (0.7, 1.0, 1.0), Family.L, (0.7,)),
    ("GL", (1.0, 0.7), Family.L, (0.7,)),
    ("BW", (1.5, 0.2, 1.0, 1.0), Family.W, (1.5, 0.2)),
    ("BW", (1.0, 0.2, 2.0, 3.0), Family.BE, (0.2, 2.0, 3.0)),
])
def test_reduce_to_submodel(parent, params, child, child_params):
    spec = make_spec(parent, params)
    reduced = reduce_to_submodel(spec)
    assert reduced == make_spec(child, child_params)
    rng = np.random.default_rng(5)
    x = rng.uniform(0.01, 20.0, 100)
    np.testing.assert_allclose(log_pdf(spec, x), log_pdf(reduced, x), rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(cdf(spec, x), cdf(reduced, x), rtol=1e-10, atol=1e-12)


def test_no_reduction_for_general_parameters():
    assert reduce_to_submodel(make_spec("BGL", (2.0, 0.7, 2.0, 3.0))) is None
    assert reduce_to_submodel(make_spec("GAM", (1.0, 1.0))) is None


# ──────────────────── Randomized parameter sweeps ────────────────────

def _random_specs(family: Family, count: int, seed: int):
    """Specs with every parameter log-uniform in [0.05, 50]."""
    rng = np.random.default_rng(seed)
    p = len(SPECS[family])
    return [make_spec(family, np.exp(rng.uniform(math.log(0.05), math.log(50.0), p))) for _ in range(count)]


def _mass_between(spec: FamilySpec, lo: float, hi: float) -> float:
    value, _ = integrate.quad(lambda t: math.exp(log_pdf(spec, math.exp(t)) + t), math.log(lo), math.log(hi),
                              epsabs=1e-13, epsrel=1e-12, limit=200)
    return value


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_normalization_over_random_parameters(family):
    for spec in _random_specs(family, 50, seed=300):
        assert moment(spec, 0) == pytest.approx(1.0, abs=1e-6), str(spec)


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_quantile_round_trip_over_random_parameters(family):
    levels = np.array([0.01, 0.3, 0.7, 0.99])
    for spec in _random_specs(family, 20, seed=301):
        q = quantile(spec, levels)
        usable = np.isfinite(q) & (q > 1e-250)
        if not usable.any():
            continue
        np.testing.assert_allclose(cdf(spec, q[usable]), levels[usable], atol=1e-8, err_msg=str(spec))


@pytest.mark.parametrize("family", FAMILY_ORDER)
def test_cdf_matches_integrated_pdf_over_random_parameters(family):
    for spec in _random_specs(family, 10, seed=302):
        lo, hi = quantile(spec, np.array([0.2, 0.8]))
        if not (np.isfinite(hi) and lo > 1e-250):
            continue
        expected = cdf(spec, hi) - cdf(spec, lo)
        assert _mass_between(spec, lo, hi) == pytest.approx(expected, abs=1e-8), str(spec)


def test_bgl_cdf_matches_quadrature_at_fitted_parameters():
    spec = make_spec("BGL", (46.822, 1.063, 0.081, 0.349))
    for x in (1.0, 5.0, 10.0, 20.0):
        value, _ = integrate.quad(lambda t: pdf(spec, t), 0.0, x, epsabs=1e-14, epsrel=1e-12, limit=200)
        assert cdf(spec, x) == pytest.approx(value, abs=1e-8), x


# Parent parameters with the reduced slots pinned to 1; None marks a free slot
REDUCTION_PATTERNS = [
    (Family.BGL, (1.0, None, 1.0, 1.0)),
    (Family.BGL, (1.0, None, None, None)),
    (Family.BGL, (None, None, 1.0, 1.0)),
    (Family.BL, (None, 1.0, 1.0)),
    (Family.GL, (1.0, None)),
    (Family.BW, (None, None, 1.0, 1.0)),
    (Family.BW, (1.0, None, None, None)),
]


@pytest.mark.parametrize("family,pattern", REDUCTION_PATTERNS)
def test_reductions_hold_over_random_parameters(family, pattern):
    rng = np.random.default_rng(303)
    for _ in range(10):
        params = [v if v is not None else math.exp(rng.uniform(math.log(0.05), math.log(50.0))) for v in pattern]
        spec = make_spec(family, params)
        reduced = reduce_to_submodel(spec)
        assert reduced is not None and reduced.family != family
        lam = params[0] if family == Family.BL else params[1]
        x = rng.uniform(0.01, 20.0, 100) / lam
        np.testing.assert_allclose(log_pdf(spec, x), log_pdf(reduced, x), rtol=1e-10, atol=1e-10, err_msg=str(spec))
        np.testing.assert_allclose(cdf(spec, x), cdf(reduced, x), rtol=1e-10, atol=1e-10, err_msg=str(spec))


# ──────────────────── Sampling ────────────────────

def test_sample_is_deterministic():
    spec = _spec(Family.BGL)
    a = sample(spec, 50, seed=3)
    b = sample(spec, 50, seed=3)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, sample(spec, 50, seed=4).values)


def test_sample_mean_of_lindley():
    draws = sample(make_spec("L", (1.0,)), 100_000, seed=2024)
    se = math.sqrt(7.0) / 2.0 / math.sqrt(draws.n)
    assert abs(float(np.mean(draws.values)) - 1.5) < 3 * se


def test_sample_rejects_nonpositive_size():
    with pytest.raises(DomainError):
        sample(_spec(Family.L), 0, seed=1)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
