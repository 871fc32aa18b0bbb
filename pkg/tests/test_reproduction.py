"""Checks against published figures for the public M2 tower export.

Skipped unless WINDFIT_M2_CSV points at the hourly export (all four
heights, 2010-2020). Full-sample fits take minutes.
"""

import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pytest

from distributions import Family
from fitting import FitConfig, fit_mle
from gof import evaluate, percentile_bias
from ingest.cleaning import clean
from ingest.describe import describe
from ingest.parser import parse_csv

M2_CSV = os.getenv("WINDFIT_M2_CSV")

pytestmark = pytest.mark.skipif(not M2_CSV, reason="WINDFIT_M2_CSV not set")


def _slice(height, years):
    records, parse_log = parse_csv(M2_CSV, heights=[height])
    sample, _ = clean(records, height, years, parse_log=parse_log, source=M2_CSV)
    return sample


def test_descriptives_80m_2015():
    stats = describe(_slice(80, (2015, 2015)))
    assert stats.n == 8760
    assert stats.mean == pytest.approx(4.37, abs=0.005)
    assert stats.kurtosis == pytest.approx(8.85, abs=0.005)


def test_percentiles_50m():
    stats = describe(_slice(50, (2010, 2020)))
    assert stats.p95 == pytest.approx(11.05, abs=0.01)
    assert stats.p99 == pytest.approx(17.09, abs=0.01)


def test_bgl_fit_quality_10m():
    sample = _slice(10, (2010, 2020))
    result = fit_mle(Family.BGL, sample, FitConfig())
    report = evaluate(result.spec, sample, result.neg2_log_lik)
    assert result.neg2_log_lik == pytest.approx(393606.3, rel=1e-3)
    assert report.ks == pytest.approx(0.008, abs=0.002)
    assert report.ad == pytest.approx(11.4, rel=0.10)


def test_bgl_fit_quality_80m_2020():
    sample = _slice(80, (2020, 2020))
    result = fit_mle(Family.BGL, sample, FitConfig())
    report = evaluate(result.spec, sample, result.neg2_log_lik)
    assert result.neg2_log_lik == pytest.approx(42058.5, rel=1e-3)
    assert report.ks == pytest.approx(0.009, abs=0.002)
    assert report.ad == pytest.approx(1.31, rel=0.10)


def test_family_ranking_10m():
    sample = _slice(10, (2010, 2020))
    cfg = FitConfig()
    cache = {}
    order = [Family.L, Family.W, Family.BE, Family.GAM, Family.LOGN,
             Family.GL, Family.BL, Family.BW, Family.BGL]
    results = {}
    for fam in order:
        results[fam] = cache[fam] = fit_mle(fam, sample, cfg, cache)
    ranked = sorted(results, key=lambda fam: results[fam].neg2_log_lik)
    assert [f.value for f in ranked] == ["BGL", "LogN", "BW", "BE", "BL", "GAM", "GL", "W", "L"]


def test_bgl_percentile_bias_80m():
    sample = _slice(80, (2010, 2020))
    result = fit_mle(Family.BGL, sample, FitConfig())
    assert percentile_bias(result.spec, sample, 0.95).bias == pytest.approx(0.10, abs=0.05)
    assert percentile_bias(result.spec, sample, 0.99).bias == pytest.approx(-0.28, abs=0.05)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
