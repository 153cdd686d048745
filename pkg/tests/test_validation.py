from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hermite_wavelet import validation as V
from hermite_wavelet.errors import DomainError, InsufficientLevelsError


@given(st.floats(-3, 3), st.floats(-5, 5))
def test_fit_slope_exact_line(a, b):
    x = np.arange(2, 8)
    s, c, r2 = V.fit_slope(x, a * x + b)
    assert s == pytest.approx(a, abs=1e-9) and c == pytest.approx(b, abs=1e-8)


def test_fit_slope_needs_points():
    with pytest.raises(InsufficientLevelsError):
        V.fit_slope([1.0], [2.0])


@pytest.mark.parametrize("h,theory", [(0.7, -0.2), ((0.8, 0.85), -0.15),
                                      ((0.9, 0.9, 0.9), -0.2)])
def test_theory_slope(h, theory):
    rep = V._rate_report("approx", V.HurstVector.parse(h), [2, 3, 4, 5],
                         [1.0, 0.5, 0.25, 0.125], 64, 0.15, False, {}, False)
    assert rep.theory_slope == pytest.approx(theory, abs=1e-12)
    assert rep.fitted_slope == pytest.approx(-1.0)
    # decay faster than the bound: accepted one-sided, outside the two-sided band
    assert rep.passed and not rep.within_band
    assert rep.steeper_by == pytest.approx(theory + 1.0)


def test_rate_report_slow_decay_fails():
    rep = V._rate_report("approx", V.HurstVector.parse(0.7), [2, 3, 4, 5],
                         [1.0, 1.0, 1.0, 1.0], 64, 0.15, False, {}, False)
    assert not rep.passed


def test_rate_requires_levels_and_replicas():
    with pytest.raises(InsufficientLevelsError):
        V.rate_test(0.7, J_range=range(2, 5), replicas=64)
    with pytest.raises(DomainError):
        V.rate_test(0.7, J_range=range(2, 6), replicas=8)


def test_rate_small_run_reproducible():
    a = V.rate_test(0.7, J_range=range(2, 6), replicas=32, quick=True)
    b = V.rate_test(0.7, J_range=range(2, 6), replicas=32, quick=True, threads=4)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    assert a.quick and a.fitted_slope < 0 and a.r_squared > 0.9
    assert "proxy" in a.to_dict() and a.to_text().startswith("[")


def test_selfsim_single_time():
    with pytest.raises(InsufficientLevelsError):
        V.selfsimilarity_test(0.7, ts=(1.0,), replicas=10)


def test_selfsim_report_only_for_d2():
    rep = V.selfsimilarity_test((0.8, 0.85), replicas=40, J=3)
    assert rep.passed is None and rep.checks[0]["target"] == pytest.approx(1.3)


def test_fbm_covariance_small():
    rep = V.fbm_covariance_test(0.7, J=4, replicas=400, quick=True)
    assert rep.zero_column_max == 0.0
    assert rep.fitted_c > 0 and len(rep.times) == 5


def test_deterministic_suites():
    for rep in (V.farima_suite(), V.combinatorics_suite(), V.meyer_suite()):
        assert rep.passed, rep.to_text()


def test_chaos_route_suite_small():
    rep = V.chaos_route_suite(cases=50)
    assert rep.passed, rep.to_text()
