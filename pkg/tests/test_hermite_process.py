from __future__ import annotations

import json
import warnings

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import stats

from hermite_wavelet import hermite_process as hp
from hermite_wavelet.errors import AdmissibilityError, BudgetError, DomainError
from hermite_wavelet.field import GaussianField
from hermite_wavelet.validation import replica_fields


# --- Hurst vectors -----------------------------------------------------------

def test_hurst_vector_parse_and_exponents():
    hv = hp.HurstVector.parse("0.8,0.85")
    assert hv.d == 2 and hv.H == 0.65
    assert hv.rate_exponent == pytest.approx(0.15)
    assert hp.self_similarity_exponent(0.7) == 0.7
    assert hp.self_similarity_exponent((0.8, 0.85)) == 0.65


@pytest.mark.parametrize("h", [(0.4,), (0.4, 0.9), (1.0,), (0.6, 0.6)])
def test_hurst_vector_rejects(h):
    with pytest.raises(AdmissibilityError, match="Hermite admissibility condition"):
        hp.HurstVector(h)


@given(st.integers(1, 5), st.floats(1e-6, 0.4))
def test_H_boundary(d, eps):
    # sum h = d - 1/2 + eps gives H = 1/2 + eps
    h = [1 - (0.5 - eps) / d] * d
    assert hp.self_similarity_exponent(h) == pytest.approx(0.5 + eps, abs=1e-9)
    assert 0.5 < hp.self_similarity_exponent(h) < 1


# --- kernel oracle -----------------------------------------------------------

def test_kernel_diagonal_infinite():
    assert hp.kernel_oracle((0.8, 0.85), 1.0, [0.2, 0.2]) == np.inf


def test_kernel_trivial():
    assert hp.kernel_oracle((0.8, 0.85), 0.0, [-1, -2]) == 0.0
    assert hp.kernel_oracle((0.8, 0.85), 1.0, [1.0, 2.0]) == 0.0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-2, 0.9), st.floats(-2, 0.9))
def test_kernel_scaling(t, x1, x2):
    assume(abs(x1 - x2) > 0.05)
    h = (0.8, 0.85)
    x = np.array([x1, x2]) * t
    a = 2.0
    k1 = hp.kernel_oracle(h, t, x)
    k2 = hp.kernel_oracle(h, a * t, a * x)
    expo = sum(h) - 3 * len(h) / 2 + 1
    assert k2 == pytest.approx(a**expo * k1, rel=1e-8, abs=1e-300)


# --- detail coefficients -----------------------------------------------------

def test_detail_trivial():
    assert hp.detail_coefficient((0.8, 0.85), [1, 2], [0, 3], 0.0) == 0.0
    assert hp.detail_coefficient((0.8, 0.85), [0, 0], [500, 500], 1.0) == 0.0


def test_detail_prefactor_identity():
    h, j, k, t = (0.8, 0.85), [1, 2], [2, 5], 1.5
    A = hp.detail_integral(h, j, k, t)
    assert hp.detail_coefficient(h, j, k, t) == 2.0 ** (1 * 0.2 + 2 * 0.15) * A


@pytest.mark.parametrize("j,k,t", [([0, 0], [0, 1], 1.0), ([1, 2], [2, 5], 1.5),
                                   ([2, 1], [1, 0], 0.7)])
def test_detail_refinement(j, k, t):
    h = (0.8, 0.85)
    a = hp.detail_integral(h, j, k, t, cells_per_unit=16)
    b = hp.detail_integral(h, j, k, t, cells_per_unit=32)
    assert abs(a - b) < 1e-8


# --- paths ---------------------------------------------------------------------

def test_approx_path_basic():
    p = hp.approx_path((0.8, 0.85), 4, 1.0, 64, GaussianField(1))
    assert p.times.size == 65 and p.values[0] == 0.0
    assert p.meta["representation"] == "approx-4" and p.meta["seed"] == 1


def test_approx_path_determinism(tmp_path):
    a = hp.approx_path(0.7, 5, 1.0, 64, GaussianField(5))
    b = hp.approx_path(0.7, 5, 1.0, 64, GaussianField(5), threads=3)
    assert a.values.tobytes() == b.values.tobytes()
    a.to_csv(tmp_path / "a.csv")
    b.to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    meta = json.loads((tmp_path / "a.meta.json").read_text())
    assert meta["h"] == [0.7] and "bands" in meta


def test_approx_band_doubling():
    f = GaussianField(8)
    h = (0.8, 0.85)
    q = hp.default_q_range(4, 1.0, 32)
    a = hp.approx_path(h, 4, 1.0, 64, f, B=16, q_range=q)
    b = hp.approx_path(h, 4, 1.0, 64, f, B=32, q_range=q)
    assert abs(a.sup_norm() - b.sup_norm()) < 1e-4 * b.sup_norm()


def test_approx_band_warning():
    with pytest.warns(hp.BandTruncationWarning):
        hp.approx_path((0.8, 0.85), 3, 1.0, 16, GaussianField(2), B=1)


def test_representations_agree():
    f = GaussianField(11)
    for h in (0.7, (0.8, 0.85)):
        a = hp.approx_path(h, 4, 1.0, 64, f)
        b = hp.abel_path(h, 4, 1.0, 64, f)
        assert np.max(np.abs(a.values - b.values)) < 1e-9 * max(1.0, a.sup_norm())
    c = hp.fbm_path(0.7, 4, 1.0, 64, f)
    a = hp.approx_path(0.7, 4, 1.0, 64, f)
    assert np.max(np.abs(a.values - c.values)) < 1e-7


def test_direct_source():
    p = hp.approx_path(0.7, 3, 1.0, 16, GaussianField(3), z_source="direct", P=512)
    assert p.values[0] == 0 and np.isfinite(p.values).all()
    with pytest.raises(DomainError):
        hp.approx_path(0.7, 3, 1.0, 16, GaussianField(3), z_source="direct")


def test_fbm_variance_nondegenerate():
    fields = replica_fields(4, 1000)
    _, v, _ = hp.fbm_paths(0.7, 5, 1.0, 32, fields)
    var = v[:, -1].var()
    assert 0 < var < np.inf


def test_fullseries_domain():
    with pytest.raises(DomainError):
        hp.fullseries_path((0.8, 0.85), 3, 2.0, 64, GaussianField(0))
    with pytest.raises(BudgetError):
        hp.fullseries_path(0.7, 8, 2.5, 64, GaussianField(0), max_terms=100)


def test_fullseries_determinism_and_meta():
    a = hp.fullseries_path((0.8, 0.85), 3, 2.5, 80, GaussianField(6))
    b = hp.fullseries_path((0.8, 0.85), 3, 2.5, 80, GaussianField(6), threads=2)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.values[0] == 0
    for key in ("pruned_outside_support", "pruned_below_threshold", "index_count"):
        assert key in a.meta


def test_fullseries_matches_fbm_in_law():
    fields = replica_fields(21, 1000)
    _, full, _ = hp.fullseries_paths(0.7, 5, 2.5, 20, fields)
    _, low, _ = hp.fbm_paths(0.7, 6, 2.5, 20, fields)
    i = 8                             # t = 1
    assert stats.ks_2samp(full[:, i], low[:, i]).pvalue > 0.01


def test_refinement_median_decreases():
    fields = replica_fields(2, 64)
    grid = 4 * 2**7
    prev = None
    diffs = []
    for J in range(2, 8):
        _, v, _ = hp.approx_paths(0.7, J, 1.0, grid, fields, warn=False)
        if prev is not None:
            diffs.append(np.median(np.abs(v - prev).max(axis=1)))
        prev = v
    assert all(a > b for a, b in zip(diffs, diffs[1:]))
