from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from hermite_wavelet import farima as fa
from hermite_wavelet.errors import BudgetError, DomainError
from hermite_wavelet.field import GaussianField
from hermite_wavelet.pyramid import FarimaPyramid


def test_gamma_pinned():
    assert fa.gamma_coeffs(0.3, 0).values[0] == 1.0
    assert fa.gamma_coeffs(0.3, 1).values[1] == pytest.approx(0.3, abs=1e-16)
    v = fa.gamma_coeffs(0.3, 10**4).values[-1]
    assert abs(v / (fa.tail_constant(0.3) * 1e4 ** (0.3 - 1)) - 1) < 1e-3


@given(st.floats(-0.49, 0.49))
def test_gamma_recurrence_exact(delta):
    g = fa.gamma_coeffs(delta, 200).values
    p = np.arange(200, dtype=float)
    # each stored value is the previous one times the ratio, bit for bit
    assert np.array_equal(g[1:], g[:-1] * ((p + delta) / (p + 1)))


def test_gamma_domain():
    with pytest.raises(DomainError):
        fa.gamma_coeffs(0.5, 3)


@pytest.mark.parametrize("delta,p,tol", [(0.25, 0, 1e-8), (0.25, -3, 1e-8), (0.45, 16, 1e-6)])
def test_fourier_identity_examples(delta, p, tol):
    assert fa.gamma_fourier_identity_residual(delta, p, 256) < tol


def test_fourier_identity_sweep():
    worst = max(fa.gamma_fourier_identity_residual(d, p, 256)
                for d in (0.05, 0.25, 0.45) for p in range(-8, 65))
    assert worst < 1e-6


def test_covariance_variance_closed_quadrature():
    delta = 0.3
    # independent oracle: scipy quad of |2 sin(xi/2)|^{-2 delta} with algebraic weights
    f = lambda x: (2 * np.sin(x / 2) / x) ** (-2 * delta) if x > 0 else 1.0
    v, _ = integrate.quad(lambda x: f(x) * 1.0, 0, np.pi, weight="alg", wvar=(-2 * delta, 0))
    ref = 2 * v / (2 * np.pi)
    assert fa.farima_covariance(delta, delta, 0) == pytest.approx(ref, rel=1e-9)
    # and the Gamma-function closed form Gamma(1 - 2d) / Gamma(1 - d)^2
    from scipy.special import gamma
    assert ref == pytest.approx(gamma(1 - 2 * delta) / gamma(1 - delta) ** 2, rel=1e-9)


@pytest.mark.parametrize("d1,d2,lag", [(0.3, 0.3, 0), (0.3, 0.3, 5), (0.05, 0.45, -3),
                                       (0.25, 0.4, 7), (0.45, 0.45, 1)])
def test_covariance_two_routes(d1, d2, lag):
    assert abs(fa.farima_covariance(d1, d2, lag) - fa.covariance_series(d1, d2, lag)) < 1e-6


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.45, 0.45), st.floats(-0.45, 0.45), st.integers(-20, 20))
def test_covariance_lag_symmetry(d1, d2, lag):
    a = fa.farima_covariance(d1, d2, lag)
    b = fa.farima_covariance(d2, d1, -lag)
    assert a == pytest.approx(b, abs=1e-12)


def test_covariance_lags_vectorized():
    lags = np.arange(-5, 6)
    v = fa.farima_covariance_lags(0.3, 0.2, lags)
    assert np.allclose(v, [fa.farima_covariance(0.3, 0.2, int(k)) for k in lags], atol=1e-13)


def test_required_P_and_tail():
    P = fa.required_P(0.3, 1e-3)
    assert fa.l2_tail(0.3, P) <= 1e-3 < fa.l2_tail(0.3, max(P - 2, 0))
    with pytest.raises(BudgetError):
        fa.required_P(0.45, 1e-12, P_max=10**6)


def test_sequence_white_noise(field):
    z = fa.farima_sequence(field, 0.0, (3, 20), P=50)
    assert np.array_equal(z, field.phi(0, np.arange(3, 21)))


def test_sequence_matches_direct_sum(field):
    P = 40
    z = fa.farima_sequence(field, 0.3, (0, 9), P=P)
    g = fa.gamma_coeffs(0.3, P).values
    ref = [np.dot(g, field.phi(0, l - np.arange(P + 1))) for l in range(10)]
    assert np.allclose(z, ref, atol=1e-12)


def test_sequence_moments():
    delta, P, R = 0.3, 10**5, 10**4
    root = GaussianField(7)
    vals = np.array([fa.farima_sequence(root.spawn(r), delta, (0, 1), P=P) for r in range(R)])
    for lag, (x, y) in ((0, (vals[:, 0], vals[:, 0])), (1, (vals[:, 1], vals[:, 0]))):
        prod = x * y
        se = prod.std(ddof=1) / np.sqrt(R)
        assert abs(prod.mean() - fa.farima_covariance(delta, delta, lag)) < 3 * se


def test_sequence_budget(field):
    with pytest.raises(BudgetError):
        fa.farima_sequence(field, 0.3, (0, 1), P=2**23)


def test_exports(tmp_path, field):
    z = fa.farima_sequence(field, 0.2, (0, 4), P=10)
    fa.export_sequence_csv(tmp_path / "z.csv", (0, 4), z)
    fa.export_covariance_csv(tmp_path / "c.csv", 0.2, 0.2, range(3))
    assert (tmp_path / "z.csv").read_text().splitlines()[0] == "l,Z_l"
    assert (tmp_path / "c.csv").read_text().splitlines()[0] == "lag,value"


# --- field -------------------------------------------------------------------

def test_field_determinism_and_out_of_order():
    f = GaussianField(99)
    a = f.phi(3, np.arange(-50, 50))
    b = GaussianField(99).phi(3, np.arange(-50, 50))
    assert a.tobytes() == b.tobytes()
    assert np.array_equal(f.phi(3, [17, -4]), a[[67, 46]])
    assert not np.array_equal(f.phi(3, [0]), f.psi(3, [0]))
    assert not np.array_equal(f.phi(3, [0]), f.phi(4, [0]))


def test_field_marginals():
    x = GaussianField(1).normals("phi", 0, 0, 200_000)
    assert abs(x.mean()) < 0.01 and abs(x.var() - 1) < 0.01
    assert abs(np.corrcoef(x[:-1], x[1:])[0, 1]) < 0.01


# --- level-coupled pyramid ---------------------------------------------------

def test_pyramid_covariance():
    """Pyramid values at a fine level have FARIMA covariances."""
    root = GaussianField(3)
    fields = [root.spawn(r) for r in range(4000)]
    pyr = FarimaPyramid([0.3], T=1, margin=0, F=32)
    lo, Z = pyr.levels(fields, 3)
    z = Z[0.3]
    i = -lo + 4
    for lag in (0, 1, 3):
        prod = z[:, i] * z[:, i - lag]
        se = prod.std(ddof=1) / np.sqrt(prod.size)
        assert abs(prod.mean() - fa.farima_covariance(0.3, 0.3, lag)) < 4 * se
