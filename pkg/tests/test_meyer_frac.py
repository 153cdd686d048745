from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_wavelet import meyer_frac as mf
from hermite_wavelet.errors import BudgetError, DomainError, ResolutionError
from hermite_wavelet.farima import gamma_coeffs, tail_constant

INV = 1 / np.sqrt(2 * np.pi)


# --- Fourier profiles -------------------------------------------------------

def test_scaling_fourier_pinned_values():
    assert mf.meyer_scaling_fourier(5.0) == 0.0
    assert mf.meyer_scaling_fourier(0.0) == pytest.approx(INV, abs=1e-15)
    assert mf.meyer_scaling_fourier(2 * np.pi / 3) == pytest.approx(INV, abs=1e-15)
    # continuity across the flat-band boundary
    eps = 1e-9
    assert mf.meyer_scaling_fourier(2 * np.pi / 3 + eps) == pytest.approx(INV, abs=1e-12)


def test_scaling_integral_is_one():
    phi = mf.build_scaling_table()
    # exact up to the tail of phi cut off at |x| = R
    assert phi.integral() == pytest.approx(1.0, abs=1e-7)


def test_wavelet_fourier_pinned_values():
    assert mf.meyer_wavelet_fourier(0.5) == 0
    assert mf.meyer_wavelet_fourier(9.0) == 0
    v = mf.meyer_wavelet_fourier(np.pi)
    # golden value: |psi^(pi)| = (2pi)^{-1/2} cos(pi/2 nu(1/2)) with nu(1/2) = 1/2
    assert abs(v) == pytest.approx(INV * np.cos(np.pi / 4), rel=1e-12)
    assert v == pytest.approx(np.exp(-1j * np.pi / 2) * abs(v), abs=1e-14)


def test_classical_taper_order_three():
    x = np.linspace(0, 1, 11)
    assert np.allclose(mf.taper(x, 3), x**4 * (35 - 84 * x + 70 * x**2 - 20 * x**3), atol=1e-13)


@given(st.floats(0, 1), st.integers(1, 9))
def test_taper_symmetry(x, order):
    assert mf.taper(x, order) + mf.taper(1 - x, order) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(-20, 20, allow_nan=False))
def test_profiles_conjugate_symmetric(xi):
    for f in (mf.meyer_scaling_fourier, mf.meyer_wavelet_fourier,
              lambda z: mf.fractional_primitive_fourier(0.7, z),
              lambda z: mf.fractional_scaling_fourier(0.3, z)):
        a, b = complex(f(xi)), complex(f(-xi))
        assert a == pytest.approx(b.conjugate(), abs=1e-14)


@given(st.floats(-20, 20, allow_nan=False))
def test_support_zero_outside(xi):
    if abs(xi) > 4 * np.pi / 3:
        assert mf.meyer_scaling_fourier(xi) == 0
        assert mf.fractional_scaling_fourier(0.25, xi) == 0
    if abs(xi) > 8 * np.pi / 3 or abs(xi) < 2 * np.pi / 3:
        assert mf.meyer_wavelet_fourier(xi) == 0


@settings(max_examples=50)
@given(st.floats(-0.45, 0.45), st.floats(-0.45, 0.45))
def test_multiplier_composition(d1, d2):
    xi = np.linspace(-4.2, 4.2, 401)
    lhs = mf.fractional_scaling_fourier(d1, xi) * mf.delta_multiplier(d2, xi)
    rhs = mf.fractional_scaling_fourier(d1 + d2, xi)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_fourier_profile_object():
    p = mf.fourier_profile("psi_h", 0.8, n=4097)
    assert p.support == (-8 * np.pi / 3, 8 * np.pi / 3)
    assert np.all(p.values[np.abs(p.xi_grid) < 2 * np.pi / 3] == 0)
    with pytest.raises(DomainError):
        mf.fourier_profile("nope")


# --- tables ----------------------------------------------------------------

def test_fractional_primitive_half_is_psi():
    psi = mf.build_wavelet_table()
    t = mf.build_fractional_primitive(0.5)
    assert np.max(np.abs(t.samples - psi.samples)) < 1e-14


def test_fractional_primitive_mean_zero_and_decay():
    t = mf.build_fractional_primitive(0.7)
    assert abs(t.integral()) < 1e-7
    assert t.tail_certified and t.tail_L == 8
    w = np.abs(t.samples) * (3 + np.abs(t.x)) ** 8
    assert np.isfinite(w.max()) and w.max() <= t.tail_c * (1 + 1e-12)


def test_fractional_scaling_zero_is_phi():
    phi = mf.build_scaling_table()
    t = mf.build_fractional_scaling(0.0)
    assert np.max(np.abs(t.samples - phi.samples)) < 1e-14


@pytest.mark.parametrize("delta", [0.25, 1.0, -0.3])
def test_fractional_scaling_integral(delta):
    # Phi_Delta^(delta)^(0) = phi^(0) so the integral stays 1
    assert mf.build_fractional_scaling(delta).integral() == pytest.approx(1.0, abs=1e-7)


def test_fractional_scaling_support():
    xi = np.linspace(-20, 20, 40001)
    v = mf.fractional_scaling_fourier(0.75 - 0.5, xi)
    assert np.all(v[np.abs(xi) > 4 * np.pi / 3] == 0)


def test_orthonormality():
    r = mf.orthonormality_residuals()
    assert max(r["phi_phi"], r["phi_psi"], r["psi_psi"]) < 1e-6


def test_parseval():
    assert mf.parseval_residual() < 1e-4


def test_eval_node_and_outside():
    t = mf.build_fractional_primitive(0.8)
    i = 5000
    assert mf.eval(t, t.x[i]) == pytest.approx(t.samples[i], abs=1e-15)
    assert mf.eval(t, t.R + 1) == 0.0


def test_eval_midpoint_refinement():
    coarse = mf.build_fractional_primitive(0.8, R=16.0, dx=2**-6)
    fine = mf.build_fractional_primitive(0.8, R=16.0, dx=2**-7)
    mid = coarse.x[:-1] + coarse.dx / 2
    mid = mid[np.abs(mid) < 8]
    err = np.max(np.abs(coarse(mid) - fine.samples[np.searchsorted(np.round(fine.x, 12), np.round(mid, 12))]))
    assert err <= max(coarse.interp_error, 1e-12) * 10


def test_resolution_error():
    with pytest.raises(ResolutionError):
        mf.build_scaling_table(dx=1.0)


def test_table_immutable():
    t = mf.build_scaling_table()
    with pytest.raises(ValueError):
        t.samples[0] = 1.0


def test_binary_round_trip(tmp_path):
    t = mf.build_fractional_scaling(0.3)
    mf.dump_table(t, tmp_path / "a.tab")
    u = mf.load_table(tmp_path / "a.tab")
    assert u.samples.tobytes() == t.samples.tobytes()
    assert (u.R, u.dx, u.tail_L) == (t.R, t.dx, t.tail_L)
    mf.dump_table(u, tmp_path / "b.tab")
    assert (tmp_path / "a.tab").read_bytes() == (tmp_path / "b.tab").read_bytes()


def test_csv_round_trip(tmp_path):
    t = mf.build_fractional_primitive(0.9, R=4.0, dx=2**-4)
    mf.dump_table_csv(t, tmp_path / "t.csv")
    u = mf.load_table_csv(tmp_path / "t.csv")
    assert np.array_equal(u.samples, t.samples)


# --- Phi^(-delta) ------------------------------------------------------------

def test_phi_minus_small_delta_is_phi():
    phi = mf.build_scaling_table(dx=2**-4)
    t = mf.build_phi_minus_delta(1e-6, dx=2**-4)
    assert np.max(np.abs(t.samples - mf.eval(phi, t.x))) <= 1e-4


def test_phi_minus_two_routes():
    t = mf.build_phi_minus_delta(0.25, dx=2**-4)
    x = np.array([-10.0, -3.5, -1.0, 0.0, 0.75, 2.0, 5.0])
    four = mf.phi_minus_delta_fourier_eval(0.25, x)
    assert np.max(np.abs(mf.eval(t, x) - four)) < 1e-6


def test_phi_minus_slow_left_tail():
    delta = 0.25
    t = mf.build_phi_minus_delta(delta, dx=2**-4)
    P = 24
    v = float(mf.eval(t, -P))
    # Phi(-P) ~ sum_p gamma_p phi(p - P) ~ gamma_P for a slowly varying gamma
    assert v / (tail_constant(delta) * P ** (delta - 1)) == pytest.approx(1.0, abs=0.05)
    assert abs(v) > 1e-3          # far from the fast-decaying phi


def test_phi_minus_domain_and_budget():
    with pytest.raises(DomainError):
        mf.build_phi_minus_delta(0.6)
    with pytest.raises(BudgetError):
        mf.build_phi_minus_delta(0.45, tol=1e-12)


def test_phi_minus_inner_matches_covariance():
    from hermite_wavelet.farima import farima_covariance
    for d1, d2, lag in [(0.3, 0.3, 0), (0.3, 0.35, 2), (0.35, 0.3, -1)]:
        assert mf.phi_minus_delta_inner(d1, d2, lag) == pytest.approx(
            farima_covariance(d1, d2, lag), abs=1e-7)
