"""FARIMA(0, delta, 0) coefficients, sequences and exact covariances.

``Z_l = sum_{p >= 0} gamma_p g_{l-p}`` with ``gamma_0 = 1`` and
``gamma_{p+1} / gamma_p = (p + delta) / (p + 1)``, i.e. the power-series
coefficients of ``(1 - z)^{-delta}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gamma as gamma_fn
from scipy.special import roots_jacobi

from .csvio import write_csv
from .errors import BudgetError, DomainError
from .field import GaussianField

__all__ = [
    "GammaCoefficients",
    "GaussianField",
    "gamma_coeffs",
    "tail_constant",
    "l2_tail",
    "required_P",
    "gamma_fourier_identity_residual",
    "gamma_fourier_coefficient",
    "farima_sequence",
    "farima_covariance",
    "covariance_series",
    "farima_covariance_lags",
    "export_sequence_csv",
    "export_covariance_csv",
    "DEFAULT_P",
]

DEFAULT_P = 2**16


def _check_delta(delta: float):
    if not -0.5 < delta < 0.5:
        raise DomainError(f"delta={delta} outside (-1/2, 1/2)")


def tail_constant(delta: float) -> float:
    """``a_delta = delta / Gamma(delta + 1)`` so that ``gamma_p ~ a p^{delta-1}``."""
    return float(delta / gamma_fn(delta + 1))


@dataclass(frozen=True)
class GammaCoefficients:
    """``gamma_0, ..., gamma_P`` for one ``delta``."""

    delta: float
    values: np.ndarray
    P: int

    @property
    def tail_constant(self) -> float:
        return tail_constant(self.delta)

    def l2_tail(self) -> float:
        return l2_tail(self.delta, self.P)


def gamma_coeffs(delta: float, P: int) -> GammaCoefficients:
    """Coefficients by the ratio recurrence (no Gamma evaluation).

    Examples
    --------
    >>> gamma_coeffs(0.3, 1).values.tolist()
    [1.0, 0.3]
    """
    _check_delta(delta)
    P = int(P)
    if P < 0:
        raise DomainError("P must be nonnegative")
    p = np.arange(P, dtype=float)
    ratios = (p + delta) / (p + 1)
    vals = np.empty(P + 1)
    vals[0] = 1.0
    # cumulative product performs exactly the sequential recurrence
    np.cumprod(ratios, out=vals[1:])
    return GammaCoefficients(float(delta), vals, P)


def l2_tail(delta: float, P: int) -> float:
    """Estimate of ``sum_{p > P} gamma_p^2`` from the asymptotic form."""
    if delta == 0:
        return 0.0
    a = tail_constant(delta)
    return float(a * a * (P + 0.5) ** (2 * delta - 1) / (1 - 2 * delta))


def required_P(delta: float, tol: float, P_max: int = 2**24) -> int:
    """Smallest ``P`` whose L2 truncation tail is below ``tol``."""
    _check_delta(delta)
    if delta == 0:
        return 0
    a = tail_constant(delta)
    P = int(np.ceil(((1 - 2 * delta) * tol / (a * a)) ** (1 / (2 * delta - 1)) - 0.5))
    P = max(P, 0)
    if P > P_max:
        raise BudgetError(f"delta={delta}, tol={tol:g} needs P={P} > P_max={P_max}")
    return P


# ---------------------------------------------------------------------------
# Singular quadrature on [0, 2 pi]
# ---------------------------------------------------------------------------

def _endpoint_rule(expo: float, n: int):
    """Nodes/weights on [0, 2pi] for integrands ``~ xi^expo`` at 0 and
    ``~ (2pi - xi)^expo`` at 2pi.

    Each half is a Gauss-Jacobi rule absorbing the algebraic factor; the
    returned weights already include it, so callers pass the regularized
    integrand ``f(xi) / w(xi)`` together with ``w``.
    """
    t, w = roots_jacobi(n, 0.0, expo)               # weight (1 + t)^expo
    half = np.pi
    left = (t + 1) * half / 2                        # 0 .. pi, singular at 0
    wl = w * (half / 2) ** (1 + expo)
    right = 2 * np.pi - left                         # pi .. 2pi, singular at 2pi
    return left, wl, right, wl


def _integrate_singular(f_reg, expo: float, n: int):
    """``int_0^{2pi} f`` where ``f = f_reg_left * xi^expo`` near 0 etc.

    ``f_reg(xi, dist)`` must return ``f(xi) / dist^expo`` with ``dist`` the
    distance to the nearer singular endpoint.
    """
    left, wl, right, wr = _endpoint_rule(expo, n)
    return np.sum(wl * f_reg(left, left)) + np.sum(wr * f_reg(right, 2 * np.pi - right))


def gamma_fourier_coefficient(delta: float, p: int, quad_nodes: int = 256) -> float:
    """``(1/2pi) int_0^{2pi} exp(-i p xi) (1 - exp(i xi))^{-delta} dxi``."""
    n = max(int(quad_nodes), abs(int(p)) + 64)

    def f_reg(xi, dist):
        return np.exp(-1j * p * xi) * (1 - np.exp(1j * xi)) ** (-delta) * dist**delta

    val = _integrate_singular(f_reg, -delta, n) / (2 * np.pi)
    return val


def gamma_fourier_identity_residual(delta: float, p: int, quad_nodes: int = 256) -> float:
    """``|quadrature - gamma_p|`` with ``gamma_p = 0`` for negative ``p``."""
    _check_delta(delta)
    val = gamma_fourier_coefficient(delta, p, quad_nodes)
    target = gamma_coeffs(delta, p).values[p] if p >= 0 else 0.0
    return float(abs(val - target))


def farima_covariance(delta: float, delta2: float, lag: int, quad_nodes: int = 256) -> float:
    """``E[Z^delta_k Z^delta2_{k'}]`` for ``lag = k - k'``.

    Computed as ``(1/2pi) int_0^{2pi} exp(i lag xi) (1 - exp(-i xi))^{-delta}
    (1 - exp(i xi))^{-delta2} dxi`` with Gauss-Jacobi endpoint rules.  Equals
    ``sum_p gamma_p^delta gamma_{p - lag}^delta2``.
    """
    _check_delta(delta)
    _check_delta(delta2)
    lag = int(lag)
    if delta == 0 and delta2 == 0:
        return float(lag == 0)
    s = delta + delta2
    n = max(int(quad_nodes), abs(lag) + 64)

    def f_reg(xi, dist):
        # |1 - e^{i xi}| = 2 sin(xi/2); factor its power out analytically
        m = np.exp(1j * lag * xi) * (1 - np.exp(-1j * xi)) ** (-delta) * (1 - np.exp(1j * xi)) ** (-delta2)
        return m * dist**s

    val = _integrate_singular(f_reg, -s, n) / (2 * np.pi)
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"covariance has imaginary part {val.imag:.3e}")
    return float(val.real)


def farima_covariance_lags(delta: float, delta2: float, lags, quad_nodes: int = 256) -> np.ndarray:
    """Vectorized :func:`farima_covariance` over an array of lags."""
    _check_delta(delta)
    _check_delta(delta2)
    lags = np.atleast_1d(np.asarray(lags, dtype=np.int64))
    if delta == 0 and delta2 == 0:
        return (lags == 0).astype(float)
    s = delta + delta2
    n = max(int(quad_nodes), int(np.abs(lags).max(initial=0)) + 64)
    left, wl, right, wr = _endpoint_rule(-s, n)
    out = np.zeros(lags.shape, dtype=complex)
    for xi, w, dist in ((left, wl, left), (right, wr, 2 * np.pi - right)):
        m = (1 - np.exp(-1j * xi)) ** (-delta) * (1 - np.exp(1j * xi)) ** (-delta2) * dist**s
        out += np.exp(1j * np.outer(lags, xi)) @ (w * m)
    out /= 2 * np.pi
    if np.abs(out.imag).max() > 1e-10:
        raise ArithmeticError("covariance has a non-negligible imaginary part")
    return out.real


def covariance_series(delta: float, delta2: float, lag: int, P: int = 10**6,
                      tail: bool = True) -> float:
    """``sum_p gamma_p^delta gamma_{p-lag}^delta2`` up to ``P`` plus an
    asymptotic tail integral (independent check of :func:`farima_covariance`)."""
    lag = int(lag)
    g1 = gamma_coeffs(delta, P).values
    g2 = gamma_coeffs(delta2, P + abs(lag)).values
    p0 = max(0, lag)
    p = np.arange(p0, P + 1)
    total = float(np.sum(g1[p] * g2[p - lag]))
    if tail and delta != 0 and delta2 != 0:
        a1, a2 = tail_constant(delta), tail_constant(delta2)
        # gamma_p ~ a p^{d-1} (1 + d(d-1)/(2p)); expanding the product to
        # first order in 1/x gives a a2 x^{s-2} (1 + C/x), integrated exactly
        # from P + 1/2 (midpoint rule for the sum).
        s = delta + delta2
        C = delta * (delta - 1) / 2 + delta2 * (delta2 - 1) / 2 + (1 - delta2) * lag
        X = P + 0.5
        val = a1 * a2 * (X ** (s - 1) / (1 - s) + C * X ** (s - 2) / (2 - s))
        total += val
    return total


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

def farima_sequence(field: GaussianField, delta: float, l_range, P: int | None = None,
                    level: int = 0, tol: float | None = None, P_max: int = 2**22,
                    tag: str = "phi") -> np.ndarray:
    """``Z_l = sum_{p=0}^P gamma_p g_{l-p}`` for ``l`` in ``l_range``.

    Parameters
    ----------
    field : GaussianField
        Source of ``g`` (stream ``tag`` at ``level``).
    l_range : (int, int)
        Inclusive range ``(l0, l1)``.
    P : int, optional
        Truncation order.  When omitted it is derived from ``tol`` (default
        ``DEFAULT_P``).
    tol : float, optional
        Target for the L2 truncation tail ``sum_{p>P} gamma_p^2``.
    """
    _check_delta(delta)
    if P is None:
        P = required_P(delta, tol, P_max) if tol is not None else DEFAULT_P
    if P > P_max:
        raise BudgetError(f"farima_sequence: P={P} exceeds P_max={P_max}")
    if tol is not None and l2_tail(delta, P) > tol:
        raise BudgetError(f"farima_sequence: tail {l2_tail(delta, P):.2e} > tol={tol:g} at P={P}")
    l0, l1 = int(l_range[0]), int(l_range[1])
    g = field.normals(tag, level, l0 - P, l1 - l0 + 1 + P)
    if delta == 0:
        return g[P:].copy()
    gam = gamma_coeffs(delta, P).values
    # direct sums are cheaper (and more accurate) for short windows
    if P < 64 or (l1 - l0 + 1) * (P + 1) <= 2**22:
        return np.convolve(g, gam, mode="valid")
    return fftconvolve(g, gam, mode="valid")


def export_sequence_csv(path, l_range, values) -> None:
    ls = np.arange(int(l_range[0]), int(l_range[1]) + 1)
    write_csv(path, ["l", "Z_l"], [ls, values])


def export_covariance_csv(path, delta: float, delta2: float, lags) -> None:
    lags = np.asarray(list(lags), dtype=int)
    vals = [farima_covariance(delta, delta2, int(k)) for k in lags]
    write_csv(path, ["lag", "value"], [lags, vals])
