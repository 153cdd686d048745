"""Meyer wavelets, fractional primitives and fractional scaling functions.

Everything is defined through compactly supported Fourier transforms under
the unitary convention ``f^(xi) = (2 pi)^{-1/2} int exp(-i xi x) f(x) dx``
and tabulated on a uniform grid by an FFT inverse transform.

Profiles
--------
The Meyer scaling function uses the regularized incomplete-beta taper
``nu(x) = I_x(m + 1, m + 1)``, which satisfies ``nu(x) + nu(1 - x) = 1``::

    phi^(xi) = (2 pi)^{-1/2}                               |xi| <= 2 pi / 3
             = (2 pi)^{-1/2} cos(pi/2 nu(3|xi|/(2 pi) - 1))  2 pi/3 < |xi| < 4 pi/3

``m = 3`` gives the classical polynomial ``x^4 (35 - 84x + 70x^2 - 20x^3)``.
The default ``m = 7`` decays fast enough for the ``(3 + |x|)^{-8}`` tail
certification on ``[-32, 32]``.  The mother wavelet is

    psi^(xi) = exp(-i xi / 2) sqrt(2 pi) phi^(xi / 2) (phi^(xi - 2 pi) + phi^(xi + 2 pi))

which is real, symmetric about ``x = 1/2`` and supported in
``2 pi/3 <= |xi| <= 8 pi/3``.
"""

from __future__ import annotations

import functools
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import betainc, roots_jacobi, roots_legendre

from .errors import BudgetError, DomainError, ResolutionError

__all__ = [
    "TWO_PI_THIRDS",
    "FOUR_PI_THIRDS",
    "EIGHT_PI_THIRDS",
    "DEFAULT_R",
    "DEFAULT_DX",
    "DEFAULT_TAPER_ORDER",
    "FourierProfile",
    "FunctionTable",
    "taper",
    "meyer_scaling_fourier",
    "meyer_wavelet_fourier",
    "fractional_power",
    "delta_multiplier",
    "fractional_primitive_fourier",
    "fractional_scaling_fourier",
    "phi_minus_delta_fourier",
    "fourier_profile",
    "certify_tail",
    "build_from_fourier",
    "build_scaling_table",
    "build_wavelet_table",
    "build_fractional_primitive",
    "build_fractional_scaling",
    "build_phi_minus_delta",
    "phi_minus_delta_fourier_eval",
    "phi_minus_delta_inner",
    "eval",
    "orthonormality_residuals",
    "parseval_residual",
    "dump_table",
    "load_table",
    "dump_table_csv",
    "load_table_csv",
]

TWO_PI_THIRDS = 2 * np.pi / 3
FOUR_PI_THIRDS = 4 * np.pi / 3
EIGHT_PI_THIRDS = 8 * np.pi / 3
INV_SQRT_2PI = 1.0 / np.sqrt(2 * np.pi)

DEFAULT_R = 32.0
DEFAULT_DX = 2.0**-8
DEFAULT_TAPER_ORDER = 7
DEFAULT_L = 8
MIN_FREQ_NODES = 2**14
CACHE_ENV = "HERMITE_WAVELET_TABLE_CACHE"


# ---------------------------------------------------------------------------
# Fourier profiles
# ---------------------------------------------------------------------------

def taper(x, order: int = DEFAULT_TAPER_ORDER):
    """Meyer auxiliary function ``nu``: 0 below 0, 1 above 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return betainc(order + 1, order + 1, x)


def meyer_scaling_fourier(xi, taper_order: int = DEFAULT_TAPER_ORDER):
    """Fourier transform of the Meyer scaling function (real, even)."""
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    out = np.where(a <= TWO_PI_THIRDS, 1.0, 0.0)
    band = (a > TWO_PI_THIRDS) & (a < FOUR_PI_THIRDS)
    if np.any(band):
        nu = taper(3 * a[band] / (2 * np.pi) - 1, taper_order)
        out = out.astype(float)
        out[band] = np.cos(0.5 * np.pi * nu)
    return out * INV_SQRT_2PI


def meyer_wavelet_fourier(xi, taper_order: int = DEFAULT_TAPER_ORDER):
    """Fourier transform of the Meyer mother wavelet."""
    xi = np.asarray(xi, dtype=float)
    mag = (np.sqrt(2 * np.pi) * meyer_scaling_fourier(xi / 2, taper_order)
           * (meyer_scaling_fourier(xi - 2 * np.pi, taper_order)
              + meyer_scaling_fourier(xi + 2 * np.pi, taper_order)))
    return np.exp(-0.5j * xi) * mag


def fractional_power(xi, a: float):
    """``(i xi)^a`` on the principal branch, ``|xi|^a exp(i a pi/2 sgn xi)``.

    Zero at ``xi = 0`` for ``a > 0`` and left as 0 there otherwise (callers
    only use it against profiles that vanish near the origin).
    """
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    nz = xi != 0
    out[nz] = np.abs(xi[nz]) ** a * np.exp(0.5j * a * np.pi * np.sign(xi[nz]))
    if a == 0:
        out[~nz] = 1.0
    return out


def delta_multiplier(delta: float, xi):
    """``((1 - exp(-i xi)) / (i xi))^delta = exp(-i delta xi/2) sinc^delta``.

    The base ``sin(xi/2)/(xi/2)`` is positive for ``|xi| < 2 pi`` which
    contains the scaling-function support; the value is 1 at ``xi = 0``.
    Points with ``|xi| >= 2 pi`` are returned as 0.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=complex)
    ok = np.abs(xi) < 2 * np.pi
    base = np.sinc(xi[ok] / (2 * np.pi))
    out[ok] = np.exp(-0.5j * delta * xi[ok]) * base**delta
    return out


def fractional_primitive_fourier(h: float, xi, taper_order: int = DEFAULT_TAPER_ORDER):
    """Fourier transform of ``psi_h``: ``(i xi)^{1/2 - h} psi^(xi)``."""
    xi = np.asarray(xi, dtype=float)
    return fractional_power(xi, 0.5 - h) * meyer_wavelet_fourier(xi, taper_order)


def fractional_scaling_fourier(delta: float, xi, taper_order: int = DEFAULT_TAPER_ORDER):
    """Fourier transform of ``Phi_Delta^(delta)``."""
    xi = np.asarray(xi, dtype=float)
    return delta_multiplier(delta, xi) * meyer_scaling_fourier(xi, taper_order)


def phi_minus_delta_fourier(delta: float, xi, taper_order: int = DEFAULT_TAPER_ORDER):
    """Fourier transform of ``Phi^(-delta)``: ``(1 - exp(i xi))^{-delta} phi^``.

    Singular like ``|xi|^{-delta}`` at the origin; the value there is
    returned as ``inf`` for ``delta > 0``.
    """
    xi = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = (1 - np.exp(1j * xi)) ** (-delta)
    m = np.where(xi == 0, np.inf if delta > 0 else 1.0, m)
    return m * meyer_scaling_fourier(xi, taper_order)


@dataclass(frozen=True)
class FourierProfile:
    """Uniform samples of a compactly supported Fourier transform."""

    support: tuple
    xi_grid: np.ndarray
    values: np.ndarray
    convention_tag: str = "unitary, e^{-i xi x}"


def fourier_profile(kind: str, param: float = 0.0, n: int = MIN_FREQ_NODES,
                    taper_order: int = DEFAULT_TAPER_ORDER) -> FourierProfile:
    """Sample one of the profiles over its support.

    ``kind`` is one of ``"phi"``, ``"psi"``, ``"psi_h"`` (``param = h``) or
    ``"Phi_Delta"`` (``param = delta``).  Samples outside the support are
    exactly zero by construction of the profile functions.
    """
    if kind in ("phi", "Phi_Delta"):
        s = FOUR_PI_THIRDS
    elif kind in ("psi", "psi_h"):
        s = EIGHT_PI_THIRDS
    else:
        raise DomainError(f"unknown profile kind {kind!r}")
    xi = np.linspace(-s, s, n)
    fn = {
        "phi": lambda z: meyer_scaling_fourier(z, taper_order).astype(complex),
        "psi": lambda z: meyer_wavelet_fourier(z, taper_order),
        "psi_h": lambda z: fractional_primitive_fourier(param, z, taper_order),
        "Phi_Delta": lambda z: fractional_scaling_fourier(param, z, taper_order),
    }[kind]
    return FourierProfile((-s, s), xi, fn(xi))


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class FunctionTable:
    """Samples of a real function on ``x = -R, -R + dx, ..., R``.

    Attributes
    ----------
    tail_L, tail_c : the certified bound ``|f(x)| <= c (3 + |x|)^{-L}``.
    tail_certified : whether the weighted envelope decreases across the
        outermost 10% of the table (the evidence that the bound extends
        beyond ``R``).
    interp_error : a priori error estimate of the cubic interpolant.
    """

    name: str
    R: float
    dx: float
    samples: np.ndarray
    tail_L: int = DEFAULT_L
    tail_c: float = float("nan")
    tail_certified: bool = False
    interpolation_order: int = 3
    interp_error: float = float("nan")
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float64)
        self.samples.setflags(write=False)
        if not self.dx > 0:
            raise DomainError("dx must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("table samples must be finite")
        self._spline = None

    @property
    def x(self) -> np.ndarray:
        n = (self.samples.size - 1) // 2
        return np.arange(-n, n + 1) * self.dx

    @property
    def tail_bound(self):
        return (self.tail_L, self.tail_c)

    def spline(self) -> CubicSpline:
        if self._spline is None:
            self._spline = CubicSpline(self.x, self.samples, bc_type="not-a-knot")
        return self._spline

    def __call__(self, x):
        return eval(self, x)

    def integral(self) -> float:
        """Trapezoid integral of the tabulated samples."""
        return float(np.sum(self.samples) * self.dx)

    def digest(self) -> str:
        return hashlib.sha256(self.samples.tobytes()).hexdigest()

    def header(self) -> dict:
        return {
            "name": self.name, "R": self.R, "dx": self.dx, "L": self.tail_L,
            "c": self.tail_c, "tail_certified": bool(self.tail_certified),
            "interpolation_order": self.interpolation_order,
            "interp_error": self.interp_error, "params": self.params,
        }


def eval(table: FunctionTable, x):
    """Interpolated table value; 0 outside ``[-R, R]``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    inside = np.abs(x) <= table.R
    if np.any(inside):
        out[inside] = table.spline()(x[inside])
    return out


def certify_tail(x, f, L: int = DEFAULT_L, R: float | None = None):
    """Fit ``c`` in ``|f(x)| <= c (3 + |x|)^{-L}`` and test the outer band.

    Returns ``(c, certified)``.  ``c`` is the sup of the weighted function
    over the table.  The certificate requires the weighted envelope on the
    outermost 10% to stay below its interior maximum and to decrease from
    the first to the second half of that band.
    """
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    R = float(a.max()) if R is None else R
    w = (3.0 + a) ** L * np.abs(np.asarray(f, dtype=float))
    c = float(w.max())
    inner = w[a < 0.9 * R].max()
    o1 = w[(a >= 0.9 * R) & (a < 0.95 * R)].max()
    o2 = w[a >= 0.95 * R].max()
    return c, bool(o2 <= o1 and max(o1, o2) <= inner)


def _interp_error(samples, dx):
    if samples.size < 5:
        return float("nan")
    d4 = np.diff(samples, 4) / dx**4
    return float(5.0 / 384.0 * dx**4 * np.abs(d4).max())


def build_from_fourier(fhat, name: str, R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                       support: float = EIGHT_PI_THIRDS, L: int = DEFAULT_L,
                       min_nodes: int = MIN_FREQ_NODES, params: dict | None = None,
                       certify: bool = True) -> FunctionTable:
    """Tabulate the inverse transform of ``fhat`` by a single FFT.

    The inverse transform is a trapezoid rule in frequency with spacing
    ``2 pi / (M dx)``; ``M`` is a power of two large enough that the support
    holds at least ``min_nodes`` nodes and the period ``M dx`` exceeds
    ``16 R``.
    """
    if not dx < np.pi / support:
        raise ResolutionError(
            f"dx={dx} cannot resolve frequencies up to {support:.4f} (needs dx < {np.pi / support:.4f})")
    n = int(round(R / dx))
    width = 2 * support
    M = 1
    while M * dx * width / (2 * np.pi) < min_nodes or M * dx < 16 * R:
        M *= 2
    xi = 2 * np.pi * np.fft.fftfreq(M, d=dx)
    dxi = 2 * np.pi / (M * dx)
    vals = np.fft.ifft(fhat(xi)) * (M * dxi * INV_SQRT_2PI)
    f = np.concatenate([vals[-n:], vals[: n + 1]])
    samples = f.real.copy()
    x = np.arange(-n, n + 1) * dx
    c, ok = certify_tail(x, samples, L, n * dx) if certify else (float("nan"), False)
    return FunctionTable(name=name, R=n * dx, dx=dx, samples=samples, tail_L=L, tail_c=c,
                         tail_certified=ok, interp_error=_interp_error(samples, dx),
                         params=dict(params or {}, imag_max=float(np.abs(f.imag).max()),
                                     fft_size=M))


def _cache_dir():
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cached(kind: str, key: dict, builder):
    d = _cache_dir()
    if d is None:
        return builder()
    tag = hashlib.sha256(json.dumps([kind, key], sort_keys=True).encode()).hexdigest()[:20]
    path = d / f"{kind}-{tag}.tab"
    if path.exists():
        return load_table(path)
    table = builder()
    d.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".tmp{os.getpid()}")
    dump_table(table, tmp)
    os.replace(tmp, path)
    return table


@functools.lru_cache(maxsize=64)
def build_scaling_table(R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                        taper_order: int = DEFAULT_TAPER_ORDER) -> FunctionTable:
    """Table of the Meyer scaling function ``phi``."""
    key = {"R": R, "dx": dx, "taper_order": taper_order}
    return _cached("phi", key, lambda: build_from_fourier(
        lambda z: meyer_scaling_fourier(z, taper_order).astype(complex), "phi", R, dx,
        FOUR_PI_THIRDS, params=key))


@functools.lru_cache(maxsize=64)
def build_wavelet_table(R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                        taper_order: int = DEFAULT_TAPER_ORDER) -> FunctionTable:
    """Table of the Meyer mother wavelet ``psi``."""
    key = {"R": R, "dx": dx, "taper_order": taper_order}
    return _cached("psi", key, lambda: build_from_fourier(
        lambda z: meyer_wavelet_fourier(z, taper_order), "psi", R, dx,
        EIGHT_PI_THIRDS, params=key))


@functools.lru_cache(maxsize=256)
def build_fractional_primitive(h: float, R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                               taper_order: int = DEFAULT_TAPER_ORDER) -> FunctionTable:
    """Table of ``psi_h``, the fractional primitive of order ``h - 1/2``.

    Examples
    --------
    >>> t = build_fractional_primitive(0.7)
    >>> abs(t.integral()) < 1e-7
    True
    """
    h = float(h)
    key = {"h": h, "R": R, "dx": dx, "taper_order": taper_order}
    return _cached("psi_h", key, lambda: build_from_fourier(
        lambda z: fractional_primitive_fourier(h, z, taper_order), f"psi_h[{h}]", R, dx,
        EIGHT_PI_THIRDS, params=key))


@functools.lru_cache(maxsize=256)
def build_fractional_scaling(delta: float, R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                             taper_order: int = DEFAULT_TAPER_ORDER) -> FunctionTable:
    """Table of the fractional scaling function ``Phi_Delta^(delta)``."""
    delta = float(delta)
    key = {"delta": delta, "R": R, "dx": dx, "taper_order": taper_order}
    return _cached("Phi_Delta", key, lambda: build_from_fourier(
        lambda z: fractional_scaling_fourier(delta, z, taper_order), f"Phi_Delta[{delta}]",
        R, dx, FOUR_PI_THIRDS, params=key))


@functools.lru_cache(maxsize=64)
def build_phi_minus_delta(delta: float, R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                          taper_order: int = DEFAULT_TAPER_ORDER, tol: float = 1e-6,
                          P_max: int = 2**20) -> FunctionTable:
    """Table of ``Phi^(-delta)(x) = sum_p gamma_p phi(x + p)``.

    The series is cut at ``P = R + R_phi`` (every term the scaling table can
    represent on ``[-R, R]``).  The neglected remainder is bounded by the
    scaling-function tail beyond ``R_phi``, using the decay constant fitted on
    the edge of the scaling table, times ``sum_{p <= P} gamma_p``; a
    :class:`BudgetError` is raised when that bound exceeds ``tol`` or when
    ``P > P_max``.  The function is not fast decaying to the left, so no
    tail certificate is attached; ``tail_L = 1 - delta`` and ``tail_c`` are
    measured from the left edge for reference.
    """
    from .farima import gamma_coeffs

    if not 0 < delta < 0.5:
        raise DomainError("build_phi_minus_delta requires 0 < delta < 1/2")
    if not float(1 / dx).is_integer():
        raise ResolutionError("dx must be the reciprocal of an integer for the shift series")
    phi = build_scaling_table(DEFAULT_R, min(dx, DEFAULT_DX), taper_order)
    step = int(round(dx / phi.dx))
    ps = phi.samples[::step]                       # phi on the coarser grid
    Rphi = phi.R
    P = int(np.ceil(R + Rphi))
    if P > P_max:
        raise BudgetError(f"Phi^(-delta) series needs P={P} > P_max={P_max}")
    # constant fitted on the outermost 10% of the phi table, where the
    # certified envelope is decreasing
    L_phi = phi.tail_L
    xa = np.abs(phi.x)
    edge = xa >= 0.9 * Rphi
    c_edge = float(np.max((3 + xa[edge]) ** L_phi * np.abs(phi.samples[edge])))
    remainder = c_edge * (3 + Rphi) ** (1 - L_phi) / (L_phi - 1) * (1 + P) ** delta
    if remainder > tol:
        raise BudgetError(f"series remainder bound {remainder:.2e} exceeds tol={tol:.1e}")
    g = gamma_coeffs(delta, P).values
    n = int(round(R / dx))
    nphi = (ps.size - 1) // 2
    inv = int(round(1 / dx))
    out = np.zeros(2 * n + 1)
    for p in range(P + 1):
        # phi(x_i + p) for x_i = (i - n) dx lives at phi-index i - n + p*inv + nphi
        lo = -n + p * inv + nphi
        a = max(0, -lo)
        b = min(2 * n + 1, ps.size - lo)
        if a < b:
            out[a:b] += g[p] * ps[lo + a: lo + b]
    x = np.arange(-n, n + 1) * dx
    lam = 1 - delta
    left = x < -0.5 * R
    c = float(np.max(np.abs(out[left]) * (3 + np.abs(x[left])) ** lam)) if np.any(left) else float("nan")
    return FunctionTable(name=f"Phi_minus[{delta}]", R=n * dx, dx=dx, samples=out,
                         tail_L=lam, tail_c=c, tail_certified=False,
                         interp_error=_interp_error(out, dx),
                         params={"delta": delta, "R": R, "dx": dx, "P": P,
                                 "taper_order": taper_order, "remainder_bound": remainder})


def phi_minus_delta_inner(delta: float, delta2: float, lag: int, R: float = 2048.0,
                          dx: float = 0.25, taper_order: int = DEFAULT_TAPER_ORDER,
                          tol: float = 1e-5) -> float:
    """``int Phi^(-delta)(u) Phi^(-delta2)(u + lag) du`` from tables.

    Both factors are band limited to ``|xi| <= 4 pi / 3``, so the trapezoid
    sum on a grid with ``dx < 3/4`` is exact for the part of the integral
    covered by the tables.  Beyond the left edge ``Phi^(-delta)(-y)``
    behaves like ``Gamma(y + delta) / (Gamma(delta) Gamma(y + 1))`` (the
    continuous extension of ``gamma_p``) and that part is integrated in
    closed form by adaptive quadrature.  The right tails decay like the
    scaling function and are negligible.
    """
    from scipy import integrate
    from scipy.special import gamma as gamma_fn
    from scipy.special import poch

    lag = int(lag)
    f1 = build_phi_minus_delta(delta, R, dx, taper_order, tol=tol)
    f2 = f1 if delta2 == delta else build_phi_minus_delta(delta2, R, dx, taper_order, tol=tol)
    s = int(round(lag / dx))
    a, b = f1.samples, f2.samples
    n = a.size
    # a[i] pairs with b[i + s]
    lo, hi = max(0, -s), min(n, n - s)
    body = float(np.dot(a[lo:hi], b[lo + s:hi + s]) * dx)
    # u < -R_eff where the shifted pair leaves the table on the left
    edge = f1.R - max(0, -lag)

    def g(y, d):
        return poch(y + 1, d - 1) / gamma_fn(d)

    X = edge + dx / 2
    # y = X e^v turns the algebraic decay into an exponential one
    V = 40.0
    tail, _ = integrate.quad(lambda v: X * np.exp(v) * g(X * np.exp(v), delta)
                             * g(X * np.exp(v) - lag, delta2), 0, V,
                             limit=400, epsabs=1e-15, epsrel=1e-12)
    # beyond y = X e^V the leading power law is exact to double precision
    s = delta + delta2
    Y = X * np.exp(V)
    tail += Y ** (s - 1) / ((1 - s) * gamma_fn(delta) * gamma_fn(delta2))
    return body + tail


def phi_minus_delta_fourier_eval(delta: float, x, n_nodes: int = 400,
                                 taper_order: int = DEFAULT_TAPER_ORDER):
    """Evaluate ``Phi^(-delta)(x)`` by direct inverse-transform quadrature.

    Each half-line of the support is split at ``2 pi / 3``.  Near the origin
    Gauss-Jacobi nodes absorb the ``|xi|^{-delta}`` singularity; the taper
    band uses Gauss-Legendre nodes.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    # Jacobi weight (1 - t)^0 (1 + t)^{-delta} on [-1, 1] mapped to [0, 2pi/3]
    tj, wj = roots_jacobi(n_nodes, 0.0, -delta)
    a = TWO_PI_THIRDS
    u = (tj + 1) * a / 2
    wu = wj * (a / 2) ** (1 - delta)
    tl, wl = roots_legendre(n_nodes)
    v = TWO_PI_THIRDS + (tl + 1) * (FOUR_PI_THIRDS - TWO_PI_THIRDS) / 2
    wv = wl * (FOUR_PI_THIRDS - TWO_PI_THIRDS) / 2
    total = np.zeros(x.shape, dtype=complex)
    for sgn in (1.0, -1.0):
        xi_u = sgn * u
        # integrand / |xi|^{-delta} is smooth on [0, 2pi/3]
        reg = (1 - np.exp(1j * xi_u)) ** (-delta) * u**delta * INV_SQRT_2PI
        total += np.exp(1j * np.outer(x, xi_u)) @ (wu * reg)
        xi_v = sgn * v
        fv = phi_minus_delta_fourier(delta, xi_v, taper_order)
        total += np.exp(1j * np.outer(x, xi_v)) @ (wv * fv)
    return (total * INV_SQRT_2PI).real


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

def _shift_inner(f: np.ndarray, g: np.ndarray, shift: int, dx: float) -> float:
    # trapezoid of f(x) g(x - k) on the common grid, shift = k / dx samples
    if shift >= 0:
        return float(np.dot(f[shift:], g[: g.size - shift]) * dx)
    return float(np.dot(f[: f.size + shift], g[-shift:]) * dx)


def orthonormality_residuals(phi: FunctionTable | None = None, psi: FunctionTable | None = None,
                             kmax: int = 5) -> dict:
    """Max deviations of ``<phi, phi(.-k)>`` from ``delta_{0k}`` and of
    ``<phi, psi(.-k)>`` and ``<psi, psi(.-k)>`` from their targets."""
    phi = phi or build_scaling_table()
    psi = psi or build_wavelet_table()
    inv = int(round(1 / phi.dx))
    pp, pw, ww = [], [], []
    for k in range(-kmax, kmax + 1):
        s = k * inv
        pp.append(abs(_shift_inner(phi.samples, phi.samples, s, phi.dx) - (k == 0)))
        pw.append(abs(_shift_inner(phi.samples, psi.samples, s, phi.dx)))
        ww.append(abs(_shift_inner(psi.samples, psi.samples, s, phi.dx) - (k == 0)))
    return {"phi_phi": max(pp), "phi_psi": max(pw), "psi_psi": max(ww), "kmax": kmax}


def parseval_residual(f=None, jmax: int = 4, R_f: float = 12.0) -> float:
    """Relative Parseval defect of the Meyer basis for a smooth test function.

    ``f`` defaults to the Gaussian ``exp(-x^2/4)`` whose spectrum beyond
    ``2^jmax 8 pi / 3`` is below double precision.  Coefficients are computed
    by trapezoid sums over the tables.
    """
    f = f or (lambda z: np.exp(-z**2 / 4))
    phi = build_scaling_table()
    psi = build_wavelet_table()
    x = np.arange(-R_f - phi.R, R_f + phi.R + phi.dx / 2, phi.dx)
    fx = f(x)
    norm2 = float(np.sum(fx**2) * phi.dx)
    total = 0.0
    for k in range(int(-R_f - phi.R), int(R_f + phi.R) + 1):
        total += float(np.sum(fx * phi(x - k)) * phi.dx) ** 2
    for j in range(0, jmax + 1):
        s = 2.0**j
        ks = np.arange(int(-s * R_f - psi.R) - 1, int(s * R_f + psi.R) + 2)
        for k in ks:
            c = np.sum(fx * np.sqrt(s) * psi(s * x - k)) * phi.dx
            total += float(c) ** 2
    return abs(total - norm2) / norm2


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_MAGIC = b"HWTABLE1\n"


def dump_table(table: FunctionTable, path) -> None:
    """Binary dump: magic line, JSON header line, little-endian float64 samples."""
    head = json.dumps(table.header(), sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(head + b"\n")
        fh.write(table.samples.astype("<f8").tobytes())


def _from_header(h: dict, samples: np.ndarray) -> FunctionTable:
    return FunctionTable(name=h.get("name", "table"), R=float(h["R"]), dx=float(h["dx"]),
                         samples=samples, tail_L=h["L"], tail_c=float(h["c"]),
                         tail_certified=bool(h.get("tail_certified", False)),
                         interpolation_order=int(h["interpolation_order"]),
                         interp_error=float(h.get("interp_error", float("nan"))),
                         params=h.get("params", {}))


def load_table(path) -> FunctionTable:
    """Inverse of :func:`dump_table` (bit-exact)."""
    with open(path, "rb") as fh:
        if fh.readline() != _MAGIC:
            raise ValueError(f"{path} is not a table file")
        h = json.loads(fh.readline())
        samples = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    return _from_header(h, samples)


def dump_table_csv(table: FunctionTable, path) -> None:
    """CSV dump with a one-row header ``R,dx,L,c,interpolation_order``."""
    buf = io.StringIO()
    buf.write("R,dx,L,c,interpolation_order\n")
    buf.write(f"{table.R!r},{table.dx!r},{table.tail_L!r},{table.tail_c!r},{table.interpolation_order}\n")
    buf.write("x,value\n")
    for xv, fv in zip(table.x, table.samples):
        buf.write(f"{xv:.17g},{fv:.17g}\n")
    Path(path).write_text(buf.getvalue())


def load_table_csv(path, name: str = "table") -> FunctionTable:
    lines = Path(path).read_text().splitlines()
    R, dx, L, c, order = lines[1].split(",")
    vals = np.array([float(ln.split(",")[1]) for ln in lines[3:]])
    L = float(L)
    return FunctionTable(name=name, R=float(R), dx=float(dx), samples=vals,
                         tail_L=int(L) if L.is_integer() else L, tail_c=float(c),
                         interpolation_order=int(order))
