"""Level-coupled FARIMA fields ``Z^{(delta)}_{J,k}``.

The scaling variates of consecutive levels are tied by the orthonormal
synthesis step

    g^phi_{J+1} = h * up(g^phi_J) + w * up(g^psi_J)

where ``h`` and ``w`` are the Meyer low- and high-pass filters.  Applying
``(1 - B)^{-delta}`` on both sides gives a synthesis step acting directly on
FARIMA values,

    Z_{J+1} = u * up(Z_J) + v * up(g^psi_J),
    U(w) = (1 + e^{-iw})^delta H(w),   V(w) = (1 - e^{-iw})^{-delta} W(w),

with smooth transfer functions (``H`` vanishes near ``pi`` and ``W`` near
``0``), hence rapidly decaying taps.  Starting from an exact joint draw of
the FARIMA values at a coarse level ``J0`` over a fixed window, every finer
level is a deterministic function of that draw and of ``g^psi_{j,.}``,
``J0 <= j < J``.  Paths at different ``J`` therefore share one underlying
Brownian motion, which is what successive-difference rate tests need.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.linalg import cholesky, eigh

from .errors import DomainError
from .farima import farima_covariance_lags, farima_sequence
from .field import GaussianField
from .meyer_frac import DEFAULT_TAPER_ORDER, meyer_scaling_fourier, meyer_wavelet_fourier

__all__ = ["synthesis_filters", "farima_filters", "upsample_filter", "FarimaPyramid",
           "covariance_block"]

DEFAULT_TAPS = 128


@functools.lru_cache(maxsize=8)
def synthesis_filters(taper_order: int = DEFAULT_TAPER_ORDER, M: int = 8192):
    """Transfer functions ``H(w)``, ``W(w)`` sampled on ``2 pi fftfreq(M)``.

    ``H(w) = sum_n h_n e^{-inw}`` with ``phi(x/2)/sqrt(2) = sum h_n phi(x-n)``
    and likewise ``W`` for the wavelet.
    """
    w = 2 * np.pi * np.fft.fftfreq(M)
    H = 2 * np.pi * np.sqrt(2) * meyer_scaling_fourier(2 * w, taper_order) * meyer_scaling_fourier(w, taper_order)
    W = np.zeros(M, dtype=complex)
    for m in (-1, 0, 1):
        wm = w + 2 * np.pi * m
        W += (2 * np.pi * np.sqrt(2) * meyer_wavelet_fourier(2 * wm, taper_order)
              * meyer_scaling_fourier(wm, taper_order))
    return w, H.astype(complex), W


def _taps(transfer: np.ndarray, F: int) -> np.ndarray:
    # a_n = (1/2pi) int A(w) e^{inw} dw  for n = -F..F
    a = np.fft.ifft(transfer)
    if np.abs(a.imag).max() > 1e-12:
        raise ArithmeticError("filter taps are not real")
    a = a.real
    return np.concatenate([a[-F:], a[: F + 1]])


@functools.lru_cache(maxsize=64)
def farima_filters(delta: float, F: int = DEFAULT_TAPS, taper_order: int = DEFAULT_TAPER_ORDER):
    """Taps ``u_n``, ``v_n`` (``n = -F..F``) of the FARIMA synthesis step."""
    w, H, W = synthesis_filters(taper_order)
    u = (1 + np.exp(-1j * w)) ** delta * H
    with np.errstate(divide="ignore", invalid="ignore"):
        fac = (1 - np.exp(-1j * w)) ** (-delta)
    v = np.where(w == 0, 0.0, fac) * W
    return _taps(u, F), _taps(v, F)


def upsample_filter(x: np.ndarray, lo: int, taps: np.ndarray, out_lo: int, out_hi: int) -> np.ndarray:
    """``y_n = sum_k taps[n - 2k] x_k`` for ``n`` in ``[out_lo, out_hi]``.

    ``x`` holds ``x_lo, x_{lo+1}, ...`` along the last axis; ``taps`` are
    indexed ``-F..F``.
    """
    F = (taps.size - 1) // 2
    x = np.atleast_2d(x)
    up = np.zeros((x.shape[0], 2 * x.shape[1] - 1))
    up[:, ::2] = x
    base = 2 * lo - F
    a, b = out_lo - base, out_hi - base + 1
    out = np.empty((x.shape[0], out_hi - out_lo + 1))
    for r in range(x.shape[0]):
        out[r] = np.convolve(up[r], taps)[a:b]
    return out


def covariance_block(deltas, lo: int, hi: int) -> np.ndarray:
    """Joint covariance of ``(Z^{deltas[0]}_k, Z^{deltas[1]}_k, ...)`` for
    ``k = lo..hi``, blocks ordered by ``deltas``."""
    n = hi - lo + 1
    m = len(deltas)
    C = np.empty((m * n, m * n))
    lags = np.arange(-(n - 1), n)
    for a in range(m):
        for b in range(a, m):
            vals = farima_covariance_lags(deltas[a], deltas[b], lags)
            idx = np.arange(n)
            blk = vals[(idx[:, None] - idx[None, :]) + n - 1]
            C[a * n:(a + 1) * n, b * n:(b + 1) * n] = blk
            C[b * n:(b + 1) * n, a * n:(a + 1) * n] = blk.T
    return C


@functools.lru_cache(maxsize=16)
def _coarse_factor(deltas: tuple, lo: int, hi: int):
    """Square root ``L`` with ``L L^T = C`` for the coarse covariance.

    A single FARIMA block is well conditioned and uses Cholesky.  Blocks for
    several ``delta`` are nearly singular (each sequence is almost a filter
    of the others), so a clipped eigendecomposition is used instead.
    """
    C = covariance_block(deltas, lo, hi)
    if len(deltas) == 1:
        return cholesky(C, lower=True), "cholesky"
    lam, V = eigh(C)
    return V * np.sqrt(np.clip(lam, 0, None)), "eigh"


class FarimaPyramid:
    """Generator of ``Z^{(delta)}_{J,k}`` for several ``delta`` at once.

    Parameters
    ----------
    deltas : iterable of float
        Memory parameters (duplicates are merged).
    T : float
        Time horizon; the level-``J`` window covers ``[-margin, 2^J T + margin]``.
    margin : int
        Extra indices on both sides at every level.
    J0 : int
        Coarse level with an exact joint draw.
    coarse : {"exact", "truncated"}
        ``"exact"`` draws the coarse window from the exact joint covariance;
        ``"truncated"`` uses ``farima_sequence`` with lookback ``P`` on the
        scaling stream at level ``J0``.
    """

    def __init__(self, deltas, T: float, margin: int = 64, J0: int = 0,
                 coarse: str = "exact", P: int | None = None, F: int = DEFAULT_TAPS,
                 taper_order: int = DEFAULT_TAPER_ORDER):
        self.deltas = tuple(sorted(set(float(d) for d in deltas)))
        if any(not 0 <= d < 0.5 for d in self.deltas):
            raise DomainError("pyramid deltas must lie in [0, 1/2)")
        if coarse not in ("exact", "truncated"):
            raise DomainError(f"unknown coarse generator {coarse!r}")
        if coarse == "truncated" and P is None:
            raise DomainError("truncated coarse generator needs P")
        self.T, self.margin, self.J0, self.coarse, self.P, self.F = float(T), int(margin), int(J0), coarse, P, int(F)
        self.taper_order = taper_order
        # lo_J = 2 lo_{J-1} + F keeps every window valid for the next level
        self.lo0 = -(self.F + self.margin)
        self.hi0 = int(math.ceil(self.T * 2.0**self.J0)) + self.F + self.margin

    def window(self, J: int):
        if J < self.J0:
            raise DomainError(f"J={J} below the coarse level {self.J0}")
        lo, hi = self.lo0, self.hi0
        for _ in range(J - self.J0):
            lo, hi = 2 * lo + self.F, 2 * hi - self.F
        return lo, hi

    def meta(self) -> dict:
        return {"J0": self.J0, "coarse": self.coarse, "P": self.P, "taps": self.F,
                "margin": self.margin, "coarse_window": [self.lo0, self.hi0]}

    def _coarse(self, fields):
        lo, hi = self.lo0, self.hi0
        n = hi - lo + 1
        out = {}
        if self.coarse == "exact":
            Lf, _ = _coarse_factor(self.deltas, lo, hi)
            Zs = np.stack([Lf @ f.normals("coarse", self.J0, 0, Lf.shape[1]) for f in fields])
            for a, dl in enumerate(self.deltas):
                out[dl] = Zs[:, a * n:(a + 1) * n]
        else:
            for dl in self.deltas:
                out[dl] = np.stack([farima_sequence(f, dl, (lo, hi), P=self.P, level=self.J0)
                                    for f in fields])
        return out

    def levels(self, fields, J: int):
        """Return ``(lo, {delta: array (R, hi - lo + 1)})`` at level ``J``.

        ``fields`` is a list of :class:`GaussianField` (one per replica).
        """
        if isinstance(fields, GaussianField):
            fields = [fields]
        Z = self._coarse(fields)
        lo, hi = self.lo0, self.hi0
        for j in range(self.J0, J):
            nlo, nhi = 2 * lo + self.F, 2 * hi - self.F
            gpsi = np.stack([f.psi(j, np.arange(lo, hi + 1)) for f in fields])
            for dl in self.deltas:
                u, v = farima_filters(dl, self.F, self.taper_order)
                Z[dl] = (upsample_filter(Z[dl], lo, u, nlo, nhi)
                         + upsample_filter(gpsi, lo, v, nlo, nhi))
            lo, hi = nlo, nhi
        return lo, Z
