"""Sample paths of generalized Hermite processes.

Representations
---------------
``approx-J``
    Scaling-function approximation
    ``X_J(t) = 2^{-J(sum h - d)} sum_k sigma_{J,k} int_0^t prod Phi_l(2^J u - k_l) du``
    over the band window ``{k : k_1 in q_range, |k_l - k_1| <= B}``.
``abel-J``
    The same sum after summation by parts in ``k_1``: partial sums
    ``S_{q,n}`` of ``sigma`` against the integral windows
    ``Phi~_n(y) = G_n(y) - G_n(y - 1)``, ``G_n' = prod Phi_l(. - n_l)``.
``fbm-J``
    ``d = 1`` special case with ``Phi~ = Phi_Delta^(h + 1/2)``.
``fullseries-N``
    Truncated wavelet series over ``S_N^+ u S_N^-``, assembled through the
    factorization of the Wick product ``eps_{j,k} = :prod g^psi:``.

Every path value at ``t = 0`` is exactly 0.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn

from ._parallel import ordered_map
from .chaos import wick_product
from .csvio import write_csv, write_json
from .errors import AdmissibilityError, BudgetError, DomainError, QuadratureError
from .farima import farima_covariance_lags, farima_sequence
from .field import GaussianField
from .meyer_frac import (DEFAULT_DX, DEFAULT_R, DEFAULT_TAPER_ORDER,
                         build_fractional_primitive, build_fractional_scaling)
from .pyramid import DEFAULT_TAPS, FarimaPyramid

__all__ = [
    "HurstVector",
    "SamplePath",
    "BandTruncationWarning",
    "self_similarity_exponent",
    "kernel_oracle",
    "detail_coefficient",
    "detail_integral",
    "approx_path",
    "approx_paths",
    "abel_path",
    "abel_paths",
    "fbm_path",
    "fbm_paths",
    "fullseries_path",
    "fullseries_paths",
    "default_q_range",
    "PRUNE_THRESHOLD",
    "DEFAULT_BAND",
    "DEFAULT_GAUSS",
]

DEFAULT_BAND = 16
DEFAULT_GAUSS = 4
PRUNE_THRESHOLD = 1e-14
DEFAULT_MAX_TERMS = 5_000_000
_BLOCK_Y = 128.0          # time blocks span about this many units of y = 2^J t


class BandTruncationWarning(UserWarning):
    """The outermost retained band carries a non-negligible share of the path."""


@dataclass(frozen=True)
class HurstVector:
    """Admissible Hurst vector ``h = (h_1, ..., h_d)``.

    Every ``h_l`` must lie in ``(1/2, 1)`` and ``sum h > d - 1/2``.

    Examples
    --------
    >>> HurstVector((0.8, 0.85)).H
    0.65
    """

    h: tuple

    def __post_init__(self):
        h = tuple(float(x) for x in np.atleast_1d(self.h))
        object.__setattr__(self, "h", h)
        if not h:
            raise AdmissibilityError("Hurst vector must have at least one entry")
        bad = [x for x in h if not 0.5 < x < 1.0]
        if bad:
            raise AdmissibilityError(
                f"Hermite admissibility condition violated: every h_l must lie in (1/2, 1), got {bad}")
        if not sum(h) > len(h) - 0.5:
            raise AdmissibilityError(
                f"Hermite admissibility condition violated: sum(h)={sum(h):.6g} must exceed d - 1/2 = {len(h) - 0.5}")

    @classmethod
    def parse(cls, value) -> "HurstVector":
        """Accept a ``HurstVector``, a number, a sequence or ``"0.8,0.85"``."""
        if isinstance(value, HurstVector):
            return value
        if isinstance(value, str):
            value = [float(v) for v in value.split(",") if v.strip()]
        return cls(tuple(np.atleast_1d(value)))

    @property
    def d(self) -> int:
        return len(self.h)

    @property
    def H(self) -> float:
        return round(sum(self.h) - self.d + 1, 12)

    @property
    def deltas(self) -> tuple:
        return tuple(x - 0.5 for x in self.h)

    @property
    def rate_exponent(self) -> float:
        """``sum h - d + 1/2``, the geometric rate of the truncation bounds."""
        return sum(self.h) - self.d + 0.5


def self_similarity_exponent(h) -> float:
    """``H = sum h_l - d + 1``.

    >>> self_similarity_exponent(0.7)
    0.7
    """
    return HurstVector.parse(h).H


@dataclass
class SamplePath:
    """Values on the uniform grid ``t_i = i T / grid_n``."""

    times: np.ndarray
    values: np.ndarray
    meta: dict = dc_field(default_factory=dict)

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max())

    def to_csv(self, path) -> Path:
        """Write ``t,value`` rows and a ``<name>.meta.json`` sidecar."""
        path = Path(path)
        write_csv(path, ["t", "value"], [self.times, self.values])
        side = path.with_suffix(".meta.json")
        write_json(side, self.meta)
        return side


def _grid(T: float, grid_n: int) -> np.ndarray:
    if not T > 0:
        raise DomainError("T must be positive")
    if grid_n < 1:
        raise DomainError("grid_n must be at least 1")
    return np.arange(grid_n + 1) * (float(T) / grid_n)


def _as_fields(field):
    if isinstance(field, GaussianField):
        return [field]
    return list(field)


# ---------------------------------------------------------------------------
# Kernel oracle and detail coefficients
# ---------------------------------------------------------------------------

def kernel_oracle(h, t: float, x, quad_nodes: int = 200, tol: float = 1e-12) -> float:
    """``(1 / prod Gamma(h_l - 1/2)) int_0^t prod (s - x_l)_+^{h_l - 3/2} ds``.

    The interval ``[max(0, max x), t]`` is split at every ``x_l`` it
    contains; each piece is integrated with an algebraic endpoint weight at
    its left end (the factor whose singularity sits there), which grades
    the mesh towards the singularity.  When coinciding ``x_l`` make the
    combined exponent ``<= -1`` the kernel is infinite and ``inf`` is
    returned.

    Raises
    ------
    QuadratureError
        If the adaptive rule cannot meet ``tol`` within ``quad_nodes``
        subdivisions.
    """
    hv = HurstVector.parse(h)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != hv.d:
        raise DomainError(f"x has {x.size} entries, expected {hv.d}")
    if t < 0:
        raise DomainError("t must be nonnegative")
    expo = np.array(hv.h) - 1.5
    norm = float(np.prod([gamma_fn(v - 0.5) for v in hv.h]))
    lo = max(0.0, float(x.max()))
    if t <= lo:
        return 0.0
    cuts = sorted({lo, float(t)} | {float(v) for v in x if lo < v < t})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        sing = np.isclose(x, a, rtol=0, atol=1e-15 * max(1.0, abs(a)))
        alpha = float(expo[sing].sum()) if sing.any() else 0.0
        if alpha <= -1.0:
            # coinciding singular points: the integral diverges
            return math.inf
        others = ~sing

        def f(s, a=a, others=others):
            return float(np.prod((s - x[others]) ** expo[others]))

        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                if alpha != 0.0:
                    val, err = integrate.quad(f, a, b, weight="alg", wvar=(alpha, 0.0),
                                              limit=quad_nodes, epsabs=0, epsrel=tol)
                else:
                    val, err = integrate.quad(f, a, b, limit=quad_nodes, epsabs=0, epsrel=tol)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"kernel quadrature did not converge: {exc}") from exc
        total += val
    return total / norm


def _gauss(n: int):
    z, w = np.polynomial.legendre.leggauss(n)
    return (z + 1) / 2, w / 2


def _psi_tables(hv: HurstVector, R, dx, taper_order):
    return [build_fractional_primitive(v, R, dx, taper_order) for v in hv.h]


def detail_integral(h, j, k, t: float, cells_per_unit: int = 16, n_gauss: int = 6,
                    R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                    taper_order: int = DEFAULT_TAPER_ORDER) -> float:
    """``A_{j,k}(t) = int_0^t prod psi_{h_l}(2^{j_l} s - k_l) ds``.

    Composite Gauss rule on the part of ``[0, t]`` where every factor is
    inside its table; cells have length ``2^{-max j} / cells_per_unit``.
    """
    hv = HurstVector.parse(h)
    j = np.broadcast_to(np.asarray(j, dtype=int), (hv.d,))
    k = np.broadcast_to(np.asarray(k, dtype=int), (hv.d,))
    if t < 0:
        raise DomainError("t must be nonnegative")
    tabs = _psi_tables(hv, R, dx, taper_order)
    scale = 2.0 ** j.astype(float)
    lo = max([0.0] + [float((kk - tb.R) / sc) for kk, tb, sc in zip(k, tabs, scale)])
    hi = min([float(t)] + [float((kk + tb.R) / sc) for kk, tb, sc in zip(k, tabs, scale)])
    if hi <= lo:
        return 0.0
    cell = 1.0 / (scale.max() * cells_per_unit)
    m = max(1, int(math.ceil((hi - lo) / cell)))
    z, w = _gauss(n_gauss)
    edges = lo + (hi - lo) * np.arange(m) / m
    s = (edges[:, None] + z[None, :] * (hi - lo) / m).ravel()
    prod = np.ones_like(s)
    for tb, sc, kk in zip(tabs, scale, k):
        prod *= tb(sc * s - kk)
    return float(np.sum(prod.reshape(m, -1) @ w) * (hi - lo) / m)


def detail_coefficient(h, j, k, t: float, **kw) -> float:
    """``K_{j,k}(t) = 2^{sum j_l (1 - h_l)} A_{j,k}(t)``."""
    hv = HurstVector.parse(h)
    j = np.broadcast_to(np.asarray(j, dtype=int), (hv.d,))
    pref = 2.0 ** float(np.sum(j * (1 - np.array(hv.h))))
    return pref * detail_integral(hv, j, k, t, **kw)


# ---------------------------------------------------------------------------
# Scaling-function approximation
# ---------------------------------------------------------------------------

def default_q_range(J: int, T: float, B: int = DEFAULT_BAND, R: float = DEFAULT_R) -> tuple:
    """``(-pad, ceil(2^J T) + pad)`` with ``pad = max(B, ceil(R))``."""
    pad = max(int(B), int(math.ceil(R)))
    return (-pad, int(math.ceil(2.0**J * T)) + pad)


def _offsets(d: int, B: int) -> np.ndarray:
    """Relative offsets ``n = k_{2..d} - k_1`` in lexicographic order."""
    if d == 1:
        return np.zeros((1, 0), dtype=int)
    rng = range(-B, B + 1)
    return np.array(list(itertools.product(rng, repeat=d - 1)), dtype=int)


def _lag_covariances(deltas, B: int) -> dict:
    """``E[Z^{d_a}_k Z^{d_b}_{k'}]`` for ``|k - k'| <= 2B``, keyed by ``(d_a, d_b)``."""
    lags = np.arange(-2 * B, 2 * B + 1)
    out = {}
    for a in sorted(set(deltas)):
        for b in sorted(set(deltas)):
            out[(a, b)] = farima_covariance_lags(a, b, lags)
    return out


def _z_windows(hv, J, k_lo, k_hi, fields, z_source, P, pyramid):
    """FARIMA values ``Z^{(delta)}_{J,k}``, ``k = k_lo..k_hi``, per replica."""
    deltas = sorted(set(hv.deltas))
    if z_source == "pyramid":
        lo, Z = pyramid.levels(fields, J)
        a, b = k_lo - lo, k_hi - lo + 1
        if a < 0 or b > next(iter(Z.values())).shape[1]:
            raise DomainError("pyramid window does not cover the requested indices")
        return {dl: Z[dl][:, a:b] for dl in deltas}
    if z_source == "direct":
        return {dl: np.stack([farima_sequence(f, dl, (k_lo, k_hi), P=P, level=J) for f in fields])
                for dl in deltas}
    raise DomainError(f"unknown z_source {z_source!r}")


def _time_blocks(grid_n: int, step_y: float) -> list:
    per = max(1, int(_BLOCK_Y // max(step_y, 1e-300)))
    return [(a, min(a + per, grid_n)) for a in range(0, grid_n, per)]


def _path_setup(hv, J, T, grid_n, B, q_range, R):
    if J < 0:
        raise DomainError("J must be nonnegative")
    if B < 1:
        raise DomainError("band B must be at least 1")
    B = int(B)
    q_range = default_q_range(J, T, B, R) if q_range is None else (int(q_range[0]), int(q_range[1]))
    if q_range[0] > -B or q_range[1] < 2.0**J * T + B:
        raise DomainError(f"q_range {q_range} must cover [-B, 2^J T + B] = [{-B}, {2.0**J * T + B:g}]")
    return B, q_range


def _make_pyramid(hv, T, B, q_range, J, z_source, pyramid_opts):
    if z_source != "pyramid":
        return None
    opts = dict(pyramid_opts or {})
    F = opts.get("F", DEFAULT_TAPS)
    if "margin" not in opts:
        need = max(-(q_range[0] - B), q_range[1] + B - int(math.ceil(2.0**J * T)))
        opts["margin"] = max(0, need - F)
    return FarimaPyramid(hv.deltas, T, **opts)


def approx_paths(h, J: int, T: float, grid_n: int, fields, B: int = DEFAULT_BAND,
                 q_range=None, z_source: str = "pyramid", P: int | None = None,
                 n_gauss: int = DEFAULT_GAUSS, cells_per_unit: int = 4, threads: int = 1,
                 R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                 taper_order: int = DEFAULT_TAPER_ORDER, pyramid_opts: dict | None = None,
                 warn: bool = True):
    """Approximation paths for a batch of fields.

    Returns ``(times, values, meta)`` with ``values`` of shape
    ``(len(fields), grid_n + 1)``.

    Parameters
    ----------
    B : int
        Relative-offset band ``|k_l - k_1| <= B``.
    q_range : (int, int), optional
        Range of ``k_1``; defaults to :func:`default_q_range`.
    z_source : {"pyramid", "direct"}
        ``"pyramid"`` couples levels through a common Brownian motion (see
        :mod:`hermite_wavelet.pyramid`); ``"direct"`` draws truncated FARIMA
        sums with lookback ``P`` from the level-``J`` scaling stream.
    cells_per_unit : int
        Quadrature cells per unit of ``y = 2^J t`` (``n_gauss`` nodes each).
    """
    hv = HurstVector.parse(h)
    fields = _as_fields(fields)
    B, q_range = _path_setup(hv, J, T, grid_n, B, q_range, R)
    if z_source == "direct" and P is None:
        raise DomainError("z_source='direct' needs P")
    d = hv.d
    times = _grid(T, grid_n)
    scale = 2.0**J
    deltas = hv.deltas
    tabs = [build_fractional_scaling(dl, R, dx, taper_order) for dl in deltas]
    offs = _offsets(d, B)
    q_lo, q_hi = q_range
    k_lo, k_hi = q_lo - (B if d > 1 else 0), q_hi + (B if d > 1 else 0)
    pyr = _make_pyramid(hv, T, B, q_range, J, z_source, pyramid_opts)
    Z = _z_windows(hv, J, k_lo, k_hi, fields, z_source, P, pyr)
    covs = _lag_covariances(deltas, B) if d > 1 else {}

    step = float(T) / grid_n
    sub = max(1, int(math.ceil(step * scale * cells_per_unit)))
    z, w = _gauss(n_gauss)
    loc = ((np.arange(sub)[:, None] + z[None, :]) / sub).ravel()   # in [0, 1)
    wts = np.tile(w, sub) * (step / sub)
    Rtab = max(tb.R for tb in tabs)
    nrep = len(fields)

    def block(bounds):
        i0, i1 = bounds
        u = (np.arange(i0, i1)[:, None] + loc[None, :]) * step        # (nint, nodes)
        y = scale * u
        qa = max(q_lo, int(math.floor(y.min() - Rtab)))
        qb = min(q_hi, int(math.ceil(y.max() + Rtab)))
        inc = np.zeros((nrep, i1 - i0))
        shell = np.zeros((nrep, i1 - i0))
        if qa > qb:
            return inc, shell
        ma, mb = qa - (B if d > 1 else 0), qb + (B if d > 1 else 0)
        ms = np.arange(ma, mb + 1)
        yf = y.reshape(-1)
        basis = {}
        for dl, tb in zip(deltas, tabs):
            if dl not in basis:
                basis[dl] = tb(yf[:, None] - ms[None, :])             # (N, M)
        q_idx = np.arange(qa, qb + 1) - ma
        zoff = ma - k_lo
        for n in offs:
            sel = [q_idx] + [q_idx + int(v) for v in n]
            prod = basis[deltas[0]][:, sel[0]].copy()
            for l in range(1, d):
                prod *= basis[deltas[l]][:, sel[l]]
            beta = (prod.reshape(i1 - i0, -1, prod.shape[1]) * wts[None, :, None]).sum(axis=1)
            facs = [Z[deltas[l]][:, sel[l] + zoff] for l in range(d)]
            if d == 1:
                sig = facs[0]
            else:
                nn = np.concatenate([[0], n])
                sig = wick_product(facs, lambda a, b: covs[(deltas[a], deltas[b])][nn[a] - nn[b] + 2 * B])
            c = sig @ beta.T
            inc += c
            if d > 1 and np.abs(n).max() == B:
                shell += c
        return inc, shell

    blocks = _time_blocks(grid_n, step * scale)
    parts = ordered_map(block, blocks, threads)
    pref = 2.0 ** (-J * (sum(hv.h) - d))
    values = np.zeros((nrep, grid_n + 1))
    values[:, 1:] = pref * np.cumsum(np.concatenate([p[0] for p in parts], axis=1), axis=1)
    shell_path = np.zeros_like(values)
    shell_path[:, 1:] = pref * np.cumsum(np.concatenate([p[1] for p in parts], axis=1), axis=1)
    sup = np.abs(values).max()
    shell_ratio = float(np.abs(shell_path).max() / sup) if sup > 0 else 0.0
    if warn and d > 1 and shell_ratio > 1e-3:
        warnings.warn(f"band B={B} too small: outermost offsets carry {shell_ratio:.2e} of the "
                      "path sup-norm", BandTruncationWarning, stacklevel=2)
    meta = {
        "representation": f"approx-{J}", "J": int(J), "h": list(hv.h), "d": d, "T": float(T),
        "grid_n": int(grid_n), "B": B, "q_range": list(q_range), "z_source": z_source,
        "P": P, "n_gauss": n_gauss, "cells_per_unit": cells_per_unit,
        "pyramid": pyr.meta() if pyr is not None else None,
        "band_shell_ratio": shell_ratio,
        "tables": {t.name: t.digest() for t in tabs}, "R": R, "dx": dx,
        "taper_order": taper_order,
    }
    return times, values, meta


def _single(batch_fn, field, *args, **kw) -> SamplePath:
    if not isinstance(field, GaussianField):
        raise DomainError("expected a GaussianField")
    times, values, meta = batch_fn(*args, fields=[field], **kw)
    meta = dict(meta, seed=field.seed)
    # one place to read every truncation that shaped the path
    meta["bands"] = {k: meta[k] for k in ("B", "q_range", "sets", "P") if k in meta}
    return SamplePath(times, values[0], meta)


def approx_path(h, J: int, T: float, grid_n: int, field: GaussianField, B: int = DEFAULT_BAND,
                q_range=None, **kw) -> SamplePath:
    """Approximation process ``X_{h,J}`` on ``grid_n + 1`` points of ``[0, T]``.

    See :func:`approx_paths` for the keyword arguments.
    """
    return _single(approx_paths, field, h, J, T, grid_n, B=B, q_range=q_range, **kw)


# ---------------------------------------------------------------------------
# Summation by parts
# ---------------------------------------------------------------------------

def _antiderivative(x: np.ndarray, f: np.ndarray):
    """``G(y) = int_{-inf}^y f`` for ``f`` tabulated on ``x`` and 0 outside."""
    anti = CubicSpline(x, f, bc_type="not-a-knot").antiderivative()
    lo, hi = x[0], x[-1]

    def G(y):
        return anti(np.clip(y, lo, hi)) - anti(lo)

    return G


def _partial_sums(sig: np.ndarray, q_lo: int) -> np.ndarray:
    """``S_q`` anchored at ``S_0 = 0``: ``sum_{p=1}^q`` for ``q > 0`` and
    ``-sum_{p=q+1}^0`` for ``q < 0``; ``sig[:, i]`` holds ``sigma_{q_lo + i}``."""
    C = np.cumsum(sig, axis=1)
    return C - C[:, [-q_lo]]


def _abel_assemble(S, q_lo, q_hi, y, G, Gt):
    """Body ``sum_q S_q (Gt(y - q) - Gt(-q))`` and the boundary differences
    ``D_{b+1}``, ``D_a`` with ``D_q = G(y - q) - G(-q)``.

    ``Gt`` is ``y -> G(y) - G(y - 1)``; ``S`` has columns ``q_lo..q_hi``.
    """
    qs = np.arange(q_lo, q_hi + 1)
    E = Gt(y[:, None] - qs[None, :]) - Gt(-qs)[None, :]
    body = S @ E.T
    D_hi = G(y - (q_hi + 1)) - G(-(q_hi + 1))
    D_lo = G(y - q_lo) - G(-q_lo)
    return body, D_hi, D_lo


def abel_paths(h, J: int, T: float, grid_n: int, fields, B: int = DEFAULT_BAND, q_range=None,
               z_source: str = "pyramid", P: int | None = None, R: float = DEFAULT_R,
               dx: float = DEFAULT_DX, taper_order: int = DEFAULT_TAPER_ORDER,
               pyramid_opts: dict | None = None, boundary: bool = True, warn: bool = True):
    """Batch version of :func:`abel_path`; returns ``(times, values, meta)``."""
    hv = HurstVector.parse(h)
    fields = _as_fields(fields)
    B, q_range = _path_setup(hv, J, T, grid_n, B, q_range, R)
    if z_source == "direct" and P is None:
        raise DomainError("z_source='direct' needs P")
    d = hv.d
    times = _grid(T, grid_n)
    y = 2.0**J * times
    deltas = hv.deltas
    tabs = [build_fractional_scaling(dl, R, dx, taper_order) for dl in deltas]
    offs = _offsets(d, B)
    q_lo, q_hi = q_range
    k_lo, k_hi = q_lo - (B if d > 1 else 0), q_hi + (B if d > 1 else 0)
    pyr = _make_pyramid(hv, T, B, q_range, J, z_source, pyramid_opts)
    Z = _z_windows(hv, J, k_lo, k_hi, fields, z_source, P, pyr)
    covs = _lag_covariances(deltas, B) if d > 1 else {}
    x = tabs[0].x
    nrep = len(fields)
    body = np.zeros((nrep, grid_n + 1))
    bnd = np.zeros((nrep, grid_n + 1))
    q_idx = np.arange(q_lo, q_hi + 1) - k_lo
    for n in offs:
        prod = tabs[0].samples.copy()
        for l in range(1, d):
            prod *= tabs[l](x - n[l - 1])
        G = _antiderivative(x, prod)

        def Gt(v, G=G):
            return G(v) - G(v - 1)

        facs = [Z[deltas[0]][:, q_idx]] + [Z[deltas[l]][:, q_idx + int(n[l - 1])] for l in range(1, d)]
        if d == 1:
            sig = facs[0]
        else:
            nn = np.concatenate([[0], n])
            sig = wick_product(facs, lambda a, b: covs[(deltas[a], deltas[b])][nn[a] - nn[b] + 2 * B])
        S = _partial_sums(sig, q_lo)
        b_, D_hi, D_lo = _abel_assemble(S, q_lo, q_hi, y, G, Gt)
        body += b_
        # S_{q_lo - 1} = S_{q_lo} - sigma_{q_lo}
        S_before = S[:, [0]] - sig[:, [0]]
        bnd += S[:, [-1]] * D_hi[None, :] - S_before * D_lo[None, :]
    pref = 2.0 ** (-J * (sum(hv.h) + 1 - d))
    values = pref * (body + bnd) if boundary else pref * body
    values[:, 0] = 0.0
    sup = np.abs(values).max()
    ratio = float(pref * np.abs(bnd).max() / sup) if sup > 0 else 0.0
    if warn and ratio > 1e-3:
        warnings.warn(f"boundary terms carry {ratio:.2e} of the path sup-norm; widen q_range",
                      BandTruncationWarning, stacklevel=2)
    meta = {
        "representation": f"abel-{J}", "J": int(J), "h": list(hv.h), "d": d, "T": float(T),
        "grid_n": int(grid_n), "B": B, "q_range": list(q_range), "z_source": z_source, "P": P,
        "pyramid": pyr.meta() if pyr is not None else None, "boundary_terms": bool(boundary),
        "boundary_ratio": ratio, "tables": {t.name: t.digest() for t in tabs},
        "R": R, "dx": dx, "taper_order": taper_order,
    }
    return times, values, meta


def abel_path(h, J: int, T: float, grid_n: int, field: GaussianField, B: int = DEFAULT_BAND,
              q_range=None, **kw) -> SamplePath:
    """Approximation process in summation-by-parts form.

    ``X_J(t) = 2^{-J(sum h + 1 - d)} sum_n sum_q S_{q,n} (Phi~_n(2^J t - q)
    - Phi~_n(-q))`` plus the two boundary terms of the finite ``q`` window,
    so it equals :func:`approx_path` on the same window up to quadrature
    error.
    """
    return _single(abel_paths, field, h, J, T, grid_n, B=B, q_range=q_range, **kw)


def fbm_paths(h: float, J: int, T: float, grid_n: int, fields, P: int | None = None,
              q_range=None, z_source: str = "pyramid", R: float = DEFAULT_R,
              dx: float = DEFAULT_DX, taper_order: int = DEFAULT_TAPER_ORDER,
              pyramid_opts: dict | None = None, boundary: bool = True, warn: bool = True):
    """Batch version of :func:`fbm_path`; returns ``(times, values, meta)``."""
    h = float(np.atleast_1d(h)[0]) if np.ndim(h) else float(h)
    hv = HurstVector((h,))
    fields = _as_fields(fields)
    B, q_range = _path_setup(hv, J, T, grid_n, 1, q_range, R)
    if z_source == "direct" and P is None:
        raise DomainError("z_source='direct' needs P")
    times = _grid(T, grid_n)
    y = 2.0**J * times
    delta = h - 0.5
    win = build_fractional_scaling(h + 0.5, R, dx, taper_order)
    base = build_fractional_scaling(delta, R, dx, taper_order)
    G = _antiderivative(base.x, base.samples)
    q_lo, q_hi = q_range
    pyr = _make_pyramid(hv, T, 0, q_range, J, z_source, pyramid_opts)
    Z = _z_windows(hv, J, q_lo, q_hi, fields, z_source, P, pyr)[delta]
    S = _partial_sums(Z, q_lo)
    qs = np.arange(q_lo, q_hi + 1)
    E = win(y[:, None] - qs[None, :]) - win(-qs)[None, :]
    body = S @ E.T
    D_hi = G(y - (q_hi + 1)) - G(-(q_hi + 1))
    D_lo = G(y - q_lo) - G(-q_lo)
    bnd = S[:, [-1]] * D_hi[None, :] - (S[:, [0]] - Z[:, [0]]) * D_lo[None, :]
    pref = 2.0 ** (-J * h)
    values = pref * (body + bnd) if boundary else pref * body
    values[:, 0] = 0.0
    sup = np.abs(values).max()
    ratio = float(pref * np.abs(bnd).max() / sup) if sup > 0 else 0.0
    if warn and ratio > 1e-3:
        warnings.warn(f"boundary terms carry {ratio:.2e} of the path sup-norm; widen q_range",
                      BandTruncationWarning, stacklevel=2)
    meta = {
        "representation": f"fbm-{J}", "J": int(J), "h": [h], "d": 1, "T": float(T),
        "grid_n": int(grid_n), "q_range": list(q_range), "z_source": z_source, "P": P,
        "pyramid": pyr.meta() if pyr is not None else None, "boundary_terms": bool(boundary),
        "boundary_ratio": ratio, "tables": {win.name: win.digest(), base.name: base.digest()},
        "R": R, "dx": dx, "taper_order": taper_order,
    }
    return times, values, meta


def fbm_path(h: float, J: int, T: float, grid_n: int, field: GaussianField,
             P: int | None = None, **kw) -> SamplePath:
    """Low-frequency FBM part ``B_{h,J}(t) = 2^{-Jh} sum_k S_k (Phi(2^J t - k) - Phi(-k))``.

    ``Phi = Phi_Delta^(h + 1/2)`` and ``S_k`` are the partial sums of
    ``Z^{(h - 1/2)}_{J,.}`` anchored at ``S_0 = 0``.  Requires
    ``h in (1/2, 1)``.
    """
    return _single(fbm_paths, field, h, J, T, grid_n, P=P, **kw)


# ---------------------------------------------------------------------------
# Truncated full wavelet series
# ---------------------------------------------------------------------------

def _fullseries_sets(N: int, T: float, b: float, b2: float, g: float) -> dict:
    return {
        "jmin_plus": -int(math.floor(2.0 ** (N * b))),
        "jmax_plus": N - 1,
        "kmax_plus": int(math.floor(2.0 ** (N + 1) * T)),
        "jmin_minus": -int(math.floor(2.0 ** (N * b2))),
        "kmax_minus": int(math.floor(2.0 ** (N * g))),
    }


def fullseries_paths(h, N: int, T: float, grid_n: int, fields, b: float = 1.0,
                     b2: float = 1.0, g: float = 1.0, n_gauss: int = DEFAULT_GAUSS,
                     cells_per_unit: int = 8, max_terms: int = DEFAULT_MAX_TERMS,
                     threads: int = 1, R: float = DEFAULT_R, dx: float = DEFAULT_DX,
                     taper_order: int = DEFAULT_TAPER_ORDER):
    """Batch version of :func:`fullseries_path`; returns ``(times, values, meta)``.

    With ``U_A^l(s) = sum_{(j,k) in A} 2^{j(1-h_l)} g^psi_{j,k} psi_{h_l}(2^j s - k)``
    for one-dimensional index sets ``A``, the sum of ``eps_{j,k} K_{j,k}``
    over ``S_N^+`` is ``int_0^t (:prod_l U_A^l: - :prod_l U_{A-}^l:) ds``
    (``A`` the ``S_N^+`` axis range, ``A-`` its part with ``j < 0``) and
    over ``S_N^-`` it is ``int_0^t :prod_l U_C^l: ds``.  Wick products use
    the covariance ``sum_{(j,k)} 2^{j(2 - h_a - h_b)} psi_{h_a} psi_{h_b}``.
    """
    hv = HurstVector.parse(h)
    fields = _as_fields(fields)
    if not T > 2:
        raise DomainError(f"full series needs T > 2, got T={T}")
    if N < 1:
        raise DomainError("N must be at least 1")
    if not (b > 0 and b2 > 0 and g > 0):
        raise DomainError("b, b', g must be positive")
    d = hv.d
    sets = _fullseries_sets(N, T, b, b2, g)
    times = _grid(T, grid_n)
    tabs = _psi_tables(hv, R, dx, taper_order)
    Rt = max(tb.R for tb in tabs)
    step = float(T) / grid_n
    finest = 2.0 ** max(sets["jmax_plus"], -1)
    sub = max(1, int(math.ceil(step * finest * cells_per_unit)))
    z, w = _gauss(n_gauss)
    loc = ((np.arange(sub)[:, None] + z[None, :]) / sub).ravel()
    wts = np.tile(w, sub) * (step / sub)
    s = ((np.arange(grid_n)[:, None] + loc[None, :]) * step).reshape(-1)
    nodes = s.size

    jmin = min(sets["jmin_plus"], sets["jmin_minus"])
    js = list(range(jmin, max(sets["jmax_plus"], -1) + 1))
    plan = []
    n_box = n_support = 0
    for j in js:
        inA = sets["jmin_plus"] <= j <= sets["jmax_plus"]
        inC = sets["jmin_minus"] <= j <= -1
        kbox = max(sets["kmax_plus"] if inA else -1, sets["kmax_minus"] if inC else -1)
        if kbox < 0:
            continue
        sc = 2.0**j
        ka = max(-kbox, int(math.ceil(-Rt)))
        kb = min(kbox, int(math.floor(sc * T + Rt)))
        n_box += (sets["kmax_plus"] * 2 + 1 if inA else 0) + (sets["kmax_minus"] * 2 + 1 if inC else 0)
        if ka > kb:
            continue
        ks = np.arange(ka, kb + 1)
        n_support += ks.size * (int(inA) + int(inC))
        plan.append((j, ks, inA, inC))
    work = sum(p[1].size for p in plan) * d
    if work > max_terms:
        raise BudgetError(f"full series N={N}: {work} axis terms exceed max_terms={max_terms}")

    nrep = len(fields)
    hs = np.array(hv.h)
    # accumulators per set: U[l] (nodes, R), C[(a, b)] (nodes,)
    names = ("A", "Aneg", "C")

    def level(item):
        j, ks, inA, inC = item
        sc = 2.0**j
        G = np.stack([f.psi(j, ks) for f in fields], axis=1)          # (K, R)
        mats = []
        keep = np.ones(ks.size, dtype=bool)
        pruned = 0
        for l in range(d):
            M = tabs[l](sc * s[:, None] - ks[None, :]) * sc ** (1 - hs[l])
            mats.append(M)
        bound = np.max([np.abs(M).max(axis=0) for M in mats], axis=0)
        keep = bound >= PRUNE_THRESHOLD
        pruned = int((~keep).sum())
        res = {}
        for name, member, kmax in (("A", inA, sets["kmax_plus"]), ("Aneg", inA and j < 0, sets["kmax_plus"]),
                                   ("C", inC, sets["kmax_minus"])):
            if not member:
                continue
            sel = keep & (np.abs(ks) <= kmax)
            if not sel.any():
                continue
            Ms = [M[:, sel] for M in mats]
            U = [Ml @ G[sel] for Ml in Ms]
            C = {(a, bb): np.einsum("nk,nk->n", Ms[a], Ms[bb]) for a in range(d) for bb in range(a, d)}
            res[name] = (U, C)
        return res, pruned * (int(inA) + int(inC))

    results = ordered_map(level, plan, threads)
    acc = {nm: ([np.zeros((nodes, nrep)) for _ in range(d)], {}) for nm in names}
    pruned_total = 0
    for res, pr in results:
        pruned_total += pr
        for nm, (U, C) in res.items():
            for l in range(d):
                acc[nm][0][l] += U[l]
            for key, v in C.items():
                acc[nm][1][key] = acc[nm][1].get(key, 0.0) + v

    def wick(nm):
        U, C = acc[nm]
        def cov(a, bb):
            a, bb = min(a, bb), max(a, bb)
            return C.get((a, bb), np.zeros(nodes))[:, None]
        return wick_product(U, cov)

    integrand = wick("A") - wick("Aneg") + wick("C")                 # (nodes, R)
    inc = (integrand.reshape(grid_n, -1, nrep) * wts[None, :, None]).sum(axis=1)
    values = np.zeros((nrep, grid_n + 1))
    values[:, 1:] = np.cumsum(inc, axis=0).T
    count_plus = (2 * sets["kmax_plus"] + 1) ** d * (
        (sets["jmax_plus"] - sets["jmin_plus"] + 1) ** d - (-sets["jmin_plus"]) ** d)
    count_minus = (2 * sets["kmax_minus"] + 1) ** d * (-sets["jmin_minus"]) ** d
    meta = {
        "representation": f"fullseries-{N}", "N": int(N), "h": list(hv.h), "d": d, "T": float(T),
        "grid_n": int(grid_n), "b": b, "b_prime": b2, "g": g, "sets": sets,
        "index_count": {"S_plus": int(count_plus), "S_minus": int(count_minus)},
        "axis_terms_in_boxes": int(n_box), "axis_terms_in_support": int(n_support),
        "pruned_outside_support": int(n_box - n_support), "pruned_below_threshold": int(pruned_total),
        "prune_threshold": PRUNE_THRESHOLD, "n_gauss": n_gauss, "cells_per_unit": cells_per_unit,
        "tables": {t.name: t.digest() for t in tabs}, "R": R, "dx": dx, "taper_order": taper_order,
    }
    return times, values, meta


def fullseries_path(h, N: int, T: float, grid_n: int, field: GaussianField, b: float = 1.0,
                    b2: float = 1.0, g: float = 1.0, **kw) -> SamplePath:
    """Truncated wavelet series ``X~_{h,N}`` over ``S_N^+ u S_N^-``.

    ``S_N^+``: ``-2^{Nb} <= min j``, ``0 <= max j < N``, ``max |k| <= 2^{N+1} T``;
    ``S_N^-``: ``-2^{Nb'} <= min j <= max j < 0``, ``max |k| <= 2^{Ng}``.
    Terms whose table-based magnitude bound is below ``1e-14`` are skipped
    and counted in ``meta``.
    """
    return _single(fullseries_paths, field, h, N, T, grid_n, b=b, b2=b2, g=g, **kw)
