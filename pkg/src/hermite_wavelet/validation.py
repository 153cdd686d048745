"""Monte Carlo tests and convergence-rate regressions.

Every function takes a ``seed`` and derives one :class:`GaussianField` per
replica with ``GaussianField(seed).spawn(r)``.  Replicas are processed in
fixed chunks of :data:`CHUNK`, so results do not depend on ``threads``.

Rate tests use the successive-difference proxy ``||X_{J+1} - X_J||_inf``
(the exact process is not available) and fit
``log2(median error / J^{d/2})`` against ``J``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._parallel import chunks, ordered_map
from .chaos import (correlation, hermite, hermite_partition_coeff, hermite_poly_coeffs, mu,
                    mu_partition_route, multiset_key, pair_partitions, sigma,
                    sigma_farima_route, sigma_second_moment, sigma_truncation_tolerance)
from .errors import DomainError, InsufficientLevelsError
from .farima import (covariance_series, farima_covariance, gamma_coeffs,
                     gamma_fourier_identity_residual, tail_constant)
from .field import GaussianField
from .hermite_process import (HurstVector, approx_paths, fbm_paths, fullseries_paths)
from .meyer_frac import (FOUR_PI_THIRDS, build_fractional_primitive, build_fractional_scaling,
                         build_scaling_table, build_wavelet_table, fractional_scaling_fourier,
                         orthonormality_residuals)
from .pyramid import FarimaPyramid

__all__ = [
    "CHUNK",
    "RateReport",
    "CovarianceReport",
    "SuiteReport",
    "replica_fields",
    "fit_slope",
    "rate_test",
    "fullseries_rate_test",
    "fbm_covariance_test",
    "selfsimilarity_test",
    "chaos_moment_test",
    "meyer_suite",
    "farima_suite",
    "combinatorics_suite",
    "chaos_route_suite",
    "EPSILON_BATTERY",
]

CHUNK = 16
SLOPE_TOL = 0.15
FULLSERIES_SLOPE_TOL = 0.2
COV_SE = 3.0
MOMENT_SE = 5.0
PROXY_NOTE = "successive-difference proxy ||X_{L+1} - X_L||_inf for the unavailable exact error"


def replica_fields(seed: int, replicas: int) -> list:
    root = GaussianField(seed)
    return [root.spawn(r) for r in range(int(replicas))]


def _batched(fn, fields, threads: int = 1, chunk: int = CHUNK) -> np.ndarray:
    """Apply ``fn`` (fields -> (n, ...) array) on fixed chunks, rows in order."""
    parts = ordered_map(lambda ab: fn(fields[ab[0]:ab[1]]), chunks(len(fields), chunk), threads)
    return np.concatenate(parts, axis=0)


def fit_slope(x, y):
    """Least-squares ``(slope, intercept, r_squared)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise InsufficientLevelsError("a slope needs at least two points")
    A = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - a * x - b) ** 2)) / ss if ss > 0 else 1.0
    return float(a), float(b), r2


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@dataclass
class RateReport:
    """Outcome of a successive-difference rate regression.

    ``passed`` applies the one-sided rule ``fitted <= theory + tolerance``:
    decay faster than the theoretical upper bound is accepted and reported
    through ``steeper_by``.  ``within_band`` is the two-sided
    ``|fitted - theory| <= tolerance`` status.
    """

    kind: str
    h: list
    levels: list
    errors: list
    fitted_slope: float
    theory_slope: float
    poly_correction: bool
    replicas: int
    r_squared: float = float("nan")
    raw_slope: float = float("nan")
    raw_r_squared: float = float("nan")
    tolerance: float = SLOPE_TOL
    passed: bool = False
    within_band: bool = False
    steeper_by: float = 0.0
    monotone_median: bool = False
    proxy: str = PROXY_NOTE
    config: dict = field(default_factory=dict)
    quick: bool = False

    def to_dict(self) -> dict:
        return dict(asdict(self), name=f"{self.kind}-rate")

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.kind} rate h={self.h}: fitted slope {self.fitted_slope:+.3f} "
                f"(R^2 {self.r_squared:.3f}, raw {self.raw_slope:+.3f}) vs theory "
                f"{self.theory_slope:+.3f}, tol {self.tolerance}; two-sided band "
                f"{'met' if self.within_band else 'not met'}; levels {self.levels}, "
                f"{self.replicas} replicas")


@dataclass
class CovarianceReport:
    """One-scalar fit of ``c/2 (t^{2h} + s^{2h} - |t - s|^{2h})``."""

    h: float
    times: list
    empirical: list
    standard_errors: list
    model: list
    fitted_c: float
    fitted_c_se: float
    residuals: list
    max_abs_z: float
    diag_slope: float
    diag_slope_se: float
    diag_target: float
    zero_column_max: float
    replicas: int
    se_tolerance: float = COV_SE
    slope_tolerance: float = 0.1
    passed_covariance: bool = False
    passed_diagonal: bool = False
    passed: bool = False
    config: dict = field(default_factory=dict)
    quick: bool = False

    def to_dict(self) -> dict:
        return dict(asdict(self), name="fbm-covariance")

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] FBM covariance h={self.h}: c={self.fitted_c:.4f}+-{self.fitted_c_se:.4f}, "
                f"max |residual|/SE={self.max_abs_z:.2f} (tol {self.se_tolerance}), diagonal slope "
                f"{self.diag_slope:.3f}+-{self.diag_slope_se:.3f} vs {self.diag_target:.3f}, "
                f"{self.replicas} replicas")


@dataclass
class SuiteReport:
    """Generic list of named checks; ``passed`` is ``None`` for report-only suites."""

    name: str
    passed: bool | None
    checks: list
    config: dict = field(default_factory=dict)
    quick: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        status = {True: "PASS", False: "FAIL", None: "REPORT"}[self.passed]
        lines = [f"[{status}] {self.name}"]
        for c in self.checks:
            s = {True: "ok", False: "FAILED", None: "info"}[c.get("passed")]
            lines.append(f"    {s:6s} {c['check']}: {c.get('detail', '')}")
        return "\n".join(lines)


def _check(name, passed, detail="", **data) -> dict:
    return dict(data, check=name, passed=None if passed is None else bool(passed), detail=detail)


def _suite(name, checks, config, quick=False, report_only=False) -> SuiteReport:
    asserted = [c["passed"] for c in checks if c["passed"] is not None]
    passed = None if report_only else bool(all(asserted))
    return SuiteReport(name, passed, checks, config, quick)


# ---------------------------------------------------------------------------
# Rate regressions
# ---------------------------------------------------------------------------

def _rate_report(kind, hv, levels, errs, replicas, tol, poly_correction, config, quick):
    levels = [int(v) for v in levels]
    errs = np.asarray(errs, dtype=float)
    L = np.asarray(levels, dtype=float)
    norm = errs / L ** (hv.d / 2) if poly_correction else errs
    slope, _, r2 = fit_slope(L, np.log2(norm))
    raw, _, raw_r2 = fit_slope(L, np.log2(errs))
    theory = -hv.rate_exponent
    return RateReport(
        kind=kind, h=list(hv.h), levels=levels, errors=errs.tolist(), fitted_slope=slope,
        theory_slope=theory, poly_correction=poly_correction, replicas=int(replicas),
        r_squared=r2, raw_slope=raw, raw_r_squared=raw_r2, tolerance=tol,
        passed=bool(slope <= theory + tol), within_band=bool(abs(slope - theory) <= tol),
        steeper_by=float(max(0.0, theory - slope)),
        monotone_median=bool(np.all(np.diff(errs) < 0)), config=config, quick=quick)


def _check_levels(levels, replicas, min_replicas=32):
    levels = [int(v) for v in levels]
    if len(levels) < 4:
        raise InsufficientLevelsError(f"rate regression needs at least 4 levels, got {len(levels)}")
    if levels != list(range(levels[0], levels[0] + len(levels))):
        raise DomainError("levels must be consecutive integers")
    if replicas < min_replicas:
        raise DomainError(f"rate regression needs at least {min_replicas} replicas, got {replicas}")
    return levels


def rate_test(h, J_range=range(2, 8), replicas: int = 64, path_params: dict | None = None,
              seed: int = 0, tol: float = SLOPE_TOL, poly_correction: bool = True,
              threads: int = 1, quick: bool = False) -> RateReport:
    """Regression of ``median ||X_{J+1} - X_J||_inf`` over ``J`` in ``J_range``.

    ``path_params`` go to :func:`~hermite_wavelet.hermite_process.approx_paths`
    (``T`` defaults to 1 and ``grid_n`` to four points per unit of the
    finest ``2^J t``).  Paths at all levels share one Brownian motion
    through the level-coupled FARIMA generator.
    """
    hv = HurstVector.parse(h)
    levels = _check_levels(J_range, replicas)
    pp = dict(path_params or {})
    T = float(pp.pop("T", 1.0))
    Jtop = levels[-1] + 1
    grid_n = int(pp.pop("grid_n", int(math.ceil(4 * 2**Jtop * T))))
    fields = replica_fields(seed, replicas)
    paths = {}
    for J in levels + [Jtop]:
        paths[J] = _batched(lambda fs, J=J: approx_paths(hv, J, T, grid_n, fs, warn=False, **pp)[1],
                            fields, threads)
    errs = [float(np.median(np.abs(paths[J + 1] - paths[J]).max(axis=1))) for J in levels]
    config = {"h": list(hv.h), "J_range": levels, "replicas": replicas, "seed": seed, "T": T,
              "grid_n": grid_n, "path_params": pp, "tol": tol, "poly_correction": poly_correction}
    return _rate_report("approx", hv, levels, errs, replicas, tol, poly_correction, config, quick)


def fullseries_rate_test(h, N_range=range(2, 7), replicas: int = 64, b: float = 1.0,
                         b2: float = 1.0, g: float = 1.0, T: float = 2.5,
                         grid_n: int | None = None, seed: int = 0,
                         tol: float = FULLSERIES_SLOPE_TOL, poly_correction: bool = True,
                         threads: int = 1, quick: bool = False, **path_params) -> RateReport:
    """Regression of ``median ||X~_{N+1} - X~_N||_inf`` over ``N`` in ``N_range``."""
    hv = HurstVector.parse(h)
    levels = _check_levels(N_range, replicas)
    Ntop = levels[-1] + 1
    grid_n = int(grid_n or int(math.ceil(4 * 2 ** (Ntop - 1) * T)))
    fields = replica_fields(seed, replicas)
    paths = {}
    for N in levels + [Ntop]:
        paths[N] = _batched(lambda fs, N=N: fullseries_paths(hv, N, T, grid_n, fs, b=b, b2=b2, g=g,
                                                             **path_params)[1], fields, threads)
    errs = [float(np.median(np.abs(paths[N + 1] - paths[N]).max(axis=1))) for N in levels]
    config = {"h": list(hv.h), "N_range": levels, "replicas": replicas, "seed": seed, "T": T,
              "grid_n": grid_n, "b": b, "b_prime": b2, "g": g, "tol": tol,
              "poly_correction": poly_correction, "path_params": path_params}
    return _rate_report("fullseries", hv, levels, errs, replicas, tol, poly_correction, config,
                        quick)


# ---------------------------------------------------------------------------
# FBM covariance and self-similarity
# ---------------------------------------------------------------------------

def _grid_indices(times, ts):
    idx = []
    for t in ts:
        i = int(np.argmin(np.abs(times - t)))
        if not np.isclose(times[i], t, rtol=0, atol=1e-12):
            raise DomainError(f"t={t} is not a grid point")
        idx.append(i)
    return idx


def fbm_covariance_test(h: float = 0.7, J: int = 6, T: float = 1.0,
                        grid=(0.2, 0.4, 0.6, 0.8, 1.0), replicas: int = 10_000, seed: int = 0,
                        se_tol: float = COV_SE, slope_tol: float = 0.1, threads: int = 1,
                        quick: bool = False, **path_params) -> CovarianceReport:
    """Fit ``c`` in ``E[B(t) B(s)] = c/2 (t^{2h} + s^{2h} - |t - s|^{2h})``.

    ``c`` is the weighted least-squares fit over the ``len(grid)^2`` cells
    (weights ``1/SE^2``); residuals are compared with their replicate-level
    standard errors.  The diagonal log-log slope is compared with ``2h``.
    """
    ts = np.asarray(grid, dtype=float)
    step = float(np.min(np.diff(np.concatenate([[0.0], np.sort(ts)]))))
    grid_n = int(round(T / step))
    fields = replica_fields(seed, replicas)
    V = _batched(lambda fs: fbm_paths(h, J, T, grid_n, fs, warn=False, **path_params)[1],
                 fields, threads)
    times = np.arange(grid_n + 1) * (T / grid_n)
    idx = _grid_indices(times, ts)
    X = V[:, idx]
    n = X.shape[0]
    prods = X[:, :, None] * X[:, None, :]
    emp = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / math.sqrt(n)
    tt, ss = np.meshgrid(ts, ts, indexing="ij")
    f = 0.5 * (tt ** (2 * h) + ss ** (2 * h) - np.abs(tt - ss) ** (2 * h))
    w = 1.0 / se**2
    c = float(np.sum(w * emp * f) / np.sum(w * f * f))
    c_se = float(1.0 / math.sqrt(np.sum(w * f * f)))
    resid = emp - c * f
    z = np.abs(resid) / se
    var = np.diag(emp)
    # replicate-level jackknife (20 blocks) for the diagonal slope
    slope, _, _ = fit_slope(np.log(ts), np.log(var))
    blocks = np.array_split(np.arange(n), 20)
    jk = []
    for blk in blocks:
        keep = np.ones(n, dtype=bool)
        keep[blk] = False
        jk.append(fit_slope(np.log(ts), np.log((X[keep] ** 2).mean(axis=0)))[0])
    jk = np.array(jk)
    slope_se = float(math.sqrt((len(jk) - 1) / len(jk) * np.sum((jk - jk.mean()) ** 2)))
    zero_col = float(np.abs(V[:, 0]).max())
    pc = bool(z.max() <= se_tol)
    pdg = bool(abs(slope - 2 * h) <= slope_tol)
    return CovarianceReport(
        h=float(h), times=ts.tolist(), empirical=emp.tolist(), standard_errors=se.tolist(),
        model=(c * f).tolist(), fitted_c=c, fitted_c_se=c_se, residuals=resid.tolist(),
        max_abs_z=float(z.max()), diag_slope=float(slope), diag_slope_se=slope_se,
        diag_target=2 * float(h), zero_column_max=zero_col, replicas=int(replicas),
        se_tolerance=se_tol, slope_tolerance=slope_tol, passed_covariance=pc,
        passed_diagonal=pdg, passed=bool(pc and pdg and zero_col == 0.0),
        config={"h": h, "J": J, "T": T, "grid": ts.tolist(), "replicas": replicas, "seed": seed,
                "path_params": path_params},
        quick=quick)


def selfsimilarity_test(h, representation: str = "approx", replicas: int = 1000,
                        ts=(0.25, 0.5, 1.0, 2.0), J: int = 6, N: int = 6, seed: int = 0,
                        tol: float = 0.1, threads: int = 1, quick: bool = False,
                        **path_params) -> SuiteReport:
    """Slope of ``log Var X(t)`` against ``log t``, compared with ``2H``.

    Asserted within ``tol`` for ``d = 1``; reported only for ``d >= 2``
    (the exponent ``H = sum h - d + 1`` is a derived hypothesis there).
    The slope standard error is a 20-block jackknife over replicas.
    """
    hv = HurstVector.parse(h)
    ts = np.sort(np.asarray(ts, dtype=float))
    if ts.size < 2:
        raise InsufficientLevelsError("self-similarity regression needs at least two times")
    if replicas < 2:
        raise DomainError("need at least two replicas")
    step = float(ts[0])
    T = float(ts[-1])
    if representation == "fullseries" and T <= 2:
        T = step * (math.floor(2 / step) + 1)
    grid_n = int(round(T / step))
    fields = replica_fields(seed, replicas)
    if representation == "approx":
        fn = lambda fs: approx_paths(hv, J, T, grid_n, fs, warn=False, **path_params)[1]  # noqa: E731
        level = {"J": J}
    elif representation == "fbm":
        if hv.d != 1:
            raise DomainError("the fbm representation needs d = 1")
        fn = lambda fs: fbm_paths(hv.h[0], J, T, grid_n, fs, warn=False, **path_params)[1]  # noqa: E731
        level = {"J": J}
    elif representation == "fullseries":
        fn = lambda fs: fullseries_paths(hv, N, T, grid_n, fs, **path_params)[1]  # noqa: E731
        level = {"N": N}
    else:
        raise DomainError(f"unknown representation {representation!r}")
    V = _batched(fn, fields, threads)
    times = np.arange(grid_n + 1) * (T / grid_n)
    X = V[:, _grid_indices(times, ts)]
    var = (X**2).mean(axis=0)
    slope, _, r2 = fit_slope(np.log(ts), np.log(var))
    n = X.shape[0]
    jk = []
    for blk in np.array_split(np.arange(n), 20):
        keep = np.ones(n, dtype=bool)
        keep[blk] = False
        jk.append(fit_slope(np.log(ts), np.log((X[keep] ** 2).mean(axis=0)))[0])
    jk = np.array(jk)
    se = float(math.sqrt((len(jk) - 1) / len(jk) * np.sum((jk - jk.mean()) ** 2)))
    target = 2 * hv.H
    asserted = hv.d == 1
    ok = abs(slope - target) <= tol
    detail = (f"slope {slope:.3f} +- {se:.3f} vs 2H = {target:.3f} "
              f"({'asserted' if asserted else 'report only'}, tol {tol})")
    check = _check("log Var X(t) slope", ok if asserted else None, detail, slope=slope, se=se,
                   target=target, r_squared=r2, variances=var.tolist(), times=ts.tolist(),
                   asserted=asserted, within_tol=bool(ok))
    config = dict({"h": list(hv.h), "representation": representation, "replicas": replicas,
                   "ts": ts.tolist(), "seed": seed, "T": T, "grid_n": grid_n, "tol": tol,
                   "path_params": path_params}, **level)
    return _suite(f"selfsimilarity d={hv.d}", [check], config, quick, report_only=not asserted)


# ---------------------------------------------------------------------------
# Chaos moments
# ---------------------------------------------------------------------------

# (j, k), (r, s) pairs: equal and unequal multisets, repeated entries, mixed levels
EPSILON_BATTERY = (
    (((0,), (0,)), ((0,), (0,))),
    (((0,), (0,)), ((0,), (1,))),
    (((0,), (0,)), ((1,), (0,))),
    (((0, 0), (0, 1)), ((0, 0), (1, 0))),
    (((0, 0), (0, 1)), ((0, 0), (0, 1))),
    (((0, 0), (2, 2)), ((0, 0), (2, 2))),
    (((0, 0), (2, 2)), ((0, 0), (2, 3))),
    (((0, 1), (3, 3)), ((1, 0), (3, 3))),
    (((0, 1), (3, 3)), ((0, 1), (3, 4))),
    (((-1, 2), (0, 5)), ((2, -1), (5, 0))),
    (((0, 0, 0), (1, 2, 3)), ((0, 0, 0), (3, 1, 2))),
    (((0, 0, 0), (1, 1, 2)), ((0, 0, 0), (2, 1, 1))),
    (((0, 0, 0), (1, 1, 1)), ((0, 0, 0), (1, 1, 1))),
    (((0, 0, 0), (1, 1, 2)), ((0, 0, 0), (1, 2, 2))),
    (((0, 1, 2), (0, 0, 0)), ((2, 1, 0), (0, 0, 0))),
    (((0, 1, 2), (0, 0, 0)), ((0, 1, 2), (0, 0, 1))),
    (((0, 0), (4, 4)), ((0, 0), (4, 5))),
    (((1, 1), (0, 0)), ((1, 1), (0, 0))),
    (((1, 1), (0, 0)), ((0, 0), (0, 0))),
    (((0, 0, 1), (0, 0, 0)), ((1, 0, 0), (0, 0, 0))),
)

SIGMA_BATTERY = (((0, 0), (0, 0)), ((0, 1), (0, 1)), ((0, 1), (1, 0)), ((0, 3), (2, 1)),
                 ((0, 0), (4, 4)), ((2, -1), (0, 0)))


def _epsilon_batch(field: GaussianField, j, k, shifts: np.ndarray) -> np.ndarray:
    """``eps_{j, k + shift}`` for every shift (replicas via disjoint translates)."""
    val = np.ones(shifts.size)
    for (jj, kk), n in multiset_key(j, k):
        val *= hermite(n, field.at("psi", jj, kk + shifts))
    return val


def _moment_check(name, samples, expected, se_tol):
    n = samples.size
    m = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n))
    z = abs(m - expected) / se if se > 0 else (0.0 if m == expected else math.inf)
    return _check(name, z <= se_tol, f"mean {m:.5f} vs {expected:g}, |z| = {z:.2f}", mean=m,
                  expected=expected, se=se, z=z, samples=n)


def chaos_moment_test(battery=("hermite", "epsilon", "sigma"), seed: int = 0,
                      n_hermite: int = 10**6, eps_replicas: int = 10**5,
                      sigma_replicas: int = 20_000, sigma_h=(0.8, 0.85),
                      se_tol: float = MOMENT_SE, quick: bool = False) -> SuiteReport:
    """Empirical second moments against their analytic values.

    ``hermite``: ``E[H_m(G) H_n(G)] = delta_{mn} m!`` for ``m, n <= 4``.
    ``epsilon``: ``E[eps_{j,k} eps_{r,s}]`` against :func:`correlation` on
    :data:`EPSILON_BATTERY`; replicas are disjoint translates in ``k``
    (the ``g^psi`` are i.i.d., so translates are independent copies).
    ``sigma``: ``E[sigma_k sigma_k']`` (``d = 2``) against the isometry
    value from ``Phi^(-delta)`` inner products, with exact joint FARIMA
    draws from the coarse level of the level-coupled generator.
    """
    checks = []
    root = GaussianField(seed)
    if "hermite" in battery:
        G = root.normals("moment-hermite", 0, 0, n_hermite)
        Hs = [hermite(m, G) for m in range(5)]
        for m in range(5):
            for n in range(5):
                checks.append(_moment_check(f"E[H_{m} H_{n}]", Hs[m] * Hs[n],
                                            float(math.factorial(m)) if m == n else 0.0, se_tol))
    if "epsilon" in battery:
        stride = 64
        shifts = np.arange(eps_replicas, dtype=np.int64) * stride
        for jk, rs in EPSILON_BATTERY:
            a = _epsilon_batch(root, *jk, shifts)
            b = _epsilon_batch(root, *rs, shifts)
            checks.append(_moment_check(f"E[eps{jk} eps{rs}]", a * b,
                                        float(correlation(jk, rs)), se_tol))
    if "sigma" in battery:
        hv = HurstVector.parse(sigma_h)
        pyr = FarimaPyramid(hv.deltas, T=8.0, margin=0, F=8)
        lo, Z = pyr.levels(replica_fields(seed, sigma_replicas), pyr.J0)
        deltas = hv.deltas
        covs = {}

        def cov(a, b, ka, kb):
            key = (deltas[a], deltas[b], ka - kb)
            if key not in covs:
                covs[key] = farima_covariance(*key)
            return covs[key]

        def sig(k):
            x = [Z[deltas[l]][:, k[l] - lo] for l in range(2)]
            return x[0] * x[1] - cov(0, 1, k[0], k[1])

        for k, k2 in SIGMA_BATTERY:
            expected = sigma_second_moment(k, k2, hv.h)
            checks.append(_moment_check(f"E[sigma{k} sigma{k2}]", sig(k) * sig(k2), expected,
                                        se_tol))
    config = {"battery": list(battery), "seed": seed, "n_hermite": n_hermite,
              "eps_replicas": eps_replicas, "sigma_replicas": sigma_replicas,
              "sigma_h": list(sigma_h), "se_tol": se_tol}
    return _suite("chaos moments", checks, config, quick)


# ---------------------------------------------------------------------------
# Deterministic suites
# ---------------------------------------------------------------------------

def meyer_suite(h=(0.7, 0.8, 0.85), kmax: int = 5, tol: float = 1e-6) -> SuiteReport:
    """Orthonormality, ``Phi_Delta`` Fourier support and decay certificates."""
    hs = sorted({HurstVector((float(x),)).h[0] for x in np.atleast_1d(h)})
    phi, psi = build_scaling_table(), build_wavelet_table()
    res = orthonormality_residuals(phi, psi, kmax)
    checks = [_check(f"orthonormality {key} (|k| <= {kmax})", res[key] < tol,
                     f"max residual {res[key]:.2e}", residual=res[key])
              for key in ("phi_phi", "phi_psi", "psi_psi")]
    xi = np.linspace(-4 * np.pi, 4 * np.pi, 200_001)
    outside = np.abs(xi) > FOUR_PI_THIRDS
    for dl in [x - 0.5 for x in hs]:
        val = fractional_scaling_fourier(dl, xi)
        leak = float(np.abs(val[outside]).max())
        checks.append(_check(f"Phi_Delta^({dl:g}) Fourier support", leak == 0.0,
                             f"max |Phi^| outside [-4pi/3, 4pi/3] = {leak:.1e}"))
        t = build_fractional_scaling(dl)
        checks.append(_check(f"{t.name} decay L={t.tail_L}", t.tail_certified and t.tail_L >= 8,
                             f"c = {t.tail_c:.3e}", c=t.tail_c))
    for hh in hs:
        t = build_fractional_primitive(hh)
        checks.append(_check(f"{t.name} decay L={t.tail_L}", t.tail_certified and t.tail_L >= 8,
                             f"c = {t.tail_c:.3e}", c=t.tail_c))
    return _suite("meyer", checks, {"h": hs, "kmax": kmax, "tol": tol})


def farima_suite(deltas=(0.05, 0.25, 0.45), p_range=(-8, 64), lags=range(-6, 7),
                 tol: float = 1e-6, ratio_p: int = 10_000, ratio_tol: float = 1e-3) -> SuiteReport:
    """Fourier-coefficient identity, covariance cross-check, tail ratio."""
    checks = []
    for dl in deltas:
        r = max(gamma_fourier_identity_residual(dl, p) for p in range(p_range[0], p_range[1] + 1))
        checks.append(_check(f"Fourier coefficients delta={dl}", r < tol, f"max residual {r:.2e}",
                             residual=r))
    for d1 in deltas:
        for d2 in deltas:
            diff = max(abs(farima_covariance(d1, d2, m) - covariance_series(d1, d2, m))
                       for m in lags)
            checks.append(_check(f"covariance quadrature vs series ({d1}, {d2})", diff < tol,
                                 f"max difference {diff:.2e}", difference=diff))
    for dl in deltas:
        g = gamma_coeffs(dl, ratio_p).values[ratio_p]
        ratio = g / (tail_constant(dl) * ratio_p ** (dl - 1))
        checks.append(_check(f"gamma_p / (a p^(delta-1)) at p={ratio_p}, delta={dl}",
                             abs(ratio - 1) < ratio_tol, f"ratio {ratio:.6f}", ratio=ratio))
    return _suite("farima", checks, {"deltas": list(deltas), "p_range": list(p_range),
                                     "lags": list(lags), "tol": tol})


def combinatorics_suite(nmax: int = 8) -> SuiteReport:
    """``|P_m^(n)| = n! / (2^m m! (n-2m)!)`` = ``|coefficient of x^{n-2m} in H_n|``."""
    checks = []
    for n in range(nmax + 1):
        coeffs = hermite_poly_coeffs(n)
        for m in range(n // 2 + 1):
            count = len(pair_partitions(range(n), m))
            formula = hermite_partition_coeff(n, m)
            poly = coeffs[n - 2 * m] * (-1) ** m
            ok = count == formula and abs(poly - formula) <= 1e-8 * max(1, formula)
            checks.append(_check(f"a_{m}^({n})", ok, f"enumerated {count}, formula {formula}, "
                                 f"H_n coefficient {poly:.6g}"))
    return _suite("combinatorics", checks, {"nmax": nmax})


def chaos_route_suite(cases: int = 1000, seed: int = 0, sigma_cases=None, P: int = 32,
                      rel_tol: float = 1e-10) -> SuiteReport:
    """``mu`` vs its partition route; ``sigma`` route (a) vs route (b).

    ``mu`` agreement is relative to ``max(1, |value|)`` (values near 0 arise
    from cancellation between terms of order 1).  For ``sigma`` the two
    routes must agree within :func:`sigma_truncation_tolerance` at ``P``,
    ``2P`` and ``4P`` and the tolerance must decrease along that sequence.
    """
    rng = np.random.default_rng(seed)
    field = GaussianField(seed)
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 5))
        J = int(rng.integers(0, 6))
        k = rng.integers(-3, 4, size=d)
        a, b = mu(J, k, field), mu_partition_route(J, k, field)
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    checks = [_check(f"mu vs partition route ({cases} cases, d <= 4)", worst <= rel_tol,
                     f"max relative difference {worst:.2e}", worst=worst)]
    if sigma_cases is None:
        sigma_cases = [(3, (0, 1), (0.8, 0.85)), (2, (2, 2), (0.7, 0.9)), (1, (-1, 3), (0.75, 0.95)),
                       (0, (0, 1, 1), (0.9, 0.9, 0.9))]
    for J, k, h in sigma_cases:
        tols, diffs = [], []
        for PP in (P, 2 * P, 4 * P):
            a = sigma(J, k, h, field, PP)
            b = sigma_farima_route(J, k, h, field, PP)
            diffs.append(abs(a - b))
            tols.append(sigma_truncation_tolerance(J, k, h, field, PP))
        within = all(d_ <= t_ for d_, t_ in zip(diffs, tols))
        shrinking = tols[0] > tols[1] > tols[2]
        ratios = [float(tols[1] / tols[0]), float(tols[2] / tols[1])]
        checks.append(_check(f"sigma routes J={J} k={k} h={h}", within and shrinking,
                             f"diffs {[f'{v:.1e}' for v in diffs]} <= tol {[f'{v:.1e}' for v in tols]}, "
                             f"tol ratios {[round(r, 3) for r in ratios]}",
                             diffs=diffs, tolerances=tols, ratios=ratios))
    return _suite("chaos routes", checks, {"cases": cases, "seed": seed, "P": P})
