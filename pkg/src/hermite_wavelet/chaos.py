"""Hermite polynomials, pair partitions and chaotic random variables.

The chaotic variables are Wick products of unit Gaussians.  For a multi-index
``k`` with distinct entries ``k~_l`` of multiplicities ``n_l``

    mu_{J,k} = prod_l H_{n_l}(g^phi_{J, k~_l})

and ``eps_{j,k}`` is the same construction over the pairs ``(j_m, k_m)`` with
the wavelet field.  ``sigma_{J,k}`` is the generalized FARIMA variable, either
the multi-dimensional filter of ``mu`` (route a) or the Wick product of
FARIMA values ``Z^{(h_l - 1/2)}_{J,k_l}`` (route b).
"""

from __future__ import annotations

import functools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .csvio import write_csv
from .errors import DomainError, SizeError
from .farima import farima_covariance, farima_sequence, gamma_coeffs, tail_constant
from .field import GaussianField

__all__ = [
    "PairPartition",
    "ChaosCoefficients",
    "hermite",
    "hermite_poly_coeffs",
    "pair_partitions",
    "all_pair_partitions",
    "hermite_partition_coeff",
    "dump_partitions_json",
    "multiset_key",
    "mu",
    "mu_partition_route",
    "epsilon",
    "correlation",
    "wick_product",
    "sigma",
    "sigma_farima_route",
    "sigma_truncation_tolerance",
    "sigma_second_moment",
    "sigma_window",
    "export_sigma_csv",
    "ENUMERATION_CAP",
]

ENUMERATION_CAP = 6


# ---------------------------------------------------------------------------
# Hermite polynomials
# ---------------------------------------------------------------------------

def hermite(n, x):
    """Probabilists' Hermite polynomial ``H_n(x)``.

    ``n`` may be an integer array broadcasting against ``x``.

    Examples
    --------
    >>> float(hermite(3, 2.0))
    2.0
    """
    x = np.asarray(x, dtype=float)
    n = np.asarray(n)
    if n.ndim == 0:
        n = int(n)
        if n < 0:
            raise DomainError("Hermite degree must be nonnegative")
        h0, h1 = np.ones_like(x), x.copy()
        if n == 0:
            return h0
        for m in range(1, n):
            h0, h1 = h1, x * h1 - m * h0
        return h1
    if np.any(n < 0):
        raise DomainError("Hermite degree must be nonnegative")
    n, x = np.broadcast_arrays(n, x)
    out = np.where(n == 0, 1.0, x)
    h0, h1 = np.ones_like(x), x.copy()
    for m in range(1, int(n.max(initial=0))):
        h0, h1 = h1, x * h1 - m * h0
        out = np.where(n == m + 1, h1, out)
    return out


def hermite_poly_coeffs(n: int) -> np.ndarray:
    """Monomial coefficients of ``H_n`` recovered by fitting ``hermite(n, .)``
    on ``n + 1`` Chebyshev nodes (lowest degree first)."""
    nodes = np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1)) * max(1.0, np.sqrt(n))
    V = np.vander(nodes, n + 1, increasing=True)
    return np.linalg.solve(V, hermite(n, nodes))


# ---------------------------------------------------------------------------
# Pair partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairPartition:
    """Partition of ``ground_set`` into unordered pairs and singletons."""

    pairs: tuple
    singletons: tuple
    ground_set: tuple = field(default=())

    def __post_init__(self):
        used = [a for p in self.pairs for a in p] + list(self.singletons)
        if len(used) != len(set(used)):
            raise DomainError("pairs and singletons must be disjoint")
        if self.ground_set and sorted(used) != sorted(self.ground_set):
            raise DomainError("pairs and singletons must cover the ground set")
        if any(len(p) != 2 for p in self.pairs):
            raise DomainError("every pair must have two elements")

    @property
    def m(self) -> int:
        return len(self.pairs)

    def to_dict(self):
        return {"pairs": [list(p) for p in self.pairs], "singletons": list(self.singletons)}


def _enumerate(elems: tuple, m: int):
    # The smallest element is either a singleton or paired with a later one;
    # this yields each partition exactly once.
    if m == 0:
        yield (), elems
        return
    if len(elems) < 2 * m:
        return
    first, rest = elems[0], elems[1:]
    if len(rest) >= 2 * m:
        for pairs, singles in _enumerate(rest, m):
            yield pairs, (first,) + singles
    for i, other in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for pairs, singles in _enumerate(remaining, m - 1):
            yield ((first, other),) + pairs, singles


def pair_partitions(S, m: int) -> list:
    """All partitions of ``S`` with ``m`` unordered pairs (``P_m^S``)."""
    S = tuple(sorted(S))
    if not 0 <= m <= len(S) // 2:
        raise DomainError(f"m={m} outside [0, {len(S) // 2}]")
    return [PairPartition(tuple(sorted(p)), tuple(sorted(s)), S) for p, s in _enumerate(S, m)]


@functools.lru_cache(maxsize=None)
def all_pair_partitions(d: int) -> tuple:
    """Every pair partition of ``{0, ..., d-1}`` with any number of pairs."""
    return tuple(P for m in range(d // 2 + 1) for P in pair_partitions(range(d), m))


def hermite_partition_coeff(n: int, m: int) -> int:
    """``a_m^(n) = n! / (2^m m! (n - 2m)!)``, the number of elements of ``P_m^(n)``."""
    if not (n >= 0 and 0 <= m <= n // 2):
        raise DomainError(f"(n={n}, m={m}) outside 0 <= m <= n/2")
    return math.factorial(n) // (2**m * math.factorial(m) * math.factorial(n - 2 * m))


def dump_partitions_json(S, m: int, path) -> None:
    """Write ``P_m^S`` as JSON (fixture format)."""
    parts = pair_partitions(S, m)
    Path(path).write_text(json.dumps({"ground_set": sorted(S), "m": m, "count": len(parts),
                                      "partitions": [p.to_dict() for p in parts]}, indent=1))


# ---------------------------------------------------------------------------
# Chaotic variables
# ---------------------------------------------------------------------------

def multiset_key(j, k) -> tuple:
    """Canonical multiset of ``((j_m, k_m), multiplicity)`` entries."""
    j = np.atleast_1d(np.asarray(j, dtype=np.int64))
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if j.size == 1 and k.size > 1:
        j = np.full(k.shape, int(j[0]))
    if j.shape != k.shape:
        raise DomainError("j and k must have the same length")
    c = Counter(zip(j.tolist(), k.tolist()))
    return tuple(sorted(c.items()))


def mu(J: int, k, field: GaussianField) -> float:
    """``mu_{J,k} = prod H_{n_l}(g^phi_{J, k~_l})``."""
    key = multiset_key([J], k)
    ks = np.array([kk for (_, kk), _ in key])
    g = field.phi(J, ks)
    return float(np.prod([hermite(n, gv) for ((_, _), n), gv in zip(key, g)]))


def _mu_grid(g: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Vectorized ``mu`` for rows of indices ``idx`` (N, d) into ``g``."""
    s = np.sort(idx, axis=1)
    N, d = s.shape
    out = np.ones(N)
    run = np.ones(N, dtype=np.int64)
    for i in range(1, d + 1):
        if i < d:
            same = s[:, i] == s[:, i - 1]
        else:
            same = np.zeros(N, dtype=bool)
        close = ~same
        if np.any(close):
            out[close] *= hermite(run[close], g[s[close, i - 1]])
        run = np.where(same, run + 1, 1)
    return out


def mu_partition_route(J: int, k, field: GaussianField) -> float:
    """``mu_{J,k}`` through the pair-partition expansion with
    ``E[g_a g_b] = 1{a = b}``."""
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    d = k.size
    if d > ENUMERATION_CAP:
        raise SizeError(f"mu_partition_route supports d <= {ENUMERATION_CAP}, got {d}")
    g = field.phi(J, k)
    total = 0.0
    for P in all_pair_partitions(d):
        c = 1.0
        for a, b in P.pairs:
            if k[a] != k[b]:
                c = 0.0
                break
        if c == 0.0:
            continue
        total += (-1) ** P.m * np.prod(g[list(P.singletons)]) if P.singletons else (-1) ** P.m
    return float(total)


def epsilon(j, k, field: GaussianField) -> float:
    """``eps_{j,k} = prod H_{n_l}(g^psi_{j~_l, k~_l})``."""
    key = multiset_key(j, k)
    val = 1.0
    for (jj, kk), n in key:
        val *= float(hermite(n, field.psi(jj, [kk])[0]))
    return val


def correlation(jk, rs) -> int:
    """``E[eps_{j,k} eps_{r,s}]``: ``prod n_l!`` for equal multisets, else 0."""
    a, b = multiset_key(*jk), multiset_key(*rs)
    if a != b:
        return 0
    return math.prod(math.factorial(n) for _, n in a)


# ---------------------------------------------------------------------------
# Wick products
# ---------------------------------------------------------------------------

def wick_product(factors, cov) -> np.ndarray:
    """Wick product ``:X_0 X_1 ... X_{d-1}:`` of jointly Gaussian factors.

    Parameters
    ----------
    factors : sequence of arrays
        Realizations of ``X_l`` (broadcastable against each other).
    cov : callable
        ``cov(a, b)`` returns ``E[X_a X_b]`` (scalar or broadcastable array).

    Notes
    -----
    Uses ``:X_0 Y: = X_0 :Y: - sum_i E[X_0 Y_i] :Y without Y_i:`` with
    memoization over index subsets, which equals the pair-partition sum
    ``sum_m (-1)^m sum_{P in P_m} prod E[X X'] prod X``.
    """
    d = len(factors)
    memo = {}

    def rec(idx: tuple):
        if not idx:
            return 1.0
        if idx in memo:
            return memo[idx]
        a, rest = idx[0], idx[1:]
        val = factors[a] * rec(rest)
        for i, b in enumerate(rest):
            val = val - cov(a, b) * rec(rest[:i] + rest[i + 1:])
        memo[idx] = val
        return val

    return rec(tuple(range(d)))


def _deltas(h) -> tuple:
    return tuple(float(x) - 0.5 for x in np.atleast_1d(h))


def sigma(J: int, k, h, field: GaussianField, P: int = 256) -> float:
    """Route (a): ``sum_{p in [0, P]^d} prod gamma^{(h_l - 1/2)}_{p_l} mu_{J, k - p}``."""
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    deltas = _deltas(h)
    d = k.size
    if len(deltas) != d:
        raise DomainError("h and k must have the same length")
    gams = [gamma_coeffs(dl, P).values for dl in deltas]
    lo = int(k.min()) - P
    g = field.phi(J, np.arange(lo, int(k.max()) + 1))
    if d == 1:
        return float(np.dot(gams[0], g[k[0] - lo - np.arange(P + 1)]))
    # iterate over the first axis, vectorize the remaining d-1 axes
    rest = np.stack(np.meshgrid(*[np.arange(P + 1)] * (d - 1), indexing="ij"), -1).reshape(-1, d - 1)
    wrest = np.prod([gams[l + 1][rest[:, l]] for l in range(d - 1)], axis=0)
    idx_rest = (k[1:] - rest) - lo
    total = 0.0
    for p0 in range(P + 1):
        idx = np.column_stack([np.full(rest.shape[0], k[0] - p0 - lo), idx_rest])
        total += gams[0][p0] * float(np.dot(wrest, _mu_grid(g, idx)))
    return total


def _z_values(J, k, deltas, field, P):
    return [float(farima_sequence(field, dl, (int(kk), int(kk)), P=P, level=J)[0])
            for dl, kk in zip(deltas, k)]


def sigma_farima_route(J: int, k, h, field: GaussianField, P: int = 256) -> float:
    """Route (b): pair-partition sum of FARIMA values with exact covariances."""
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    d = k.size
    if d > ENUMERATION_CAP:
        raise SizeError(f"sigma_farima_route supports d <= {ENUMERATION_CAP}, got {d}")
    deltas = _deltas(h)
    z = _z_values(J, k, deltas, field, P)
    total = 0.0
    for Pp in all_pair_partitions(d):
        c = 1.0
        for a, b in Pp.pairs:
            c *= farima_covariance(deltas[a], deltas[b], int(k[a] - k[b]))
        total += (-1) ** Pp.m * c * math.prod(z[s] for s in Pp.singletons)
    return float(total)


def _cov_tail_bound(d1: float, d2: float, lag: int, P: int) -> float:
    # Omitted terms gamma_p gamma'_q (q = p - lag) have max(p, q) > P; with
    # gamma_p < a p^{delta - 1} the sum is below a a' (P - |lag|)^{s-1}/(1-s),
    # doubled for the q = 0 / p = 0 boundary terms.
    if d1 == 0 or d2 == 0:
        return 0.0
    s = d1 + d2
    base = max(P - abs(lag), 1)
    return 2 * abs(tail_constant(d1) * tail_constant(d2)) * base ** (s - 1) / (1 - s)


def sigma_truncation_tolerance(J: int, k, h, field: GaussianField, P: int) -> float:
    """Bound on ``|route (a) - route (b)|`` at truncation ``P``.

    Route (a) equals the Wick product of the truncated FARIMA values taken
    with respect to their truncated covariances, so the two routes differ
    only through covariance truncation.  The bound replaces each pair factor
    by ``|c| + t`` with ``t`` the covariance tail bound.
    """
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    d = k.size
    deltas = _deltas(h)
    z = np.abs(_z_values(J, k, deltas, field, P))
    tol = 0.0
    for Pp in all_pair_partitions(d):
        if Pp.m == 0:
            continue
        exact, upper = 1.0, 1.0
        for a, b in Pp.pairs:
            c = abs(farima_covariance(deltas[a], deltas[b], int(k[a] - k[b])))
            t = _cov_tail_bound(deltas[a], deltas[b], int(k[a] - k[b]), P)
            exact *= c
            upper *= c + t
        tol += (upper - exact) * math.prod(z[s] for s in Pp.singletons)
    return tol


def sigma_second_moment(k, k2, h, inner=None) -> float:
    """``E[sigma_{J,k} sigma_{J,k'}]`` from the multiple-integral representation.

    ``sigma_{J,k}`` is the ``d``-fold Wiener integral of
    ``prod_l Phi^(-delta_l)(. - k_l)`` (after rescaling), so the isometry
    gives ``sum_pi prod_l <Phi^(-delta_l)(. - k_l), Phi^(-delta_pi(l))(. - k'_pi(l))>``
    over permutations ``pi``.  ``inner(delta, delta2, lag)`` defaults to the
    table-based :func:`~hermite_wavelet.meyer_frac.phi_minus_delta_inner`;
    passing :func:`~hermite_wavelet.farima.farima_covariance` gives the
    covariance-route value.  The result does not depend on ``J``.
    """
    import itertools

    if inner is None:
        from .meyer_frac import phi_minus_delta_inner as inner
    k = np.atleast_1d(np.asarray(k, dtype=np.int64))
    k2 = np.atleast_1d(np.asarray(k2, dtype=np.int64))
    deltas = _deltas(h)
    d = k.size
    if k2.size != d or len(deltas) != d:
        raise DomainError("k, k' and h must have the same length")
    memo = {}

    def ip(a, b):
        key = (deltas[a], deltas[b], int(k[a] - k2[b]))
        if key not in memo:
            memo[key] = float(inner(*key))
        return memo[key]

    return float(sum(math.prod(ip(a, pi[a]) for a in range(d))
                     for pi in itertools.permutations(range(d))))


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------

@dataclass
class ChaosCoefficients:
    """``sigma_{J,k}`` over a window of multi-indices."""

    J: int
    ks: np.ndarray          # (N, d) multi-indices
    values: np.ndarray      # (N,)
    route: str
    meta: dict = field(default_factory=dict)

    def log_bound_constant(self) -> float:
        """Fitted ``C`` in ``|sigma| <= C (log(3 + J + |k|))^{d/2}``."""
        d = self.ks.shape[1]
        norm = np.abs(self.ks).max(axis=1)
        return float(np.max(np.abs(self.values) / np.log(3 + self.J + norm) ** (d / 2)))


def sigma_window(J: int, ks, h, field: GaussianField, P: int = 256, route: str = "b") -> ChaosCoefficients:
    """Evaluate ``sigma_{J,k}`` for every row of ``ks``.

    Route ``"b"`` computes the FARIMA values once per distinct index and
    applies the Wick product with exact covariances; route ``"a"`` calls
    :func:`sigma` per row.
    """
    ks = np.atleast_2d(np.asarray(ks, dtype=np.int64))
    deltas = _deltas(h)
    d = ks.shape[1]
    if route == "a":
        vals = np.array([sigma(J, k, h, field, P) for k in ks])
    elif route == "b":
        lo, hi = int(ks.min()), int(ks.max())
        zs = {dl: farima_sequence(field, dl, (lo, hi), P=P, level=J) for dl in set(deltas)}
        cols = [zs[deltas[l]][ks[:, l] - lo] for l in range(d)]
        cache = {}

        def cov(a, b):
            lag = ks[:, a] - ks[:, b]
            key = (deltas[a], deltas[b])
            if key not in cache:
                span = int(np.abs(lag).max(initial=0))
                cache[key] = (span, np.array([farima_covariance(key[0], key[1], m)
                                              for m in range(-span, span + 1)]))
            span, tab = cache[key]
            return tab[lag + span]

        vals = np.asarray(wick_product(cols, cov), dtype=float) * np.ones(ks.shape[0])
    else:
        raise DomainError(f"unknown route {route!r}")
    return ChaosCoefficients(J, ks, vals, route, {"P": P, "h": list(np.atleast_1d(h)),
                                                  "seed": field.seed})


def export_sigma_csv(coeffs: ChaosCoefficients, path) -> None:
    d = coeffs.ks.shape[1]
    header = [f"k_{l + 1}" for l in range(d)] + ["sigma"]
    write_csv(path, header, [coeffs.ks[:, l] for l in range(d)] + [coeffs.values])
