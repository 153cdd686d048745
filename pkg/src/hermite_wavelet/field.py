"""Counter-based Gaussian fields.

Every variate is addressed by ``(seed, tag, level, index)``.  The triple
``(seed, tag, level)`` is hashed into a Philox key and the integer index
selects the counter position, so any variate can be produced out of order
and independently of how work is split between threads.
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy.special import ndtri

__all__ = ["GaussianField"]

_OFFSET = 1 << 63          # maps signed indices onto nonnegative counters
_LANES = 4                 # Philox4x64 emits four 64-bit words per counter step


def _key(seed: int, tag: str, level: int) -> np.ndarray:
    h = hashlib.blake2b(f"{seed}|{tag}|{level}".encode(), digest_size=16).digest()
    return np.frombuffer(h, dtype="<u8").copy()


def _raw_to_normal(raw: np.ndarray) -> np.ndarray:
    # 53 random bits mapped to the open interval (0, 1), then inverse CDF.
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


class GaussianField:
    """Seeded i.i.d. N(0,1) family addressable by integer indices.

    Parameters
    ----------
    seed : int
        64-bit seed.  Fields with the same seed reproduce every variate
        bit-exactly.

    Notes
    -----
    ``phi(J, k)`` returns the scaling-function variates ``g^phi_{J,k}`` and
    ``psi(j, k)`` the wavelet variates ``g^psi_{j,k}``.  They live in
    different streams, so they are independent of each other.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & ((1 << 64) - 1)

    def __repr__(self):
        return f"GaussianField(seed={self.seed})"

    def __eq__(self, other):
        return isinstance(other, GaussianField) and other.seed == self.seed

    def __hash__(self):
        return hash(("GaussianField", self.seed))

    def normals(self, tag: str, level: int, start: int, count: int) -> np.ndarray:
        """Return variates with indices ``start, ..., start + count - 1``."""
        count = int(count)
        if count <= 0:
            return np.zeros(0)
        pos = int(start) + _OFFSET
        if pos < 0 or pos + count > (1 << 64):
            raise ValueError("index outside the addressable range")
        bg = np.random.Philox(key=_key(self.seed, tag, int(level)))
        block, lane = divmod(pos, _LANES)
        if block:
            bg.advance(block)
        raw = bg.random_raw(lane + count)
        return _raw_to_normal(np.asarray(raw, dtype=np.uint64)[lane:])

    def at(self, tag: str, level: int, ks) -> np.ndarray:
        """Variates at arbitrary integer indices ``ks`` (any shape)."""
        ks = np.asarray(ks, dtype=np.int64)
        if ks.size == 0:
            return np.zeros(ks.shape)
        lo, hi = int(ks.min()), int(ks.max())
        block = self.normals(tag, level, lo, hi - lo + 1)
        return block[ks - lo]

    def phi(self, J: int, ks) -> np.ndarray:
        """Scaling-function variates ``g^phi_{J,k}``."""
        return self.at("phi", J, ks)

    def psi(self, j: int, ks) -> np.ndarray:
        """Wavelet variates ``g^psi_{j,k}``."""
        return self.at("psi", j, ks)

    def spawn(self, r: int) -> "GaussianField":
        """Independent child field for replica ``r`` (deterministic)."""
        h = hashlib.blake2b(f"spawn|{self.seed}|{int(r)}".encode(), digest_size=8).digest()
        return GaussianField(int.from_bytes(h, "little"))
