"""
Rosenblatt-type paths from three representations
================================================

The generalized Hermite process of order ``d = 2`` with ``h = (0.8, 0.85)``
is simulated three ways:

* ``approx``: the approximation process at level ``J`` (band form),
* ``abel``: the same process after summation by parts,
* ``fullseries``: the truncated wavelet series over the index sets with
  parameter ``N``.

``approx`` and ``abel`` are two algebraic forms of one random variable and
agree to rounding.  ``fullseries`` is a different truncation of the same
process, so only its law should match: the demo compares the sample
variance of ``X(1)`` across a small ensemble.  Paths are written as CSV with
a JSON sidecar.

Run:  python demos/03_rosenblatt_paths.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from hermite_wavelet.field import GaussianField
from hermite_wavelet.hermite_process import (abel_path, approx_path, approx_paths,
                                             fullseries_paths, self_similarity_exponent)
from hermite_wavelet.validation import replica_fields

H = (0.8, 0.85)


def main(out_dir: str = "demo-output"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    field = GaussianField(7)
    a = approx_path(H, 5, 3.0, 384, field)
    b = abel_path(H, 5, 3.0, 384, field)
    print(f"H = {self_similarity_exponent(H)}; approx vs abel max difference "
          f"{np.abs(a.values - b.values).max():.1e}")
    a.to_csv(out / "rosenblatt-approx.csv")
    print(f"wrote {out / 'rosenblatt-approx.csv'}")

    fields = replica_fields(11, 300)
    _, xa, _ = approx_paths(H, 5, 2.5, 20, fields, warn=False)
    _, xf, meta = fullseries_paths(H, 5, 2.5, 20, fields)
    i = 8                                                  # t = 1
    print(f"Var X(1): approx {xa[:, i].var():.4f}, full series {xf[:, i].var():.4f} "
          f"({len(fields)} replicas; full series used {meta['index_count']} index terms)")


if __name__ == "__main__":
    main(*sys.argv[1:])
