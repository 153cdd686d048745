"""
FBM low-frequency part and its covariance
=========================================

For ``d = 1`` the approximation process is the low-frequency part of a
fractional Brownian motion

    B_{h,J}(t) = 2^{-Jh} sum_k S_k (Phi(2^J t - k) - Phi(-k)),

with ``S_k`` partial sums of a FARIMA(0, h - 1/2, 0) sequence.  This demo
draws one path, then estimates ``Cov(B(t), B(s))`` over a Monte Carlo
ensemble and compares it with ``c/2 (t^{2h} + s^{2h} - |t - s|^{2h})``
after fitting the single scalar ``c``.

Run:  python demos/02_fbm_low_frequency.py [replicas]
"""

from __future__ import annotations

import sys

import numpy as np

from hermite_wavelet.field import GaussianField
from hermite_wavelet.hermite_process import fbm_path
from hermite_wavelet.validation import fbm_covariance_test

H = 0.7
J = 6


def main(replicas: int = 2000):
    path = fbm_path(H, J, 1.0, 256, GaussianField(2024))
    print(f"one path: {path.values.size} points, B(1) = {path.values[-1]:+.4f}, "
          f"sup |B| = {path.sup_norm():.4f}")

    rep = fbm_covariance_test(H, J=J, replicas=replicas)
    print(rep.to_text())
    ts = np.array(rep.times)
    emp = np.array(rep.empirical)
    model = np.array(rep.model)
    print("   t      s    empirical   fitted form")
    for i, t in enumerate(ts):
        for j in range(i, ts.size):
            print(f"{t:5.2f}  {ts[j]:5.2f}  {emp[i, j]:9.4f}  {model[i, j]:9.4f}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2000)
