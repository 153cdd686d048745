"""
Successive-difference rate regression
=====================================

The approximation error of ``X_{h,J}`` is bounded by
``C J^{d/2} 2^{-J (sum h - d + 1/2)}``.  Exact paths are not available, so
the regression uses the successive differences ``||X_{J+1} - X_J||_inf``
(paths at all levels share one Brownian motion), divides by ``J^{d/2}``
and fits a slope in ``log2``.  The report prints both the normalized and
the raw slope next to the exponent of the bound.

Run:  python demos/04_rate_regression.py [replicas]
"""

from __future__ import annotations

import sys

from hermite_wavelet.validation import rate_test


def main(replicas: int = 32):
    for h in ((0.7,), (0.8, 0.85)):
        rep = rate_test(h, J_range=range(2, 7), replicas=replicas)
        print(rep.to_text())
        for J, e in zip(rep.levels, rep.errors):
            print(f"    J = {J}: median ||X_(J+1) - X_J|| = {e:.4e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 32)
