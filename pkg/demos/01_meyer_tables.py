"""
Meyer tables and their structural checks
========================================

Builds the tabulated Meyer scaling function, the mother wavelet, the
fractional primitives ``psi_h`` and the fractional scaling functions
``Phi_Delta^(h - 1/2)``, then prints:

* orthonormality residuals of the integer translates,
* the Fourier-side support of ``Phi_Delta``,
* the fitted decay constants ``c`` in ``|f(x)| <= c (3 + |x|)^{-8}``.

Run:  python demos/01_meyer_tables.py
"""

from __future__ import annotations

import numpy as np

from hermite_wavelet import meyer_frac as mf

H_VALUES = (0.7, 0.8, 0.85)


def main():
    phi = mf.build_scaling_table()
    psi = mf.build_wavelet_table()
    print(f"grid: R = {phi.R}, dx = {phi.dx}, {phi.samples.size} samples per table")

    res = mf.orthonormality_residuals(phi, psi)
    print("orthonormality residuals over |k| <= 5:")
    for key in ("phi_phi", "phi_psi", "psi_psi"):
        print(f"  {key:8s} {res[key]:.2e}")

    xi = np.linspace(-4 * np.pi, 4 * np.pi, 100_001)
    for h in H_VALUES:
        prim = mf.build_fractional_primitive(h)
        frac = mf.build_fractional_scaling(h - 0.5)
        leak = np.abs(mf.fractional_scaling_fourier(h - 0.5, xi)[np.abs(xi) > 4 * np.pi / 3]).max()
        print(f"h = {h}: int psi_h = {prim.integral():+.1e}, "
              f"decay c(psi_h) = {prim.tail_c:.2e} ({'ok' if prim.tail_certified else 'not certified'}), "
              f"c(Phi_Delta) = {frac.tail_c:.2e}, Fourier leak outside 4pi/3 = {leak:.0e}")

    # Phi^(-delta) keeps the slow FARIMA-like tail on the left
    pm = mf.build_phi_minus_delta(0.25, dx=2**-4)
    for x in (-4.0, -16.0, -24.0):
        print(f"Phi^(-0.25)({x:+.0f}) = {float(pm(x)):.4e}")


if __name__ == "__main__":
    main()
