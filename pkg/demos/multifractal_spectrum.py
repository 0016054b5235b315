"""Dimension spectra of weighted averages, three ways.

The level set at alpha collects the sequences whose weighted average of
x_n * x_{n+1} converges to alpha; its dimension is the Legendre transform
of the pressure divided by log 2.  For Moebius weights the spectrum has
the entropy closed form
    dim F(alpha) = f0 + (1-f0)/log 2 * H(1/2 + alpha / (2 (1-f0))),
with f0 = 1 - 6/pi^2 the density of non-squarefree integers.  This script
computes it three ways: the entropy formula, the generic frequency-table
pipeline (solve psi'(lam) = alpha, then conjugate), and conjugation of a
finite-n numeric pressure curve.
"""

import math

import numpy as np

from thermosym import (
    FrequencyTable,
    MoebiusWeights,
    mobius_spectrum,
    pressure_curve,
    solve_lambda_alpha,
    spectrum,
    xy_potential,
)

S = 6.0 / math.pi ** 2
ft = FrequencyTable.moebius()
alphas = np.linspace(-0.55, 0.55, 11)

print("== closed form vs generic pipeline ==")
print(f"{'alpha':>8} {'lambda_alpha':>13} {'entropy form':>13} {'generic':>13}")
for a in alphas:
    a = float(a)
    lam = solve_lambda_alpha(ft, a)
    print(f"{a:8.3f} {lam:13.6f} {mobius_spectrum(a):13.9f} "
          f"{spectrum(ft, a).dim_lower:13.9f}")

print()
print("== numeric route: conjugate a finite-n pressure curve ==")
curve = pressure_curve(MoebiusWeights(), xy_potential(),
                       np.linspace(-8, 8, 257), n=10 ** 5)
worst = 0.0
for a in alphas:
    a = float(a)
    pt = spectrum(curve, a)
    worst = max(worst, abs(pt.dim_lower - mobius_spectrum(a)))
    if abs(a - 0.3) < 0.06:
        print(f"  alpha={a:+.3f}: numeric dim={pt.dim_lower:.9f} "
              f"(closed {mobius_spectrum(a):.9f})")
print(f"max |numeric - closed| over the grid: {worst:.2e}")

print()
print("Endpoint behavior: dim -> f0 =", f"{1 - S:.9f}")
for eps in (1e-2, 1e-4, 1e-6):
    a = S - eps
    print(f"  alpha = 6/pi^2 - {eps:.0e}: dim = {mobius_spectrum(a):.9f}")
