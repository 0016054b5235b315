"""Transfer-matrix products: top exponents and projective contraction.

The entry-sum norm of the product of step matrices reproduces the
partition function, so its exponential growth rate is the pressure.  On
the {0, 1} alphabet with f = x*y the step matrix is [[1, 1], [1, e^(lam*w)]];
with Moebius weights the existence of the limit is open, so the finite-N
values below are estimates only, reported with their stabilization gap.

Positive matrices contract the Hilbert projective metric with ratio
tanh(log(1/delta)) when their entries lie in [delta, 1/delta]; the last
section measures that contraction on random matrices.
"""

import math

import numpy as np

from thermosym import (
    BINARY_VALUES,
    MoebiusWeights,
    Potential,
    binary_space,
    build_transfer,
    contraction_ratio,
    hilbert_metric,
    lyapunov_exponent,
    product_of,
    projective_diameter_bound,
    transfer_lyapunov,
)

pot01 = Potential.from_function(binary_space(), 2, lambda x, y: x * y,
                                BINARY_VALUES)
w = MoebiusWeights()
lam = 1.0
print("step matrix for w_n = -1 at lam = 1:")
print(build_transfer(pot01, -1.0, lam).dense())

print()
print("== top exponent of the Moebius-driven product (estimates only) ==")
prev = None
for n in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
    val = transfer_lyapunov(w, pot01, lam, n)
    gap = "" if prev is None else f"  gap {abs(val - prev):.2e}"
    print(f"  N = {n:>8}: L_N = {val:.8f}{gap}")
    prev = val

print()
print("== block composition ==")
mats = [build_transfer(pot01, w.at(k), lam) for k in range(600)]
one = lyapunov_exponent(mats)
combined = (product_of(mats[:251]) @ product_of(mats[251:])).sum_norm_log / 600
print(f"one sweep {one:.12f} vs two blocks {combined:.12f} "
      f"(difference {abs(one - combined):.1e})")

print()
print("== Hilbert-metric contraction ==")
rng = np.random.default_rng(0)
for delta in (0.5, 0.1):
    b = rng.uniform(delta, 1 / delta, (4, 4))
    print(f"delta = {delta}: diameter bound {projective_diameter_bound(b):.4f} "
          f"(<= {4 * math.log(1 / delta):.4f}), "
          f"ratio bound {contraction_ratio(b):.4f}")
    worst = 0.0
    for _ in range(500):
        x = rng.uniform(0.1, 10.0, 4)
        y = rng.uniform(0.1, 10.0, 4)
        worst = max(worst, hilbert_metric(b @ x, b @ y) / hilbert_metric(x, y))
    print(f"  observed worst contraction over 500 pairs: {worst:.4f}")
