"""Sampling the Markov chain that carries the Gibbs weights exactly.

For f(x, y) = x*y the tilted measure is an inhomogeneous two-state chain:
step n keeps the sign with probability e^a / (e^a + e^-a), a = lam * w_n.
Sampled paths obey the law of large numbers
    (1/N) sum w_n x_n x_{n+1}  ->  sum_j p_j v_j tanh(lam v_j),
and the cylinder masses give the measure's local dimension.
"""

import math

from thermosym import (
    ConstantWeights,
    FrequencyTable,
    InhomMarkov,
    MoebiusWeights,
    closed_form_psi_prime,
    spectrum,
)

print("== constant weights, lam = 1 ==")
chain = InhomMarkov(1.0, ConstantWeights(1.0), horizon=32)
print("step matrix P_0:")
print(chain.transition_matrix(0))
res = chain.sample_paths(length=32, count=20_000, seed=7)
print(f"pooled mean of x_n x_(n+1): {res.product_mean:.5f} "
      f"(analytic tanh(1) = {math.tanh(1.0):.5f})")

print()
print("== Moebius weights, one long path ==")
n = 10 ** 5
chain = InhomMarkov(1.0, MoebiusWeights(), horizon=n)
res = chain.sample_paths(length=n, count=1, seed=3)
want = closed_form_psi_prime(FrequencyTable.moebius(), 1.0)
print(f"running average of w_n x_n x_(n+1): {res.running_weighted_mean[-1]:.5f} "
      f"(analytic {want:.5f})")

print()
print("== local dimension along the path ==")
dims = chain.local_dimension_estimate(res.paths[0], [100, 1000, 10_000, n])
for depth, dim in zip((100, 1000, 10_000, n), dims):
    print(f"  depth {depth:>6}: {dim:.6f}")
alpha = want
pt = spectrum(FrequencyTable.moebius(), alpha)
print(f"matches the spectrum at alpha = psi'(1): dim E(alpha) = {pt.dim_lower:.6f}")
