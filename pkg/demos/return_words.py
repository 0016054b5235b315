"""Return words of the Thue-Morse sequence and the pressure they carry.

A return word over a prefix u is the factor between two successive
occurrences of u.  For the Thue-Morse fixed point the return-word sets
over the prefixes "0" and "01" are classical, and the decomposition gives
a pressure approximation: each return word contributes its own partition
value, weighted by how often it appears.
"""

import numpy as np

from thermosym import (
    SubstitutiveWeights,
    decompose,
    estimate_pressure,
    fixed_point_prefix,
    return_word_pressure,
    return_words,
    thue_morse,
    xy_potential,
)

tm = thue_morse()
x = fixed_point_prefix(tm, 1 << 14)
print("Thue-Morse prefix:", x[:32], "...")

for u in ("0", "01"):
    print(f"return words over {u!r}:", sorted(return_words(x, u, 1 << 14)))

dec = decompose(x, "0", 64)
print("first blocks of the decomposition over '0':", " ".join(dec.blocks()[:12]))
print("coverage:", dec.coverage, "symbols; frequencies:",
      {w: round(p, 4) for w, p in zip(dec.freqs.values, dec.freqs.freqs)})

print()
print("== pressure from return words (weights 0 -> -1, 1 -> +1) ==")
w = SubstitutiveWeights(tm, {"0": -1.0, "1": 1.0})
pot = xy_potential()
for lam in (0.5, 1.0, 2.0):
    direct = estimate_pressure(w, pot, lam, 10 ** 5)
    print(f"lam = {lam}")
    for n in (4, 8, 16):
        res = return_word_pressure(w, pot, lam, prefix_len=n, horizon=1 << 14)
        print(f"  prefix {n:2d}: psi = {res.psi:.10f} "
              f"(direct 1e5-step estimate {direct:.10f}, "
              f"{len(res.components)} return words)")
