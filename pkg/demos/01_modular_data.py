"""
Modular data of SU(2)_k
=======================

Build the S and T matrices of the SU(2) WZW model, run the structural
checks and read off fusion rules from the Verlinde formula.
"""

import numpy as np

from mtc import su2_data, validate, verlinde

d = su2_data(4)
print(d)
print("S =")
print(np.round(d.S.real, 4))

# conformal weights are exact rationals; T = exp(2 pi i (h - c/24))
print("h =", [str(x) for x in d.h], " c =", d.c)

# every structural check with its residual
print(validate(d))

# Verlinde formula, rounded with verification
F = verlinde(d)
print("max rounding residual:", F.max_residual)
for a in range(d.rank):
    print(f"1 x {a} =", [c for c in range(d.rank) if F.N[1, a, c]])

# quantum dimensions S[l,0]/S[0,0] are all >= 1
print("quantum dimensions:", np.round(d.first_column / d.first_column[0], 4))
