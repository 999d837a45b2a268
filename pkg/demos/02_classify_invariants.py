"""
Classifying physical modular invariants
=======================================

For each level the classifier finds every non-negative integer matrix Z
with S Z = Z S, T Z = Z T and Z[0,0] = 1.  The result reproduces the ADE
pattern: A at every level, D at even levels, E6/E7/E8 at k = 10/16/28.
"""

from mtc import classify, commutant_basis, entry_bound, su2_data, weighted_sum_identity

for k in range(1, 31):
    d = su2_data(k)
    lib = classify(d, d)
    print(f"k={k:2d}  {', '.join(lib.names):<20} nodes={lib.provenance['nodes']}")

# look inside level 16: the commutant is 3-dimensional and rational
d = su2_data(16)
cb = commutant_basis(d, d)
print("commutant dimension at k=16:", cb.dim, " support size:", len(cb.support))
print("largest entry bound:", entry_bound(d, d).max())

lib = classify(d, d)
for z in lib:
    # sum S[l,0] Z[l,m] S[m,0] = Z[0,0] holds for every invariant
    print(z.name, "weighted-sum residual:", weighted_sum_identity(z))
print(lib["E7"].Z)
