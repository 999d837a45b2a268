"""
Composing gapped domain walls of the toric code
===============================================

An invariant between two different categories is rectangular.  Between
the trivial category Vec and the toric code D(Z2) there are two: the
boundaries where e or m condenses.  Composing walls through D(Z2) is the
relative tensor product over it.
"""

from mtc import classify, fuse, fusion_table, toric_code_datum, trivial_datum

vec, toric = trivial_datum(), toric_code_datum()
into = classify(vec, toric)     # Vec -> D(Z2), 1 x 4 matrices
back = classify(toric, vec)     # D(Z2) -> Vec, 4 x 1 matrices
walls = classify(vec, vec)

for z in into:
    print(z.name, z.Z.tolist())

# e-boundary followed by its reverse: two copies of the trivial wall
e_in = next(z for z in into if z.Z[0, 1])
e_out = next(z for z in back if z.Z[1, 0])
m_out = next(z for z in back if z.Z[2, 0])
print(fuse(e_in, e_out, walls))
print(fuse(e_in, m_out, walls))

# walls from D(Z2) to itself, including the e <-> m duality
tt = classify(toric, toric)
print(f"\n{len(tt)} walls D(Z2) -> D(Z2)")
for o in fusion_table(tt):
    print(o)
