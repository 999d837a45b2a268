"""
Fusion of modular invariants at level 16
========================================

The relative tensor product multiplies two invariants and splits the
product into physical ones.  At SU(2)_16 this gives

    D10 x D10 = 2 D10,  D10 x E7 = E7 x D10 = 2 E7,  E7 x E7 = D10 + E7.
"""

from mtc import associativity_audit, classify, fusion_table, su2_data

d = su2_data(16)
lib = classify(d, d)

table = fusion_table(lib)
print(table.to_text())
print()
print(table.to_markdown())

# the product is an invariant without the normalization Z[0,0] = 1;
# Z[0,0] counts the summands
out = table[("E7", "E7")]
print("\n(E7 E7)[0,0] =", out.product[0, 0], "->", out.summands, "unique:", out.unique)

report = associativity_audit(lib, table)
print(report)
print("(E7 x E7) x D10:", dict(report.entry("E7", "E7", "D10").left))
