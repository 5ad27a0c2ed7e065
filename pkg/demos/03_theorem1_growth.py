"""Maps with K of order sqrt(degree).

R_n is defined by R_n(exp(2z)) = prod_{k=-n}^{n} tanh(nz + 2k).  Its degree
is n(2n+1), and K(R_n) / sqrt(degree) stays bounded as n grows.  The last
column is the disc integral of ||f'|| / (1 + |z|^2).
"""
from sphdyn.lab import growth_table_csv, theorem1_growth_table

rows = theorem1_growth_table(4)
print(growth_table_csv(rows), end="")
ratios = [r["ratio"] for r in rows]
print(f"\nratio range {min(ratios):.2f} .. {max(ratios):.2f}")
