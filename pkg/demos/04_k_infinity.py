"""Bracketing the growth rate k_inf = lim log K(f^n) / n.

From above: log K(f^n) / n for each n (subadditivity makes the minimum an
upper bound).  From below: the best exponent over computed cycles.  The two
meet for z^d and for the Lattes map; for Chebyshev and generic maps a gap
remains at this depth and is reported as is.
"""
from sphdyn.lab import k_infinity_bracket
from sphdyn.zoo import FamilyLabel

for text in ["power:d=2", "power:d=3", "lattes4", "chebyshev:d=2", "random:d=2:seed=1000",
             "theorem1:n=1"]:
    br = k_infinity_bracket(FamilyLabel.parse(text).build(), n_max=5)
    per_n = "  ".join(f"{v:.4f}" for v in br.per_n)
    print(f"{text:22s} lower {br.lower:.6f}  upper {br.upper:.6f}  gap {br.gap:.2e}")
    print(f"{'':22s} log K(f^n)/n: {per_n}")
