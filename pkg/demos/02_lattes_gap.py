"""The Lattes map separates the average and maximal exponents.

For the square-lattice doubling map L of degree 4, infinity is a fixed point
with multiplier exactly 4, so the maximal characteristic exponent is at least
log 4.  Its average exponent against the measure of maximal entropy sits at
the lower bound (1/2) log 4 instead.
"""
import math

from sphdyn import chi_average, chi_max_lower, lattes4, periodic_cycles

f = lattes4()
fixed = periodic_cycles(f, 1)
print("fixed points of L:")
for c in fixed:
    print(f"  {c.points[0].to_complex():.6g}  multiplier {c.multiplier:.6g}  exponent {c.exponent:.6f}")

chi_m = chi_max_lower(f, 3)
est = chi_average(f, n_paths=4000, seed=1)
print(f"\nchi_m (cycles of period <= 3)  = {chi_m:.6f}   log 4 = {math.log(4):.6f}")
print(f"chi_a (4000 backward paths)    = {est.value:.4f} +- {est.stderr:.4f}   (1/2) log 4 = {math.log(2):.4f}")
print(f"gap chi_m - chi_a              = {chi_m - est.value:.4f}")
