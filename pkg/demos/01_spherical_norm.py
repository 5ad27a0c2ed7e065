"""How big can the spherical derivative of a rational map be?

For z^d the norm ||f'|| depends only on |z| and peaks on the unit circle at
exactly d.  Random maps of degree d always exceed both sqrt(d) and 2, and the
squared norm integrates to pi * d over the sphere (area counted with
multiplicity).
"""
import math

import numpy as np

from sphdyn import area_identity, k_norm, power_map, random_map

print("power maps: K(z^d) and where it is attained")
for d in range(2, 7):
    rep = k_norm(power_map(d))
    radii = sorted({round(abs(p.coord), 6) for p in rep.argmax_points})
    print(f"  d={d}  K={rep.value:.12f}  |argmax| in chart = {radii}")

print("\nrandom maps: smallest K seen per degree (20 seeds each)")
for d in range(2, 7):
    ks = np.array([k_norm(random_map(d, s)).value for s in range(20)])
    print(f"  d={d}  min K={ks.min():7.3f}  median K={np.median(ks):7.3f}"
          f"  floor max(2, sqrt d)={max(2, math.sqrt(d)):.3f}")

print("\narea identity: integral of ||f'||^2 against pi * d")
for f in [power_map(2), random_map(4, 1)]:
    res = area_identity(f, grid_size=200_000)
    print(f"  d={f.degree}  integral={res['integral']:.8f}  expected={res['expected']:.8f}"
          f"  rel err={res['rel_err']:.1e}")
