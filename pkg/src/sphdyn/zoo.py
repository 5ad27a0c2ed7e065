"""Named map families.

``theorem1_map(n)`` is the tanh-product family: with ``w = exp(2 z)``,

    prod_{k=-n}^{n} tanh(n z + 2k) = R_n(w),
    R_n(w) = prod_k (e^{4k} w^n - 1) / (e^{4k} w^n + 1),

expanded directly from the factored form.  ``lattes4`` is the doubling map
of the square lattice (g2 = 4, g3 = 0), ``wp(2u) = (wp^2 + 1)^2 / (4 wp (wp^2 - 1))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateMapError, SphdynError
from .rational import RationalMap, make_map

FAMILIES = ("power", "theorem1", "lattes4", "chebyshev", "random")


def power_map(d: int) -> RationalMap:
    if d < 1:
        raise ValueError("power map needs d >= 1")
    c = np.zeros(d + 1, dtype=np.complex128)
    c[d] = 1.0
    return make_map(c, [1.0])


def identity_map() -> RationalMap:
    return power_map(1)


def _theorem1_factors(n: int):
    """Numerator and denominator of R_n as polynomials in v = w^n."""
    num = np.ones(1, dtype=np.complex128)
    den = np.ones(1, dtype=np.complex128)
    for k in range(-n, n + 1):
        a = math.exp(4.0 * k)
        num = npoly.polymul(num, [-1.0, a])
        den = npoly.polymul(den, [1.0, a])
    return num, den


def theorem1_map(n: int) -> RationalMap:
    """The rational function R_n with ``R_n(exp(2z)) = prod_k tanh(nz + 2k)``.

    The expanded degree is ``n (2n + 1)``.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"theorem1 family needs 1 <= n <= 6, got {n}")
    vnum, vden = _theorem1_factors(n)
    deg = n * (2 * n + 1)
    num = np.zeros(deg + 1, dtype=np.complex128)
    den = np.zeros(deg + 1, dtype=np.complex128)
    num[::n] = vnum
    den[::n] = vden
    return make_map(num, den)


def tanh_product(n: int, zeta):
    """Direct oracle ``prod_{k=-n}^{n} tanh(zeta + 2k)``."""
    zeta = np.asarray(zeta, dtype=np.complex128)
    out = np.ones_like(zeta)
    for k in range(-n, n + 1):
        out = out * np.tanh(zeta + 2 * k)
    return out


def lattes4() -> RationalMap:
    """``(z^2 + 1)^2 / (4 z (z^2 - 1))``; infinity is fixed with multiplier 4."""
    return make_map([1.0, 0.0, 2.0, 0.0, 1.0], [0.0, -4.0, 0.0, 4.0])


def chebyshev_map(d: int) -> RationalMap:
    """Degree-``d`` map with ``T(w + 1/w) = w^d + w^-d``."""
    if not 2 <= d <= 16:
        raise ValueError(f"chebyshev family needs 2 <= d <= 16, got {d}")
    prev = np.array([2.0 + 0j])
    cur = np.array([0.0, 1.0 + 0j])
    for _ in range(d - 1):
        nxt = npoly.polysub(npoly.polymul([0.0, 1.0], cur), prev)
        prev, cur = cur, nxt
    return make_map(cur, [1.0])


def random_map(d: int, seed: int, max_attempts: int = 100) -> RationalMap:
    """Seeded map with i.i.d. complex standard normal coefficients."""
    if not 2 <= d <= 16:
        raise ValueError(f"random family needs 2 <= d <= 16, got {d}")
    rng = np.random.default_rng(seed)

    def draw(size):
        return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2.0)

    for _ in range(max_attempts):
        num = draw(d + 1)
        den = draw(d + 1)
        while abs(num[d]) < 0.1:
            num[d] = draw(1)[0]
        while abs(den[d]) < 0.1:
            den[d] = draw(1)[0]
        try:
            return make_map(num, den)
        except DegenerateMapError:
            continue
    raise SphdynError(f"random_map(d={d}, seed={seed}): {max_attempts} degenerate draws")


@dataclass(frozen=True)
class FamilyLabel:
    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValueError(f"unknown family {self.name!r}; expected one of {FAMILIES}")
        required = {
            "power": {"d"},
            "theorem1": {"n"},
            "lattes4": set(),
            "chebyshev": {"d"},
            "random": {"d", "seed"},
        }[self.name]
        got = set(self.params)
        if got != required:
            raise ValueError(
                f"family {self.name} takes parameters {sorted(required)}, got {sorted(got)}"
            )
        for key, value in self.params.items():
            if not isinstance(value, int):
                raise ValueError(f"parameter {key} must be an integer")
        if "d" in self.params and self.params["d"] < 1:
            raise ValueError("d must be >= 1")
        if "n" in self.params and self.params["n"] < 1:
            raise ValueError("n must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "FamilyLabel":
        """Parse ``power:d=4``, ``theorem1:n=3``, ``random:d=5:seed=42``, ``lattes4``."""
        name, *parts = text.strip().split(":")
        params = {}
        for part in parts:
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"bad family parameter {part!r} in {text!r}")
            try:
                params[key.strip()] = int(value)
            except ValueError:
                raise ValueError(f"parameter {key} must be an integer, got {value!r}") from None
        return cls(name.strip(), params)

    def __str__(self):
        return ":".join([self.name] + [f"{k}={v}" for k, v in self.params.items()])

    def build(self) -> RationalMap:
        p = self.params
        if self.name == "power":
            return power_map(p["d"])
        if self.name == "theorem1":
            return theorem1_map(p["n"])
        if self.name == "lattes4":
            return lattes4()
        if self.name == "chebyshev":
            return chebyshev_map(p["d"])
        return random_map(p["d"], p["seed"])


def standard_zoo(n_random: int = 20, seed0: int = 1000) -> list[FamilyLabel]:
    """Power 2-6, Chebyshev 2-3, lattes4, theorem1 n <= 3 and random maps of degree 2-4."""
    labels = [FamilyLabel("power", {"d": d}) for d in range(2, 7)]
    labels += [FamilyLabel("chebyshev", {"d": d}) for d in (2, 3)]
    labels.append(FamilyLabel("lattes4"))
    labels += [FamilyLabel("theorem1", {"n": n}) for n in (1, 2, 3)]
    labels += [
        FamilyLabel("random", {"d": 2 + i % 3, "seed": seed0 + i}) for i in range(n_random)
    ]
    return labels
