"""Polynomials and rational self-maps of the sphere.

Maps are evaluated in homogeneous form so that poles and the point at
infinity need no special casing: ``f = [P : Q]`` with ``P, Q`` of formal
degree ``d``, evaluated in whichever chart keeps ``|coord| <= 1``.

The spherical derivative norm uses the pole-free Wronskian form::

    ||f'||(z) = |W(z)| (1 + |z|^2) / (|p(z)|^2 + |q(z)|^2),   W = p'q - pq'

which is invariant under rescaling of the homogeneous coordinates and so
has the same expression in either chart.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import _kernels as K
from .errors import CompositionError, DegenerateMapError, DegreeCapError
from .sphere import (
    CHART_U,
    CHART_Z,
    Chart,
    SpherePoint,
    points_to_arrays,
)

DEGREE_CAP = 4096
COPRIME_TOL = 1e-9


class Poly:
    """Polynomial with complex coefficients in ascending powers.

    Trailing exact zeros are stripped, so ``coeffs[-1] != 0`` unless the
    polynomial is zero, in which case ``coeffs`` is empty.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = np.array(coeffs, dtype=np.complex128).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        c.setflags(write=False)
        self._c = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    def padded(self, n: int) -> np.ndarray:
        """Coefficients as an array of formal degree ``n``."""
        out = np.zeros(n + 1, dtype=np.complex128)
        out[: self._c.size] = self._c
        return out

    def __call__(self, z):
        if self.is_zero():
            return np.zeros_like(np.asarray(z, dtype=np.complex128))
        return npoly.polyval(z, self._c)

    def deriv(self) -> "Poly":
        if self._c.size <= 1:
            return Poly()
        return Poly(npoly.polyder(self._c))

    def _other(self, other):
        return other._c if isinstance(other, Poly) else np.array([other], dtype=np.complex128)

    def __add__(self, other):
        o = self._other(other)
        out = np.zeros(max(self._c.size, o.size), dtype=np.complex128)
        out[: self._c.size] += self._c
        out[: o.size] += o
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(-self._c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else -complex(other))

    def __mul__(self, other):
        o = self._other(other)
        if self.is_zero() or o.size == 0:
            return Poly()
        return Poly(npoly.polymul(self._c, o))

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"Poly({self._c.tolist()})"


def _as_poly(p) -> Poly:
    return p if isinstance(p, Poly) else Poly(p)


class RationalMap:
    """A reduced rational map ``num / den`` of degree ``max(deg num, deg den)``.

    Construction normalizes the coefficients (largest modulus 1), caches the
    Wronskian and runs the approximate coprimality gate: a numerator value
    below ``COPRIME_TOL`` at any root of the denominator raises
    :class:`DegenerateMapError`.  Near-degenerate input is rejected rather
    than reduced.
    """

    def __init__(self, num, den, check: bool = True):
        num, den = _as_poly(num), _as_poly(den)
        if num.is_zero() and den.is_zero():
            raise DegenerateMapError("degenerate map: numerator and denominator are both zero")
        if num.is_zero() or den.is_zero():
            raise DegenerateMapError("degenerate map: constant map")
        d = max(num.degree, den.degree)
        if d < 1:
            raise DegenerateMapError("degenerate map: constant map")
        scale = max(np.abs(num.coeffs).max(), np.abs(den.coeffs).max())
        if not np.isfinite(scale):
            raise CompositionError("composition ill-conditioned: non-finite coefficients")
        self._num = Poly(num.coeffs / scale)
        self._den = Poly(den.coeffs / scale)
        self._degree = d
        self._wronskian = self.compute_wronskian()
        pz = self._num.padded(d)
        qz = self._den.padded(d)
        wz = self._wronskian.padded(2 * d - 2)
        arrays = (pz, qz, wz, pz[::-1].copy(), qz[::-1].copy(), -wz[::-1].copy())
        for a in arrays:
            a.setflags(write=False)
        self._arrays = arrays
        if check:
            self._coprimality_gate()

    @property
    def num(self) -> Poly:
        return self._num

    @property
    def den(self) -> Poly:
        return self._den

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def wronskian(self) -> Poly:
        return self._wronskian

    @property
    def kernel(self):
        return self._arrays

    def compute_wronskian(self) -> Poly:
        w = self._num.deriv() * self._den - self._num * self._den.deriv()
        # the z^(2d-1) terms cancel exactly in theory; drop their rounding residue
        return Poly(w.coeffs[: 2 * self._degree - 1])

    def _coprimality_gate(self):
        d = self._degree
        ra, rb, _worst, _ = K.aberth(self._den.padded(d), 500)
        if ra.size == 0:
            return
        pz = self._num.padded(d)
        pu = pz[::-1].copy()
        apz, apu = np.abs(pz), np.abs(pu)
        vals = np.empty(ra.size)
        for i in range(ra.size):
            if abs(ra[i]) <= abs(rb[i]):
                x = ra[i] / rb[i]
                value, scale = abs(K.horner(pz, x)), K.horner(apz + 0j, abs(x)).real
            else:
                x = rb[i] / ra[i]
                value, scale = abs(K.horner(pu, x)), K.horner(apu + 0j, abs(x)).real
            # componentwise-relative size of the numerator at the root
            vals[i] = value / scale if scale > 0 else 0.0
        k = int(np.argmin(vals))
        if vals[k] <= COPRIME_TOL:
            where = SpherePoint.from_homogeneous(ra[k], rb[k]).to_complex()
            raise DegenerateMapError(
                f"degenerate map: numerator and denominator share a root near {where}"
                f" (|num| = {vals[k]:.3g})"
            )

    def __call__(self, p):
        return apply(self, p if isinstance(p, SpherePoint) else SpherePoint.from_complex(p))

    def __eq__(self, other):
        return (
            isinstance(other, RationalMap)
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self):
        return hash((self._num, self._den))

    def __repr__(self):
        return f"RationalMap(num={self._num.coeffs.tolist()}, den={self._den.coeffs.tolist()})"

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "num": [[c.real, c.imag] for c in self._num.coeffs],
            "den": [[c.real, c.imag] for c in self._den.coeffs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RationalMap":
        try:
            num = [complex(re, im) for re, im in data["num"]]
            den = [complex(re, im) for re, im in data["den"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed map JSON: {exc}") from None
        return make_map(num, den)


def make_map(num, den) -> RationalMap:
    return RationalMap(num, den)


def load_map(path) -> RationalMap:
    return RationalMap.from_dict(json.loads(Path(path).read_text()))


def dump_map(f: RationalMap, path) -> None:
    Path(path).write_text(json.dumps(f.to_dict()))


# -- evaluation ------------------------------------------------------------

def apply(f: RationalMap, p: SpherePoint) -> SpherePoint:
    chart = CHART_Z if p.chart is Chart.Z else CHART_U
    _ln, c, z, _d = K.step(f.kernel, chart, p.coord)
    return SpherePoint(Chart.Z if c == CHART_Z else Chart.U, z)


def apply_arrays(f: RationalMap, charts, coords):
    return K.apply_many(f.kernel, np.asarray(charts, dtype=np.uint8),
                        np.asarray(coords, dtype=np.complex128))


def spherical_norm_deriv(f: RationalMap, p: SpherePoint) -> float:
    """``||f'||`` at ``p``: finite at poles and at infinity."""
    chart = CHART_Z if p.chart is Chart.Z else CHART_U
    return math.exp(K.log_norm(f.kernel, chart, p.coord))


def log_norm_arrays(f: RationalMap, charts, coords) -> np.ndarray:
    return K.log_norm_many(f.kernel, np.asarray(charts, dtype=np.uint8),
                           np.asarray(coords, dtype=np.complex128))


def norm_arrays(f: RationalMap, charts, coords) -> np.ndarray:
    return np.exp(log_norm_arrays(f, charts, coords))


def norm_at(f: RationalMap, points) -> np.ndarray:
    return norm_arrays(f, *points_to_arrays(points))


# -- algebra -------------------------------------------------------------------

def _powers(p: np.ndarray, n: int) -> list[np.ndarray]:
    out = [np.ones(1, dtype=np.complex128)]
    for _ in range(n):
        out.append(npoly.polymul(out[-1], p))
    return out


def compose(f: RationalMap, g: RationalMap, cap: int = DEGREE_CAP, check: bool = True) -> RationalMap:
    """``f o g`` by homogeneous substitution; the degree is exactly ``deg f * deg g``."""
    d, e = f.degree, g.degree
    if d * e > cap:
        raise DegreeCapError(f"degree {d}*{e} = {d * e} exceeds cap {cap}")
    a = g.num.coeffs
    b = g.den.coeffs
    pa = _powers(a, d)
    pb = _powers(b, d)
    fp = f.num.padded(d)
    fq = f.den.padded(d)
    num = np.zeros(d * e + 1, dtype=np.complex128)
    den = np.zeros(d * e + 1, dtype=np.complex128)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(d + 1):
            term = npoly.polymul(pa[k], pb[d - k])
            num[: term.size] += fp[k] * term
            den[: term.size] += fq[k] * term
    if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
        raise CompositionError("composition ill-conditioned: coefficient overflow")
    h = RationalMap(num, den, check=False)
    if h.degree != d * e:
        raise CompositionError(
            f"composition ill-conditioned: degree {h.degree} instead of {d * e}"
        )
    if check:
        h._coprimality_gate()
    return h


def iterate(f: RationalMap, m: int, cap: int = DEGREE_CAP, check: bool = True) -> RationalMap:
    """The ``m``-th iterate ``f^m`` (renormalized after every composition)."""
    m = int(m)
    if m < 1:
        raise ValueError("iterate count must be positive")
    if f.degree ** m > cap:
        raise DegreeCapError(f"degree {f.degree}^{m} exceeds cap {cap}")
    h = f
    for _ in range(m - 1):
        h = compose(f, h, cap=cap, check=False)
    if check and m > 1:
        h._coprimality_gate()
    return h


def mobius(a, b, c, d) -> RationalMap:
    """``z -> (a z + b) / (c z + d)``."""
    return RationalMap([b, a], [d, c])


def rotation_map(alpha: complex, beta: complex) -> RationalMap:
    return mobius(alpha, beta, -beta.conjugate(), alpha.conjugate())


def conjugate_by_rotation(f: RationalMap, alpha: complex, beta: complex) -> RationalMap:
    """``rho o f o rho^-1`` for the rotation ``rho`` given by ``(alpha, beta)``."""
    rho = rotation_map(alpha, beta)
    rho_inv = rotation_map(alpha.conjugate(), -beta)
    return compose(rho, compose(f, rho_inv))
