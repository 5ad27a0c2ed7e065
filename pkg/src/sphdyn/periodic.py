"""Periodic points, multipliers and characteristic exponents.

Fixed points of ``f^m = p_m / q_m`` are the roots of the homogeneous form
``b P_m(a, b) - a Q_m(a, b)`` of degree ``d^m + 1``; a vanishing leading
coefficient (``deg q_m < d^m``) means infinity is fixed.  Roots from the
Aberth solver are refined by Newton's method on ``f^m(z) - z`` evaluated
along the orbit (not through the expanded iterate), deduplicated, and linked
into cycles by applying ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import DegreeCapError, OrbitTracingError, RootFindingError
from .knorm import KReport
from .rational import DEGREE_CAP, Poly, RationalMap, iterate, spherical_norm_deriv
from .sphere import CHART_U, CHART_Z, Chart, SpherePoint, chordal_arrays, chordal_distance, from_homogeneous

ROOT_RESIDUAL = 1e-10
DEDUP = 1e-8
TRACE_TOL = 1e-6
VERIFY_TOL = 1e-9
MAX_SWEEPS = 500
# iterates beyond this degree lose roots to coefficient ill-conditioning
STABLE_DEGREE = 64


def poly_roots(p: Poly, maxiter: int = MAX_SWEEPS) -> np.ndarray:
    """All roots of ``p`` with multiplicity (Aberth-Ehrlich).

    Raises :class:`RootFindingError` if some root has relative backward error
    ``|p(r)| / sum |p_k| |r|^k`` above ``1e-10``.
    """
    if p.degree < 1:
        raise ValueError("poly_roots needs degree >= 1")
    if p.degree > DEGREE_CAP:
        raise DegreeCapError(f"degree {p.degree} exceeds cap {DEGREE_CAP}")
    a, b, worst, _ = K.aberth(p.coeffs.copy(), maxiter)
    if worst > ROOT_RESIDUAL:
        raise RootFindingError(f"Aberth iteration did not converge (worst residual {worst:.3g})", worst)
    return a / b


@dataclass
class CycleRecord:
    points: list
    period: int
    multiplier: complex
    exponent: float

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "points": [p.to_list() for p in self.points],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "exponent": self.exponent,
        }


@dataclass
class CycleCensus:
    """All cycles whose period divides ``m`` together with the root count."""

    m: int
    cycles: list
    n_roots: int
    n_distinct: int
    expected_count: int
    n_rejected: int = 0

    @property
    def discrepancy(self) -> int:
        """Expected number of fixed points of f^m minus the distinct ones found."""
        return self.expected_count - self.n_distinct

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "expected_count": self.expected_count,
            "n_distinct": self.n_distinct,
            "n_rejected": self.n_rejected,
            "cycles": [c.to_dict() for c in self.cycles],
        }


def _fixed_point_form(fm: RationalMap) -> np.ndarray:
    D = fm.degree
    c = np.zeros(D + 2, dtype=np.complex128)
    c[: D + 1] += fm.num.padded(D)
    c[1: D + 2] -= fm.den.padded(D)
    return c


def _newton_refine(kern, m, chart, x, steps=60):
    """Damped Newton on ``f^m(x) - x`` in a fixed chart, along the true orbit."""
    z, dz = K.iterate_in_chart(kern, chart, x, m)
    g = z - x
    for _ in range(steps):
        if not abs(g) > 0:
            break
        den = dz - 1.0
        if abs(den) < 1e-12:
            break
        delta = g / den
        t = 1.0
        for _half in range(30):
            x_new = x - t * delta
            z_new, dz_new = K.iterate_in_chart(kern, chart, x_new, m)
            g_new = z_new - x_new
            if abs(g_new) < abs(g):
                break
            t *= 0.5
        else:
            break
        x, g, dz = x_new, g_new, dz_new
        if abs(t * delta) <= 1e-15 * (1.0 + abs(x)):
            break
    return x


def _multiplier(kern, charts, coords):
    """Derivative of f^L around the cycle, in the charts of its points."""
    L = len(coords)
    mult = 1.0 + 0j
    for i in range(L):
        _ln, c, y, d = K.step(kern, int(charts[i]), coords[i])
        target = int(charts[(i + 1) % L])
        if c != target:
            d = -d / (y * y)
        mult *= d
    return mult


def periodic_cycles(f: RationalMap, m: int, census: bool = False, divisors: bool = True):
    """Cycles of ``f`` whose exact period divides ``m``.

    Returns a list of :class:`CycleRecord`, or a :class:`CycleCensus` when
    ``census`` is true (which also carries the root count check).  With
    ``divisors`` the cycles found at each proper divisor of ``m`` are merged
    in; strongly repelling low-period points are well conditioned there but
    can be lost among the roots of the high-degree iterate.
    """
    m = int(m)
    d = f.degree
    if d ** m > DEGREE_CAP:
        raise DegreeCapError(f"degree {d}^{m} exceeds cap {DEGREE_CAP}")
    fm = iterate(f, m, check=False) if m > 1 else f
    a, b, worst, _ = K.aberth(_fixed_point_form(fm), MAX_SWEEPS)
    if worst > ROOT_RESIDUAL:
        raise RootFindingError(f"fixed points of f^{m}: worst residual {worst:.3g}", worst)
    charts, coords = from_homogeneous(a, b)
    kern = f.kernel
    pc, pz, n_rejected = _verified_points(kern, m, charts, coords)
    if divisors:
        for k in range(1, m):
            if m % k == 0:
                for c in periodic_cycles(f, k, divisors=False):
                    for p in c.points:
                        _dedup_append(pc, pz, CHART_Z if p.chart is Chart.Z else CHART_U, p.coord)
    pc, pz, succ = _close_under_f(kern, m, pc, pz)
    n = pz.size

    cycles = []
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        orbit = [i]
        j = int(succ[i])
        while j != i and len(orbit) <= m:
            if seen[j] or j in orbit:
                raise OrbitTracingError("successor map is not a permutation of the periodic points")
            orbit.append(j)
            j = int(succ[j])
        if j != i or m % len(orbit):
            raise OrbitTracingError(f"orbit of length {len(orbit)} does not close with period dividing {m}")
        for j in orbit:
            seen[j] = True
        oc, oz = pc[orbit], pz[orbit]
        lognorms = K.log_norm_many(kern, oc, oz)
        L = len(orbit)
        exponent = -math.inf if np.isneginf(lognorms).any() else float(lognorms.sum() / L)
        points = [SpherePoint(Chart.Z if c == CHART_Z else Chart.U, complex(z)) for c, z in zip(oc, oz)]
        cycles.append(CycleRecord(points, L, complex(_multiplier(kern, oc, oz)), exponent))
    cycles.sort(key=lambda c: (c.period, -c.exponent))
    if census:
        return CycleCensus(m, cycles, int(coords.size), n, d ** m + 1, n_rejected)
    return cycles


def _residual(kern, m, chart, x):
    z, _dz = K.iterate_in_chart(kern, chart, x, m)
    p = SpherePoint(Chart.Z if chart == CHART_Z else Chart.U, complex(x))
    q = SpherePoint(p.chart, complex(z))
    return chordal_distance(p, q)


def _dedup_append(pc, pz, chart, x):
    """Index of (chart, x) among the points, appending it if new."""
    if pz:
        dist = chordal_arrays(np.array(pc, dtype=np.uint8), np.array(pz),
                              np.full(len(pz), chart, dtype=np.uint8), np.full(len(pz), x))
        j = int(np.argmin(dist))
        if dist[j] <= DEDUP:
            return j, False
    pc.append(chart)
    pz.append(complex(x))
    return len(pz) - 1, True


def _verified_points(kern, m, charts, coords):
    """Newton-refined, residual-checked, deduplicated roots of f^m(z) = z."""
    pc, pz = [], []
    rejected = 0
    for i in range(coords.size):
        x = _newton_refine(kern, m, int(charts[i]), coords[i])
        c, x = from_homogeneous(*_homog(np.array([charts[i]]), np.array([x])))
        c, x = int(c[0]), complex(x[0])
        if _residual(kern, m, c, x) > VERIFY_TOL:
            rejected += 1
            continue
        _dedup_append(pc, pz, c, x)
    return pc, pz, rejected


def _close_under_f(kern, m, pc, pz):
    """Add missing images of periodic points and build the successor map.

    Images of verified periodic points are periodic; the expanded iterate is
    ill-conditioned at high degree and its solver can drop some of them.
    """
    succ = {}
    i = 0
    while i < len(pz):
        _ln, c, y, _d = K.step(kern, pc[i], pz[i])
        y = _newton_refine(kern, m, c, y)
        cc, yy = from_homogeneous(*_homog(np.array([c]), np.array([y])))
        c, y = int(cc[0]), complex(yy[0])
        j, added = _dedup_append(pc, pz, c, y)
        if added and _residual(kern, m, c, y) > TRACE_TOL:
            p = SpherePoint(Chart.Z if pc[i] == CHART_Z else Chart.U, pz[i])
            raise OrbitTracingError(
                f"f maps periodic point {p.to_complex()} outside the periodic set"
            )
        succ[i] = j
        i += 1
    succ_arr = np.array([succ[k] for k in range(len(pz))], dtype=np.int64)
    return np.array(pc, dtype=np.uint8), np.array(pz, dtype=np.complex128), succ_arr


def _homog(charts, coords):
    one = np.ones_like(coords)
    return np.where(charts == CHART_Z, coords, one), np.where(charts == CHART_Z, one, coords)


def default_m_max(f: RationalMap, max_degree: int = STABLE_DEGREE) -> int:
    """Largest period whose iterate has degree ``<= max_degree`` (at least 1)."""
    m = 1
    while f.degree ** (m + 1) <= max_degree:
        m += 1
    return m


def all_cycles(f: RationalMap, m_max: int | None = None) -> list:
    """Every cycle of exact period ``<= m_max`` (each listed once)."""
    if m_max is None:
        m_max = default_m_max(f)
    out = []
    for m in range(1, int(m_max) + 1):
        out.extend(c for c in periodic_cycles(f, m, divisors=False) if c.period == m)
    return out


def chi_max_lower(f: RationalMap, m_max: int | None = None, cycles=None) -> float:
    """Largest characteristic exponent over cycles of period ``<= m_max``.

    Superattracting cycles carry ``-inf`` and never win.
    """
    if m_max is None:
        m_max = default_m_max(f)
    if cycles is None:
        cycles = all_cycles(f, m_max)
    best = -math.inf
    for c in cycles:
        if c.period <= m_max and c.exponent > best:
            best = c.exponent
    return best


def best_cycles(cycles, k: int = 3) -> list:
    return sorted((c for c in cycles if math.isfinite(c.exponent)), key=lambda c: -c.exponent)[:k]


@dataclass
class CycleCheck:
    found: bool
    cycle: CycleRecord | None

    def to_dict(self) -> dict:
        return {"found": self.found, "cycle": None if self.cycle is None else self.cycle.to_dict()}


def k_attaining_cycle_check(f: RationalMap, kreport: KReport, m_max: int | None = None, tol: float = 1e-6,
                            cycles=None) -> CycleCheck:
    """Look for a cycle of period ``<= m_max`` inside the argmax set of ``||f'||``.

    A hit certifies ``k_inf = log K`` up to ``tol``; a miss proves nothing.
    """
    if m_max is None:
        m_max = default_m_max(f)
    if cycles is None:
        cycles = all_cycles(f, m_max)
    threshold = (1.0 - tol) * kreport.value
    for c in sorted(cycles, key=lambda c: c.period):
        if c.period > m_max:
            continue
        if all(spherical_norm_deriv(f, p) >= threshold for p in c.points):
            return CycleCheck(True, c)
    return CycleCheck(False, None)
