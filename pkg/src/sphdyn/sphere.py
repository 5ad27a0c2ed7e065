"""Riemann-sphere points, the chordal metric, grids and quadrature.

A point is stored in one of two affine charts: ``Z`` (the plane coordinate
``z``) or ``U`` (``u = 1/z``).  The canonical chart is the one in which
``|coord| <= 1``, with ties on the equator going to ``Z``.  Infinity is
``U`` with ``coord = 0``.  Internally batches of points are kept as a pair of
arrays ``(charts, coords)`` where ``charts`` is ``uint8`` (0 for ``Z``,
1 for ``U``).

The metric is normalized so that the sphere has total area ``pi``
(area element ``dxdy / (1 + |z|^2)^2``) and the chordal distance between
antipodes is 1.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import NonFiniteError

CHART_Z = 0
CHART_U = 1


class Chart(str, Enum):
    Z = "Z"
    U = "U"


_CHART_CODE = {Chart.Z: CHART_Z, Chart.U: CHART_U}
_CODE_CHART = {CHART_Z: Chart.Z, CHART_U: Chart.U}


@dataclass(frozen=True)
class SpherePoint:
    chart: Chart
    coord: complex

    def __post_init__(self):
        object.__setattr__(self, "chart", Chart(self.chart))
        object.__setattr__(self, "coord", complex(self.coord))

    @classmethod
    def from_complex(cls, z) -> "SpherePoint":
        """Embed a complex number (or ``inf``) in its canonical chart."""
        z = complex(z)
        if cmath.isinf(z):
            return cls(Chart.U, 0j)
        if abs(z) <= 1.0:
            return cls(Chart.Z, z)
        return cls(Chart.U, 1.0 / z)

    @classmethod
    def from_homogeneous(cls, a, b) -> "SpherePoint":
        a, b = complex(a), complex(b)
        if a == 0 and b == 0:
            raise ValueError("[0:0] is not a point of the sphere")
        if abs(a) <= abs(b):
            return cls(Chart.Z, a / b)
        return cls(Chart.U, b / a)

    @property
    def homogeneous(self) -> tuple[complex, complex]:
        if self.chart is Chart.Z:
            return self.coord, 1.0 + 0j
        return 1.0 + 0j, self.coord

    @property
    def is_infinity(self) -> bool:
        return self.chart is Chart.U and self.coord == 0

    def to_complex(self) -> complex:
        if self.chart is Chart.Z:
            return self.coord
        if self.coord == 0:
            return complex(math.inf, 0.0)
        return 1.0 / self.coord

    def canonical(self) -> "SpherePoint":
        return SpherePoint.from_homogeneous(*self.homogeneous)

    def to_list(self) -> list:
        return [self.chart.value, self.coord.real, self.coord.imag]

    @classmethod
    def from_list(cls, item) -> "SpherePoint":
        chart, re, im = item
        return cls(Chart(chart), complex(re, im))


INFINITY = SpherePoint(Chart.U, 0j)
ZERO = SpherePoint(Chart.Z, 0j)


# -- array helpers ---------------------------------------------------------

def points_to_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    charts = np.array([_CHART_CODE[p.chart] for p in points], dtype=np.uint8)
    coords = np.array([p.coord for p in points], dtype=np.complex128)
    return charts, coords


def arrays_to_points(charts, coords) -> list[SpherePoint]:
    return [SpherePoint(_CODE_CHART[int(c)], complex(x)) for c, x in zip(charts, coords)]


def to_homogeneous(charts, coords) -> tuple[np.ndarray, np.ndarray]:
    charts = np.asarray(charts)
    coords = np.asarray(coords, dtype=np.complex128)
    one = np.ones_like(coords)
    a = np.where(charts == CHART_Z, coords, one)
    b = np.where(charts == CHART_Z, one, coords)
    return a, b


def from_homogeneous(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    in_z = np.abs(a) <= np.abs(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        coords = np.where(in_z, a / np.where(in_z, b, 1.0), b / np.where(in_z, 1.0, a))
    charts = np.where(in_z, CHART_Z, CHART_U).astype(np.uint8)
    return charts, coords


def canonicalize(charts, coords) -> tuple[np.ndarray, np.ndarray]:
    return from_homogeneous(*to_homogeneous(charts, coords))


def chordal_arrays(charts1, coords1, charts2, coords2) -> np.ndarray:
    a1, b1 = to_homogeneous(charts1, coords1)
    a2, b2 = to_homogeneous(charts2, coords2)
    num = np.abs(a1 * b2 - a2 * b1)
    den = np.sqrt((np.abs(a1) ** 2 + np.abs(b1) ** 2) * (np.abs(a2) ** 2 + np.abs(b2) ** 2))
    return np.minimum(num / den, 1.0)


def chordal_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Chordal distance normalized so antipodal points are at distance 1."""
    a1, b1 = p.homogeneous
    a2, b2 = q.homogeneous
    num = abs(a1 * b2 - a2 * b1)
    den = math.sqrt((abs(a1) ** 2 + abs(b1) ** 2) * (abs(a2) ** 2 + abs(b2) ** 2))
    return min(num / den, 1.0)


def antipode(p: SpherePoint) -> SpherePoint:
    """The diametrically opposite point, ``z -> -1/conj(z)``."""
    a, b = p.homogeneous
    return SpherePoint.from_homogeneous(-b.conjugate(), a.conjugate())


# -- rotations ---------------------------------------------------------------

def random_rotation(rng: np.random.Generator) -> tuple[complex, complex]:
    """Haar-random element of SU(2), returned as ``(alpha, beta)``.

    The rotation acts by ``z -> (alpha z + beta) / (-conj(beta) z + conj(alpha))``.
    """
    v = rng.standard_normal(4)
    v /= np.linalg.norm(v)
    return complex(v[0], v[1]), complex(v[2], v[3])


def rotate(p: SpherePoint, alpha: complex, beta: complex) -> SpherePoint:
    a, b = p.homogeneous
    return SpherePoint.from_homogeneous(
        alpha * a + beta * b, -beta.conjugate() * a + alpha.conjugate() * b
    )


# -- grids -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereGrid:
    charts: np.ndarray
    coords: np.ndarray
    weights: np.ndarray
    scheme: str = "fibonacci"
    spacing: float = field(default=0.0)

    @property
    def size(self) -> int:
        return int(self.coords.shape[0])

    @property
    def points(self) -> list[SpherePoint]:
        return arrays_to_points(self.charts, self.coords)


GRID_SCHEMES = ("fibonacci", "two_chart_product")


def _fibonacci(n: int):
    i = np.arange(n, dtype=float) + 0.5
    h = 1.0 - 2.0 * i / n
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    theta = 2.0 * np.pi * (i - 0.5) / golden
    rho = np.sqrt(np.maximum(1.0 - h * h, 0.0))
    xy = rho * np.exp(1j * theta)
    south = h <= 0.0
    # stereographic projection; the U-chart branch avoids dividing by 1 - h ~ 0
    coords = np.where(south, xy / (1.0 - h), np.conj(xy) / (1.0 + h))
    charts = np.where(south, CHART_Z, CHART_U).astype(np.uint8)
    weights = np.full(n, np.pi / n)
    return charts, coords, weights


def _two_chart_product(n: int):
    n_theta = int(math.ceil(math.sqrt(n)))
    n_s = int(math.ceil(n / (2 * n_theta)))
    # s = r^2 turns the chart area element into ds dtheta / (2 (1 + s)^2)
    x, w = np.polynomial.legendre.leggauss(n_s)
    s = 0.5 * (x + 1.0)
    ws = 0.5 * w / (2.0 * (1.0 + s) ** 2)
    theta = 2.0 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
    wt = 2.0 * np.pi / n_theta
    r = np.sqrt(s)
    disc = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    wdisc = (ws[:, None] * wt * np.ones(n_theta)[None, :]).ravel()
    coords = np.concatenate([disc, disc])
    charts = np.concatenate([np.zeros(disc.size), np.ones(disc.size)]).astype(np.uint8)
    weights = np.concatenate([wdisc, wdisc])
    return charts, coords, weights


def make_grid(n: int, scheme: str = "fibonacci") -> SphereGrid:
    """Deterministic quadrature grid of between ``n`` and ``2n`` points.

    Parameters
    ----------
    n : int
        Requested number of nodes, at least 8.
    scheme : {"fibonacci", "two_chart_product"}
        ``fibonacci`` is a quasi-uniform lattice with equal weights;
        ``two_chart_product`` is a Gauss-Legendre x trapezoid product rule on
        the unit disc of each chart.

    Returns
    -------
    SphereGrid
        Canonical points whose weights sum to ``pi``.
    """
    n = int(n)
    if n < 8:
        raise ValueError(f"grid size must be at least 8, got {n}")
    if scheme == "fibonacci":
        charts, coords, weights = _fibonacci(n)
    elif scheme == "two_chart_product":
        charts, coords, weights = _two_chart_product(n)
    else:
        raise ValueError(f"unknown grid scheme {scheme!r}; expected one of {GRID_SCHEMES}")
    weights = weights * (np.pi / weights.sum())
    spacing = math.sqrt(np.pi / coords.size)
    charts.setflags(write=False)
    coords.setflags(write=False)
    weights.setflags(write=False)
    return SphereGrid(charts, coords, weights, scheme, spacing)


def quadrature(g: Callable, grid: SphereGrid, vectorized: bool = False) -> float:
    """Integrate ``g`` against the spherical area element.

    ``g`` takes a :class:`SpherePoint`, or, when ``vectorized`` is true, the
    pair ``(charts, coords)`` of arrays and returns an array of values.
    """
    if vectorized:
        values = np.asarray(g(grid.charts, grid.coords), dtype=float)
    else:
        values = np.array([g(p) for p in grid.points], dtype=float)
    return quadrature_values(values, grid)


def quadrature_values(values, grid: SphereGrid) -> float:
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        node = SpherePoint(_CODE_CHART[int(grid.charts[k])], complex(grid.coords[k]))
        raise NonFiniteError(f"integrand is {values[k]} at node {k} ({node.chart.value}, {node.coord})")
    return float(np.dot(grid.weights, values))
