"""Global maximization of the spherical derivative norm.

``K(f) = max ||f'||`` is estimated by evaluating on a Fibonacci grid and
polishing the best well-separated grid points with a Nelder-Mead simplex in
the local chart.  The reported value is always attained at some point, so it
is a certified lower bound on ``K``; it is the global maximum whenever the
grid seeds the right basin.

``K(f^n)`` is handled the same way using the chain rule
``log ||(f^n)'(z)|| = sum_j log ||f'(f^j z)||`` so no symbolic iterate is
needed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from . import _kernels as K
from .errors import DegenerateMapError, NonFiniteError, SphdynError
from .rational import RationalMap, make_map
from .sphere import (
    CHART_U,
    CHART_Z,
    Chart,
    SpherePoint,
    arrays_to_points,
    chordal_arrays,
    chordal_distance,
    make_grid,
    points_to_arrays,
    quadrature_values,
)

POLISH_TOL = 1e-12
POLISH_MAXITER = 500
ARGMAX_REL = 1e-6
ARGMAX_DEDUP = 1e-6
ITERATE_GRID_CAP = 2 ** 20


@dataclass
class KReport:
    value: float
    argmax_points: list
    grid_size: int
    n_seeds: int
    polish_tol: float = POLISH_TOL
    iterate: int = 1

    @property
    def log_value(self) -> float:
        return math.log(self.value) if self.value > 0 else -math.inf

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": [p.to_list() for p in self.argmax_points],
            "grid_size": self.grid_size,
            "n_seeds": self.n_seeds,
            "polish_tol": self.polish_tol,
        }


def default_grid_size(degree: int) -> int:
    return max(100, 50 * degree * degree)


@lru_cache(maxsize=8)
def _grid(n: int):
    return make_grid(n, "fibonacci")


def chain_norm_log(f: RationalMap, n: int, p: SpherePoint) -> float:
    """``sum_{j<n} log ||f'(f^j p)||``; ``-inf`` if the orbit meets a critical point."""
    chart = CHART_Z if p.chart is Chart.Z else CHART_U
    return K.chain_log(f.kernel, chart, p.coord, int(n))


def _select_seeds(grid, values, n_seeds):
    order = np.argsort(values, kind="stable")[::-1]
    pool = order[: max(50 * n_seeds, 200)]
    chosen = []
    sep = 3.0 * grid.spacing
    for idx in pool:
        if len(chosen) == n_seeds:
            break
        if chosen:
            c = np.array(chosen)
            d = chordal_arrays(grid.charts[c], grid.coords[c],
                               np.full(c.size, grid.charts[idx]), np.full(c.size, grid.coords[idx]))
            if d.min() < sep:
                continue
        chosen.append(int(idx))
    return chosen


def _maximize(f: RationalMap, n: int, grid_size: int, n_seeds: int, extra_seeds=()):
    grid = _grid(int(grid_size))
    kern = f.kernel
    values = K.chain_log_many(kern, grid.charts, grid.coords, n)
    if np.isnan(values).any():
        raise NonFiniteError("non-finite derivative norm on the grid")
    seeds = [(int(grid.charts[i]), complex(grid.coords[i]), float(values[i]))
             for i in _select_seeds(grid, values, n_seeds)]
    for p in extra_seeds:
        chart = CHART_Z if p.chart is Chart.Z else CHART_U
        seeds.append((chart, p.coord, K.chain_log(kern, chart, p.coord, n)))
    polished = []
    for chart, x, v0 in seeds:
        h = grid.spacing * (1.0 + abs(x) ** 2)
        x1, v1, _ = K.polish(kern, chart, x, n, h, POLISH_MAXITER, POLISH_TOL, 1e-10)
        if not v1 >= v0:
            x1, v1 = x, v0
        polished.append((SpherePoint(Chart.Z if chart == CHART_Z else Chart.U, x1).canonical(), v1))
    best = max(v for _, v in polished)
    if not np.isfinite(best):
        raise NonFiniteError("derivative norm vanishes at every polished seed")
    cutoff = best + math.log1p(-ARGMAX_REL)
    argmax = []
    for p, v in sorted(polished, key=lambda t: -t[1]):
        if v < cutoff:
            continue
        if all(chordal_distance(p, q) > ARGMAX_DEDUP for q in argmax):
            argmax.append(p)
    return math.exp(best), argmax


def k_norm(f: RationalMap, grid_size: int | None = None, n_seeds: int = 8) -> KReport:
    """Estimate ``K(f) = max ||f'||`` over the sphere."""
    if grid_size is None:
        grid_size = default_grid_size(f.degree)
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    value, argmax = _maximize(f, 1, grid_size, n_seeds)
    return KReport(value, argmax, int(grid_size), int(n_seeds))


def k_norm_iterate(f: RationalMap, n: int, grid_size: int | None = None, n_seeds: int = 8,
                   extra_seeds=()) -> KReport:
    """Estimate ``K(f^n)`` from the chain rule, without forming ``f^n``.

    ``extra_seeds`` are polished in addition to the grid candidates (for
    instance points of a strongly repelling cycle).
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    if grid_size is None:
        degree = float(f.degree) ** n
        grid_size = int(min(max(100.0, 50.0 * degree * degree), ITERATE_GRID_CAP))
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    value, argmax = _maximize(f, n, grid_size, n_seeds, extra_seeds)
    return KReport(value, argmax, int(grid_size), int(n_seeds), iterate=n)


def area_identity(f: RationalMap, grid_size: int = 10 ** 5) -> dict:
    """Quadrature of ``||f'||^2`` over the sphere against its exact value ``pi * d``."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    grid = make_grid(int(grid_size), "fibonacci")
    values = np.exp(2.0 * K.log_norm_many(f.kernel, grid.charts, grid.coords))
    integral = quadrature_values(values, grid)
    expected = math.pi * f.degree
    return {"integral": integral, "expected": expected, "rel_err": abs(integral - expected) / expected}


def _disc_rule(grid_size: int):
    n_r = max(8, int(round(math.sqrt(grid_size / 2.0))))
    n_t = max(16, int(math.ceil(grid_size / n_r)))
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w * r
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    z = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (wr[:, None] * np.full(n_t, 2.0 * np.pi / n_t)[None, :]).ravel()
    return z, weights


def phi_functional(f: RationalMap, grid_size: int = 10 ** 4) -> float:
    """``int_{|z|<=1} ||f'|| / (1 + |z|^2) dxdy`` by a polar product rule."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    z, weights = _disc_rule(int(grid_size))
    charts = np.zeros(z.size, dtype=np.uint8)
    norms = np.exp(K.log_norm_many(f.kernel, charts, z))
    return float(np.dot(weights, norms / (1.0 + np.abs(z) ** 2)))


# -- exploratory minimization of K over maps of fixed degree -------------------

def _vector_to_map(x: np.ndarray, d: int) -> RationalMap:
    c = x[: 2 * d + 2] + 1j * x[2 * d + 2:]
    return make_map(c[: d + 1], c[d + 1:])


def _map_to_vector(f: RationalMap, d: int) -> np.ndarray:
    c = np.concatenate([f.num.padded(d), f.den.padded(d)])
    return np.concatenate([c.real, c.imag])


@dataclass
class MinKResult:
    best_map: RationalMap
    k: float
    starts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"k": self.k, "map": self.best_map.to_dict(), "starts": self.starts}


def min_k_search(d: int, n_starts: int = 4, seed: int = 0, starts=None, maxfev: int | None = None,
                 inner_grid: int = 2000, inner_seeds: int = 8, final_grid: int = 10 ** 5) -> MinKResult:
    """Multistart simplex descent of ``K`` over normalized degree-``d`` maps.

    The search is exploratory: the inner ``K`` estimate is cheap, so the best
    map is re-measured on a fine grid before being returned.
    """
    if not 2 <= d <= 6:
        raise ValueError("min_k_search needs 2 <= d <= 6")
    if maxfev is None:
        maxfev = 300 * (4 * d + 4)
    initial = []
    if starts is not None:
        initial = [_map_to_vector(f, d) for f in starts]
    else:
        for i in range(n_starts):
            rng = np.random.default_rng([seed, i])
            initial.append(rng.standard_normal(4 * d + 4) / math.sqrt(2.0))

    def objective(x):
        try:
            f = _vector_to_map(x, d)
        except (DegenerateMapError, SphdynError):
            return math.inf
        if f.degree != d:
            return math.inf
        return _maximize(f, 1, inner_grid, inner_seeds)[0]

    best = None
    log = []
    for x0 in initial:
        if not math.isfinite(objective(x0)):
            log.append({"k": None})
            continue
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"maxfev": maxfev, "xatol": 1e-8, "fatol": 1e-10, "adaptive": True})
        try:
            f = _vector_to_map(res.x, d)
        except SphdynError:
            log.append({"k": None})
            continue
        k = k_norm(f, grid_size=max(final_grid, default_grid_size(d)), n_seeds=16).value
        log.append({"k": k, "nfev": int(res.nfev)})
        if best is None or k < best[1]:
            best = (f, k)
    if best is None:
        raise DegenerateMapError("degenerate map: every start was degenerate")
    f, k = best
    floor = max(2.0, math.sqrt(d))
    if k < floor - 1e-9:
        raise AssertionError(f"K estimate {k} below the floor {floor}: optimizer failure")
    return MinKResult(f, k, log)
