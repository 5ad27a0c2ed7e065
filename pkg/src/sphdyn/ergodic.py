"""The measure of maximal entropy and the average characteristic exponent.

Samples of ``mu`` come from balanced inverse iteration: starting from a
generic point, each path repeatedly jumps to one of the ``d`` preimages
(chosen uniformly, with multiplicity).  Backward iteration contracts towards
the Julia set, so roundoff does not accumulate.

Forward Birkhoff averages are offered two ways.  ``direct`` iterates ``f``
from the start point and is only trustworthy when the orbit cannot drift off
the Julia set (for instance when it is the whole sphere).  ``pullback``
builds a backward orbit ``z_N, ..., z_0`` from the start with
``f(z_{k+1}) = z_k`` and averages along it read forwards, which is the
forward orbit of the mu-generic point ``z_N`` computed without expansion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels as K
from .errors import NonFiniteError, RootFindingError, SamplingError
from .periodic import MAX_SWEEPS, ROOT_RESIDUAL
from .rational import RationalMap, apply_arrays, log_norm_arrays
from .sphere import CHART_U, CHART_Z, Chart, SpherePoint, arrays_to_points, chordal_arrays

DEFAULT_START = 0.5 + 0.5j
MAX_RESTARTS = 10
WINSOR_LOG = math.log(1e-12)
MAX_FLAGGED = 0.01
N_BLOCKS = 10


def _chart_code(p: SpherePoint) -> int:
    return CHART_Z if p.chart is Chart.Z else CHART_U


def _check_roots(worst: float, what: str):
    if worst > ROOT_RESIDUAL:
        raise RootFindingError(f"{what}: worst residual {worst:.3g}", worst)


def preimages(f: RationalMap, w: SpherePoint) -> list[SpherePoint]:
    """The ``d`` preimages of ``w`` with multiplicity (infinity included)."""
    ra, rb, worst, _ = K.aberth(K.fiber_poly(f.kernel, _chart_code(w), w.coord), MAX_SWEEPS)
    _check_roots(worst, "preimages")
    return [SpherePoint.from_homogeneous(a, b) for a, b in zip(ra, rb)]


def _is_exceptional(f: RationalMap, p: SpherePoint) -> bool:
    """Two levels of preimages collapsing to at most two points."""
    level = [p]
    for _ in range(2):
        level = [q for r in level for q in preimages(f, r)]
    c = np.array([_chart_code(q) for q in level], dtype=np.uint8)
    z = np.array([q.coord for q in level])
    distinct = [0]
    for i in range(1, z.size):
        d = chordal_arrays(c[distinct], z[distinct], np.full(len(distinct), c[i], dtype=np.uint8),
                           np.full(len(distinct), z[i]))
        if d.min() > 1e-6:
            distinct.append(i)
    return len(distinct) <= 2


def generic_start(f: RationalMap, start: complex = DEFAULT_START) -> SpherePoint:
    """``start``, nudged deterministically until it is not an exceptional point."""
    z = complex(start)
    for k in range(MAX_RESTARTS + 1):
        p = SpherePoint.from_complex(z)
        if not _is_exceptional(f, p):
            return p
        z = z + 1e-3 * (k + 1) * complex(math.cos(k + 1.0), math.sin(k + 1.0))
    raise SamplingError(f"start point stays exceptional after {MAX_RESTARTS} restarts")


def _choices(f: RationalMap, seed: int, index: int, steps: int) -> np.ndarray:
    rng = np.random.default_rng([int(seed), int(index)])
    return rng.integers(0, f.degree, size=steps, dtype=np.int64)


@dataclass
class MuSample:
    """Endpoints of ``n_paths`` backward orbits of length ``burn_in + depth``."""

    charts: np.ndarray
    coords: np.ndarray
    seed: int
    burn_in: int
    n_paths: int
    depth: int

    @property
    def points(self) -> list[SpherePoint]:
        return arrays_to_points(self.charts, self.coords)


def mu_sample(f: RationalMap, n_paths: int = 4000, burn_in: int = 40, seed: int = 0,
              depth: int = 0) -> MuSample:
    if burn_in < 20:
        raise ValueError("burn_in must be at least 20")
    if n_paths < 1:
        raise ValueError("n_paths must be positive")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    start = generic_start(f)
    steps = burn_in + depth
    choices = np.empty((n_paths, steps), dtype=np.int64)
    for i in range(n_paths):
        choices[i] = _choices(f, seed, i, steps)
    charts, coords, worst = K.backward_endpoints(f.kernel, _chart_code(start), start.coord,
                                                 choices, MAX_SWEEPS)
    _check_roots(float(worst.max()), "inverse iteration")
    return MuSample(charts, coords, int(seed), int(burn_in), int(n_paths), int(depth))


@dataclass
class ChiEstimate:
    value: float
    stderr: float
    n_samples: int
    method: str
    flagged: int = 0

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "n_samples": self.n_samples,
                "method": self.method}


def _winsorize(logs: np.ndarray):
    flagged = int(np.count_nonzero(logs < WINSOR_LOG))
    return np.maximum(logs, WINSOR_LOG), flagged


def chi_average(f: RationalMap, n_paths: int = 4000, burn_in: int = 40, seed: int = 0,
                depth: int = 0, sample: MuSample | None = None) -> ChiEstimate:
    """Ensemble mean of ``log ||f'||`` over a mu-sample."""
    if sample is None:
        sample = mu_sample(f, n_paths, burn_in, seed, depth)
    logs, flagged = _winsorize(log_norm_arrays(f, sample.charts, sample.coords))
    if flagged > MAX_FLAGGED * logs.size:
        raise SamplingError(f"{flagged} of {logs.size} samples lie within 1e-12 of a critical point")
    stderr = float(logs.std(ddof=1) / math.sqrt(logs.size)) if logs.size > 1 else 0.0
    return ChiEstimate(float(logs.mean()), stderr, int(logs.size), "ensemble_backward", flagged)


def _block_stderr(logs: np.ndarray) -> float:
    blocks = np.array([b.mean() for b in np.array_split(logs, N_BLOCKS)])
    return float(blocks.std(ddof=1) / math.sqrt(N_BLOCKS))


def birkhoff_forward(f: RationalMap, start: SpherePoint, n_steps: int, scheme: str = "direct",
                     burn_in: int = 40, seed: int = 0) -> ChiEstimate:
    """Time average of ``log ||f'||`` along one forward orbit.

    ``scheme="pullback"`` averages over the forward orbit of a point ``burn_in
    + n_steps`` backward steps above ``start`` (see the module docstring);
    ``burn_in`` and ``seed`` only matter for that scheme.
    """
    n_steps = int(n_steps)
    if n_steps < 100:
        raise ValueError("n_steps must be at least 100")
    chart = _chart_code(start)
    if scheme == "direct":
        _oc, _oz, logs = K.orbit(f.kernel, chart, start.coord, n_steps)
    elif scheme == "pullback":
        total = int(burn_in) + n_steps
        choices = _choices(f, seed, 0, total)
        oc, oz, worst = K.backward_path(f.kernel, chart, start.coord, choices, MAX_SWEEPS)
        _check_roots(worst, "pullback orbit")
        # z_total -> z_{total-1} -> ... is a forward orbit; keep its first n_steps points
        idx = np.arange(total, total - n_steps, -1)
        logs = log_norm_arrays(f, oc[idx], oz[idx])
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    if np.isnan(logs).any():
        raise NonFiniteError("non-finite derivative norm along the orbit")
    if np.isneginf(logs).any():
        return ChiEstimate(-math.inf, math.inf, n_steps, "birkhoff_forward", 1)
    return ChiEstimate(float(logs.mean()), _block_stderr(logs), n_steps, "birkhoff_forward")


def estimates_agree(a: ChiEstimate, b: ChiEstimate, k: float = 3.0) -> bool:
    """``|a - b| <= k`` combined standard errors (with a roundoff floor)."""
    combined = math.sqrt(a.stderr ** 2 + b.stderr ** 2)
    return abs(a.value - b.value) <= k * combined + 1e-12


def invariance_pvalue(f: RationalMap, sample: MuSample) -> float:
    """Two-sample KS p-value comparing ``log(1 + |z|^2)`` before and after one step of ``f``."""
    c2, z2 = apply_arrays(f, sample.charts, sample.coords)
    # quantized so that roundoff on a measure carried by a circle is not "detected"
    before = np.round(_radial(sample.charts, sample.coords), 9)
    after = np.round(_radial(c2, z2), 9)
    return float(stats.ks_2samp(before, after).pvalue)


def _radial(charts, coords):
    # log(1 + |z|^2) in the Z coordinate, written stably for chart U points
    a2 = np.abs(coords) ** 2
    return np.where(charts == CHART_Z, np.log1p(a2), np.log1p(a2) - np.log(np.maximum(a2, 1e-300)))
