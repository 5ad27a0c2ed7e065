"""Experiments combining the estimators.

``k_inf`` is never reported as a point estimate.  From above it is bounded by
``min_n log K(f^n) / n`` (the sequence is subadditive); from below by the best
characteristic exponent of a computed cycle.  The iterate estimates are
seeded with the points of the strongest cycles, which makes
``lower <= upper`` hold by construction rather than by luck of the grid.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .ergodic import ChiEstimate, chi_average
from .knorm import k_norm, k_norm_iterate, phi_functional
from .periodic import all_cycles, best_cycles, chi_max_lower, default_m_max
from .rational import RationalMap
from .report import format_float
from .zoo import theorem1_map

BRACKET_TOL = 1e-6
CHAIN_TOL_FLOOR = 0.02


@dataclass
class Bracket:
    upper: float
    lower: float
    per_n: list
    m_max: int

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {"upper": self.upper, "lower": self.lower, "gap": self.gap,
                "per_n": self.per_n, "m_max": self.m_max}


def k_infinity_bracket(f: RationalMap, n_max: int = 5, m_max: int | None = None,
                       grid_size: int | None = None, n_seeds: int = 8, cycles=None) -> Bracket:
    """Upper and lower bounds for ``k_inf(f)``; ``per_n[i] = log K(f^(i+1)) / (i+1)``."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if m_max is None:
        m_max = default_m_max(f)
    if cycles is None:
        cycles = all_cycles(f, m_max)
    lower = chi_max_lower(f, m_max, cycles=cycles)
    seeds = [p for c in best_cycles(cycles, 3) for p in c.points]
    per_n = []
    for n in range(1, n_max + 1):
        rep = k_norm_iterate(f, n, grid_size=grid_size, n_seeds=n_seeds, extra_seeds=seeds)
        per_n.append(rep.log_value / n)
    upper = min(per_n)
    if lower > upper + BRACKET_TOL:
        raise AssertionError(f"bracket inverted: lower {lower} > upper {upper}")
    return Bracket(upper, lower, per_n, int(m_max))


def subadditivity_violations(per_n, tol: float = BRACKET_TOL) -> list:
    """Pairs ``(m, n)`` with ``a_(m+n) > a_m + a_n + tol`` where ``a_n = n * per_n[n-1]``."""
    a = [(i + 1) * v for i, v in enumerate(per_n)]
    bad = []
    for m in range(1, len(a) + 1):
        for n in range(m, len(a) + 1 - m):
            if a[m + n - 1] > a[m - 1] + a[n - 1] + tol:
                bad.append((m, n))
    return bad


@dataclass
class ExponentReport:
    map_label: str
    degree: int
    log_k: float
    k_inf_upper: float
    k_inf_lower: float
    chi_a: ChiEstimate
    floors: dict
    chain_ok: bool
    tol: float
    gaps: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "map_label": self.map_label,
            "degree": self.degree,
            "log_k": self.log_k,
            "k_inf_upper": self.k_inf_upper,
            "k_inf_lower": self.k_inf_lower,
            "chi_a": self.chi_a.to_dict(),
            "floors": dict(self.floors),
            "chain_ok": self.chain_ok,
            "tol": self.tol,
            "gaps": dict(self.gaps),
        }


def inequality_chain_report(f: RationalMap, label: str = "custom", n_max: int = 5,
                            m_max: int | None = None, n_paths: int = 4000, burn_in: int = 40,
                            seed: int = 0, grid_size: int | None = None,
                            n_seeds: int = 8) -> ExponentReport:
    """Evaluate ``half log d <= chi_a <= chi_m <= k_inf <= log K`` for one map."""
    d = f.degree
    log_k = k_norm(f, grid_size=grid_size, n_seeds=n_seeds).log_value
    br = k_infinity_bracket(f, n_max=n_max, m_max=m_max, n_seeds=n_seeds)
    chi = chi_average(f, n_paths=n_paths, burn_in=burn_in, seed=seed)
    tol = max(3.0 * chi.stderr, CHAIN_TOL_FLOOR)
    half_log_d = 0.5 * math.log(d)
    chain_ok = (
        half_log_d <= chi.value + tol
        and chi.value <= br.lower + tol
        and br.lower <= br.upper + tol
        and br.upper <= log_k + tol
    )
    gaps = {
        "chi_a_below_chi_m": br.lower - chi.value,
        "strict_chi_a_chi_m": br.lower - chi.value > tol,
        "k_inf_bracket": br.gap,
        "log_k_above_upper": log_k - br.upper,
    }
    return ExponentReport(label, d, log_k, br.upper, br.lower, chi,
                          {"half_log_d": half_log_d, "log2": math.log(2.0)}, chain_ok, tol, gaps)


GROWTH_COLUMNS = ("n", "degree", "k", "ratio", "phi")


def theorem1_growth_table(n_max: int = 4, grid_size: int | None = None, n_seeds: int = 8,
                          phi_grid: int = 10 ** 4) -> list[dict]:
    """``K`` and the disc integral of ``||f'||`` for the tanh-product maps ``n = 1..n_max``."""
    if not 1 <= n_max <= 4:
        raise ValueError("n_max must be between 1 and 4")
    rows = []
    for n in range(1, n_max + 1):
        f = theorem1_map(n)
        k = k_norm(f, grid_size=grid_size, n_seeds=n_seeds).value
        rows.append({
            "n": n,
            "degree": f.degree,
            "k": k,
            "ratio": k / math.sqrt(f.degree),
            "phi": phi_functional(f, phi_grid),
        })
    return rows


def growth_table_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GROWTH_COLUMNS)
    for r in rows:
        w.writerow([r["n"], r["degree"], format_float(r["k"]), format_float(r["ratio"]),
                    format_float(r["phi"])])
    return buf.getvalue()
