"""``sphdyn`` command-line interface.

Every report embeds the fully resolved run configuration under ``"config"``;
feeding the same options back reproduces the output byte for byte.

Exit codes: 0 success, 1 domain error (printed as JSON), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import SphdynError
from .ergodic import chi_average
from .knorm import k_norm, k_norm_iterate, min_k_search, phi_functional
from .lab import growth_table_csv, inequality_chain_report, k_infinity_bracket, theorem1_growth_table
from .periodic import (
    all_cycles,
    best_cycles,
    chi_max_lower,
    default_m_max,
    k_attaining_cycle_check,
    periodic_cycles,
)
from .rational import RationalMap
from .report import emit_report, to_json
from .zoo import FamilyLabel, lattes4

COMMANDS = ("knorm", "kiter", "bracket", "chimax", "chiavg", "chain-report", "theorem1",
            "lattes-demo", "minimize-k", "phi", "cycles")
NEEDS_MAP = {"knorm", "kiter", "bracket", "chimax", "chiavg", "chain-report", "phi", "cycles"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    map_spec: str | None
    grid: int | None
    seeds: int
    tol: float
    seed: int
    depth: int
    paths: int
    n_max: int | None
    m_max: int | None
    degree: int | None
    output: str | None
    format: str

    def validate(self):
        if self.command in NEEDS_MAP and self.map_spec is None:
            raise UsageError(f"{self.command} needs --family or --map")
        checks = [
            (self.grid is None or self.grid >= 100, "--grid must be at least 100"),
            (self.seeds >= 1, "--seeds must be positive"),
            (0.0 < self.tol <= 1.0, "--tol must lie in (0, 1]"),
            (self.seed >= 0, "--seed must be nonnegative"),
            (self.depth >= 0, "--depth must be nonnegative"),
            (self.paths >= 2, "--paths must be at least 2"),
            (self.n_max is None or self.n_max >= 1, "--n-max must be positive"),
            (self.m_max is None or self.m_max >= 1, "--m-max must be positive"),
            (self.degree is None or 2 <= self.degree <= 6, "--degree must lie in 2..6"),
        ]
        for ok, msg in checks:
            if not ok:
                raise UsageError(msg)
        if self.format == "csv" and self.command != "theorem1":
            raise UsageError("--format csv is only available for theorem1")
        if self.command == "bracket" and self.n_max is not None and self.n_max < 2:
            raise UsageError("bracket needs --n-max >= 2")
        if self.command == "theorem1" and self.n_max is not None and self.n_max > 4:
            raise UsageError("theorem1 needs --n-max <= 4")
        if self.command == "minimize-k" and self.degree is None and self.map_spec is None:
            raise UsageError("minimize-k needs --degree or a start map")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphdyn", description="Spherical derivative experiments for rational maps.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--family", help="family label such as power:d=2, theorem1:n=2, random:d=3:seed=7, lattes4")
    src.add_argument("--map", dest="map_file", help="JSON file {\"num\": [[re, im], ...], \"den\": [...]}")
    p.add_argument("--grid", type=int, help="grid size for K estimates (or quadrature)")
    p.add_argument("--seeds", type=int, default=8, help="number of polished seeds")
    p.add_argument("--tol", type=float, default=1e-6, help="cycle check tolerance")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--depth", type=int, default=0, help="extra backward steps after burn-in")
    p.add_argument("--paths", type=int, default=4000, help="backward paths for mu samples")
    p.add_argument("--n-max", type=int, help="largest iterate for K(f^n)")
    p.add_argument("--m-max", type=int, help="largest cycle period")
    p.add_argument("--degree", type=int, help="degree for minimize-k")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--workers", type=int, help="worker threads (SPHDYN_WORKERS overrides)")
    return p


def _load_map_file(path: str) -> RationalMap:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read map file {path}: {exc}") from None
    if not isinstance(data, dict) or set(data) != {"num", "den"}:
        raise UsageError("map JSON must have exactly the keys 'num' and 'den'")
    try:
        return RationalMap.from_dict(data)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resolve_map(cfg: RunConfig) -> RationalMap | None:
    if cfg.map_spec is None:
        return None
    if cfg.map_spec.startswith("file:"):
        return _load_map_file(cfg.map_spec[5:])
    try:
        label = FamilyLabel.parse(cfg.map_spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        return label.build()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _set_workers(requested: int | None):
    env = os.environ.get("SPHDYN_WORKERS")
    if env is not None:
        try:
            requested = int(env)
        except ValueError:
            raise UsageError("SPHDYN_WORKERS must be an integer") from None
    if requested is None:
        return
    if requested < 1:
        raise UsageError("worker count must be positive")
    import numba

    numba.set_num_threads(min(requested, numba.config.NUMBA_NUM_THREADS))


def _label(cfg: RunConfig) -> str:
    return cfg.map_spec if cfg.map_spec and not cfg.map_spec.startswith("file:") else "custom"


def run(cfg: RunConfig, f: RationalMap | None):
    """Execute one command; returns a dict report or CSV text."""
    cmd = cfg.command
    if cmd == "knorm":
        return k_norm(f, grid_size=cfg.grid, n_seeds=cfg.seeds).to_dict()
    if cmd == "kiter":
        n_max = cfg.n_max or 3
        rows = []
        for n in range(1, n_max + 1):
            rep = k_norm_iterate(f, n, grid_size=cfg.grid, n_seeds=cfg.seeds)
            rows.append({"n": n, "k": rep.value, "log_k_over_n": rep.log_value / n,
                         "grid_size": rep.grid_size})
        return {"degree": f.degree, "iterates": rows}
    if cmd == "bracket":
        return k_infinity_bracket(f, n_max=cfg.n_max or 5, m_max=cfg.m_max, grid_size=cfg.grid,
                                  n_seeds=cfg.seeds).to_dict()
    if cmd == "chimax":
        m_max = cfg.m_max or default_m_max(f)
        cycles = all_cycles(f, m_max)
        kr = k_norm(f, grid_size=cfg.grid, n_seeds=cfg.seeds)
        check = k_attaining_cycle_check(f, kr, m_max, tol=cfg.tol, cycles=cycles)
        return {"chi_max_lower": chi_max_lower(f, m_max, cycles=cycles), "m_max": m_max,
                "best_cycles": [c.to_dict() for c in best_cycles(cycles, 3)],
                "k_attaining_cycle": check.to_dict()}
    if cmd == "chiavg":
        return chi_average(f, n_paths=cfg.paths, seed=cfg.seed, depth=cfg.depth).to_dict()
    if cmd == "chain-report":
        return inequality_chain_report(f, label=_label(cfg), n_max=cfg.n_max or 5, m_max=cfg.m_max,
                                       n_paths=cfg.paths, seed=cfg.seed, grid_size=cfg.grid,
                                       n_seeds=cfg.seeds).to_dict()
    if cmd == "theorem1":
        rows = theorem1_growth_table(cfg.n_max or 4, grid_size=cfg.grid, n_seeds=cfg.seeds)
        return growth_table_csv(rows) if cfg.format == "csv" else {"rows": rows}
    if cmd == "lattes-demo":
        return _lattes_demo(cfg)
    if cmd == "minimize-k":
        if f is not None:
            res = min_k_search(f.degree, starts=[f], seed=cfg.seed)
        else:
            res = min_k_search(cfg.degree, seed=cfg.seed)
        return res.to_dict()
    if cmd == "phi":
        return {"phi": phi_functional(f, cfg.grid or 10 ** 4), "log_k": k_norm(f).log_value}
    if cmd == "cycles":
        m = cfg.m_max or 1
        census = periodic_cycles(f, m, census=True)
        return census.to_dict()
    raise UsageError(f"unknown command {cmd}")


def _lattes_demo(cfg: RunConfig) -> dict:
    f = lattes4()
    fixed = periodic_cycles(f, 1)
    at_inf = next(c for c in fixed if c.points[0].is_infinity)
    chi_m = chi_max_lower(f, 1, cycles=fixed)
    chi_a = chi_average(f, n_paths=cfg.paths, seed=cfg.seed, depth=cfg.depth)
    tol = max(3.0 * chi_a.stderr, 0.02)
    return {
        "multiplier_at_infinity": [at_inf.multiplier.real, at_inf.multiplier.imag],
        "chi_m_lower": chi_m,
        "chi_a": chi_a.to_dict(),
        "half_log_d": 0.5 * math.log(4.0),
        "log_d": math.log(4.0),
        "chi_a_matches_half_log_d": abs(chi_a.value - 0.5 * math.log(4.0)) <= tol,
        "strict_gap": chi_m - chi_a.value > tol,
    }


def _error_json(code: str, message: str) -> str:
    return to_json({"error": code, "message": message})


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    spec = args.family if args.family is not None else (
        f"file:{args.map_file}" if args.map_file is not None else None)
    cfg = RunConfig(args.command, spec, args.grid, args.seeds, args.tol, args.seed, args.depth,
                    args.paths, args.n_max, args.m_max, args.degree, args.output, args.format)
    try:
        cfg.validate()
        _set_workers(args.workers)
    except UsageError as exc:
        sys.stderr.write(f"sphdyn: error: {exc}\n")
        return 2
    try:
        report = run(cfg, resolve_map(cfg))
    except SphdynError as exc:
        sys.stdout.write(_error_json(exc.code, str(exc)))
        return 1
    except UsageError as exc:
        sys.stderr.write(f"sphdyn: error: {exc}\n")
        return 2
    try:
        emit_report(report, cfg.format, cfg.output, config=asdict(cfg))
    except OSError as exc:
        sys.stdout.write(_error_json("output", str(exc)))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
