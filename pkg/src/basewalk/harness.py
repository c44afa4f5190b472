"""Batch experiments: build instances from generator specs, run solvers, write a CSV.

Config (JSON)::

    {
      "master_seed": 0,                  # optional, default 0; BASEWALK_SEED overrides
      "algorithms": ["dp", "greedy"],
      "baseline": "dp",                  # optional; ratios are total / baseline total
      "repeats": 1,                      # solver runs per instance (seeds differ)
      "instances": [
        {"family": "graphic", "count": 20, "params": {"m": 6, "T": 3}}
      ],
      "record_wall_time": false          # wall time makes the CSV non-reproducible
    }

Instance ``k`` (counting across all entries) is generated with seed
``master_seed + k``.  Solver run ``j`` on it is trial ``k * repeats + j`` and
uses seed ``master_seed + trial``.
"""
from __future__ import annotations

import csv
import io
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import BasewalkError, ConfigError
from .generators import FAMILIES, generate
from .instance import validate_solution
from .solvers import ALGORITHMS, RoundingParams, solve

COLUMNS = ("trial", "instance", "family", "m", "T", "algorithm", "seed", "status",
           "holding", "acquisition", "total", "baseline_total", "ratio",
           "max_constraints_step", "augmentations", "error")
SEED_ENV = "BASEWALK_SEED"


@dataclass
class RunRecord:
    trial: int
    instance: int
    family: str
    m: int
    T: int
    algorithm: str
    seed: int
    status: str = "ok"
    holding: float | None = None
    acquisition: float | None = None
    total: float | None = None
    baseline_total: float | None = None
    ratio: float | None = None
    constraints_per_step: list[int] = field(default_factory=list)
    augmentations: int | None = None
    error: str = ""
    wall_time: float = 0.0

    def row(self, with_time: bool) -> dict:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)
        out = {
            "trial": self.trial, "instance": self.instance, "family": self.family,
            "m": self.m, "T": self.T, "algorithm": self.algorithm, "seed": self.seed,
            "status": self.status, "holding": fmt(self.holding),
            "acquisition": fmt(self.acquisition), "total": fmt(self.total),
            "baseline_total": fmt(self.baseline_total), "ratio": fmt(self.ratio),
            "max_constraints_step": fmt(max(self.constraints_per_step)) if self.constraints_per_step else "",
            "augmentations": fmt(self.augmentations), "error": self.error,
        }
        if with_time:
            out["wall_time"] = f"{self.wall_time:.4f}"
        return out


@dataclass
class ExperimentReport:
    records: list[RunRecord]
    baseline: str | None
    master_seed: int
    record_wall_time: bool = False

    def to_csv(self) -> str:
        cols = list(COLUMNS) + (["wall_time"] if self.record_wall_time else [])
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            writer.writerow(rec.row(self.record_wall_time))
        return buf.getvalue()

    def summary(self) -> str:
        algs = sorted({r.algorithm for r in self.records}, key=lambda a: ALGORITHMS.index(a))
        lines = [f"{'algorithm':<10} {'runs':>5} {'errors':>6} {'mean total':>12} "
                 f"{'mean ratio':>11} {'max ratio':>10}"]
        for alg in algs:
            recs = [r for r in self.records if r.algorithm == alg]
            ok = [r for r in recs if r.status == "ok"]
            ratios = [r.ratio for r in ok if r.ratio is not None]
            mean_total = sum(r.total for r in ok) / len(ok) if ok else float("nan")
            mean_ratio = f"{sum(ratios) / len(ratios):.4f}" if ratios else "-"
            max_ratio = f"{max(ratios):.4f}" if ratios else "-"
            lines.append(f"{alg:<10} {len(recs):>5} {len(recs) - len(ok):>6} {mean_total:>12.4f} "
                         f"{mean_ratio:>11} {max_ratio:>10}")
        if self.baseline:
            lines.append(f"ratios relative to {self.baseline}; master seed {self.master_seed}")
        return "\n".join(lines)


def load_config(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None


def validate_config(cfg: dict) -> dict:
    """Check every field before anything runs; return a normalized copy."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    known = {"master_seed", "algorithms", "baseline", "repeats", "instances", "record_wall_time"}
    extra = set(cfg) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    algs = cfg.get("algorithms")
    if not algs or not isinstance(algs, list):
        raise ConfigError("'algorithms' must be a non-empty list")
    for a in algs:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    baseline = cfg.get("baseline", "dp" if "dp" in algs else None)
    if baseline is not None and baseline not in algs:
        raise ConfigError(f"baseline {baseline!r} is not among the algorithms")
    insts = cfg.get("instances")
    if not insts or not isinstance(insts, list):
        raise ConfigError("'instances' must be a non-empty list")
    for entry in insts:
        if entry.get("family") not in FAMILIES:
            raise ConfigError(f"unknown family {entry.get('family')!r}")
        if int(entry.get("count", 1)) < 1:
            raise ConfigError("instance count must be >= 1")
    repeats = int(cfg.get("repeats", 1))
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    seed = os.environ.get(SEED_ENV)
    try:
        master = int(seed) if seed not in (None, "") else int(cfg.get("master_seed", 0))
    except ValueError:
        raise ConfigError(f"master seed must be an integer, got {seed!r}") from None
    return {"algorithms": list(algs), "baseline": baseline, "repeats": repeats,
            "instances": insts, "master_seed": master,
            "record_wall_time": bool(cfg.get("record_wall_time", False))}


def _run_one(inst, k, trial, alg, seed, family) -> RunRecord:
    rec = RunRecord(trial, k, family, inst.m, inst.T, alg, seed)
    t0 = time.perf_counter()
    try:
        res = solve(inst, alg, seed=seed, params=RoundingParams(seed=seed))
        report = validate_solution(inst, res.solution)
        if not report.ok:
            raise BasewalkError(f"invalid solution: {report.failures[0][1]}")
        if report.cost.total != res.total:
            raise BasewalkError(f"reported cost {res.total} != re-evaluated {report.cost.total}")
        rec.holding, rec.acquisition = report.cost.holding, report.cost.acquisition
        rec.total = report.cost.total
        rec.constraints_per_step = list(res.stats.get("constraints_per_step", []))
        rec.augmentations = res.stats.get("augmentations")
    except (BasewalkError, ValueError, AssertionError) as exc:
        rec.status = "error"
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_experiment(config: dict | str | Path) -> ExperimentReport:
    cfg = validate_config(load_config(config) if isinstance(config, (str, Path)) else config)
    master, repeats = cfg["master_seed"], cfg["repeats"]
    records: list[RunRecord] = []
    k = 0
    for entry in cfg["instances"]:
        family = entry["family"]
        for _ in range(int(entry.get("count", 1))):
            base_rows: dict[int, float] = {}
            try:
                inst = generate(family, master + k, **entry.get("params", {}))
            except (BasewalkError, ValueError) as exc:
                for alg in cfg["algorithms"]:
                    rec = RunRecord(k * repeats, k, family, 0, 0, alg, master + k * repeats,
                                    status="error", error=f"{type(exc).__name__}: {exc}")
                    records.append(rec)
                k += 1
                continue
            batch = []
            for alg in cfg["algorithms"]:
                for j in range(repeats):
                    trial = k * repeats + j
                    rec = _run_one(inst, k, trial, alg, master + trial, family)
                    batch.append(rec)
                    if alg == cfg["baseline"] and rec.status == "ok":
                        base_rows[j] = rec.total
            for rec in batch:
                base = base_rows.get(rec.trial - k * repeats)
                if base is None or rec.status != "ok":
                    continue
                rec.baseline_total = base
                if base > 0:
                    rec.ratio = rec.total / base
                elif rec.total == 0:
                    rec.ratio = 1.0
            records.extend(batch)
            k += 1
    records.sort(key=lambda r: (r.trial, ALGORITHMS.index(r.algorithm)))
    return ExperimentReport(records, cfg["baseline"], master, cfg["record_wall_time"])
