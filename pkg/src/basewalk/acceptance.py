"""Acceptance criteria, each a function returning a ``CriterionResult``.

Everything runs on fixed seeds so results are reproducible.  Criterion 11 is
soft: a miss is reported as a warning rather than a failure.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ResourceLimitError
from .fractional import clamp_double, in_base_polytope, lp_cost, solve_lp_relaxation
from .generators import (adversarial_uniform_stream, generate, integrality_gap_instance,
                         integrality_gap_witness, random_instance, random_matroid)
from .instance import MmmInstance, mmm_cost, msm_cost, to_interval_exact, to_interval_online
from .matroid import Matroid, UniformMatroid
from .solvers import (LazyOnline, RoundingParams, exact_dp, exact_msm, greedy_msm,
                      online_pipeline, partition_flow_exact, round_fractional,
                      sample_rank_check, spanning_to_bases)
from .solvers.greedy import harmonic, longest_interval

SUITE_SIZE = 100
BASE_CAP = 500


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    hard: bool = True
    seconds: float = 0.0

    @property
    def label(self) -> str:
        if self.passed:
            return "PASS"
        return "FAIL" if self.hard else "WARN"

    def line(self) -> str:
        return f"[{self.label}] {self.number:2d}. {self.name}: {self.detail} ({self.seconds:.1f}s)"


@lru_cache(maxsize=None)
def standard_suite(size: int = SUITE_SIZE) -> tuple[MmmInstance, ...]:
    """Alternating graphic/partition instances, m in 5..8, T in 2..4, <= 500 bases per step."""
    out = []
    seed = 0
    while len(out) < size:
        family = "graphic" if len(out) % 2 == 0 else "partition"
        m, T = 5 + seed % 4, 2 + seed % 3
        inst = random_instance(family, m, T, seed)
        seed += 1
        try:
            for t in range(T):
                inst.matroid_at(t).enumerate_bases(inst.alive(t), BASE_CAP)
        except ResourceLimitError:
            continue
        out.append(inst)
    return tuple(out)


@lru_cache(maxsize=None)
def _opt(i: int) -> float:
    return exact_dp(standard_suite()[i])[1]


@lru_cache(maxsize=None)
def _lp(i: int):
    return solve_lp_relaxation(standard_suite()[i])


@lru_cache(maxsize=None)
def _online(i: int, seed: int):
    return online_pipeline(standard_suite()[i], params=RoundingParams(seed=seed))


def _timed(fn: Callable[..., CriterionResult]) -> Callable[..., CriterionResult]:
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def c01_equivalence() -> CriterionResult:
    """Optimal base sequences and optimal spanning sequences cost the same."""
    bad = []
    for i, inst in enumerate(standard_suite()):
        if _opt(i) != exact_msm(inst)[1]:
            bad.append(i)
    return CriterionResult(1, "bases vs spanning sets optimum", not bad,
                           f"{SUITE_SIZE - len(bad)}/{SUITE_SIZE} equal" + (f", mismatches {bad}" if bad else ""))


@_timed
def c02_conversion() -> CriterionResult:
    checked, bad = 0, []
    for i, inst in enumerate(standard_suite()):
        sols = [greedy_msm(inst),
                round_fractional(_lp(i).z, inst, RoundingParams(seed=i)).solution]
        for sol in sols:
            checked += 1
            if mmm_cost(inst, spanning_to_bases(sol, inst.matroid)) > msm_cost(inst, sol):
                bad.append(i)
    return CriterionResult(2, "spanning_to_bases never costs more", not bad,
                           f"{checked - len(bad)}/{checked} conversions ok")


@_timed
def c03_greedy(bound_scale: float = 1.0) -> CriterionResult:
    """Greedy within ``bound_scale * (1 + H_{|I_max|})`` of the optimum."""
    worst, bad = 0.0, []
    for i, inst in enumerate(standard_suite()):
        g = msm_cost(inst, greedy_msm(inst))
        opt = _opt(i)
        bound = bound_scale * (1.0 + harmonic(longest_interval(to_interval_exact(inst))))
        if opt == 0:
            ok = g == 0
            frac = 0.0 if ok else math.inf
        else:
            frac = g / opt / bound
            ok = frac <= 1.0
        worst = max(worst, frac)
        if not ok:
            bad.append(i)
    return CriterionResult(3, "greedy approximation bound", not bad,
                           f"worst ratio/bound {worst:.3f}, violations {len(bad)}")


def random_fractional_base(M: Matroid, rng: np.random.Generator, pieces: int = 4) -> np.ndarray:
    """Convex combination of a few min-weight bases under random weights."""
    coeffs = rng.dirichlet(np.ones(pieces))
    z = np.zeros(M.m)
    for c in coeffs:
        B = M.min_weight_base(rng.random(M.m))
        z[sorted(B)] += c
    return z


@_timed
def c04_rank_sampling(trials: int = 10_000) -> CriterionResult:
    rng = np.random.default_rng(2024)
    bad, margins = [], []
    for k in range(20):
        if k % 2 == 0:
            r = int(rng.integers(1, 6))
            M = UniformMatroid(int(rng.integers(r, r + 5)), r)
        else:
            M = random_matroid("graphic", int(rng.integers(5, 10)), rng,
                               n=int(rng.integers(3, 7)))
        z = random_fractional_base(M, rng)
        mean, se = sample_rank_check(M, z, trials, seed=k)
        floor = M.r * (1 - 1 / math.e) - 3 * se
        margins.append(mean - floor)
        if mean < floor:
            bad.append(k)
    return CriterionResult(4, "E[rank R(z)] >= r(1-1/e)", not bad,
                           f"20 bases, min margin {min(margins):.3f}, violations {len(bad)}")


@lru_cache(maxsize=None)
def _extra_streams() -> tuple[MmmInstance, ...]:
    """Structured streams run online alongside the suite."""
    extra = [generate("set_cover", seed=s, n_elements=4, n_sets=4) for s in range(10)]
    extra.append(integrality_gap_instance(4))
    extra += [generate("adversarial", m=m, T=T) for m, T in ((5, 5), (8, 4))]
    return tuple(extra)


def _online_runs():
    for i in range(len(standard_suite())):
        yield standard_suite()[i], _online(i, 0)
    for inst in _extra_streams():
        yield inst, online_pipeline(inst, params=RoundingParams(seed=0))


@_timed
def c05_half_gap() -> CriterionResult:
    emitted = failures = 0
    for _, res in _online_runs():
        emitted += len(res.state.log)
        failures += sum(1 for rec in res.state.log if rec.before > rec.rhs - 0.5 + 1e-9)
    return CriterionResult(5, "every emitted constraint has x(S) <= b_S - 1/2", failures == 0,
                           f"{emitted} constraints, {failures} violations")


@_timed
def c06_budget() -> CriterionResult:
    worst, bad = 0, 0
    for inst, res in _online_runs():
        for c in res.constraints_per_step:
            worst = max(worst, c / (2 * inst.m))
            bad += c > 2 * inst.m
    return CriterionResult(6, "per-step constraints <= 2m", bad == 0,
                           f"max count/2m {worst:.3f}, violations {bad}")


@_timed
def c07_rounding(runs: int = 1000) -> CriterionResult:
    """Monotone threshold rounding of the online fractional trace."""
    traces = []
    for i, inst in enumerate(standard_suite()):
        res = _online(i, 0)
        iinst = to_interval_online(inst)
        xt = np.zeros((inst.T, iinst.m))
        for t, row in enumerate(res.state.history):
            xt[t, :len(row)] = clamp_double(row)
        traces.append((iinst, xt))
    events = 0
    for k in range(runs):
        iinst, xt = traces[k % len(traces)]
        events += len(round_fractional(xt, iinst, RoundingParams(seed=k)).augmentations)
    return CriterionResult(7, "augmentations with L = 32 ln(rT)", events <= 1,
                           f"{events} augmentation events in {runs} runs")


@_timed
def c08_flow(count: int = 200) -> CriterionResult:
    bad = []
    for k in range(count):
        inst = random_instance("partition", 3 + k % 6, 1 + k % 5, 10_000 + k)
        if partition_flow_exact(inst)[1] != exact_dp(inst)[1]:
            bad.append(k)
    return CriterionResult(8, "min-cost flow equals exact DP", not bad,
                           f"{count - len(bad)}/{count} equal")


@_timed
def c09_gap() -> CriterionResult:
    inst = integrality_gap_instance(4)
    scale = inst.metadata["cost_scale"]
    z = integrality_gap_witness(inst)
    feasible = all(in_base_polytope(inst.matroid, z[t], inst.alive(t)) for t in range(inst.T))
    frac = lp_cost(inst, z) / scale
    opt = exact_dp(inst)[1] / scale
    ok = feasible and frac <= 4 and opt >= 2
    return CriterionResult(9, "integrality gap witness", ok,
                           f"witness feasible={feasible} cost {frac:.3f} <= 4, OPT {opt:.3f} >= 2")


@_timed
def c10_adversary() -> CriterionResult:
    parts, ok = [], True
    for m, T in ((5, 5), (8, 4)):
        algo = LazyOnline(UniformMatroid(m, 1), [1] * m)
        tr = adversarial_uniform_stream(m, T, algo.as_choice())
        good = tr.algorithm_cost >= min(m, T) and tr.offline_opt == 1
        ok &= good
        parts.append(f"(m={m},T={T}) cost {tr.algorithm_cost} OPT {tr.offline_opt}")
    return CriterionResult(10, "adversary vs deterministic online", ok, "; ".join(parts))


@_timed
def c11_online_ratio(seeds: int = 50) -> CriterionResult:
    worst, misses = 0.0, []
    for i, inst in enumerate(standard_suite()):
        opt = _opt(i)
        r = inst.matroid.r
        bound = 4 * math.log(inst.m + 1) * math.log(r * inst.T + 1)
        mean = float(np.mean([_online(i, s).total for s in range(seeds)]))
        if opt == 0:
            if mean > 0:
                misses.append(i)
            continue
        worst = max(worst, mean / opt / bound)
        if mean > bound * opt:
            misses.append(i)
    return CriterionResult(11, "online mean cost <= 4 ln(m+1) ln(rT+1) OPT", not misses,
                           f"worst ratio/bound {worst:.3f}, misses {len(misses)}", hard=False)


CRITERIA = (c01_equivalence, c02_conversion, c03_greedy, c04_rank_sampling, c05_half_gap,
            c06_budget, c07_rounding, c08_flow, c09_gap, c10_adversary, c11_online_ratio)


def acceptance_suite(bound_scale: float = 1.0, echo: Callable[[str], None] | None = None
                     ) -> list[CriterionResult]:
    results = []
    for fn in CRITERIA:
        res = fn(bound_scale) if fn is c03_greedy else fn()
        if echo:
            echo(res.line())
        results.append(res)
    return results
