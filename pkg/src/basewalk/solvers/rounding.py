"""Threshold rounding of fractional solutions.

Each element gets a threshold drawn uniformly from ``[0, 1/L]`` and is
selected whenever its fractional value reaches it.  A step whose selection
does not span is repaired either by redrawing every threshold or, as a last
resort, by completing the selection greedily under ``c_t + a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..errors import InfeasibleError, InvalidInputError
from ..fractional import FractionalState, clamp_double
from ..instance import IntervalInstance, MmmInstance, SolutionSequence
from ..matroid import Matroid

POLICIES = ("fixed", "rerandomize")


def default_L(r: int, T: int) -> float:
    """``32 ln(rT)``, floored at 1."""
    return max(1.0, 32.0 * math.log(max(1, r * T)))


@dataclass(frozen=True)
class RoundingParams:
    L: float = 0.0  # 0 means default_L(r, T)
    seed: int = 0
    policy: str = "fixed"
    max_rerandomize: int = 5

    def __post_init__(self):
        if self.L != 0.0 and self.L < 1.0:
            raise InvalidInputError(f"L must be >= 1, got {self.L}")
        if self.policy not in POLICIES:
            raise InvalidInputError(f"policy must be one of {POLICIES}, got {self.policy!r}")

    def resolve_L(self, r: int, T: int) -> float:
        return self.L if self.L else default_L(r, T)


class ThresholdRounder:
    """Thresholds drawn lazily, in order of first use, from one seeded stream."""

    def __init__(self, L: float, seed: int):
        self.L = float(L)
        self.rng = np.random.default_rng(seed)
        self.tau: dict[int, float] = {}
        self.redraws = 0

    def threshold(self, e: int) -> float:
        tau = self.tau.get(e)
        if tau is None:
            tau = self.rng.uniform(0.0, 1.0 / self.L)
            self.tau[e] = tau
        return tau

    def select(self, z, candidates: Iterable[int]) -> set[int]:
        return {e for e in sorted(candidates) if z[e] > 0 and z[e] >= self.threshold(e)}

    def rerandomize(self) -> None:
        for e in sorted(self.tau):
            self.tau[e] = self.rng.uniform(0.0, 1.0 / self.L)
        self.redraws += 1


def complete_cheaply(M: Matroid, S: Iterable[int], alive: Iterable[int], weight) -> set[int]:
    """Add alive elements in ascending ``weight`` order until ``S`` spans."""
    S = set(S)
    size = M.rank(S)
    for e in sorted(alive, key=lambda e: (weight(e), e)):
        if size == M.r:
            break
        if e not in S and M.rank(S | {e}) > size:
            S.add(e)
            size += 1
    if size != M.r:
        raise InfeasibleError("alive elements do not span")
    return S


@dataclass
class RoundingResult:
    solution: SolutionSequence
    augmentations: list[int] = field(default_factory=list)  # timesteps repaired greedily
    rerandomizations: int = 0
    L: float = 0.0


def round_fractional(z, inst: MmmInstance | IntervalInstance, params: RoundingParams) -> RoundingResult:
    """Round fractional values to a spanning sequence.

    ``z`` is either a ``(T, m)`` array of per-timestep values over the
    instance's elements, or a single length-``m`` vector of monotone
    values shared by all timesteps (the interval model, where a copy is
    bought once).  For an interval instance the result is lifted to parent
    elements.
    """
    z = np.asarray(z, dtype=float)
    T, m = inst.T, inst.m
    r = max(inst.matroid_at(t).r for t in range(T))
    L = params.resolve_L(r, T)
    rounder = ThresholdRounder(L, params.seed)
    per_step = z.ndim == 2
    if (per_step and z.shape != (T, m)) or (not per_step and z.shape != (m,)):
        raise InvalidInputError(f"z has shape {z.shape}; expected ({T}, {m}) or ({m},)")
    for e in range(m):  # draw in id order so results do not depend on sparsity
        rounder.threshold(e)
    bought: set[int] = set()
    sets = []
    aug: list[int] = []
    for t in range(T):
        M = inst.matroid_at(t)
        alive = inst.alive(t)
        row = z[t] if per_step else z
        tries = 0
        while True:
            S = rounder.select(row, alive) | (bought & alive)
            if M.rank(S) == M.r or params.policy == "fixed" or tries >= params.max_rerandomize:
                break
            rounder.rerandomize()
            tries += 1
        if M.rank(S) != M.r:
            S = complete_cheaply(M, S, alive, lambda e: inst.aug_weight(t, e))
            aug.append(t)
        if not per_step:
            bought |= S
        sets.append(frozenset(S))
    if isinstance(inst, IntervalInstance):
        sol = inst.lift(set().union(*sets))
    else:
        sol = SolutionSequence("spanning", tuple(sets))
    return RoundingResult(sol, aug, rounder.redraws, L)


# ---------------------------------------------------------------------------
# epochs and phases

@dataclass
class EpochPhaseState:
    R: float
    L_prime: float
    epochs: list[tuple[int, int]]  # inclusive timestep ranges
    phases: list[tuple[int, int]]
    a_max: float
    a_min: float


def epoch_phase_plan(spend: Sequence[float], r: int, a_max: float, a_min: float) -> EpochPhaseState:
    """Split the horizon by fractional acquisition spend.

    An epoch closes as soon as its spend reaches ``r * a_max``; inside an
    epoch a phase grows while the spend after its first step stays within
    ``a_min / 4``.
    """
    if a_min <= 0 or a_max < a_min:
        raise InvalidInputError("need 0 < a_min <= a_max")
    R = max(8.0, 8.0 * r * a_max / a_min)
    T = len(spend)
    epochs = []
    start, acc = 0, 0.0
    for t, s in enumerate(spend):
        acc += s
        if acc >= r * a_max:
            epochs.append((start, t))
            start, acc = t + 1, 0.0
    if start < T:
        epochs.append((start, T - 1))
    phases = []
    for lo, hi in epochs:
        p, acc = lo, 0.0
        for t in range(lo + 1, hi + 1):
            acc += spend[t]
            if acc > a_min / 4.0:
                phases.append((p, t - 1))
                p, acc = t, 0.0
        phases.append((p, hi))
    return EpochPhaseState(R, 64.0 * math.log(R), epochs, phases, a_max, a_min)


@dataclass
class EpochRoundingResult(RoundingResult):
    plan: EpochPhaseState | None = None
    failures: list[int] = field(default_factory=list)  # timesteps where a redraw happened


def epoch_phase_round(state: FractionalState, iinst: IntervalInstance, seed: int = 0,
                      max_rerandomize: int = 5) -> EpochRoundingResult:
    """Replay a fractional run with thresholds in ``[0, 1/L']``.

    At each timestep the clamped current values are rounded; a selection
    that fails to span triggers a full redraw of thresholds (charged to the
    epoch), and greedy completion only if redraws keep failing.
    """
    if len(state.history) != iinst.T:
        raise InvalidInputError("fractional trace does not cover the horizon")
    costs = [d.cost for d in iinst.elements]
    positive = [c for c in costs if c > 0]
    a_max = max(positive) if positive else 1.0
    a_min = min(positive) if positive else 1.0
    r = iinst.matroid_at(0).r
    plan = epoch_phase_plan(state.spend, r, a_max, a_min)
    rounder = ThresholdRounder(plan.L_prime, seed)
    bought: set[int] = set()
    aug, failures = [], []
    for t in range(iinst.T):
        M = iinst.matroid_at(t)
        alive = iinst.alive(t)
        xt = np.zeros(iinst.m)
        hist = state.history[t]
        xt[:len(hist)] = clamp_double(hist)
        tries = 0
        while True:
            S = rounder.select(xt, alive) | (bought & alive)
            if M.rank(S) == M.r or tries >= max_rerandomize:
                break
            if tries == 0:
                failures.append(t)
            rounder.rerandomize()
            tries += 1
        if M.rank(S) != M.r:
            S = complete_cheaply(M, S, alive, lambda e: costs[e])
            aug.append(t)
        bought |= S
    sol = iinst.lift(bought)
    return EpochRoundingResult(sol, aug, rounder.redraws, plan.L_prime, plan, failures)
