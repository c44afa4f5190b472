"""Online algorithms that see one row of holding costs at a time."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..errors import InvalidInputError, ProtocolError
from ..fractional import FractionalState, clamp_double, fractional_step, in_base_polytope
from ..instance import INF, MmmInstance, OnlineIntervalReducer, SolutionSequence, cost_breakdown
from ..matroid import Matroid, ParallelMatroid
from .convert import BaseTracker
from .rounding import RoundingParams, ThresholdRounder, complete_cheaply


class CostStream:
    """Hands out holding rows strictly in order.

    ``commit(t)`` must be called after deciding timestep ``t`` before row
    ``t+1`` can be read, so a consumer cannot look ahead.
    """

    def __init__(self, inst: MmmInstance):
        self._rows = inst.holding
        self.T = inst.T
        self.m = inst.m
        self.read = 0
        self.committed = 0

    def __iter__(self) -> Iterator[tuple]:
        while self.read < self.T:
            yield self.next_row()

    def next_row(self) -> tuple:
        if self.read >= self.T:
            raise ProtocolError("stream exhausted")
        if self.read > self.committed:
            raise ProtocolError(f"row {self.read} requested before timestep {self.committed} was decided")
        row = self._rows[self.read]
        self.read += 1
        return row

    def commit(self, t: int) -> None:
        if t != self.committed:
            raise ProtocolError(f"commit({t}) out of order; expected {self.committed}")
        self.committed += 1


# ---------------------------------------------------------------------------
# randomized pipeline

@dataclass
class StepRecord:
    t: int
    base: frozenset[int]
    constraints: int
    augmented: bool


@dataclass
class OnlineResult:
    solution: SolutionSequence
    holding: float
    acquisition: float
    constraints_per_step: list[int]
    augmentations: int
    rerandomizations: int
    half_gap_failures: int
    fractional_cost: float
    state: FractionalState = field(repr=False, default=None)
    copies: int = 0

    @property
    def total(self) -> float:
        return self.holding + self.acquisition


class OnlineMsm:
    """Interval reduction, fractional covering, monotone rounding, base tracking.

    Each ``step(row)`` returns the base for that timestep using nothing but
    the rows seen so far.
    """

    def __init__(self, matroid: Matroid, acquisition: Sequence, T: int,
                 params: RoundingParams = RoundingParams()):
        self.M = matroid
        self.a = tuple(acquisition)
        self.reducer = OnlineIntervalReducer(self.a, matroid)
        self.state = FractionalState()
        self.rounder = ThresholdRounder(params.resolve_L(matroid.r, T), params.seed)
        self.params = params
        self.bought: set[int] = set()  # copy ids ever selected
        self.tracker = BaseTracker(matroid)
        self.records: list[StepRecord] = []
        self.augmentations = 0

    def step(self, row: Sequence) -> frozenset[int]:
        t = self.reducer.t
        alive = self.reducer.step(row)
        parent_of = self.reducer.parent_of
        costs = [self.reducer.cost_of(i) for i in range(len(parent_of))]
        lifted = ParallelMatroid(self.M, parent_of)
        for i in alive:  # thresholds are drawn at a copy's birth
            self.rounder.threshold(i)
        emitted = fractional_step(self.state, lifted, alive, costs)
        xt = clamp_double(self.state.x)
        tries = 0
        while True:
            S = self.rounder.select(xt, alive) | (self.bought & set(alive))
            if lifted.rank(S) == lifted.r or self.params.policy == "fixed" \
                    or tries >= self.params.max_rerandomize:
                break
            self.rounder.rerandomize()
            tries += 1
        augmented = lifted.rank(S) != lifted.r
        if augmented:
            S = complete_cheaply(lifted, S, alive,
                                 lambda i: row[parent_of[i]] + self.a[parent_of[i]])
            self.augmentations += 1
        self.bought |= S
        parents = frozenset(parent_of[i] for i in S)
        B = self.tracker.step(parents)
        self.records.append(StepRecord(t, B, len(emitted), augmented))
        return B


def online_pipeline(stream: CostStream | MmmInstance, matroid: Matroid | None = None,
                    acquisition: Sequence | None = None,
                    params: RoundingParams = RoundingParams()) -> OnlineResult:
    """Run ``OnlineMsm`` over a stream and cost the resulting bases."""
    inst = None
    if isinstance(stream, MmmInstance):
        inst = stream
        matroid = inst.matroid
        acquisition = inst.acquisition
        stream = CostStream(inst)
    if matroid is None or acquisition is None:
        raise InvalidInputError("a matroid and acquisition costs are required with a raw stream")
    algo = OnlineMsm(matroid, acquisition, stream.T, params)
    rows, bases = [], []
    for t in range(stream.T):
        row = stream.next_row()
        rows.append(row)
        bases.append(algo.step(row))
        stream.commit(t)
    sol = SolutionSequence("base", tuple(bases))
    if inst is None:
        inst = MmmInstance((matroid,), stream.T, tuple(acquisition), tuple(rows))
    br = cost_breakdown(inst, sol.sets)
    costs = [algo.reducer.cost_of(i) for i in range(len(algo.state.x))]
    return OnlineResult(sol, br.holding, br.acquisition, list(algo.state.counts),
                        algo.augmentations, algo.rounder.redraws, algo.state.half_gap_failures,
                        algo.state.cost(costs), algo.state, len(algo.reducer.parent_of))


# ---------------------------------------------------------------------------
# deterministic baseline

class LazyOnline:
    """Cheapest base each step, charging acquisition only for elements not held."""

    def __init__(self, matroid: Matroid, acquisition: Sequence):
        self.M = matroid
        self.a = tuple(acquisition)
        self.prev: frozenset[int] = frozenset()

    def step(self, row: Sequence) -> frozenset[int]:
        alive = [e for e, c in enumerate(row) if c < INF]
        w = {e: row[e] + (0 if e in self.prev else self.a[e]) for e in alive}
        self.prev = self.M.min_weight_base(w, alive)
        return self.prev

    def as_choice(self):
        """Callback for a rank-1 adversary: the single element of each base."""
        def choose(t: int, row: tuple) -> int:
            (e,) = self.step(row)
            return e
        return choose


def lazy_online(inst: MmmInstance) -> SolutionSequence:
    algo = LazyOnline(inst.matroid, inst.acquisition)
    stream = CostStream(inst)
    bases = []
    for t in range(inst.T):
        bases.append(algo.step(stream.next_row()))
        stream.commit(t)
    return SolutionSequence("base", tuple(bases))


# ---------------------------------------------------------------------------
# independent sampling of a fractional base

def sample_rank_check(M: Matroid, z: Sequence[float], trials: int = 10_000,
                      seed: int = 0) -> tuple[float, float]:
    """Mean rank of a set keeping each ``e`` independently with prob ``z_e``.

    Returns ``(mean, standard error)``.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (M.m,) or not in_base_polytope(M, z):
        raise InvalidInputError("z is not a fractional base of the matroid")
    if trials < 2:
        raise InvalidInputError("need at least two trials")
    rng = np.random.default_rng(seed)
    draws = rng.random((trials, M.m)) < z
    ranks = np.array([M.rank(np.flatnonzero(row)) for row in draws], dtype=float)
    return float(ranks.mean()), float(ranks.std(ddof=1) / np.sqrt(trials))
