"""Instances, solutions, cost evaluation and the two interval reductions.

Timesteps are 0-based in code: ``t in range(T)``; the empty solution before
the first step is implicit.  Holding costs use ``math.inf`` for "unavailable"
(serialized as the string ``"inf"``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InfeasibleError, InvalidInputError, InvalidSolutionError
from .matroid import Matroid, ParallelMatroid, matroid_from_dict

INF = math.inf
INF_TOKEN = "inf"


def _as_cost(value, *, allow_inf: bool):
    if isinstance(value, str):
        if value == INF_TOKEN and allow_inf:
            return INF
        raise InvalidInputError(f"bad cost token {value!r}")
    if value == INF:
        if allow_inf:
            return INF
        raise InvalidInputError("acquisition costs must be finite")
    if isinstance(value, bool) or value < 0:
        raise InvalidInputError(f"costs must be nonnegative, got {value!r}")
    return value


@dataclass(frozen=True, eq=False)
class MmmInstance:
    """Acquisition costs ``a[e]`` and holding costs ``c[t][e]`` over a matroid.

    ``matroids`` holds one matroid (the fixed case) or one per timestep.
    """

    matroids: tuple[Matroid, ...]
    T: int
    acquisition: tuple
    holding: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        mats = tuple(self.matroids) if not isinstance(self.matroids, Matroid) else (self.matroids,)
        object.__setattr__(self, "matroids", mats)
        if self.T < 1:
            raise InvalidInputError("T must be >= 1")
        if len(mats) not in (1, self.T):
            raise InvalidInputError("need one matroid or one per timestep")
        m = mats[0].m
        if any(M.m != m for M in mats):
            raise InvalidInputError("all matroids must share the ground set")
        a = tuple(_as_cost(v, allow_inf=False) for v in self.acquisition)
        if len(a) != m:
            raise InvalidInputError(f"acquisition has {len(a)} entries, expected {m}")
        if len(self.holding) != self.T:
            raise InvalidInputError(f"holding has {len(self.holding)} rows, expected T={self.T}")
        rows = []
        for t, row in enumerate(self.holding):
            if len(row) != m:
                raise InvalidInputError(f"holding row {t} has {len(row)} entries, expected {m}")
            rows.append(tuple(_as_cost(v, allow_inf=True) for v in row))
        object.__setattr__(self, "acquisition", a)
        object.__setattr__(self, "holding", tuple(rows))
        for t in range(self.T):
            M = self.matroid_at(t)
            if M.rank(self.alive(t)) != M.r:
                raise InfeasibleError(f"finite-cost elements do not span at timestep {t}")

    @property
    def m(self) -> int:
        return self.matroids[0].m

    @property
    def time_varying(self) -> bool:
        return len(self.matroids) > 1

    @property
    def matroid(self) -> Matroid:
        if self.time_varying:
            raise InvalidInputError("instance has a different matroid per timestep")
        return self.matroids[0]

    def matroid_at(self, t: int) -> Matroid:
        return self.matroids[t if self.time_varying else 0]

    def alive(self, t: int) -> frozenset[int]:
        return frozenset(e for e, c in enumerate(self.holding[t]) if c < INF)

    def aug_weight(self, t: int, e: int):
        return self.holding[t][e] + self.acquisition[e]

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        if self.time_varying:
            mat = [M.to_dict() for M in self.matroids]
        else:
            mat = self.matroids[0].to_dict()
        out = {
            "matroid": mat,
            "T": self.T,
            "acquisition": list(self.acquisition),
            "holding": [[INF_TOKEN if c == INF else c for c in row] for row in self.holding],
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MmmInstance":
        try:
            mat = data["matroid"]
            T = int(data["T"])
            acq = data["acquisition"]
            hold = data["holding"]
        except KeyError as exc:
            raise InvalidInputError(f"instance missing field {exc}") from None
        mats = tuple(matroid_from_dict(d) for d in mat) if isinstance(mat, list) else (matroid_from_dict(mat),)
        for v in list(acq) + [c for row in hold for c in row]:
            if not (v == INF_TOKEN or (isinstance(v, int) and not isinstance(v, bool))):
                raise InvalidInputError(f"costs in the file format must be integers or \"inf\", got {v!r}")
        return cls(mats, T, tuple(acq), tuple(tuple(r) for r in hold), dict(data.get("metadata", {})))


@dataclass(frozen=True)
class SolutionSequence:
    kind: str  # "base" | "spanning"
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if self.kind not in ("base", "spanning"):
            raise InvalidInputError(f"unknown solution kind {self.kind!r}")
        object.__setattr__(self, "sets", tuple(frozenset(int(e) for e in s) for s in self.sets))

    @property
    def T(self) -> int:
        return len(self.sets)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "sets": [sorted(s) for s in self.sets]}

    @classmethod
    def from_dict(cls, data: dict) -> "SolutionSequence":
        try:
            return cls(data["kind"], tuple(data["sets"]))
        except KeyError as exc:
            raise InvalidInputError(f"solution missing field {exc}") from None


@dataclass(frozen=True)
class CostBreakdown:
    holding: float
    acquisition: float

    @property
    def total(self):
        return self.holding + self.acquisition


def cost_breakdown(inst: MmmInstance, sets: Sequence[Iterable[int]]) -> CostBreakdown:
    """Holding and acquisition totals for any set sequence (no structure checks)."""
    if len(sets) != inst.T:
        raise InvalidSolutionError(f"solution has {len(sets)} timesteps, instance has {inst.T}")
    holding = 0
    acquisition = 0
    prev: frozenset[int] = frozenset()
    for t, S in enumerate(sets):
        S = frozenset(S)
        row = inst.holding[t]
        holding += sum(row[e] for e in S)
        acquisition += sum(inst.acquisition[e] for e in S - prev)
        prev = S
    return CostBreakdown(holding, acquisition)


def msm_cost(inst: MmmInstance, sol: SolutionSequence):
    for t, S in enumerate(sol.sets):
        M = inst.matroid_at(t)
        if M.rank(S) != M.r:
            raise InfeasibleError(f"S_{t} is not spanning")
    return cost_breakdown(inst, sol.sets).total


def mmm_cost(inst: MmmInstance, sol: SolutionSequence):
    if sol.kind != "base":
        raise InvalidSolutionError("mmm_cost expects a base solution")
    for t, S in enumerate(sol.sets):
        M = inst.matroid_at(t)
        if len(S) != M.r or M.rank(S) != M.r:
            raise InvalidSolutionError(f"B_{t} is not a base")
    return cost_breakdown(inst, sol.sets).total


@dataclass
class ValidationReport:
    ok: bool
    failures: list[tuple[int, str]]
    cost: CostBreakdown | None

    def __bool__(self):
        return self.ok


def validate_solution(inst: MmmInstance, sol: SolutionSequence) -> ValidationReport:
    failures: list[tuple[int, str]] = []
    if sol.T != inst.T:
        return ValidationReport(False, [(-1, f"expected {inst.T} timesteps, got {sol.T}")], None)
    for t, S in enumerate(sol.sets):
        M = inst.matroid_at(t)
        bad = [e for e in S if not 0 <= e < inst.m]
        if bad:
            failures.append((t, f"unknown elements {sorted(bad)}"))
            continue
        rk = M.rank(S)
        if rk != M.r:
            failures.append((t, f"rank {rk} < {M.r}"))
        if sol.kind == "base" and len(S) != rk:
            failures.append((t, f"{len(S)} elements but rank {rk}; not a base"))
        dead = sorted(e for e in S if inst.holding[t][e] == INF)
        if dead:
            failures.append((t, f"unavailable elements {dead}"))
    cost = None if any(t == -1 for t, _ in failures) else _safe_breakdown(inst, sol)
    return ValidationReport(not failures, failures, cost)


def _safe_breakdown(inst, sol):
    try:
        return cost_breakdown(inst, sol.sets)
    except (InvalidSolutionError, IndexError):
        return None


# ---------------------------------------------------------------------------
# interval model

@dataclass(frozen=True)
class DerivedElement:
    parent: int
    start: int  # inclusive, 0-based
    end: int    # inclusive
    cost: float


@dataclass(frozen=True, eq=False)
class IntervalInstance:
    """Elements with lifetimes and acquisition costs only; copies of one
    parent are parallel in the lifted matroid."""

    base: tuple[Matroid, ...]
    T: int
    elements: tuple[DerivedElement, ...]

    def __post_init__(self):
        base = (self.base,) if isinstance(self.base, Matroid) else tuple(self.base)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "elements", tuple(self.elements))
        for d in self.elements:
            if not 0 <= d.start <= d.end < self.T:
                raise InvalidInputError(f"bad interval [{d.start}, {d.end}] for T={self.T}")
        parents = [d.parent for d in self.elements]
        object.__setattr__(self, "_lifted", tuple(ParallelMatroid(M, parents) for M in base))
        alive = [[] for _ in range(self.T)]
        for i, d in enumerate(self.elements):
            for t in range(d.start, d.end + 1):
                alive[t].append(i)
        object.__setattr__(self, "_alive", tuple(frozenset(a) for a in alive))

    @property
    def m(self) -> int:
        return len(self.elements)

    @property
    def time_varying(self) -> bool:
        return len(self.base) > 1

    @property
    def acquisition(self) -> tuple:
        return tuple(d.cost for d in self.elements)

    def matroid_at(self, t: int) -> ParallelMatroid:
        return self._lifted[t if self.time_varying else 0]

    def alive(self, t: int) -> frozenset[int]:
        return self._alive[t]

    def aug_weight(self, t: int, e: int):
        return self.elements[e].cost

    def is_feasible(self) -> bool:
        return all(self.matroid_at(t).rank(self.alive(t)) == self.matroid_at(t).r
                   for t in range(self.T))

    def selection_cost(self, X: Iterable[int]):
        return sum(self.elements[e].cost for e in set(X))

    def lift(self, X: Iterable[int]) -> SolutionSequence:
        """Per-timestep parent sets of the selected copies (an MSM solution)."""
        X = set(X)
        sets = []
        for t in range(self.T):
            sets.append(frozenset(self.elements[e].parent for e in self.alive(t) & X))
        return SolutionSequence("spanning", tuple(sets))


def to_interval_exact(inst: MmmInstance) -> IntervalInstance:
    """One copy per (element, interval) whose summed holding cost is finite."""
    out = []
    for e in range(inst.m):
        a = inst.acquisition[e]
        for lo in range(inst.T):
            total = a
            for hi in range(lo, inst.T):
                total += inst.holding[hi][e]
                if total == INF:
                    break
                out.append(DerivedElement(e, lo, hi, total))
    return IntervalInstance(inst.matroids, inst.T, tuple(out))


class OnlineIntervalReducer:
    """Builds the interval model one timestep at a time.

    Each parent's copies partition the horizon (copies whose first holding
    cost is infinite are never usable and are not materialized).  Only the
    current row is consulted when deciding about timestep ``t``.
    """

    def __init__(self, acquisition: Sequence, matroids: Sequence[Matroid] | Matroid | None = None):
        self.acquisition = tuple(acquisition)
        self.matroids = matroids
        self.t = 0
        self._records: list[list] = []  # [parent, start, end, cost]
        self._open: dict[int, int] = {}  # parent -> record index
        self._spent: dict[int, float] = {}

    def _start(self, e: int, t: int, c) -> int | None:
        a = self.acquisition[e]
        cost = a + c
        if cost == INF:
            return None
        idx = len(self._records)
        self._records.append([e, t, t, cost])
        if c < a:
            self._open[e] = idx
            self._spent[e] = c
        return idx

    def step(self, row: Sequence) -> list[int]:
        """Consume holding costs for the next timestep; return alive copy ids."""
        if len(row) != len(self.acquisition):
            raise InvalidInputError("row length does not match the ground set")
        t = self.t
        alive = []
        for e, c in enumerate(row):
            idx = self._open.get(e)
            if idx is not None and self._spent[e] + c <= self.acquisition[e]:
                self._spent[e] += c
                self._records[idx][2] = t
                alive.append(idx)
                continue
            if idx is not None:
                del self._open[e]
            new = self._start(e, t, c)
            if new is not None:
                alive.append(new)
        self.t += 1
        return sorted(alive)

    @property
    def parent_of(self) -> list[int]:
        return [rec[0] for rec in self._records]

    def cost_of(self, idx: int):
        return self._records[idx][3]

    def instance(self) -> IntervalInstance:
        """Snapshot of everything seen so far (open intervals end at the last step)."""
        if self.matroids is None:
            raise InvalidInputError("reducer was built without a matroid")
        elems = tuple(DerivedElement(p, s, e, c) for p, s, e, c in self._records)
        return IntervalInstance(self.matroids, self.t, elems)


def to_interval_online(inst: MmmInstance) -> IntervalInstance:
    red = OnlineIntervalReducer(inst.acquisition, inst.matroids)
    for row in inst.holding:
        red.step(row)
    return red.instance()


# ---------------------------------------------------------------------------
# file IO

def load_instance(path: str | Path) -> MmmInstance:
    with open(path) as fh:
        return MmmInstance.from_dict(json.load(fh))


def save_instance(inst: MmmInstance, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_dict(), fh, indent=1)
        fh.write("\n")


def load_solution(path: str | Path) -> SolutionSequence:
    with open(path) as fh:
        return SolutionSequence.from_dict(json.load(fh))


def save_solution(sol: SolutionSequence, path: str | Path, extra: dict | None = None) -> None:
    data = sol.to_dict()
    if extra:
        data.update(extra)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
