"""Turn a spanning-set sequence into a base sequence that is no more expensive."""
from __future__ import annotations

from typing import Iterable

from ..instance import MmmInstance, SolutionSequence
from ..matroid import Matroid


class BaseTracker:
    """Online form: each base depends only on the previous base and ``S_t``."""

    def __init__(self, M: Matroid):
        self.M = M
        self.prev: frozenset[int] = frozenset()

    def step(self, S: Iterable[int]) -> frozenset[int]:
        S = frozenset(S)
        B = self.M.extend_to_base(self.prev & S, S)
        self.prev = B
        return B


def spanning_to_bases(sol: SolutionSequence, M: Matroid | MmmInstance) -> SolutionSequence:
    """``B_t`` extends ``B_{t-1} & S_t`` inside ``S_t``.

    Holding cannot grow since ``B_t`` is inside ``S_t``.  An element enters
    the bases at most once per maximal run of ``S`` containing it (it is
    only dropped when ``S`` drops it), so each base acquisition charges to a
    distinct acquisition of ``sol``.
    """
    if isinstance(M, MmmInstance):
        M = M.matroid
    tracker = BaseTracker(M)
    return SolutionSequence("base", tuple(tracker.step(S) for S in sol.sets))
