"""Greedy cover for the interval model: best benefit per unit cost first."""
from __future__ import annotations

import heapq

from ..errors import InfeasibleError
from ..instance import IntervalInstance, MmmInstance, SolutionSequence, to_interval_exact


class _Coverage:
    """Per-timestep parent sets of the chosen copies, with their ranks."""

    def __init__(self, iinst: IntervalInstance):
        self.iinst = iinst
        self.parents = [set() for _ in range(iinst.T)]
        self.ranks = [0] * iinst.T

    def benefit(self, e: int) -> int:
        d = self.iinst.elements[e]
        gain = 0
        for t in range(d.start, d.end + 1):
            base = self.iinst.matroid_at(t).base
            if d.parent in self.parents[t]:
                continue
            if base.rank(self.parents[t] | {d.parent}) > self.ranks[t]:
                gain += 1
        return gain

    def add(self, e: int) -> None:
        d = self.iinst.elements[e]
        for t in range(d.start, d.end + 1):
            self.parents[t].add(d.parent)
            self.ranks[t] = self.iinst.matroid_at(t).base.rank(self.parents[t])

    def done(self) -> bool:
        return all(rk == self.iinst.matroid_at(t).r for t, rk in enumerate(self.ranks))


def greedy_select(iinst: IntervalInstance) -> list[int]:
    """Copies in the order greedy buys them.

    Zero-cost copies with positive benefit are taken first in id order;
    afterwards a lazy heap keyed by ``(-benefit/cost, id)`` is used, which is
    exact because benefits only shrink as the selection grows.
    """
    if not iinst.is_feasible():
        raise InfeasibleError("alive copies do not span at some timestep")
    cov = _Coverage(iinst)
    picked: list[int] = []
    heap = []
    for e, d in enumerate(iinst.elements):
        if d.cost == 0:
            if cov.benefit(e) > 0:
                cov.add(e)
                picked.append(e)
        else:
            heap.append((-cov.benefit(e) / d.cost, e))
    heapq.heapify(heap)
    while not cov.done():
        if not heap:
            raise InfeasibleError("ran out of copies before every timestep was spanned")
        _, e = heapq.heappop(heap)
        ben = cov.benefit(e)
        if ben == 0:
            continue
        key = (-ben / iinst.elements[e].cost, e)
        if heap and key > heap[0]:
            heapq.heappush(heap, key)
            continue
        cov.add(e)
        picked.append(e)
    return picked


def greedy_msm(inst: IntervalInstance | MmmInstance) -> SolutionSequence:
    """Spanning sequence from greedy on the interval model.

    An ``MmmInstance`` is first converted with the exact interval reduction.
    """
    iinst = to_interval_exact(inst) if isinstance(inst, MmmInstance) else inst
    return iinst.lift(greedy_select(iinst))


def harmonic(n: int) -> float:
    return sum(1.0 / k for k in range(1, n + 1))


def longest_interval(iinst: IntervalInstance) -> int:
    return max(d.end - d.start + 1 for d in iinst.elements)
