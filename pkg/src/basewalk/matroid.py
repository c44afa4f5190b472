"""Rank-oracle matroids over a dense ground set ``{0, ..., m-1}``.

Three concrete variants (uniform, partition, graphic) plus a parallel
extension used by the interval model, where several derived elements are
parallel copies of one original element.  Every operation is a pure function
of its inputs; ties are always broken by ascending element id.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import InfeasibleError, InvalidInputError, ResourceLimitError


class UnionFind:
    __slots__ = ("parent", "components")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.components = n

    def find(self, u: int) -> int:
        parent = self.parent
        root = u
        while parent[root] != root:
            root = parent[root]
        while parent[u] != root:
            parent[u], u = root, parent[u]
        return root

    def union(self, u: int, v: int) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        self.parent[rv] = ru
        self.components -= 1
        return True


class Matroid:
    """Common machinery; subclasses implement ``_rank`` on a validated set."""

    m: int

    def _rank(self, elems: frozenset[int]) -> int:
        raise NotImplementedError

    # -- basic queries -------------------------------------------------
    def _check(self, S: Iterable[int]) -> frozenset[int]:
        elems = frozenset(int(e) for e in S)
        for e in elems:
            if not 0 <= e < self.m:
                raise InvalidInputError(f"element {e} outside ground set [0, {self.m})")
        return elems

    @property
    def ground_set(self) -> frozenset[int]:
        return frozenset(range(self.m))

    @property
    def r(self) -> int:
        cached = self.__dict__.get("_r")
        if cached is None:
            cached = self._rank(self.ground_set)
            self.__dict__["_r"] = cached
        return cached

    def rank(self, S: Iterable[int]) -> int:
        return self._rank(self._check(S))

    def dual_rank(self, S: Iterable[int]) -> int:
        elems = self._check(S)
        return self._rank(self.ground_set - elems) + len(elems) - self.r

    def is_independent(self, S: Iterable[int]) -> bool:
        elems = self._check(S)
        return self._rank(elems) == len(elems)

    def is_spanning(self, S: Iterable[int]) -> bool:
        return self.rank(S) == self.r

    def span(self, S: Iterable[int]) -> frozenset[int]:
        elems = self._check(S)
        base = self._rank(elems)
        return frozenset(e for e in range(self.m)
                         if e in elems or self._rank(elems | {e}) == base)

    # -- bases ---------------------------------------------------------
    def extend_to_base(self, I: Iterable[int], S: Iterable[int]) -> frozenset[int]:
        """Grow independent ``I`` to a base inside spanning ``S``.

        Candidates from ``S`` are scanned in ascending id order, so the
        result is deterministic.
        """
        indep = self._check(I)
        within = self._check(S)
        if not indep <= within:
            raise InvalidInputError("I must be a subset of S")
        if self._rank(indep) != len(indep):
            raise InvalidInputError("I is not independent")
        if self._rank(within) != self.r:
            raise InfeasibleError("S is not spanning")
        return self._greedy_fill(indep, sorted(within - indep))

    def _greedy_fill(self, start: frozenset[int], order: Sequence[int]) -> frozenset[int]:
        chosen = set(start)
        size = len(chosen)
        for e in order:
            if size == self.r:
                break
            if self._rank(frozenset(chosen | {e})) > size:
                chosen.add(e)
                size += 1
        return frozenset(chosen)

    def min_weight_base(self, w: Sequence[float] | Mapping[int, float],
                        avail: Iterable[int] | None = None) -> frozenset[int]:
        pool = self.ground_set if avail is None else self._check(avail)
        if self._rank(pool) != self.r:
            raise InfeasibleError("available elements do not span the matroid")
        order = sorted(pool, key=lambda e: (w[e], e))
        return self._greedy_fill(frozenset(), order)

    def enumerate_bases(self, avail: Iterable[int] | None = None,
                        cap: int = 10_000) -> list[frozenset[int]]:
        """All bases of the restriction to ``avail``, lexicographic order.

        Raises ResourceLimitError as soon as more than ``cap`` are found.
        """
        if cap < 1:
            raise InvalidInputError("cap must be >= 1")
        elems = sorted(self.ground_set if avail is None else self._check(avail))
        target = self._rank(frozenset(elems))
        out: list[frozenset[int]] = []

        def rec(i: int, chosen: list[int]) -> None:
            if len(chosen) == target:
                out.append(frozenset(chosen))
                if len(out) > cap:
                    raise ResourceLimitError(f"more than {cap} bases")
                return
            if len(elems) - i < target - len(chosen):
                return
            if self._rank(frozenset(chosen + elems[i:])) < target:
                return
            e = elems[i]
            if self._rank(frozenset(chosen + [e])) == len(chosen) + 1:
                rec(i + 1, chosen + [e])
            rec(i + 1, chosen)

        rec(0, [])
        return out

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matroid) and self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash(repr(self.to_dict()))


class UniformMatroid(Matroid):
    def __init__(self, m: int, k: int):
        if m < 0 or not 0 <= k <= m:
            raise InvalidInputError(f"uniform matroid needs 0 <= k <= m, got m={m}, k={k}")
        self.m = m
        self.k = k

    def _rank(self, elems):
        return min(len(elems), self.k)

    def to_dict(self):
        return {"type": "uniform", "m": self.m, "k": self.k}

    def __repr__(self):
        return f"UniformMatroid(m={self.m}, k={self.k})"


class PartitionMatroid(Matroid):
    """Element ``e`` lives in part ``part_of[e]``; part ``j`` admits ``capacities[j]``."""

    def __init__(self, part_of: Sequence[int], capacities: Sequence[int]):
        self.part_of = tuple(int(p) for p in part_of)
        self.capacities = tuple(int(c) for c in capacities)
        self.m = len(self.part_of)
        if any(c < 0 for c in self.capacities):
            raise InvalidInputError("capacities must be nonnegative")
        if any(not 0 <= p < len(self.capacities) for p in self.part_of):
            raise InvalidInputError("part index out of range")
        self.parts: tuple[tuple[int, ...], ...] = tuple(
            tuple(e for e in range(self.m) if self.part_of[e] == j)
            for j in range(len(self.capacities)))

    def _rank(self, elems):
        counts = [0] * len(self.capacities)
        for e in elems:
            counts[self.part_of[e]] += 1
        return sum(min(c, k) for c, k in zip(counts, self.capacities))

    def to_dict(self):
        return {"type": "partition", "parts": list(self.part_of),
                "capacities": list(self.capacities)}

    def __repr__(self):
        return f"PartitionMatroid(parts={list(self.part_of)}, capacities={list(self.capacities)})"


class GraphicMatroid(Matroid):
    """Cycle matroid of a multigraph; rank(S) = n - components(V, S)."""

    def __init__(self, n: int, edges: Sequence[Sequence[int]]):
        self.n = int(n)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        self.m = len(self.edges)
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInputError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")

    def _rank(self, elems):
        uf = UnionFind(self.n)
        for e in elems:
            u, v = self.edges[e]
            uf.union(u, v)
        return self.n - uf.components

    def _greedy_fill(self, start, order):
        # incremental union-find instead of one rank query per candidate
        uf = UnionFind(self.n)
        for e in start:
            uf.union(*self.edges[e])
        chosen = set(start)
        for e in order:
            if len(chosen) == self.r:
                break
            if uf.union(*self.edges[e]):
                chosen.add(e)
        return frozenset(chosen)

    def to_dict(self):
        return {"type": "graphic", "n": self.n, "edges": [list(e) for e in self.edges]}

    def __repr__(self):
        return f"GraphicMatroid(n={self.n}, edges={list(self.edges)})"


class ParallelMatroid(Matroid):
    """Derived elements ``e`` act as parallel copies of ``base`` element ``parent_of[e]``."""

    def __init__(self, base: Matroid, parent_of: Sequence[int]):
        self.base = base
        self.parent_of = tuple(int(p) for p in parent_of)
        self.m = len(self.parent_of)
        for p in self.parent_of:
            if not 0 <= p < base.m:
                raise InvalidInputError(f"parent {p} outside base ground set")

    @property
    def r(self):
        return self.base.r

    def parents(self, S: Iterable[int]) -> frozenset[int]:
        return frozenset(self.parent_of[e] for e in self._check(S))

    def _rank(self, elems):
        return self.base._rank(frozenset(self.parent_of[e] for e in elems))

    def to_dict(self):
        return {"type": "parallel", "base": self.base.to_dict(),
                "parent_of": list(self.parent_of)}

    def __repr__(self):
        return f"ParallelMatroid(base={self.base!r}, m={self.m})"


def matroid_from_dict(data: Mapping) -> Matroid:
    kind = data.get("type")
    try:
        if kind == "uniform":
            return UniformMatroid(int(data["m"]), int(data["k"]))
        if kind == "partition":
            return PartitionMatroid(data["parts"], data["capacities"])
        if kind == "graphic":
            return GraphicMatroid(int(data["n"]), data["edges"])
        if kind == "parallel":
            return ParallelMatroid(matroid_from_dict(data["base"]), data["parent_of"])
    except KeyError as exc:
        raise InvalidInputError(f"matroid description missing field {exc}") from None
    raise InvalidInputError(f"unknown matroid type {kind!r}")


# Module-level spellings of the oracle operations.
def rank(M: Matroid, S: Iterable[int]) -> int:
    return M.rank(S)


def dual_rank(M: Matroid, S: Iterable[int]) -> int:
    return M.dual_rank(S)


def span(M: Matroid, S: Iterable[int]) -> frozenset[int]:
    return M.span(S)


def extend_to_base(M: Matroid, I: Iterable[int], S: Iterable[int]) -> frozenset[int]:
    return M.extend_to_base(I, S)


def min_weight_base(M: Matroid, w, avail: Iterable[int] | None = None) -> frozenset[int]:
    return M.min_weight_base(w, avail)


def enumerate_bases(M: Matroid, avail: Iterable[int] | None = None,
                    cap: int = 10_000) -> list[frozenset[int]]:
    return M.enumerate_bases(avail, cap)
