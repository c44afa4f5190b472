"""Separation over the spanning-set polytope restricted to an alive set.

For a weight vector ``x`` and alive set ``A`` (which must span), we look for
``S ⊆ A`` minimizing ``x(S) - b(S)`` with ``b(S) = r - rank(A - S)``; the
point lies in the polytope iff that minimum is nonnegative.  Closed forms
handle uniform and partition matroids, graphic matroids reduce to a minimum
over vertex partitions solved incrementally with one min cut per vertex, and
anything else falls back to subset enumeration.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfeasibleError, ResourceLimitError
from .matroid import GraphicMatroid, Matroid, ParallelMatroid, PartitionMatroid, UniformMatroid

EPS = 1e-9
BRUTE_FORCE_LIMIT = 22


@dataclass(frozen=True)
class CoveringConstraint:
    S: frozenset[int]
    rhs: int

    def lhs(self, x: Sequence[float]) -> float:
        return sum(x[e] for e in self.S)


def constraint_rhs(M: Matroid, alive: Iterable[int], S: Iterable[int]) -> int:
    alive = frozenset(alive)
    return M.r - M.rank(alive - frozenset(S))


def find_violated(M: Matroid, x: Sequence[float], alive: Iterable[int],
                  eps: float = EPS) -> CoveringConstraint | None:
    """Most violated covering constraint for ``x`` on ``alive``, or None."""
    alive = frozenset(alive)
    if M.rank(alive) != M.r:
        raise InfeasibleError("alive set does not span the matroid")
    S = _minimizer(M, x, alive)
    rhs = constraint_rhs(M, alive, S)
    if sum(x[e] for e in S) - rhs < -eps:
        return CoveringConstraint(frozenset(S), rhs)
    return None


def violation(M: Matroid, x: Sequence[float], alive: Iterable[int], S: Iterable[int]) -> float:
    """``x(S) - b(S)``; negative means violated."""
    S = frozenset(S)
    return sum(x[e] for e in S) - constraint_rhs(M, alive, S)


def _minimizer(M: Matroid, x, alive: frozenset[int]) -> frozenset[int]:
    if isinstance(M, ParallelMatroid):
        # copies of one parent enter S together, so aggregate onto parents
        weight: dict[int, float] = {}
        for e in alive:
            p = M.parent_of[e]
            weight[p] = weight.get(p, 0.0) + x[e]
        chosen = _minimizer(M.base, weight, frozenset(weight))
        return frozenset(e for e in alive if M.parent_of[e] in chosen)
    if isinstance(M, UniformMatroid):
        return _uniform(M.k, x, sorted(alive))
    if isinstance(M, PartitionMatroid):
        out: set[int] = set()
        for part, cap in zip(M.parts, M.capacities):
            members = [e for e in part if e in alive]
            out |= _uniform(cap, x, members)
        return frozenset(out)
    if isinstance(M, GraphicMatroid):
        return _graphic(M, x, alive)
    return _brute_force(M, x, alive)


def _uniform(k: int, x, members: list[int]) -> frozenset[int]:
    """Best S inside one uniform block: the s lightest elements for the best s."""
    n = len(members)
    order = sorted(members, key=lambda e: (x[e], e))
    free = n - min(k, n)  # elements removable before the rank of the rest drops
    best_s, best_val, prefix = 0, 0.0, 0.0
    for s in range(1, n + 1):
        prefix += x[order[s - 1]]
        val = prefix - max(0, s - free)
        if val < best_val - EPS:
            best_s, best_val = s, val
    return frozenset(order[:best_s])


def _brute_force(M: Matroid, x, alive: frozenset[int]) -> frozenset[int]:
    elems = sorted(alive)
    if len(elems) > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"{len(elems)} alive elements exceed brute-force limit")
    best, best_val = frozenset(), 0.0
    for mask in range(1, 1 << len(elems)):
        S = frozenset(e for i, e in enumerate(elems) if mask >> i & 1)
        val = sum(x[e] for e in S) - (M.r - M.rank(alive - S))
        if val < best_val - EPS or (abs(val - best_val) <= EPS and sorted(S) < sorted(best)):
            best, best_val = S, val
    return best


# ---------------------------------------------------------------------------
# graphic matroids

def _graphic(M: GraphicMatroid, x, alive: frozenset[int]) -> frozenset[int]:
    """Crossing edges of a vertex partition minimizing x(crossing) - #parts.

    Vertices are added one at a time.  With the current optimal partition of
    the processed vertices contracted to single nodes, the new vertex joins
    the node set ``X`` maximizing ``w(E(X)) - |X|``, where ``w`` counts edge
    weight between distinct nodes.  That is a max-weight closure, found with
    one min cut.
    """
    n = M.n
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for e in alive:
        u, v = M.edges[e]
        if u == v:
            continue
        w = float(x[e])
        adj[u][v] = adj[u].get(v, 0.0) + w
        adj[v][u] = adj[v].get(u, 0.0) + w

    part_of = [-1] * n
    parts: list[list[int]] = []
    for v in range(n):
        # contracted weights between existing parts and the new vertex
        k = len(parts)
        W = [[0.0] * (k + 1) for _ in range(k + 1)]
        for u in range(v + 1):
            pu = k if u == v else part_of[u]
            for y, w in adj[u].items():
                if y > v or y == u:
                    continue
                py = k if y == v else part_of[y]
                if py != pu:
                    W[pu][py] += w  # the reverse entry is filled from y's side
        X = _best_closure(W, k)
        merged = [u for j in X if j < k for u in parts[j]] + [v]
        keep = [p for j, p in enumerate(parts) if j not in X]
        parts = keep + [merged]
        for j, p in enumerate(parts):
            for u in p:
                part_of[u] = j

    return frozenset(e for e in alive
                     if part_of[M.edges[e][0]] != part_of[M.edges[e][1]])


def _best_closure(W: list[list[float]], forced: int) -> set[int]:
    """Node set containing ``forced`` maximizing ``w(E(X)) - |X|``.

    ``W[a][b]`` is the total weight between nodes ``a`` and ``b``.  Minimize
    ``sum_{u in X} (1 - deg(u)/2) + cut(X)/2`` as an s-t cut with X on the
    source side.
    """
    k = len(W)
    if k == 1:
        return {forced}
    deg = [sum(row) for row in W]
    s, t = k, k + 1
    cap = [[0.0] * (k + 2) for _ in range(k + 2)]
    big = sum(deg) + k + 1.0
    for u in range(k):
        c = 1.0 - deg[u] / 2.0
        if c > 0:
            cap[u][t] += c
        elif c < 0:
            cap[s][u] += -c
        for y in range(k):
            if W[u][y] > 0:
                cap[u][y] += W[u][y] / 2.0
    cap[s][forced] += big
    source_side = _min_cut_source_side(cap, s, t)
    return {u for u in source_side if u < k}


def _min_cut_source_side(cap: list[list[float]], s: int, t: int) -> set[int]:
    n = len(cap)
    res = [row[:] for row in cap]
    while True:
        prev = [-1] * n
        prev[s] = s
        q = deque([s])
        while q and prev[t] == -1:
            u = q.popleft()
            for v in range(n):
                if prev[v] == -1 and res[u][v] > EPS:
                    prev[v] = u
                    q.append(v)
        if prev[t] == -1:
            break
        push = float("inf")
        v = t
        while v != s:
            push = min(push, res[prev[v]][v])
            v = prev[v]
        v = t
        while v != s:
            u = prev[v]
            res[u][v] -= push
            res[v][u] += push
            v = u
    seen = {s}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in range(n):
            if v not in seen and res[u][v] > EPS:
                seen.add(v)
                q.append(v)
    return seen
