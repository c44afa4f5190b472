"""Instance generators: hardness gadgets, the deterministic-adversary stream
and seeded random families.

Every generator is a pure function of its parameters and seed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from .errors import InvalidInputError, ProtocolError
from .instance import INF, MmmInstance, SolutionSequence, cost_breakdown
from .matroid import GraphicMatroid, PartitionMatroid, UniformMatroid


# ---------------------------------------------------------------------------
# set cover -> spanning trees

def set_cover_instance(U: Sequence[Hashable], F: Sequence[Sequence[Hashable]]) -> MmmInstance:
    """Graphic instance whose optimum equals the minimum set cover size.

    Vertex 0 is the root, vertex ``i + 1`` stands for set ``F[i]``; edge
    ``i`` joins them with unit acquisition cost and is always free to hold.
    Timestep ``j`` adds free edges (alive only at ``j``) forming a clique on
    the sets containing ``U[j]`` and a clique on the root plus all other
    sets.  An edge that would duplicate an existing vertex pair is
    subdivided through a fresh vertex; the half touching the fresh vertex
    from the far side is permanent and free, so the fresh vertex is never
    stranded.
    """
    U = list(U)
    F = [frozenset(s) for s in F]
    if not U:
        raise InvalidInputError("universe must be nonempty")
    for u in U:
        if not any(u in s for s in F):
            raise InvalidInputError(f"element {u!r} is not covered by any set")
    k = len(F)
    T = len(U)
    edges: list[tuple[int, int]] = []
    alive_at: list[int | None] = []  # None = alive at every timestep
    acq: list[int] = []
    for i in range(k):
        edges.append((0, i + 1))
        alive_at.append(None)
        acq.append(1)
    seen = {frozenset(e) for e in edges}
    n_vertices = k + 1

    def add_short(x: int, y: int, j: int) -> None:
        nonlocal n_vertices
        pair = frozenset((x, y))
        if pair not in seen:
            seen.add(pair)
            edges.append((x, y))
            alive_at.append(j)
            acq.append(0)
            return
        w = n_vertices
        n_vertices += 1
        edges.append((x, w))
        alive_at.append(j)
        acq.append(0)
        edges.append((w, y))
        alive_at.append(None)
        acq.append(0)

    for j, u in enumerate(U):
        inside = [i + 1 for i, s in enumerate(F) if u in s]
        outside = [0] + [i + 1 for i, s in enumerate(F) if u not in s]
        for group in (inside, outside):
            for x, y in itertools.combinations(group, 2):
                add_short(x, y, j)

    holding = [[0 if (when is None or when == j) else INF for when in alive_at] for j in range(T)]
    meta = {"family": "set_cover", "universe": [str(u) for u in U],
            "sets": [sorted(map(str, s)) for s in F], "long_term_edges": k}
    return MmmInstance((GraphicMatroid(n_vertices, edges),), T, tuple(acq),
                       tuple(map(tuple, holding)), meta)


def random_set_system(n_elements: int, n_sets: int, density: float, seed: int):
    """Random coverable (U, F) with ``U = range(n_elements)``."""
    rng = np.random.default_rng(seed)
    F = [set(np.flatnonzero(rng.random(n_elements) < density).tolist()) for _ in range(n_sets)]
    for u in range(n_elements):
        if not any(u in s for s in F):
            F[int(rng.integers(n_sets))].add(u)
    return list(range(n_elements)), [sorted(s) for s in F]


def min_set_cover_size(U, F) -> int:
    """Brute force; fine for |F| <= ~15."""
    need = set(U)
    for size in range(len(F) + 1):
        for combo in itertools.combinations(range(len(F)), size):
            if need <= set().union(*(set(F[i]) for i in combo)):
                return size
    raise InvalidInputError("set system does not cover the universe")


# ---------------------------------------------------------------------------
# integrality gap family

MAX_GAP_N = 12


def integrality_gap_instance(n: int) -> MmmInstance:
    """Star-plus-chords graph with one timestep per balanced bipartition.

    Spokes ``(0, i)`` cost ``n*T`` to acquire; chords cost 1 (the unscaled
    ``1/(nT)``); ``metadata["cost_scale"] = n*T``.  Chord ``(i, j)`` is
    available at ``t`` iff ``i`` and ``j`` fall on the same side of the
    ``t``-th bipartition, sides ordered lexicographically.
    """
    if n < 2 or n % 2 or n > MAX_GAP_N:
        raise InvalidInputError(f"n must be even and in [2, {MAX_GAP_N}], got {n}")
    sides = list(itertools.combinations(range(1, n + 1), n // 2))
    T = len(sides)
    scale = n * T
    spokes = [(0, i) for i in range(1, n + 1)]
    chords = list(itertools.combinations(range(1, n + 1), 2))
    holding = []
    for side in sides:
        left = set(side)
        row = [0] * n
        row += [0 if ((u in left) == (v in left)) else INF for u, v in chords]
        holding.append(tuple(row))
    meta = {"family": "gap", "n": n, "cost_scale": scale,
            "partitions": [list(s) for s in sides]}
    return MmmInstance((GraphicMatroid(n + 1, spokes + chords),), T,
                       tuple([scale] * n + [1] * len(chords)), tuple(holding), meta)


def integrality_gap_witness(inst: MmmInstance) -> np.ndarray:
    """Fractional base per timestep for a gap instance, shape ``(T, m)``.

    Spokes carry ``2/n``; every available chord carries ``4/n``.  Each side
    is a clique on ``n/2`` vertices, where the uniform ``4/n`` point is a
    fractional spanning tree, and the spokes join the two cliques to the hub
    with total mass 1 each.
    """
    n = inst.metadata["n"]
    z = np.zeros((inst.T, inst.m))
    z[:, :n] = 2.0 / n
    for t in range(inst.T):
        for e in inst.alive(t):
            if e >= n:
                z[t, e] = 4.0 / n
    return z


# ---------------------------------------------------------------------------
# adaptive adversary for deterministic online algorithms

@dataclass
class AdversaryTranscript:
    rows: list[tuple]
    choices: list[int]
    algorithm_cost: int
    instance: MmmInstance
    offline_opt: int | None = None


def adversarial_uniform_stream(m: int, T: int, choose: Callable[[int, tuple], int],
                               compute_opt: bool = True) -> AdversaryTranscript:
    """Play the poisoning adversary against a deterministic callback.

    1-uniform matroid, unit acquisition costs.  Step 0 is free everywhere;
    afterwards the element chosen in the previous step becomes unavailable.
    ``choose(t, row)`` must return an available element index.
    """
    if m < 1 or T < 1:
        raise InvalidInputError("need m >= 1 and T >= 1")
    rows: list[tuple] = []
    choices: list[int] = []
    for t in range(T):
        row = tuple(INF if (choices and e == choices[-1]) else 0 for e in range(m))
        rows.append(row)
        e = choose(t, row)
        if not isinstance(e, (int, np.integer)) or not 0 <= e < m:
            raise ProtocolError(f"step {t}: callback returned {e!r}, not an element")
        if row[e] == INF:
            raise ProtocolError(f"step {t}: callback chose unavailable element {e}")
        choices.append(int(e))
    inst = MmmInstance((UniformMatroid(m, 1),), T, tuple([1] * m), tuple(rows),
                       {"family": "adversarial", "m": m})
    sol = SolutionSequence("base", tuple(frozenset([e]) for e in choices))
    cost = cost_breakdown(inst, sol.sets).total
    opt = None
    if compute_opt:
        from .solvers.exact import exact_dp
        opt = exact_dp(inst)[1]
    return AdversaryTranscript(rows, choices, int(cost), inst, opt)


# ---------------------------------------------------------------------------
# 3D matching with cycling partition matroids

def three_dm_instance(X: Sequence, Y: Sequence, Z: Sequence,
                      hyperedges: Sequence[tuple], T: int) -> MmmInstance:
    """Time-varying instance: step ``t`` partitions hyperedges by their
    ``X``, ``Y`` or ``Z`` vertex according to ``t mod 3``."""
    X, Y, Z = list(X), list(Y), list(Z)
    k = len(X)
    if len(Y) != k or len(Z) != k:
        raise InvalidInputError("X, Y and Z must have equal size")
    if T < 1 or T % 3:
        raise InvalidInputError("T must be a positive multiple of 3")
    if not hyperedges:
        raise InvalidInputError("need at least one hyperedge")
    index = [{v: i for i, v in enumerate(side)} for side in (X, Y, Z)]
    for h in hyperedges:
        if len(h) != 3 or any(h[c] not in index[c] for c in range(3)):
            raise InvalidInputError(f"hyperedge {h!r} is not in X x Y x Z")
    mats = [PartitionMatroid([index[c][h[c]] for h in hyperedges], [1] * k) for c in range(3)]
    m = len(hyperedges)
    meta = {"family": "three_dm", "k": k, "hyperedges": [list(map(str, h)) for h in hyperedges]}
    return MmmInstance(tuple(mats[t % 3] for t in range(T)), T, tuple([1] * m),
                       tuple(tuple([0] * m) for _ in range(T)), meta)


# ---------------------------------------------------------------------------
# random families

def _graph_edges(rng: np.random.Generator, n: int, m: int) -> list[tuple[int, int]]:
    order = rng.permutation(n).tolist()
    edges = [(order[i], order[int(rng.integers(i))]) for i in range(1, n)]
    used = {tuple(sorted(e)) for e in edges}
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in used]
    extra = m - len(edges)
    if extra <= len(pairs):
        pick = rng.choice(len(pairs), size=extra, replace=False) if extra > 0 else []
        edges += [pairs[i] for i in sorted(pick)]
    else:
        edges += pairs
        edges += [tuple(sorted(rng.choice(n, size=2, replace=False).tolist()))
                  for _ in range(m - len(edges))]
    return [tuple(sorted(e)) for e in edges]


def random_matroid(family: str, m: int, rng: np.random.Generator, **params):
    if m < 1:
        raise InvalidInputError("m must be >= 1")
    if family == "uniform":
        k = params.get("k")
        k = int(rng.integers(1, m)) if k is None and m > 1 else (1 if k is None else k)
        return UniformMatroid(m, int(k))
    if family == "partition":
        p = params.get("parts") or int(rng.integers(1, max(1, m // 2) + 1))
        p = min(int(p), m)
        part_of = list(range(p)) + rng.integers(0, p, size=m - p).tolist()
        part_of = rng.permutation(part_of).tolist()
        sizes = [part_of.count(j) for j in range(p)]
        caps = [int(rng.integers(1, s + 1)) for s in sizes]
        return PartitionMatroid(part_of, caps)
    if family == "graphic":
        if params.get("complete"):
            n = int(params.get("n", 4))
            return GraphicMatroid(n, list(itertools.combinations(range(n), 2)))
        n = params.get("n") or max(2, min(m + 1, (m + 4) // 2))
        n = min(int(n), m + 1)
        return GraphicMatroid(n, _graph_edges(rng, n, m))
    raise InvalidInputError(f"unknown random family {family!r}")


def random_instance(family: str, m: int, T: int, seed: int,
                    acquisition_range: tuple[int, int] = (1, 10),
                    holding_range: tuple[int, int] = (0, 10),
                    inf_prob: float = 0.0, **params) -> MmmInstance:
    """Reproducible random instance; holding rows are resampled until the
    finite-cost elements span."""
    lo_a, hi_a = acquisition_range
    lo_c, hi_c = holding_range
    if min(lo_a, lo_c) < 0 or lo_a > hi_a or lo_c > hi_c:
        raise InvalidInputError("cost ranges must be nonnegative and ordered")
    if not 0 <= inf_prob < 1:
        raise InvalidInputError("inf_prob must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    M = random_matroid(family, m, rng, **params)
    m = M.m
    acq = rng.integers(lo_a, hi_a + 1, size=m).tolist()
    holding = []
    for _ in range(T):
        while True:
            row = rng.integers(lo_c, hi_c + 1, size=m).tolist()
            dead = rng.random(m) < inf_prob
            row = [INF if d else int(c) for c, d in zip(row, dead)]
            if M.rank([e for e in range(m) if row[e] < INF]) == M.r:
                break
        holding.append(tuple(row))
    meta = {"family": family, "m": m, "T": T, "seed": int(seed)}
    return MmmInstance((M,), T, tuple(int(v) for v in acq), tuple(holding), meta)


# ---------------------------------------------------------------------------
# declarative specs (config files, CLI)

FAMILIES = ("uniform", "partition", "graphic", "set_cover", "gap", "three_dm", "adversarial")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def build(self) -> MmmInstance:
        return generate(self.family, self.seed, **self.params)


def _lazy_choice(t, row):
    # cheapest available element; used when the adversary family is generated
    # without a caller-supplied algorithm
    return min(e for e, c in enumerate(row) if c < INF)


def generate(family: str, seed: int = 0, **params) -> MmmInstance:
    if family in ("uniform", "partition", "graphic"):
        p = dict(params)
        m = int(p.pop("m", 6))
        T = int(p.pop("T", 3))
        for key in ("acquisition_range", "holding_range"):
            if key in p:
                p[key] = tuple(p[key])
        inst = random_instance(family, m, T, seed, **p)
    elif family == "set_cover":
        if "U" in params:
            U, F = params["U"], params["F"]
        else:
            U, F = random_set_system(int(params.get("n_elements", 3)), int(params.get("n_sets", 3)),
                                     float(params.get("density", 0.4)), seed)
        inst = set_cover_instance(U, F)
    elif family == "gap":
        inst = integrality_gap_instance(int(params.get("n", 4)))
    elif family == "three_dm":
        if "hyperedges" in params:
            k = int(params["k"])
            hyper = [tuple(h) for h in params["hyperedges"]]
        else:
            k = int(params.get("k", 2))
            rng = np.random.default_rng(seed)
            n_h = int(params.get("n_hyperedges", 2 * k))
            hyper = sorted({tuple(int(v) for v in rng.integers(0, k, size=3)) for _ in range(n_h)})
        inst = three_dm_instance(range(k), range(k), range(k), hyper, int(params.get("T", 3)))
    elif family == "adversarial":
        inst = adversarial_uniform_stream(int(params.get("m", 5)), int(params.get("T", 5)),
                                          _lazy_choice, compute_opt=False).instance
    else:
        raise InvalidInputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    meta = dict(inst.metadata)
    meta["generator"] = {"family": family, "seed": int(seed), "params": _jsonable(params)}
    return MmmInstance(inst.matroids, inst.T, inst.acquisition, inst.holding, meta)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj
