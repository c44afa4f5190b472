"""Exact baselines: layered dynamic programs and the partition-matroid flow."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import InfeasibleError, InvalidInputError, ResourceLimitError
from ..flow import MinCostFlow
from ..instance import MmmInstance, SolutionSequence, mmm_cost
from ..matroid import PartitionMatroid


def _layered_dp(inst: MmmInstance, layers: Sequence[list[frozenset[int]]]):
    """Shortest path through per-timestep candidate sets.

    Arc cost into candidate ``S`` at ``t`` from ``S'`` at ``t-1`` is
    ``c_t(S) + a(S - S')``; written as ``a(S) - a(S & S')`` it becomes one
    matrix product per layer.
    """
    m = inst.m
    integral = all(isinstance(v, (int, np.integer)) for v in inst.acquisition) and all(
        isinstance(c, (int, np.integer)) for t, sets in enumerate(layers)
        for S in sets for c in (inst.holding[t][e] for e in S))
    dtype = np.int64 if integral else np.float64
    a = np.array(inst.acquisition, dtype=dtype)

    def indicator(sets):
        mat = np.zeros((len(sets), m), dtype=dtype)
        for i, S in enumerate(sets):
            mat[i, list(S)] = 1
        return mat

    back = []
    prev = None
    dist = None
    for t, sets in enumerate(layers):
        if not sets:
            raise InfeasibleError(f"no candidate sets at timestep {t}")
        row = inst.holding[t]
        hold = np.array([sum(row[e] for e in S) for S in sets], dtype=dtype)
        cur = indicator(sets)
        acq_full = cur @ a
        if prev is None:
            dist = hold + acq_full
            back.append(None)
        else:
            shared = (prev * a) @ cur.T  # shared[i, j] = a(S'_i & S_j)
            total = dist[:, None] - shared
            arg = np.argmin(total, axis=0)
            dist = total[arg, np.arange(len(sets))] + acq_full + hold
            back.append(arg)
        prev = cur
    j = int(np.argmin(dist))
    best = dist[j]
    chosen = [j]
    for t in range(len(layers) - 1, 0, -1):
        j = int(back[t][j])
        chosen.append(j)
    chosen.reverse()
    sets = tuple(layers[t][i] for t, i in enumerate(chosen))
    return sets, (int(best) if integral else float(best))


def exact_dp(inst: MmmInstance, cap: int = 2_000) -> tuple[SolutionSequence, float]:
    """Optimal base sequence by enumerating the bases alive at every timestep."""
    layers = [inst.matroid_at(t).enumerate_bases(inst.alive(t), cap) for t in range(inst.T)]
    for t, L in enumerate(layers):
        M = inst.matroid_at(t)
        if not L or len(L[0]) != M.r:
            raise InfeasibleError(f"alive elements do not span at timestep {t}")
    sets, cost = _layered_dp(inst, layers)
    return SolutionSequence("base", sets), cost


def spanning_sets(inst: MmmInstance, t: int, cap: int = 4_096) -> list[frozenset[int]]:
    M = inst.matroid_at(t)
    alive = sorted(inst.alive(t))
    if 2 ** len(alive) > 64 * cap:
        raise ResourceLimitError(f"{len(alive)} alive elements is too many to enumerate")
    out = []
    for mask in range(1 << len(alive)):
        S = frozenset(e for i, e in enumerate(alive) if mask >> i & 1)
        if M.rank(S) == M.r:
            out.append(S)
            if len(out) > cap:
                raise ResourceLimitError(f"more than {cap} spanning sets at timestep {t}")
    return out


def exact_msm(inst: MmmInstance, cap: int = 4_096) -> tuple[SolutionSequence, float]:
    """Optimal spanning-set sequence (works for time-varying matroids too)."""
    layers = [spanning_sets(inst, t, cap) for t in range(inst.T)]
    sets, cost = _layered_dp(inst, layers)
    return SolutionSequence("spanning", sets), cost


def partition_flow_exact(inst: MmmInstance) -> tuple[SolutionSequence, int]:
    """Exact MMM for a fixed partition matroid via min-cost flow.

    One unit of flow per base slot of each part threads a path through
    element-time nodes; split nodes charge holding costs and carry one unit
    (an element fills at most one slot), transition arcs charge the
    acquisition cost of the element entered whenever the element changes.
    """
    if inst.time_varying or not isinstance(inst.matroid, PartitionMatroid):
        raise InvalidInputError("partition_flow_exact needs one fixed partition matroid")
    M: PartitionMatroid = inst.matroid
    T = inst.T
    a = inst.acquisition
    net = MinCostFlow()
    source = net.add_node()
    sink = net.add_node()
    node_in: dict[tuple[int, int], int] = {}
    node_out: dict[tuple[int, int], int] = {}
    split_arc: dict[tuple[int, int], int] = {}
    for t in range(T):
        for e in sorted(inst.alive(t)):
            u, v = net.add_node(), net.add_node()
            node_in[e, t], node_out[e, t] = u, v
            split_arc[e, t] = net.add_edge(u, v, 1, inst.holding[t][e])
    demand = 0
    for j, part in enumerate(M.parts):
        slots = min(M.capacities[j], len(part))
        if slots == 0:
            continue
        demand += slots
        hub = net.add_node()
        net.add_edge(source, hub, slots, 0)
        for e in part:
            if (e, 0) in node_in:
                net.add_edge(hub, node_in[e, 0], 1, a[e])
        for t in range(T - 1):
            for e in part:
                if (e, t) not in node_out:
                    continue
                for f in part:
                    if (f, t + 1) in node_in:
                        net.add_edge(node_out[e, t], node_in[f, t + 1], 1, 0 if e == f else a[f])
        for e in part:
            if (e, T - 1) in node_out:
                net.add_edge(node_out[e, T - 1], sink, 1, 0)
    flow, cost = net.solve(source, sink, demand)
    if flow < demand:
        raise InfeasibleError(f"only {flow} of {demand} units routable")
    sets = tuple(frozenset(e for (e, tt), arc in split_arc.items() if tt == t and net.flow_on(arc))
                 for t in range(T))
    sol = SolutionSequence("base", sets)
    check = mmm_cost(inst, sol)
    if check != cost:
        # min-cost pairing of consecutive bases equals a(B_t - B_{t-1})
        raise AssertionError(f"flow cost {cost} != evaluated cost {check}")
    return sol, cost
