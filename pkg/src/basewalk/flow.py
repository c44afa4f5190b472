"""Min-cost flow by successive shortest augmenting paths with node potentials."""
from __future__ import annotations

import heapq
import math


class MinCostFlow:
    def __init__(self, n: int = 0):
        self.n = n
        self.graph: list[list[int]] = [[] for _ in range(n)]
        # parallel arrays over arcs; arc i ^ 1 is the reverse of arc i
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []

    def add_node(self) -> int:
        self.graph.append([])
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int, cap: int, cost: int) -> int:
        if cost < 0:
            raise ValueError("negative arc costs are not supported")
        idx = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.cost += [cost, -cost]
        self.graph[u].append(idx)
        self.graph[v].append(idx + 1)
        return idx

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def solve(self, s: int, t: int, max_flow: int) -> tuple[int, int]:
        """Push up to ``max_flow`` units from s to t; return (flow, cost)."""
        n = self.n
        potential = [0] * n  # valid: all original costs are nonnegative
        flow = cost = 0
        while flow < max_flow:
            dist = [math.inf] * n
            prev_arc = [-1] * n
            dist[s] = 0
            heap = [(0, s)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u]:
                    continue
                pu = potential[u]
                for a in self.graph[u]:
                    if self.cap[a] <= 0:
                        continue
                    v = self.to[a]
                    nd = d + self.cost[a] + pu - potential[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev_arc[v] = a
                        heapq.heappush(heap, (nd, v))
            if dist[t] == math.inf:
                break
            for v in range(n):
                if dist[v] < math.inf:
                    potential[v] += dist[v]
            push = max_flow - flow
            v = t
            while v != s:
                a = prev_arc[v]
                push = min(push, self.cap[a])
                v = self.to[a ^ 1]
            v = t
            while v != s:
                a = prev_arc[v]
                self.cap[a] -= push
                self.cap[a ^ 1] += push
                cost += push * self.cost[a]
                v = self.to[a ^ 1]
            flow += push
        return flow, cost
