import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from basewalk.errors import InfeasibleError, InvalidInputError, ResourceLimitError
from basewalk.generators import random_matroid
from basewalk.matroid import (GraphicMatroid, ParallelMatroid, PartitionMatroid, UniformMatroid,
                              matroid_from_dict)


def test_rank_examples(u42, triangle, part_small):
    assert u42.rank({0, 1, 2}) == 2
    assert triangle.rank({0, 1, 2}) == 2
    assert part_small.rank({0, 1}) == 1


def test_rank_rejects_unknown_element(u42):
    with pytest.raises(InvalidInputError):
        u42.rank({4})
    with pytest.raises(InvalidInputError):
        u42.rank({-1})


def test_dual_rank_examples(u42, triangle):
    assert u42.dual_rank(set()) == 0
    assert triangle.dual_rank(set()) == 0
    assert u42.dual_rank(range(4)) == 2
    assert triangle.dual_rank({0}) == 1


def test_span_examples(u42, triangle):
    assert triangle.span({0, 1}) == {0, 1, 2}
    assert u42.span({0}) == {0}
    assert u42.span({0, 1}) == {0, 1, 2, 3}


def test_extend_to_base(u42, triangle):
    assert triangle.extend_to_base(set(), {0, 1, 2}) == {0, 1}
    assert triangle.extend_to_base({1, 2}, {0, 1, 2}) == {1, 2}
    assert u42.extend_to_base({3}, {1, 3}) == {1, 3}
    with pytest.raises(InfeasibleError):
        u42.extend_to_base(set(), {1})
    with pytest.raises(InvalidInputError):
        triangle.extend_to_base({0}, {1, 2})


def test_min_weight_base(triangle, part_small, u42):
    assert triangle.min_weight_base([1, 2, 3]) == {0, 1}
    assert u42.min_weight_base([5, 5, 5, 5]) == {0, 1}
    assert part_small.min_weight_base([5, 1, 9]) == {1, 2}
    with pytest.raises(InfeasibleError):
        triangle.min_weight_base([1, 1, 1], avail={0})


def test_enumerate_bases(triangle, u42):
    assert len(triangle.enumerate_bases()) == 3
    assert len(u42.enumerate_bases()) == 6
    with pytest.raises(ResourceLimitError):
        triangle.enumerate_bases(cap=2)


def test_parallel_copies_share_rank(triangle):
    P = ParallelMatroid(triangle, [0, 0, 1, 2])
    assert P.r == 2
    assert P.rank({0, 1}) == 1
    assert P.rank({1, 2, 3}) == 2
    assert P.parents({0, 1, 3}) == {0, 2}


def test_dict_round_trip(triangle, u42, part_small):
    for M in (triangle, u42, part_small, ParallelMatroid(u42, [0, 1, 1])):
        assert matroid_from_dict(M.to_dict()) == M
    with pytest.raises(InvalidInputError):
        matroid_from_dict({"type": "vector"})


def _random_matroids():
    for seed in range(15):
        rng = np.random.default_rng(seed)
        fam = ("uniform", "partition", "graphic")[seed % 3]
        yield random_matroid(fam, int(rng.integers(3, 11)), rng)


@pytest.mark.parametrize("M", list(_random_matroids()), ids=repr)
def test_rank_axioms(M):
    rng = np.random.default_rng(M.m)
    assert M.rank(set()) == 0
    for _ in range(60):
        S = set(np.flatnonzero(rng.random(M.m) < 0.5).tolist())
        T = set(np.flatnonzero(rng.random(M.m) < 0.5).tolist())
        assert M.rank(S) <= len(S)
        assert M.rank(S | T) + M.rank(S & T) <= M.rank(S) + M.rank(T)
        assert M.rank(S) <= M.rank(S | T)
        B = M.extend_to_base(set(), range(M.m))
        assert len(B) == M.r == M.rank(B)
    assert M.dual_rank(range(M.m)) == M.m - M.r


@pytest.mark.parametrize("M", [M for M in _random_matroids() if M.m <= 10], ids=repr)
def test_min_weight_base_matches_brute_force(M):
    rng = np.random.default_rng(7)
    w = rng.integers(0, 20, size=M.m).tolist()
    best = min(sum(w[e] for e in B) for B in M.enumerate_bases())
    assert sum(w[e] for e in M.min_weight_base(w)) == best


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=9))
def test_graphic_rank_is_n_minus_components(n, raw):
    edges = [(u % n, v % n) for u, v in raw]
    M = GraphicMatroid(n, edges)
    import networkx as nx  # test-only oracle
    G = nx.MultiGraph()
    G.add_nodes_from(range(n))
    G.add_edges_from(edges)
    assert M.r == n - nx.number_connected_components(G)
    for S in itertools.islice(itertools.combinations(range(len(edges)), 2), 10):
        assert M.dual_rank(S) <= M.dual_rank(set(range(len(edges))))


def test_uniform_partition_validation():
    with pytest.raises(InvalidInputError):
        UniformMatroid(2, 3)
    with pytest.raises(InvalidInputError):
        PartitionMatroid([0, 2], [1, 1])
    with pytest.raises(InvalidInputError):
        GraphicMatroid(2, [(0, 2)])
