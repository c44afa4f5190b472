import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from basewalk.errors import InfeasibleError
from basewalk.fractional import (FractionalState, assert_half_gap, clamp_double,
                                 constraint_log_rows, fractional_step, in_base_polytope,
                                 raise_on_constraint, solve_lp_relaxation)
from basewalk.generators import random_instance, random_matroid
from basewalk.matroid import GraphicMatroid, PartitionMatroid, UniformMatroid
from basewalk.separation import CoveringConstraint, constraint_rhs, find_violated
from basewalk.solvers import exact_dp, online_pipeline


def test_clamp_double():
    assert clamp_double([0.3, 0.7, 0.0]).tolist() == pytest.approx([0.6, 1.0, 0.0])


def test_find_violated_examples(triangle):
    u32 = UniformMatroid(3, 2)
    assert find_violated(u32, [1, 1, 0], range(3)) is None
    cons = find_violated(u32, [0.5, 0.5, 0.0], range(3))
    assert cons == CoveringConstraint(frozenset({0, 1, 2}), 2)
    assert find_violated(triangle, [1, 1, 0], range(3)) is None


def test_find_violated_needs_spanning_alive(triangle):
    with pytest.raises(InfeasibleError):
        find_violated(triangle, [0, 0, 0], {0})


def test_rhs_uses_alive_set(triangle):
    # with edge 2 dead, dropping edge 0 leaves rank 1 among the alive edges
    assert constraint_rhs(triangle, {0, 1}, {0}) == 1
    assert constraint_rhs(triangle, {0, 1, 2}, {0}) == 0


def _brute_min(M, x, alive):
    alive = sorted(alive)
    best = 0.0
    for k in range(1, len(alive) + 1):
        for S in itertools.combinations(alive, k):
            val = sum(x[e] for e in S) - constraint_rhs(M, alive, S)
            best = min(best, val)
    return best


def _cases():
    for seed in range(60):
        rng = np.random.default_rng(seed)
        fam = ("uniform", "partition", "graphic")[seed % 3]
        M = random_matroid(fam, int(rng.integers(3, 13)), rng)
        while True:
            alive = {e for e in range(M.m) if rng.random() < 0.8}
            if M.rank(alive) == M.r:
                break
        x = np.round(rng.random(M.m) * rng.integers(1, 3), 2).clip(0, 1)
        yield M, x, alive


@pytest.mark.parametrize("M,x,alive", list(_cases()))
def test_separation_matches_brute_force(M, x, alive):
    best = _brute_min(M, x, alive)
    cons = find_violated(M, x, alive)
    if best >= -1e-9:
        assert cons is None
    else:
        assert cons is not None and cons.S <= alive
        assert cons.lhs(x) - cons.rhs == pytest.approx(best, abs=1e-9)
        assert cons.rhs >= 1


def test_raise_examples():
    s = FractionalState([0.0])
    raise_on_constraint(s, CoveringConstraint(frozenset({0}), 1), [3])
    assert s.x == [1.0]

    s = FractionalState([0.0] * 4)
    raise_on_constraint(s, CoveringConstraint(frozenset(range(4)), 1), [2] * 4)
    assert s.x == pytest.approx([0.25] * 4)

    s = FractionalState([0.6, 0.6])
    raise_on_constraint(s, CoveringConstraint(frozenset({0, 1}), 1), [1, 1])
    assert s.x == [0.6, 0.6]


def test_raise_favours_cheap_elements():
    s = FractionalState([0.0, 0.0, 0.0])
    raise_on_constraint(s, CoveringConstraint(frozenset({0, 1, 2}), 1), [1, 4, 0])
    assert s.x[2] == 1.0 and s.x[0] == s.x[1] == 0.0
    s = FractionalState([0.0, 0.0])
    raise_on_constraint(s, CoveringConstraint(frozenset({0, 1}), 1), [1, 4])
    assert s.x[0] > s.x[1] > 0
    assert sum(s.x) == pytest.approx(1.0)


def test_raise_unsatisfiable():
    s = FractionalState([0.0])
    with pytest.raises(InfeasibleError):
        raise_on_constraint(s, CoveringConstraint(frozenset({0}), 2), [1])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=6),
       st.lists(st.integers(0, 20), min_size=6, max_size=6), st.integers(1, 3))
def test_raise_is_monotone_and_tight(x0, costs, rhs):
    rhs = min(rhs, len(x0))
    s = FractionalState(list(x0))
    cons = CoveringConstraint(frozenset(range(len(x0))), rhs)
    raise_on_constraint(s, cons, costs)
    assert all(a >= b for a, b in zip(s.x, x0))
    assert all(v <= 1.0 for v in s.x)
    assert cons.lhs(s.x) >= rhs - 1e-7


def test_fractional_step_examples():
    s = FractionalState([1.0, 0.0])
    assert fractional_step(s, UniformMatroid(2, 1), {0, 1}, [1, 1]) == []
    s = FractionalState()
    emitted = fractional_step(s, UniformMatroid(1, 1), {0}, [5])
    assert len(emitted) == 1 and s.x[0] >= 0.5


def test_half_gap_examples():
    d = 1e-3
    pair = CoveringConstraint(frozenset({0, 1}), 1)
    # (0.5-d, 0.5-d) clamps to a feasible point, so the gap claim is vacuous there
    assert find_violated(UniformMatroid(2, 1), clamp_double([0.5 - d] * 2), {0, 1}) is None
    assert not assert_half_gap([0.5 - d] * 2, pair)
    assert find_violated(UniformMatroid(2, 1), clamp_double([0.25 - d] * 2), {0, 1}) == pair
    assert assert_half_gap([0.25 - d] * 2, pair)
    assert assert_half_gap([0.49], CoveringConstraint(frozenset({0}), 1))
    assert find_violated(UniformMatroid(1, 1), clamp_double([0.51]), {0}) is None


SUITE = [random_instance(("uniform", "partition", "graphic")[s % 3], 5 + s % 4, 2 + s % 3, s)
         for s in range(24)]


@pytest.mark.parametrize("inst", SUITE, ids=lambda i: f"{i.metadata['family']}{i.metadata['seed']}")
def test_online_fractional_invariants(inst):
    res = online_pipeline(inst)
    st_ = res.state
    assert st_.half_gap_failures == 0
    for rec in st_.log:
        assert rec.before <= rec.rhs - 0.5 + 1e-9
        assert rec.after - rec.before >= 0.5 - 1e-9
    prev = np.zeros(0)
    for row in st_.history:
        assert np.all(row[:len(prev)] >= prev - 1e-15)
        assert np.all((row >= 0) & (row <= 1))
        prev = row
    for t, c in enumerate(st_.counts):
        assert c <= 2 * inst.m
    for t, snap in enumerate(st_.snapshots):
        # the clamped point is feasible on the alive copies at the end of each step
        assert all(0 <= v <= 1 for v in snap.values())
    rows = constraint_log_rows(st_)
    assert len(rows) == len(st_.log) == sum(st_.counts)
    # soft competitive check on the fractional cost
    assert res.fractional_cost <= 4 * math.log(inst.m + 1) * exact_dp(inst)[1] + 1e-9


@pytest.mark.parametrize("inst", SUITE[:12], ids=lambda i: f"{i.metadata['family']}{i.metadata['seed']}")
def test_lp_relaxation_lower_bounds_opt(inst):
    lp = solve_lp_relaxation(inst)
    assert lp.value <= exact_dp(inst)[1] + 1e-6
    for t in range(inst.T):
        assert in_base_polytope(inst.matroid, lp.z[t], inst.alive(t), tol=1e-6)


def test_in_base_polytope(triangle):
    assert in_base_polytope(triangle, [1, 1, 0])
    assert in_base_polytope(triangle, [2 / 3] * 3)
    assert not in_base_polytope(triangle, [1, 0.5, 0.5], {0, 1})
    assert not in_base_polytope(triangle, [1, 1, 1])
