import math
from math import comb

import numpy as np
import pytest

from basewalk.errors import ConfigError, InvalidInputError, ProtocolError, ResourceLimitError
from basewalk.generators import generate, integrality_gap_instance, random_instance, \
    set_cover_instance
from basewalk.instance import (INF, DerivedElement, IntervalInstance, MmmInstance,
                               SolutionSequence, mmm_cost, msm_cost, to_interval_exact,
                               to_interval_online, validate_solution)
from basewalk.matroid import GraphicMatroid, PartitionMatroid, UniformMatroid
from basewalk.solvers import (ALGORITHMS, CostStream, RoundingParams, ThresholdRounder, default_L,
                              epoch_phase_plan, epoch_phase_round, exact_dp, exact_msm,
                              greedy_msm, greedy_select, online_pipeline, partition_flow_exact,
                              round_fractional, sample_rank_check, solve, spanning_to_bases)
from basewalk.solvers.greedy import harmonic, longest_interval
from basewalk.solvers.online import OnlineMsm


# -- greedy ------------------------------------------------------------------

def test_greedy_single_step_picks_a_base():
    inst = MmmInstance(GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]), 1,
                       (1,) * 5, ((0,) * 5,))
    (S,) = greedy_msm(inst).sets
    assert len(S) == inst.matroid.r == inst.matroid.rank(S)


def test_greedy_prefers_long_intervals():
    iinst = IntervalInstance(UniformMatroid(2, 1), 3,
                             (DerivedElement(0, 0, 0, 5), DerivedElement(1, 0, 2, 5),
                              DerivedElement(0, 1, 2, 5)))
    assert greedy_select(iinst)[0] == 1


def test_greedy_zero_cost_first():
    iinst = IntervalInstance(UniformMatroid(2, 1), 2,
                             (DerivedElement(0, 0, 1, 1), DerivedElement(1, 0, 0, 0),
                              DerivedElement(1, 1, 1, 0)))
    assert greedy_select(iinst) == [1, 2]


def test_greedy_set_cover_example():
    inst = set_cover_instance(["u1", "u2"], [["u1", "u2"], ["u1"]])
    assert msm_cost(inst, greedy_msm(inst)) == 1 == exact_dp(inst)[1]


SUITE = [random_instance(("graphic", "partition")[s % 2], 5 + s % 4, 2 + s % 3, 500 + s)
         for s in range(30)]


@pytest.mark.parametrize("inst", SUITE, ids=lambda i: f"{i.metadata['family']}{i.metadata['seed']}")
def test_greedy_within_harmonic_bound(inst):
    opt = exact_dp(inst)[1]
    g = msm_cost(inst, greedy_msm(inst))
    assert g >= opt
    assert g <= (1 + harmonic(longest_interval(to_interval_exact(inst)))) * opt


@pytest.mark.parametrize("inst", SUITE, ids=lambda i: f"{i.metadata['family']}{i.metadata['seed']}")
def test_bases_and_spanning_sets_same_optimum(inst):
    assert exact_dp(inst)[1] == exact_msm(inst)[1]


# -- conversion --------------------------------------------------------------

def test_spanning_to_bases_fixpoint_and_constant(triangle):
    sol = SolutionSequence("base", ({0, 1}, {1, 2}, {1, 2}))
    assert spanning_to_bases(sol, triangle).sets == sol.sets
    const = spanning_to_bases(SolutionSequence("spanning", ({0, 1, 2},) * 4), triangle)
    assert len(set(const.sets)) == 1


@pytest.mark.parametrize("seed", range(100))
def test_spanning_to_bases_never_costs_more(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance("graphic", int(rng.integers(3, 9)), int(rng.integers(1, 5)), seed,
                           n=int(rng.integers(3, 7)), inf_prob=0.2)
    sets = []
    for t in range(inst.T):
        alive = sorted(inst.alive(t))
        S = {e for e in alive if rng.random() < 0.6}
        sets.append(inst.matroid.extend_to_base(set(), alive) | S if inst.matroid.rank(S) < inst.matroid.r else S)
    sol = SolutionSequence("spanning", tuple(sets))
    out = spanning_to_bases(sol, inst.matroid)
    assert validate_solution(inst, out)
    assert mmm_cost(inst, out) <= msm_cost(inst, sol)


# -- rounding ----------------------------------------------------------------

def test_round_integral_z_is_exact():
    inst = random_instance("graphic", 6, 3, 1)
    sol, _ = exact_dp(inst)
    z = np.zeros((inst.T, inst.m))
    for t, B in enumerate(sol.sets):
        z[t, sorted(B)] = 1
    res = round_fractional(z, inst, RoundingParams(seed=4))
    assert res.solution.sets == sol.sets and res.augmentations == []


def test_round_never_selects_zero():
    inst = MmmInstance(UniformMatroid(3, 1), 2, (1, 1, 1), ((0, 0, 0),) * 2)
    z = np.array([[0.5, 0.5, 0.0]] * 2)
    for seed in range(50):
        res = round_fractional(z, inst, RoundingParams(seed=seed))
        assert all(2 not in S for S in res.solution.sets)


def test_round_selection_frequency_matches_min_Lz():
    inst = MmmInstance(UniformMatroid(4, 2), 1, (1, 2, 3, 4), ((0, 0, 0, 0),))
    z = np.array([[0.5] * 4])
    frac_acq = sum(a * 0.5 for a in inst.acquisition)
    for L, expect in ((1.5, 1.5 * frac_acq), (default_L(2, 1), sum(inst.acquisition))):
        pre = []
        post = []
        for seed in range(1000):
            rd = ThresholdRounder(L, seed)
            pre.append(sum(inst.acquisition[e] for e in rd.select(z[0], range(4))))
            res = round_fractional(z, inst, RoundingParams(L=L, seed=seed))
            post.append(sum(inst.acquisition[e] for e in res.solution.sets[0]))
        assert abs(np.mean(pre) - expect) <= 0.2 * expect
        assert np.mean(post) >= np.mean(pre)


def test_rounding_params_validation():
    with pytest.raises(InvalidInputError):
        RoundingParams(L=0.5)
    with pytest.raises(InvalidInputError):
        RoundingParams(policy="sometimes")
    assert default_L(1, 1) == 1.0
    assert default_L(2, 4) == pytest.approx(32 * math.log(8))


def test_rerandomize_policy_recovers():
    inst = MmmInstance(UniformMatroid(4, 2), 3, (1,) * 4, ((0,) * 4,) * 3)
    z = np.full((3, 4), 0.5)
    fixed = sum(len(round_fractional(z, inst, RoundingParams(L=1.0, seed=s)).augmentations)
                for s in range(200))
    rer = sum(len(round_fractional(z, inst, RoundingParams(L=1.0, seed=s, policy="rerandomize",
                                                            max_rerandomize=20)).augmentations)
              for s in range(200))
    assert fixed > 0 and rer < fixed


# -- epochs and phases --------------------------------------------------------

def test_epoch_plan_equal_costs():
    plan = epoch_phase_plan([0.0] * 5, r=3, a_max=2.0, a_min=2.0)
    assert plan.R == 24 and plan.L_prime == pytest.approx(64 * math.log(24))
    assert plan.epochs == [(0, 4)] and plan.phases == [(0, 4)]


def test_epoch_plan_splits():
    spend = [4, 0.1, 0.1, 0.5, 3, 0.2]
    plan = epoch_phase_plan(spend, r=1, a_max=4, a_min=1)
    assert plan.epochs == [(0, 0), (1, 5)]  # the tail never reaches r * a_max
    for lo, hi in plan.phases:
        assert sum(spend[lo + 1:hi + 1]) <= 0.25
    covered = [t for lo, hi in plan.phases for t in range(lo, hi + 1)]
    assert covered == list(range(len(spend)))


@pytest.mark.parametrize("inst", SUITE[:12], ids=lambda i: f"{i.metadata['family']}{i.metadata['seed']}")
def test_epoch_phase_round(inst):
    run = online_pipeline(inst)
    iinst = to_interval_online(inst)
    res = epoch_phase_round(run.state, iinst, seed=2)
    assert validate_solution(inst, res.solution)
    for lo, hi in res.plan.phases:
        start = run.state.history[lo]
        for t in range(lo, hi + 1):
            row = run.state.history[t]
            assert np.abs(row[:len(start)] - start).sum() + row[len(start):].sum() <= 0.25 + 1e-9


# -- online ------------------------------------------------------------------

def test_online_single_free_immortal_element():
    inst = MmmInstance(UniformMatroid(1, 1), 5, (7,), ((0,),) * 5)
    assert online_pipeline(inst).total == 7


class Tripwire(CostStream):
    def next_row(self):
        if self.read > self.committed:
            pytest.fail("pipeline looked ahead")
        return super().next_row()


def test_online_is_causal():
    inst = random_instance("graphic", 6, 4, 3)
    stream = Tripwire(inst)
    res = online_pipeline(stream, inst.matroid, inst.acquisition)
    assert stream.read == stream.committed == inst.T
    assert validate_solution(inst, res.solution)
    with pytest.raises(ProtocolError):
        s = CostStream(inst)
        s.next_row()
        s.next_row()


def test_online_beats_adversary_on_average():
    inst = generate("adversarial", m=8, T=8)
    mean = np.mean([online_pipeline(inst, params=RoundingParams(seed=s)).total for s in range(30)])
    assert mean < 0.5 * min(8, 8)


@pytest.mark.parametrize("seed", range(6))
def test_online_set_cover_ratio(seed):
    inst = generate("set_cover", seed, n_elements=4, n_sets=4)
    opt = exact_dp(inst, cap=50_000)[1]
    r, T = inst.matroid.r, inst.T
    mean = np.mean([online_pipeline(inst, params=RoundingParams(seed=s)).total for s in range(10)])
    assert mean <= 4 * math.log(inst.m + 1) * math.log(r * T + 1) * opt


def test_online_rejects_time_varying():
    inst = generate("three_dm", 0, k=2)
    with pytest.raises(InvalidInputError):
        online_pipeline(inst)


# -- exact -------------------------------------------------------------------

def test_exact_dp_single_layer():
    inst = random_instance("graphic", 6, 1, 9)
    best = min(sum(inst.holding[0][e] + inst.acquisition[e] for e in B)
               for B in inst.matroid.enumerate_bases(inst.alive(0)))
    assert exact_dp(inst)[1] == best


def test_exact_dp_zero_acquisition():
    inst = random_instance("partition", 7, 4, 2, acquisition_range=(0, 0))
    total = sum(sum(inst.holding[t][e] for e in inst.matroid.min_weight_base(inst.holding[t], inst.alive(t)))
                for t in range(inst.T))
    assert exact_dp(inst)[1] == total


def test_exact_dp_cap():
    inst = random_instance("uniform", 8, 2, 0, k=4)
    with pytest.raises(ResourceLimitError):
        exact_dp(inst, cap=10)


def test_exact_dp_gap_instance():
    inst = integrality_gap_instance(4)
    assert exact_dp(inst)[1] >= 2 * inst.metadata["cost_scale"]


def test_flow_examples():
    M = PartitionMatroid([0, 0, 1, 1, 1], [1, 1])
    inst = MmmInstance(M, 1, (1, 2, 3, 1, 2), ((4, 1, 0, 5, 1),))
    sol, cost = partition_flow_exact(inst)
    assert 1 in sol.sets[0] and cost == 6
    # one switch forced: element 0 dies at t=1, element 1 dies at t=0
    inst = MmmInstance(UniformMatroid(2, 1), 2, (3, 3), ((2, INF), (INF, 1)))
    with pytest.raises(InvalidInputError):
        partition_flow_exact(inst)
    inst = MmmInstance(PartitionMatroid([0, 0], [1]), 2, (3, 3), ((2, INF), (INF, 1)))
    assert partition_flow_exact(inst)[1] == 2 * 3 + 3 == exact_dp(inst)[1]


@pytest.mark.parametrize("seed", range(200))
def test_flow_matches_dp(seed):
    inst = random_instance("partition", 3 + seed % 6, 1 + seed % 5, 7_000 + seed, inf_prob=0.1)
    assert partition_flow_exact(inst)[1] == exact_dp(inst)[1]


# -- rank sampling -----------------------------------------------------------

def test_sample_rank_integral(triangle):
    mean, se = sample_rank_check(triangle, [1, 0, 1], trials=200)
    assert mean == 2 and se == 0


def test_sample_rank_uniform_oracle():
    # rank of a Binomial(4, 1/2) draw capped at 2
    exact = sum(comb(4, k) * min(k, 2) for k in range(5)) / 16
    assert exact == 1.625
    mean, se = sample_rank_check(UniformMatroid(4, 2), [0.5] * 4, trials=10_000)
    assert abs(mean - exact) <= 4 * se
    assert mean >= 2 * (1 - 1 / math.e)


def test_sample_rank_rejects_non_base(triangle):
    with pytest.raises(InvalidInputError):
        sample_rank_check(triangle, [0.5, 0.5, 0.5])


# -- dispatcher ----------------------------------------------------------------

@pytest.mark.parametrize("alg", ALGORITHMS)
def test_solve_dispatch(alg):
    inst = random_instance("partition", 6, 3, 8)
    res = solve(inst, alg, seed=1)
    rep = validate_solution(inst, res.solution)
    assert rep and rep.cost.total == res.total >= exact_dp(inst)[1]


def test_solve_unknown():
    with pytest.raises(ConfigError):
        solve(random_instance("uniform", 3, 1, 0), "magic")
