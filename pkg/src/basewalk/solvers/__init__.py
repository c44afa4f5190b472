"""Solver entry points and a name-based dispatcher."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from ..fractional import FractionalState, solve_lp_relaxation
from ..instance import (MmmInstance, SolutionSequence, cost_breakdown, to_interval_exact,
                        to_interval_online)
from .convert import BaseTracker, spanning_to_bases
from .exact import exact_dp, exact_msm, partition_flow_exact
from .greedy import greedy_msm, greedy_select
from .online import (CostStream, LazyOnline, OnlineMsm, OnlineResult, lazy_online,
                     online_pipeline, sample_rank_check)
from .rounding import (EpochPhaseState, RoundingParams, ThresholdRounder, default_L,
                       epoch_phase_plan, epoch_phase_round, round_fractional)

ALGORITHMS = ("greedy", "round", "online", "epoch", "lazy", "dp", "flow")


@dataclass
class SolveResult:
    algorithm: str
    solution: SolutionSequence
    holding: float
    acquisition: float
    stats: dict = field(default_factory=dict)
    trace: FractionalState | None = field(default=None, repr=False)

    @property
    def total(self):
        return self.holding + self.acquisition


def _to_bases(inst: MmmInstance, sol: SolutionSequence) -> SolutionSequence:
    # time-varying matroids break the spanning-to-base argument; keep spanning sets
    return sol if inst.time_varying else spanning_to_bases(sol, inst.matroid)


def solve(inst: MmmInstance, algorithm: str, seed: int = 0,
          params: RoundingParams | None = None) -> SolveResult:
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    params = params or RoundingParams(seed=seed)
    stats: dict = {}
    trace = None
    if algorithm == "greedy":
        sol = _to_bases(inst, greedy_msm(inst))
    elif algorithm == "round":
        lp = solve_lp_relaxation(inst)
        res = round_fractional(lp.z, inst, params)
        sol = _to_bases(inst, res.solution)
        stats = {"lp_value": lp.value, "augmentations": len(res.augmentations),
                 "rerandomizations": res.rerandomizations, "L": res.L}
    elif algorithm == "online":
        res = online_pipeline(inst, params=params)
        sol, trace = res.solution, res.state
        stats = {"constraints_per_step": res.constraints_per_step,
                 "augmentations": res.augmentations,
                 "rerandomizations": res.rerandomizations,
                 "half_gap_failures": res.half_gap_failures,
                 "fractional_cost": res.fractional_cost}
    elif algorithm == "epoch":
        run = online_pipeline(inst, params=params)
        trace = run.state
        res = epoch_phase_round(run.state, to_interval_online(inst), seed)
        sol = _to_bases(inst, res.solution)
        stats = {"constraints_per_step": run.constraints_per_step,
                 "augmentations": len(res.augmentations),
                 "rerandomizations": res.rerandomizations, "L_prime": res.L,
                 "epochs": len(res.plan.epochs), "phases": len(res.plan.phases)}
    elif algorithm == "lazy":
        sol = lazy_online(inst)
    elif algorithm == "dp":
        sol, _ = exact_dp(inst)
    else:
        sol, _ = partition_flow_exact(inst)
    br = cost_breakdown(inst, sol.sets)
    return SolveResult(algorithm, sol, br.holding, br.acquisition, stats, trace)


__all__ = [
    "ALGORITHMS", "BaseTracker", "CostStream", "EpochPhaseState", "LazyOnline", "OnlineMsm",
    "OnlineResult", "RoundingParams", "SolveResult", "ThresholdRounder", "default_L",
    "epoch_phase_plan", "epoch_phase_round", "exact_dp", "exact_msm", "greedy_msm",
    "greedy_select", "lazy_online", "online_pipeline", "partition_flow_exact",
    "round_fractional", "sample_rank_check", "solve", "spanning_to_bases",
    "to_interval_exact",
]
