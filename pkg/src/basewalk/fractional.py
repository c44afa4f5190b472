"""Online fractional covering over the spanning-set polytope.

The state holds one monotone variable per (interval-model) element.  Each
timestep the doubled-and-clamped vector is tested for feasibility on the
alive set; every violated constraint found is handed to a multiplicative
raising rule until the clamped vector is feasible.  An offline cutting-plane
LP solver for the per-timestep base-polytope relaxation lives here too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleError, InvariantViolation
from .matroid import Matroid
from .separation import EPS, CoveringConstraint, find_violated

STEP_FRACTION = 0.01  # eta = STEP_FRACTION * (cheapest positive cost in S)


def clamp_double(x) -> np.ndarray:
    return np.minimum(2.0 * np.asarray(x, dtype=float), 1.0)


def assert_half_gap(x: Sequence[float], cons: CoveringConstraint, eps: float = EPS) -> bool:
    """True iff x(S) <= rhs - 1/2 (+eps); holds whenever clamp_double(x) violates cons."""
    return cons.lhs(x) <= cons.rhs - 0.5 + eps


@dataclass
class ConstraintRecord:
    t: int
    size: int
    rhs: int
    before: float
    after: float
    half_gap: bool


@dataclass
class FractionalState:
    x: list[float] = field(default_factory=list)
    log: list[ConstraintRecord] = field(default_factory=list)
    snapshots: list[dict[int, float]] = field(default_factory=list)  # clamped x on E_t
    history: list[np.ndarray] = field(default_factory=list)  # x after each step
    spend: list[float] = field(default_factory=list)  # fractional acquisition per step
    counts: list[int] = field(default_factory=list)  # constraints emitted per step
    half_gap_failures: int = 0

    def ensure(self, n: int) -> None:
        if len(self.x) < n:
            self.x.extend([0.0] * (n - len(self.x)))

    @property
    def t(self) -> int:
        return len(self.counts)

    def cost(self, a: Sequence[float]) -> float:
        return float(sum(ae * xe for ae, xe in zip(a, self.x)))


def _raised(x0: np.ndarray, q: np.ndarray, inv_s: float, k: float) -> np.ndarray:
    # k applications of x <- x(1+q) + q/|S| have the closed form below;
    # coordinates stop at 1 independently of one another
    return np.minimum(1.0, (x0 + inv_s) * np.exp(k * np.log1p(q)) - inv_s)


def raise_on_constraint(state: FractionalState, cons: CoveringConstraint,
                        a: Sequence[float]) -> FractionalState:
    """Raise coordinates of ``cons.S`` until ``x(S) >= rhs``.

    Each round multiplies ``x_e`` by ``1 + eta/a_e`` and adds
    ``eta/(a_e |S|)`` with ``eta = 0.01 * min_{e in S, a_e > 0} a_e``;
    zero-cost coordinates jump straight to 1.  The last round is taken
    fractionally so the constraint ends exactly tight.
    """
    S = sorted(cons.S)
    state.ensure(max(S) + 1 if S else 0)
    x = state.x
    if sum(x[e] for e in S) >= cons.rhs - EPS:
        return state
    if len(S) < cons.rhs:
        raise InfeasibleError(f"constraint needs {cons.rhs} from {len(S)} elements")
    for e in S:
        if a[e] == 0:
            x[e] = 1.0
    live = [e for e in S if x[e] < 1.0]
    deficit = cons.rhs - sum(x[e] for e in S)
    if deficit <= EPS or not live:
        return state
    costs = np.array([a[e] for e in live], dtype=float)
    x0 = np.array([x[e] for e in live])
    q = STEP_FRACTION * costs.min() / costs
    inv_s = 1.0 / len(S)
    fixed = sum(x[e] for e in S) - x0.sum()
    target = cons.rhs - fixed

    def total(k):
        return _raised(x0, q, inv_s, k).sum()

    hi = 1.0
    while total(hi) < target:
        hi *= 2.0
    lo = math.floor(hi / 2.0) if hi > 1.0 else 0.0
    hi = math.ceil(hi)
    # integer round count first, then the fractional final round
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total(mid) >= target:
            hi = mid
        else:
            lo = mid
    flo = float(lo)
    fhi = float(hi)
    for _ in range(60):
        mid = 0.5 * (flo + fhi)
        if total(mid) >= target:
            fhi = mid
        else:
            flo = mid
    new = _raised(x0, q, inv_s, fhi)
    for e, v in zip(live, new):
        x[e] = max(x[e], min(1.0, float(v)))
    return state


def fractional_step(state: FractionalState, M: Matroid, alive: Iterable[int],
                    a: Sequence[float]) -> list[CoveringConstraint]:
    """Process one timestep: emit constraints until the clamped vector is feasible.

    Records constraint counts, spend and snapshots on ``state``.  More than
    ``2|E_t|`` constraints in one step means the half-gap progress argument
    failed, which is a bug.
    """
    alive = frozenset(alive)
    state.ensure(max(alive) + 1 if alive else 0)
    before = np.array(state.x)
    budget = 2 * len(alive)
    emitted: list[CoveringConstraint] = []
    t = state.t
    while True:
        cons = find_violated(M, clamp_double(state.x), alive)
        if cons is None:
            break
        if len(emitted) >= budget:
            raise InvariantViolation(f"step {t}: more than {budget} constraints emitted")
        lhs = cons.lhs(state.x)
        ok = assert_half_gap(state.x, cons)
        if not ok:
            state.half_gap_failures += 1
        raise_on_constraint(state, cons, a)
        state.log.append(ConstraintRecord(t, len(cons.S), cons.rhs, lhs, cons.lhs(state.x), ok))
        emitted.append(cons)
    after = np.array(state.x)
    delta = after - np.concatenate([before, np.zeros(len(after) - len(before))])
    state.spend.append(float(sum(a[e] * d for e, d in enumerate(delta) if d > 0)))
    state.counts.append(len(emitted))
    xt = clamp_double(state.x)
    state.snapshots.append({e: float(xt[e]) for e in sorted(alive)})
    state.history.append(after)
    return emitted


def constraint_log_rows(state: FractionalState) -> list[dict]:
    return [{"timestep": r.t, "size": r.size, "rhs": r.rhs,
             "x_before": r.before, "x_after": r.after} for r in state.log]


# ---------------------------------------------------------------------------
# offline relaxation

@dataclass
class LpSolution:
    z: np.ndarray  # (T, m) fractional bases
    value: float
    cuts: int
    rounds: int


def lp_cost(inst, z: np.ndarray) -> float:
    """Holding plus acquisition of a fractional sequence (z_{-1} = 0)."""
    total = 0.0
    prev = np.zeros(inst.m)
    a = np.array(inst.acquisition, dtype=float)
    for t in range(inst.T):
        row = inst.holding[t]
        for e in range(inst.m):
            if z[t, e] > 0:
                total += row[e] * z[t, e]
        total += float(a @ np.maximum(z[t] - prev, 0.0))
        prev = z[t]
    return total


def in_base_polytope(M: Matroid, z: Sequence[float], alive: Iterable[int] | None = None,
                     tol: float = 1e-7) -> bool:
    alive = frozenset(range(M.m)) if alive is None else frozenset(alive)
    z = np.asarray(z, dtype=float)
    if np.any(z < -tol) or np.any(z > 1 + tol):
        return False
    if any(z[e] > tol for e in range(M.m) if e not in alive):
        return False
    if abs(z.sum() - M.r) > tol:
        return False
    return find_violated(M, z, alive, eps=tol) is None


def solve_lp_relaxation(inst, max_rounds: int = 500, tol: float = 1e-7) -> LpSolution:
    """Cutting-plane solve of the per-timestep base-polytope relaxation.

    Variables ``z_t(e)`` (alive elements only) and ``y_t(e) >= z_t(e) - z_{t-1}(e)``;
    each round separates every timestep's ``z_t`` and adds the violated
    covering cuts.
    """
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    T, m = inst.T, inst.m
    zidx: dict[tuple[int, int], int] = {}
    for t in range(T):
        for e in sorted(inst.alive(t)):
            zidx[t, e] = len(zidx)
    nz = len(zidx)
    n = 2 * nz  # y variables mirror z variables
    c = np.zeros(n)
    for (t, e), i in zidx.items():
        c[i] = inst.holding[t][e]
        c[nz + i] = inst.acquisition[e]
    ub_rows: list[tuple[list[int], list[float], float]] = []
    for (t, e), i in zidx.items():
        # z_t - z_{t-1} - y_t <= 0
        cols, vals = [i, nz + i], [1.0, -1.0]
        if (t - 1, e) in zidx:
            cols.append(zidx[t - 1, e])
            vals.append(-1.0)
        ub_rows.append((cols, vals, 0.0))
    eq_rows = []
    for t in range(T):
        cols = [zidx[t, e] for e in sorted(inst.alive(t))]
        eq_rows.append((cols, [1.0] * len(cols), float(inst.matroid_at(t).r)))

    def build(rows):
        r_i, c_i, v = [], [], []
        for k, (cols, vals, _) in enumerate(rows):
            r_i += [k] * len(cols)
            c_i += cols
            v += vals
        return coo_matrix((v, (r_i, c_i)), shape=(len(rows), n)).tocsr(), np.array([b for *_, b in rows])

    A_eq, b_eq = build(eq_rows)
    bounds = [(0.0, 1.0)] * nz + [(0.0, None)] * nz
    cuts = 0
    for rnd in range(1, max_rounds + 1):
        A_ub, b_ub = build(ub_rows)
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status != 0:
            raise InfeasibleError(f"LP solve failed: {res.message}")
        z = np.zeros((T, m))
        for (t, e), i in zidx.items():
            z[t, e] = min(1.0, max(0.0, res.x[i]))
        added = 0
        for t in range(T):
            cons = find_violated(inst.matroid_at(t), z[t], inst.alive(t), eps=tol)
            if cons is not None:
                cols = [zidx[t, e] for e in sorted(cons.S)]
                ub_rows.append((cols, [-1.0] * len(cols), -float(cons.rhs)))
                added += 1
        cuts += added
        if not added:
            return LpSolution(z, float(res.fun), cuts, rnd)
    raise InvariantViolation(f"cutting planes did not converge in {max_rounds} rounds")
