"""Pivot-based rounding with a cleanup pass.

One lifted LP solve up front; then repeatedly either remove an atom whose
deterministic removal cost is covered by the budget it releases (cleanup),
or grow a cluster around a uniformly random pivot: admissible -neighbors
join independently with probability y_pv, admissible +neighbors join by
correlated rounding, and the pivot's atom always joins.

All membership decisions are made at atom granularity so that no atom is
ever split (members of an atom carry identical lift values toward any
pivot, which the lifted LP enforces at order r >= 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable

import numpy as np

from .core import (
    Clustering,
    Metric,
    Pair,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
    clustering_cost,
    pair_key,
)
from .correlated import ConditionedMarginals, measure_pairwise_error, rt_sample
from .lp import (
    LiftedSolution,
    build_pivot_lp,
    lifted_from_result,
    separation_from_infeasibility,
    solve,
)
from .round_set import BudgetLedger, RoundingParams, RoundingReport

F_PLUS_CONSTANT = 1.515


@dataclass(frozen=True)
class PivotBudget:
    """Budget coefficients of the pivot scheme: f(x) = min(constant + x, 2)
    for +pairs, a flat coefficient for -pairs, epsilon per admissible pair."""

    constant: float = F_PLUS_CONSTANT
    minus_coefficient: float = 2.0
    epsilon: float = 0.05

    def f_plus(self, x: float) -> float:
        return min(self.constant + x, 2.0)

    def pair_budget(self, is_plus: bool, x: float) -> float:
        return self.f_plus(x) * x if is_plus else self.minus_coefficient * (1.0 - x)


def cleanup(
    remaining: Iterable[int],
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    budget: PivotBudget,
) -> frozenset[int] | None:
    """First atom (ascending minimum vertex) whose removal cost ALG_K is at
    most the budget Delta_K it would release; None if there is none."""
    rem = set(remaining)
    for atom in pre.all_atoms:
        if not atom <= rem:
            continue
        alg, delta = cleanup_quantities(atom, rem, g, pre, x, budget)
        if delta >= alg:
            return atom
    return None


def cleanup_quantities(
    atom: frozenset[int],
    rem: set[int],
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    budget: PivotBudget,
) -> tuple[float, float]:
    """(ALG_K, Delta_K) for removing ``atom`` as a cluster, both restricted
    to the remaining vertex set."""
    alg = 0.0
    delta = 0.0
    for u in sorted(atom):
        for v in sorted(rem):
            if v == u or (v in atom and v < u):
                continue  # count inside pairs once
            p = pair_key(u, v)
            is_plus = p in g.plus
            if v in atom:
                if not is_plus:
                    alg += 1.0
            elif is_plus:
                alg += 1.0
            delta += budget.pair_budget(is_plus, x.x(u, v))
            if pre.classify_pair(u, v) == "admissible":
                delta += budget.epsilon
    return alg, delta


def _pivot_marginals(
    sol: LiftedSolution,
    p: int,
    pre: PreclusteredInstance,
    rem: set[int],
    g: SignedGraph,
) -> tuple[ConditionedMarginals, dict[int, list[int]], list[tuple[int, list[int], float]]]:
    """Split the pivot's admissible neighborhood into the correlated ground
    set (atoms with a +edge to p) and independently rounded atoms (only
    -edges to p).  Returns (marginals, rep -> members, independent list)."""
    kp = pre.atom_of(p)
    rt_groups: dict[int, list[int]] = {}
    indep: list[tuple[int, list[int], float]] = []
    seen: set[int] = set()
    for v in sorted(rem):
        if v in kp or v in seen:
            continue
        atom = sorted(pre.atom_of(v) & rem)
        seen.update(atom)
        rep = atom[0]
        if pre.classify_pair(p, rep) != "admissible":
            continue  # y_pv = 0 by non-admissible pinning; never joins
        y = sol.y_of((p, rep))
        if any(g.is_plus(p, w) for w in atom):
            rt_groups[rep] = atom
        elif y > 0.0:
            indep.append((rep, atom, y))
    reps = sorted(rt_groups)
    marg = {rep: sol.y_of((p, rep)) for rep in reps}
    pairv: dict[Pair, float] = {}
    for (a, b) in combinations(reps, 2):
        v = sol.y_of((p, a, b))
        pairv[pair_key(a, b)] = min(min(marg[a], marg[b]), max(0.0, v))
    m = ConditionedMarginals(tuple(reps), marg, pairv, context=f"pivot(p={p})")
    return m, rt_groups, indep


def _decide_pivot_iteration(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    budget: PivotBudget,
    ledger: BudgetLedger,
    rem: set[int],
    cluster: set[int],
) -> None:
    remaining = sorted(rem)
    for i, v in enumerate(remaining):
        in_v = v in cluster
        for w in remaining[i + 1 :]:
            in_w = w in cluster
            if not (in_v or in_w):
                continue
            p = (v, w)
            is_plus = p in g.plus
            adm = pre.classify_pair(v, w) == "admissible"
            ledger.release_pair(
                p, budget.pair_budget(is_plus, x.x(v, w)), budget.epsilon if adm else 0.0
            )
            if (is_plus and in_v != in_w) or (not is_plus and in_v and in_w):
                ledger.record_cost(p)


def _pivot_trial(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    sol: LiftedSolution,
    params: RoundingParams,
    rng: np.random.Generator,
    measure: bool,
) -> RoundingReport:
    budget = PivotBudget(epsilon=params.epsilon)
    rem = set(range(g.n))
    ledger = BudgetLedger()
    clusters: list[set[int]] = []
    trace: list[dict] = []
    eps_r = 0.0
    measured = False
    while rem:
        k = cleanup(rem, g, pre, x, budget)
        if k is not None:
            cluster = set(k)
            trace.append({"cleanup": sorted(k), "size": len(k)})
        else:
            order = sorted(rem)
            p = order[int(rng.integers(0, len(order)))]
            m, rt_groups, indep = _pivot_marginals(sol, p, pre, rem, g)
            if measure and not measured:
                eps_r = measure_pairwise_error(
                    m, params.error_trials, np.random.default_rng([params.seed, 20_011]), params.depth
                )
                measured = True
            chosen = rt_sample(m, params.depth, rng)
            cluster = set(pre.atom_of(p) & rem)
            s_plus = 0
            for rep in chosen:
                cluster.update(rt_groups[rep])
                s_plus += len(rt_groups[rep])
            s_minus = 0
            for rep, members, y in indep:
                if rng.random() < y:
                    cluster.update(members)
                    s_minus += len(members)
            trace.append({"pivot": p, "s_minus": s_minus, "s_plus": s_plus, "size": len(cluster)})
        _decide_pivot_iteration(g, pre, x, budget, ledger, rem, cluster)
        rem -= cluster
        clusters.append(cluster)
    clustering = Clustering.from_sets(g.n, clusters)
    cost = clustering_cost(g, clustering)
    assert cost == ledger.realized_total, "ledger out of sync with realized clustering"
    lp_ceiling = sum(budget.pair_budget(p in g.plus, x.x(*p)) for p in all_pairs(g.n))
    assert abs(ledger.lp_total - lp_ceiling) <= 1e-9, "LP budget total off its ceiling"
    assert abs(ledger.err_total - budget.epsilon * len(pre.adm)) <= 1e-9, "error budget total off"
    return RoundingReport("pivot", clustering, cost, ledger, eps_r, trace)


def pivot_based_round(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    params: RoundingParams,
    rng: np.random.Generator,
) -> RoundingReport:
    """Best of ``params.trials`` pivot rounding runs.  The lifted LP is
    solved once; infeasibility yields a separation certificate instead of a
    clustering."""
    if params.r < 3:
        raise ValueError("pivot rounding needs lift order r >= 3")
    lp = build_pivot_lp(g, pre, x, params.r)
    res = solve(lp)
    if res.status == "infeasible":
        cert = separation_from_infeasibility(lp, x, res)
        return RoundingReport("pivot", None, None, None, 0.0, [], certificate=cert)
    sol = lifted_from_result(lp, res, "pivot", params.r)
    streams = rng.spawn(params.trials)
    best: RoundingReport | None = None
    eps_r = 0.0
    for t, stream in enumerate(streams):
        rep = _pivot_trial(g, pre, x, sol, params, stream, measure=(t == 0))
        eps_r = max(eps_r, rep.measured_eps_r)
        if best is None or rep.cost < best.cost:
            best = rep
    assert best is not None
    best.measured_eps_r = eps_r
    return best


def error_charge_diagnostics(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    remaining: Iterable[int],
    measured_eps_r: float,
    epsilon: float,
) -> dict[int, tuple[float, float]]:
    """Per-atom error-charging quantities (ALG'_K, Delta'_K) for one
    iteration state, with the measured pairwise error substituted.

    ALG'_K charges eps_r for every (pivot u in K, unordered pair of
    admissible +neighbors); Delta'_K sums (1 - min(x_uv, x_uw)) * epsilon
    over pivots u in the admissible neighborhood N and pairs vw between K
    and N (x_uu treated as 0 when the pivot coincides with an endpoint).
    """
    rem = set(remaining)
    out: dict[int, tuple[float, float]] = {}
    for atom in pre.all_atoms:
        if not atom <= rem:
            continue
        rep = min(atom)
        nbrs = sorted(pre.adm_neighbors(rep) & rem)
        alg = 0.0
        for u in atom:
            plus_adm = sum(1 for w in nbrs if g.is_plus(u, w))
            alg += measured_eps_r * comb(plus_adm, 2)
        delta = 0.0
        for u in nbrs:
            for v in sorted(atom):
                for w in nbrs:
                    xuv = x.x(u, v) if u != v else 0.0
                    xuw = x.x(u, w) if u != w else 0.0
                    delta += (1.0 - min(xuv, xuw)) * epsilon
        out[rep] = (alg, delta)
    return out
