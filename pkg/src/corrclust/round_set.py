"""Set-based rounding: sample a cluster size, a size-weighted pivot, then
complete the cluster by correlated rounding; re-solve the lifted LP on the
remaining vertices each iteration.

Budget accounting: when a pair is decided (at least one endpoint gets
clustered) it releases its LP budget, 2x/(1+x) for a +pair and (1-x)/(1+x)
for a -pair, plus an error budget of epsilon if the pair is admissible; when
a vertex is clustered it releases a difference budget of 2 epsilon d_adm(v).
Each pair and each vertex releases at most once over a full run, so the
ledger totals are capped by (and at completion equal) the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable

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
from .correlated import (
    ConditionedMarginals,
    contract_to_representatives,
    exact_inclusion_probabilities,
    exact_pair_probabilities,
    measure_pairwise_error,
    rt_sample,
)
from .lp import (
    LiftedSolution,
    SeparationCertificate,
    build_set_lp,
    lifted_from_result,
    separation_from_infeasibility,
    solve,
)

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class RoundingParams:
    """Knobs shared by both rounding schemes."""

    epsilon: float = 0.05
    r: int = 3
    trials: int = 1
    seed: int = 0
    error_trials: int = 1000  # Monte Carlo draws when measuring the pair error

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.r < 2:
            raise ValueError("lift order r must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    @property
    def depth(self) -> int:
        """Conditioning depth available to the sampler at lift order r."""
        return max(0, self.r - 2)


def lp_budget(is_plus: bool, x: float) -> float:
    """Per-pair LP budget of the set-based scheme."""
    return 2 * x / (1 + x) if is_plus else (1 - x) / (1 + x)


class BudgetLedger:
    """Tracks budget releases and realized costs; enforces at-most-once."""

    def __init__(self) -> None:
        self.lp_released: dict[Pair, float] = {}
        self.err_released: dict[Pair, float] = {}
        self.diff_released: dict[int, float] = {}
        self.realized: dict[Pair, int] = {}

    def release_pair(self, p: Pair, lp_amount: float, err_amount: float) -> None:
        if p in self.lp_released:
            raise RuntimeError(f"pair {p} released twice")
        self.lp_released[p] = lp_amount
        if err_amount:
            self.err_released[p] = err_amount

    def release_vertex(self, v: int, amount: float) -> None:
        if v in self.diff_released:
            raise RuntimeError(f"vertex {v} released twice")
        self.diff_released[v] = amount

    def record_cost(self, p: Pair) -> None:
        if p in self.realized:
            raise RuntimeError(f"pair {p} charged twice")
        self.realized[p] = 1

    @property
    def lp_total(self) -> float:
        return sum(self.lp_released.values())

    @property
    def err_total(self) -> float:
        return sum(self.err_released.values())

    @property
    def diff_total(self) -> float:
        return sum(self.diff_released.values())

    @property
    def realized_total(self) -> int:
        return sum(self.realized.values())

    def totals(self) -> dict[str, float]:
        return {
            "lp_budget": self.lp_total,
            "error_budget": self.err_total,
            "difference_budget": self.diff_total,
            "realized_cost": float(self.realized_total),
        }


@dataclass
class RoundingReport:
    """Outcome of one rounding run (or the best of several trials)."""

    scheme: str
    clustering: Clustering | None
    cost: int | None
    ledger: BudgetLedger | None
    measured_eps_r: float
    trace: list[dict]
    certificate: SeparationCertificate | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "scheme": self.scheme,
            "cost": self.cost,
            "measured_eps_r": self.measured_eps_r,
            "trace": self.trace,
        }
        if self.clustering is not None:
            out["clustering"] = list(self.clustering.assignment)
        if self.ledger is not None:
            out["ledger"] = self.ledger.totals()
        if self.certificate is not None:
            out["certificate"] = {
                "b": self.certificate.b,
                "w": sorted((list(p), c) for p, c in self.certificate.w.items()),
                "provenance": self.certificate.provenance,
            }
        return out


class SolveCache:
    """Memoizes lifted-LP solutions per remaining vertex set."""

    def __init__(self, builder: Callable[[frozenset[int]], object]):
        self._builder = builder
        self._store: dict[frozenset[int], object] = {}

    def get(self, key: frozenset[int]):
        if key not in self._store:
            self._store[key] = self._builder(key)
        return self._store[key]


def _normalized(weights: np.ndarray, what: str) -> np.ndarray:
    total = weights.sum()
    if not (abs(total - 1.0) < 1e-6):
        raise RuntimeError(f"{what} weights sum to {total}, expected 1")
    return weights / total


def conditioned_marginals_for(
    sol: LiftedSolution, s: int, u: int, pre: PreclusteredInstance, vprime: Iterable[int]
) -> tuple[ConditionedMarginals, dict[int, list[int]]]:
    """Marginals conditioned on pivot u and size s, contracted to one
    representative per atom (members of an atom share their lift values)."""
    ysu = sol.ys_of(s, (u,))
    if ysu < PROB_FLOOR:
        raise RuntimeError(f"conditioning on (s={s}, u={u}) with mass {ysu}")
    ku = pre.atom_of(u)
    rest = [v for v in vprime if v not in ku]
    reps, groups = contract_to_representatives(rest, pre.atom_of)
    marg = {rep: min(1.0, max(0.0, sol.ys_of(s, (rep, u)) / ysu)) for rep in reps}
    pairv: dict[Pair, float] = {}
    for (a, b) in combinations(reps, 2):
        v = sol.ys_of(s, (a, b, u)) / ysu
        pairv[pair_key(a, b)] = min(min(marg[a], marg[b]), max(0.0, v))
    m = ConditionedMarginals(tuple(reps), marg, pairv, context=f"set(s={s},u={u})")
    return m, groups


def set_based_cstr_clst(
    vprime: Iterable[int],
    sol: LiftedSolution,
    pre: PreclusteredInstance,
    rng: np.random.Generator,
    depth: int = 1,
) -> tuple[set[int], dict]:
    """Sample one cluster: size s with weight y^s_0/y_0, pivot u with weight
    y^s_u / (s y^s_0), then correlated rounding at atom granularity; the
    pivot's atom always joins."""
    verts = sorted(vprime)
    n = len(verts)
    y0 = sol.y0
    if y0 <= PROB_FLOOR:
        raise RuntimeError(f"degenerate lift: y_empty = {y0}")
    s_weights = np.array([max(0.0, sol.ys_of(s, ())) for s in range(1, n + 1)]) / y0
    s_weights = _normalized(s_weights, "cluster-size")
    s = int(rng.choice(n, p=s_weights)) + 1
    ys0 = sol.ys_of(s, ())
    u_weights = np.array([max(0.0, sol.ys_of(s, (u,))) for u in verts]) / (s * ys0)
    u_weights = _normalized(u_weights, "pivot")
    u = verts[int(rng.choice(n, p=u_weights))]
    m, groups = conditioned_marginals_for(sol, s, u, pre, verts)
    chosen_reps = rt_sample(m, depth, rng)
    cluster = set(pre.atom_of(u)) & set(verts)
    for rep in chosen_reps:
        cluster.update(groups[rep])
    return cluster, {"s": s, "u": u, "size": len(cluster)}


def _decide_iteration(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    ledger: BudgetLedger,
    vprime: set[int],
    cluster: set[int],
    epsilon: float,
) -> None:
    """Release budgets and charge realized costs for one removed cluster."""
    remaining = sorted(vprime)
    for v in remaining:
        in_c_v = v in cluster
        for w in remaining:
            if w <= v:
                continue
            in_c_w = w in cluster
            if not (in_c_v or in_c_w):
                continue
            p = (v, w)
            is_plus = p in g.plus
            adm = pre.classify_pair(v, w) == "admissible"
            ledger.release_pair(p, lp_budget(is_plus, x.x(v, w)), epsilon if adm else 0.0)
            wrong = (is_plus and in_c_v != in_c_w) or (not is_plus and in_c_v and in_c_w)
            if wrong:
                ledger.record_cost(p)
    for v in cluster:
        ledger.release_vertex(v, 2 * epsilon * pre.d_adm(v))


def _set_trial(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    params: RoundingParams,
    rng: np.random.Generator,
    cache: SolveCache,
    measure: bool,
) -> RoundingReport:
    vprime = set(range(g.n))
    ledger = BudgetLedger()
    trace: list[dict] = []
    clusters: list[set[int]] = []
    eps_r = 0.0
    measured = False
    for _ in range(g.n):
        if not vprime:
            break
        key = frozenset(vprime)
        lp, res = cache.get(key)
        if res.status == "infeasible":
            cert = separation_from_infeasibility(lp, x, res)
            return RoundingReport("set", None, None, None, eps_r, trace, certificate=cert)
        sol = lifted_from_result(lp, res, "set", params.r)
        cluster, rec = set_based_cstr_clst(vprime, sol, pre, rng, params.depth)
        if measure and not measured:
            m, _ = conditioned_marginals_for(sol, rec["s"], rec["u"], pre, sorted(vprime))
            eps_r = measure_pairwise_error(
                m, params.error_trials, np.random.default_rng([params.seed, 10_007]), params.depth
            )
            measured = True
        if not cluster:
            raise RuntimeError("sampled an empty cluster")
        _decide_iteration(g, pre, x, ledger, vprime, cluster, params.epsilon)
        vprime -= cluster
        clusters.append(cluster)
        trace.append(rec)
    assert not vprime, "iteration cap hit before all vertices were clustered"
    clustering = Clustering.from_sets(g.n, clusters)
    cost = clustering_cost(g, clustering)
    assert cost == ledger.realized_total, "ledger out of sync with realized clustering"
    _assert_ledger_ceilings(g, pre, x, params.epsilon, ledger)
    return RoundingReport("set", clustering, cost, ledger, eps_r, trace)


def _assert_ledger_ceilings(
    g: SignedGraph, pre: PreclusteredInstance, x: Metric, epsilon: float, ledger: BudgetLedger
) -> None:
    """Completed runs must have released every budget exactly once."""
    lp_ceiling = sum(lp_budget(p in g.plus, x.x(*p)) for p in all_pairs(g.n))
    assert abs(ledger.lp_total - lp_ceiling) <= 1e-9, "LP budget total off its ceiling"
    assert abs(ledger.err_total - epsilon * len(pre.adm)) <= 1e-9, "error budget total off"
    diff_ceiling = 2 * epsilon * sum(pre.d_adm(v) for v in range(g.n))
    assert abs(ledger.diff_total - diff_ceiling) <= 1e-9, "difference budget total off"


def set_based_round(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    params: RoundingParams,
    rng: np.random.Generator,
) -> RoundingReport:
    """Best of ``params.trials`` independent runs; LP solutions are shared
    across trials through a per-call cache keyed by the remaining vertex set.
    If any trial's LP extension is infeasible, the separation certificate is
    returned immediately (no fallback clustering is substituted)."""

    def build(key: frozenset[int]):
        lp = build_set_lp(sorted(key), pre, x, params.r, params.epsilon)
        return lp, solve(lp)

    cache = SolveCache(build)
    streams = rng.spawn(params.trials)
    best: RoundingReport | None = None
    eps_r = 0.0
    for t, stream in enumerate(streams):
        rep = _set_trial(g, pre, x, params, stream, cache, measure=(t == 0))
        if rep.certificate is not None:
            return rep
        eps_r = max(eps_r, rep.measured_eps_r)
        if best is None or rep.cost < best.cost:
            best = rep
    assert best is not None
    best.measured_eps_r = eps_r
    return best


# ---------------------------------------------------------------------------
# Exact per-iteration analysis (no sampling); used by tests and diagnostics
# ---------------------------------------------------------------------------


@dataclass
class IterationAnalysis:
    """Closed-form per-iteration statistics of the cluster sampler.

    ``pair_err`` is the exact aggregated deviation of the sampler's pair
    statistics from the lift's conditional targets,
    sum over (s,u) branches of P(s,u) |Pr[both in C | s,u] - y^s_{suv}/y^s_u|.
    """

    p_clustered: dict[int, float]
    p_both: dict[Pair, float]
    p_decided: dict[Pair, float]
    pair_err: dict[Pair, float]
    expected_cost: float
    expected_lp_budget: float
    expected_err_budget: float
    expected_diff_budget: float

    @property
    def expected_budget(self) -> float:
        return self.expected_lp_budget + self.expected_err_budget + self.expected_diff_budget

    @property
    def total_err(self) -> float:
        return sum(self.pair_err.values())


def analyze_cluster_sampler(
    vprime: Iterable[int],
    sol: LiftedSolution,
    pre: PreclusteredInstance,
    g: SignedGraph,
    x: Metric,
    epsilon: float,
    depth: int = 1,
) -> IterationAnalysis:
    """Exact expectations of one set_based_cstr_clst call, by enumeration of
    (size, pivot, seed-branch) with the same semantics as the sampler."""
    verts = sorted(vprime)
    n = len(verts)
    y0 = sol.y0
    inc = dict.fromkeys(verts, 0.0)
    both = {pair_key(a, b): 0.0 for (a, b) in combinations(verts, 2)}
    err = {p: 0.0 for p in both}
    for s in range(1, n + 1):
        ys0 = sol.ys_of(s, ())
        p_s = max(0.0, ys0) / y0
        if p_s < PROB_FLOOR:
            continue
        for u in verts:
            ysu = sol.ys_of(s, (u,))
            p_u = max(0.0, ysu) / (s * ys0)
            w_su = p_s * p_u
            if w_su < PROB_FLOOR or ysu < PROB_FLOOR:
                continue
            m, groups = conditioned_marginals_for(sol, s, u, pre, verts)
            inc_rep = exact_inclusion_probabilities(m, depth)
            both_rep = exact_pair_probabilities(m, depth)
            ku = [v for v in pre.atom_of(u) if v in inc]
            rep_of = {v: rep for rep, members in groups.items() for v in members}
            for v in ku:
                rep_of[v] = None  # pivot atom: always in
            p_in = {v: 1.0 if rep_of[v] is None else inc_rep[rep_of[v]] for v in verts}
            for v in verts:
                inc[v] += w_su * p_in[v]
            for (a, b) in both:
                ra, rb = rep_of[a], rep_of[b]
                if ra is None and rb is None:
                    pb = 1.0
                elif ra is None:
                    pb = p_in[b]
                elif rb is None:
                    pb = p_in[a]
                elif ra == rb:
                    pb = p_in[a]
                else:
                    pb = both_rep[pair_key(ra, rb)]
                both[(a, b)] += w_su * pb
                ideal = min(1.0, max(0.0, sol.ys_of(s, (a, b, u)) / ysu))
                err[(a, b)] += w_su * abs(pb - ideal)
    decided = {}
    e_cost = e_lp = e_err = 0.0
    for (a, b) in both:
        dec = inc[a] + inc[b] - both[(a, b)]
        decided[(a, b)] = dec
        is_plus = (a, b) in g.plus
        p_wrong = inc[a] + inc[b] - 2 * both[(a, b)] if is_plus else both[(a, b)]
        e_cost += p_wrong
        e_lp += lp_budget(is_plus, x.x(a, b)) * dec
        if pre.classify_pair(a, b) == "admissible":
            e_err += epsilon * dec
    e_diff = sum(2 * epsilon * pre.d_adm(v) * inc[v] for v in verts)
    return IterationAnalysis(inc, both, decided, err, e_cost, e_lp, e_err, e_diff)
