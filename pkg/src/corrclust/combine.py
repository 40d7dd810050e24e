"""Combination of the two roundings, the combinatorial pivot baseline, and
the end-to-end pipeline from a raw signed graph to a final clustering.

The combined guarantee takes the cheaper of the set-based and pivot-based
clusterings; per +edge the weighted bound 0.42 * 2x/(1+x) +
0.58 * min(1.515+x, 2) x stays below 1.7257 x, and per -edge below
1.58 (1-x), which is what makes the min of the two costs a
1.73-approximation up to the additive admissible-pair error terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Clustering,
    Metric,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
)
from .exact import brute_force_opt, brute_force_opt_good
from .lp import SeparationCertificate, solve_triangle_lp
from .precluster import AgreementParams, precluster
from .round_pivot import PivotBudget, pivot_based_round
from .round_set import RoundingParams, RoundingReport, lp_budget, set_based_round
from .verify import COMBINED_RATIO_BOUND, MINUS_EDGE_RATIO, PIVOT_WEIGHT, SET_WEIGHT


def acn_pivot(g: SignedGraph, rng: np.random.Generator) -> Clustering:
    """Combinatorial pivot baseline: a uniform pivot grabs all its remaining
    +neighbors, repeat on the rest."""
    remaining = set(range(g.n))
    clusters: list[set[int]] = []
    while remaining:
        order = sorted(remaining)
        p = order[int(rng.integers(0, len(order)))]
        cluster = {p} | (g.plus_neighbors(p) & remaining)
        clusters.append(cluster)
        remaining -= cluster
    return Clustering.from_sets(g.n, clusters)


def combined_edge_bounds(g: SignedGraph, pre: PreclusteredInstance, x: Metric) -> dict:
    """Per-edge weighted bound of the two schemes, checked against the
    certified ratio times the LP contribution (plus-edges) and the -edge
    constant.  Returns totals and the worst per-edge slack."""
    budget = PivotBudget()
    total = 0.0
    worst_slack = float("inf")
    ok = True
    for p in all_pairs(g.n):
        xv = x.x(*p)
        is_plus = p in g.plus
        set_b = lp_budget(is_plus, xv)
        pivot_b = budget.pair_budget(is_plus, xv)
        comb = SET_WEIGHT * set_b + PIVOT_WEIGHT * pivot_b
        lp_contrib = xv if is_plus else 1.0 - xv
        cap = (COMBINED_RATIO_BOUND if is_plus else MINUS_EDGE_RATIO) * lp_contrib
        slack = cap - comb
        worst_slack = min(worst_slack, slack)
        ok = ok and slack >= -1e-9
        total += comb
    return {"total": total, "worst_edge_slack": worst_slack, "per_edge_ok": ok}


@dataclass
class CombinedReport:
    """Both rounding reports plus the cheaper clustering (ties go to pivot)."""

    set_report: RoundingReport
    pivot_report: RoundingReport
    chosen: str
    clustering: Clustering | None
    cost: int | None
    edge_bounds: dict
    certificate: SeparationCertificate | None = None

    @property
    def measured_eps_r(self) -> float:
        return max(self.set_report.measured_eps_r, self.pivot_report.measured_eps_r)

    def to_dict(self) -> dict:
        return {
            "chosen": self.chosen,
            "cost": self.cost,
            "clustering": list(self.clustering.assignment) if self.clustering else None,
            "measured_eps_r": self.measured_eps_r,
            "edge_bounds": self.edge_bounds,
            "set": self.set_report.to_dict(),
            "pivot": self.pivot_report.to_dict(),
        }


def combined_round(
    g: SignedGraph,
    pre: PreclusteredInstance,
    x: Metric,
    params: RoundingParams,
    rng: np.random.Generator,
) -> CombinedReport | SeparationCertificate:
    """Run both roundings (each best-of-trials) and keep the cheaper output.
    A separation certificate from either side is propagated unchanged."""
    rng_set, rng_pivot = rng.spawn(2)
    set_rep = set_based_round(g, pre, x, params, rng_set)
    if set_rep.certificate is not None:
        return set_rep.certificate
    pivot_rep = pivot_based_round(g, pre, x, params, rng_pivot)
    if pivot_rep.certificate is not None:
        return pivot_rep.certificate
    chosen = "pivot" if pivot_rep.cost <= set_rep.cost else "set"
    winner = pivot_rep if chosen == "pivot" else set_rep
    return CombinedReport(
        set_report=set_rep,
        pivot_report=pivot_rep,
        chosen=chosen,
        clustering=winner.clustering,
        cost=winner.cost,
        edge_bounds=combined_edge_bounds(g, pre, x),
    )


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end knobs. The theory's parameter cascade is exposed as
    independent dials; defaults are the desk-scale working point."""

    epsilon_q: float = 0.1
    epsilon: float = 0.05
    r: int = 3
    trials: int = 1
    oracle_limit: int = 16
    error_trials: int = 1000

    def rounding_params(self, seed: int) -> RoundingParams:
        return RoundingParams(
            epsilon=self.epsilon,
            r=self.r,
            trials=self.trials,
            seed=seed,
            error_trials=self.error_trials,
        )


def full_pipeline(g: SignedGraph, config: PipelineConfig, seed: int) -> dict:
    """precluster -> triangle LP -> combined rounding -> report.

    The report carries the final cost, the fractional cost, oracle optima
    when n is within the configured limit, the ratio diagnostics, ledger
    totals and the measured correlation error.  A separation certificate
    outcome is recorded as such (it cannot occur for LP-derived metrics
    unless something is genuinely broken, so it is flagged)."""
    pre = precluster(g, AgreementParams(config.epsilon_q))
    x, lp_cost = solve_triangle_lp(g, pre)
    params = config.rounding_params(seed)
    outcome = combined_round(g, pre, x, params, np.random.default_rng([seed, 0]))
    report: dict = {
        "n": g.n,
        "seed": seed,
        "config": {
            "epsilon_q": config.epsilon_q,
            "epsilon": config.epsilon,
            "r": config.r,
            "trials": config.trials,
            "oracle_limit": config.oracle_limit,
        },
        "num_plus": g.num_plus,
        "preclustering": {
            "atoms": [sorted(a) for a in pre.proper_atoms],
            "num_admissible": len(pre.adm),
        },
        "lp_cost": lp_cost,
    }
    if isinstance(outcome, SeparationCertificate):
        # With x from the plain metric LP (no ellipsoid re-centering), a cut
        # is a legitimate outcome when x falls outside the hull of good
        # clusterings; it is rare at the default working point, so flag it
        # loudly for inspection.
        report["outcome"] = "separation_certificate"
        report["certificate"] = {
            "b": outcome.b,
            "w": sorted((list(p), c) for p, c in outcome.w.items()),
            "provenance": outcome.provenance,
        }
        report["unexpected_for_lp_derived_metric"] = True
        return report
    report["outcome"] = "clustering"
    report["combined"] = outcome.to_dict()
    report["cost"] = outcome.cost
    eps_r = outcome.measured_eps_r
    slack = (config.epsilon + eps_r) * len(pre.adm)
    report["guarantee"] = {
        "bound_vs_lp": 1.73 * lp_cost + slack,
        "holds_vs_lp": outcome.cost <= 1.73 * lp_cost + slack + 1e-9,
        "additive_slack": slack,
    }
    if g.n <= config.oracle_limit:
        _, opt = brute_force_opt(g)
        _, opt_good = brute_force_opt_good(g, pre)
        report["oracle"] = {
            "opt": opt,
            "opt_good": opt_good,
            "ratio_vs_opt": (outcome.cost / opt) if opt else (1.0 if outcome.cost == 0 else float("inf")),
            "bound_vs_opt": 1.73 * opt + slack,
            "holds_vs_opt": outcome.cost <= 1.73 * opt + slack + 1e-9,
        }
    return report
