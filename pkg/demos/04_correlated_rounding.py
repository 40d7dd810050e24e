#!/usr/bin/env python3
"""Correlated rounding: exact marginals, measured pairwise error.

Completing a cluster around a pivot requires sampling a subset whose
single-vertex inclusion probabilities match prescribed marginals *exactly*
and whose pairwise statistics track prescribed joint values approximately.
The sampler conditions on a few random "seed" vertices: deeper conditioning
tracks the joints better.  Instead of assuming the textbook error bound, the
artifact measures the pairwise error empirically and feeds the measured
value into every downstream budget check.
"""

import numpy as np

from corrclust import ConditionedMarginals, measure_pairwise_error, rt_sample
from corrclust.correlated import (
    exact_inclusion_probabilities,
    exact_pair_probabilities,
)

print(__doc__)

# Two perfectly correlated elements: both have marginal 1/2 and the joint
# says they always appear together.
m = ConditionedMarginals((0, 1), {0: 0.5, 1: 0.5}, {(0, 1): 0.5})
print("perfectly correlated pair, marginals 1/2, joint 1/2:")
for depth in (0, 1):
    pair = exact_pair_probabilities(m, depth)[(0, 1)]
    inc = exact_inclusion_probabilities(m, depth)
    print(f"  depth {depth}: Pr[both] = {pair:.3f}   marginals recovered exactly: "
          f"{max(abs(inc[v] - 0.5) for v in (0, 1)):.1e}")
print("  (independent rounding gives 0.25; one seed already lifts it to 0.375)")

rng = np.random.default_rng(0)
err = measure_pairwise_error(m, trials=40_000, rng=rng, depth=1)
print(f"  measured pairwise error at depth 1: {err:.4f}  (exact value 0.125)")

# A richer pseudo-distribution: a random mixture of subsets.  Mixtures are
# genuine distributions, so conditioning can go deeper when triples are
# available, and the measured error shrinks.
rng = np.random.default_rng(42)
k, n = 6, 6
vecs = rng.random((k, n)) < rng.random((k, 1))
wts = rng.dirichlet(np.ones(k))
ground = tuple(range(n))
marg = {v: float((wts * vecs[:, v]).sum()) for v in ground}
pairs = {
    (u, v): float((wts * (vecs[:, u] & vecs[:, v])).sum())
    for u in range(n) for v in range(u + 1, n)
}
triples = {
    (u, v, w): float((wts * (vecs[:, u] & vecs[:, v] & vecs[:, w])).sum())
    for u in range(n) for v in range(u + 1, n) for w in range(v + 1, n)
}
mm = ConditionedMarginals(ground, marg, pairs, triples)
print("\nmixture pseudo-distribution on 6 elements:")
for depth in (0, 1, 2):
    err = measure_pairwise_error(mm, trials=40_000, rng=np.random.default_rng(1), depth=depth)
    print(f"  depth {depth}: measured pairwise error {err:.4f}")

# Exactness is a structural fact, not luck: enumerate every seed branch.
inc = exact_inclusion_probabilities(mm, depth=2)
print("  worst marginal deviation by exhaustive enumeration:",
      f"{max(abs(inc[v] - marg[v]) for v in ground):.1e}")

# Elements pinned to 0 or 1 are decided deterministically.
md = ConditionedMarginals((0, 1, 2), {0: 1.0, 1: 0.0, 2: 0.6},
                          {(0, 1): 0.0, (0, 2): 0.6, (1, 2): 0.0})
draws = {tuple(sorted(rt_sample(md, 1, np.random.default_rng(s)))) for s in range(12)}
print("\npinned elements: draws only vary in the fractional element:", sorted(draws))
