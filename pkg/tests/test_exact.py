import numpy as np
import pytest

from corrclust.core import (
    Clustering,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
    clustering_cost,
    generate_instance,
    is_good_clustering,
    pair_key,
    trivial_preclustering,
)
from corrclust.exact import (
    brute_force_opt,
    brute_force_opt_good,
    iter_partitions,
    naive_opt,
)
from corrclust.precluster import AgreementParams, precluster


def test_examples():
    k5 = SignedGraph(5, frozenset(all_pairs(5)))
    c, cost = brute_force_opt(k5)
    assert cost == 0 and c.num_clusters == 1
    allm = SignedGraph(5, frozenset())
    c, cost = brute_force_opt(allm)
    assert cost == 0 and c.num_clusters == 5
    ppm = SignedGraph(3, frozenset({(0, 1), (0, 2)}))
    assert brute_force_opt(ppm)[1] == 1
    assert naive_opt(ppm) == 1
    assert naive_opt(SignedGraph(4, frozenset(all_pairs(4)))) == 0


def test_dp_matches_naive_all_n4_signings():
    pairs = list(all_pairs(4))
    for mask in range(1 << 6):
        plus = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        g = SignedGraph(4, plus)
        assert brute_force_opt(g)[1] == naive_opt(g)


def test_dp_matches_naive_random_n8():
    for seed in range(25):
        g = generate_instance("uniform_random", 8, None, seed)
        assert brute_force_opt(g)[1] == naive_opt(g)


def test_fixed_uniform_instance_cross_checked():
    g = generate_instance("uniform_random", 6, None, 7)
    c, cost = brute_force_opt(g)
    assert cost == naive_opt(g)
    assert clustering_cost(g, c) == cost


def test_dp_cost_matches_returned_clustering():
    for seed in range(10):
        g = generate_instance("uniform_random", 7, None, seed + 100)
        c, cost = brute_force_opt(g)
        assert clustering_cost(g, c) == cost


def test_relabel_invariance():
    rng = np.random.default_rng(3)
    for seed in range(8):
        g = generate_instance("uniform_random", 7, None, seed)
        perm = rng.permutation(7)
        plus = frozenset(pair_key(int(perm[u]), int(perm[v])) for (u, v) in g.plus)
        assert brute_force_opt(g)[1] == brute_force_opt(SignedGraph(7, plus))[1]


def test_good_oracle_unconstrained_matches_plain():
    for seed in range(6):
        g = generate_instance("uniform_random", 6, None, seed)
        pre = trivial_preclustering(6)
        c, cost = brute_force_opt_good(g, pre)
        assert cost == brute_force_opt(g)[1]
        assert is_good_clustering(pre, c)


def test_good_oracle_all_non_admissible():
    g = generate_instance("uniform_random", 6, None, 11)
    pre = PreclusteredInstance(6, (), frozenset(), 0.1)
    c, cost = brute_force_opt_good(g, pre)
    assert c.num_clusters == 6
    assert cost == g.num_plus


def test_good_oracle_vs_enumeration():
    # planted 2xK3 with its computed preclustering, checked against a direct
    # enumeration of good partitions
    g = generate_instance("planted_cliques", 6, {"sizes": [3, 3], "noise": 0.0}, 0)
    pre = precluster(g, AgreementParams(0.1))
    assert len(pre.proper_atoms) == 2
    _, cost = brute_force_opt_good(g, pre)
    best = min(
        clustering_cost(g, Clustering.from_assignment(labels))
        for labels in iter_partitions(6)
        if is_good_clustering(pre, Clustering.from_assignment(labels))
    )
    assert cost == best == 0
    # and on noisy random instances
    for seed in range(5):
        gr = generate_instance("uniform_random", 6, None, seed + 40)
        prer = precluster(gr, AgreementParams(0.1))
        _, c2 = brute_force_opt_good(gr, prer)
        best2 = min(
            clustering_cost(gr, Clustering.from_assignment(labels))
            for labels in iter_partitions(6)
            if is_good_clustering(prer, Clustering.from_assignment(labels))
        )
        assert c2 == best2


def test_good_at_least_unconstrained():
    for seed in range(8):
        g = generate_instance("uniform_random", 7, None, seed)
        pre = precluster(g, AgreementParams(0.1))
        assert brute_force_opt(g)[1] <= brute_force_opt_good(g, pre)[1]


def test_limits():
    g = generate_instance("uniform_random", 6, None, 0)
    with pytest.raises(ValueError, match="limit"):
        brute_force_opt(g, limit_n=5)
    with pytest.raises(ValueError, match="limit"):
        naive_opt(g, limit_n=5)
    with pytest.raises(ValueError, match="limit"):
        brute_force_opt_good(g, trivial_preclustering(6), limit_n=5)


def test_deterministic_tiebreak_prefers_low_vertices_together():
    # a 4-cycle of +edges: two optimal clusterings pair opposite edges;
    # the reported one must put vertex 1 with vertex 0
    g = SignedGraph(4, frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}))
    c, cost = brute_force_opt(g)
    assert cost == 2
    assert c.together(0, 1)
