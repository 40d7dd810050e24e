import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrclust.core import (
    Clustering,
    Metric,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
    classify_pair,
    clustering_cost,
    fractional_cost,
    generate_instance,
    is_good_clustering,
    parse_clustering,
    parse_instance,
    parse_preclustering,
    trivial_preclustering,
    write_clustering,
    write_instance,
    write_preclustering,
)
from corrclust.exact import iter_partitions

TRIANGLE_PPM = SignedGraph(3, frozenset({(0, 1), (0, 2)}))  # bc negative


def complete_plus(n):
    return SignedGraph(n, frozenset(all_pairs(n)))


def test_cost_triangle_examples():
    g = complete_plus(3)
    assert clustering_cost(g, Clustering.from_sets(3, [[0, 1, 2]])) == 0
    assert clustering_cost(g, Clustering.from_sets(3, [[0], [1], [2]])) == 3
    # ++- triangle in one cluster pays the -edge; enumeration confirms 1 is optimal
    one = clustering_cost(TRIANGLE_PPM, Clustering.from_sets(3, [[0, 1, 2]]))
    assert one == 1
    best = min(
        clustering_cost(TRIANGLE_PPM, Clustering.from_assignment(labels))
        for labels in iter_partitions(3)
    )
    assert best == 1


def test_fractional_cost_examples():
    g = complete_plus(4)
    x0 = Metric(4, dict.fromkeys(all_pairs(4), 0.0))
    assert fractional_cost(g, x0) == 0.0
    gm = SignedGraph(4, frozenset())
    x1 = Metric(4, dict.fromkeys(all_pairs(4), 1.0))
    assert fractional_cost(gm, x1) == 0.0
    xz = Metric(3, dict.fromkeys(all_pairs(3), 0.0))
    assert fractional_cost(TRIANGLE_PPM, xz) == 1.0


def test_cost_complement_identity():
    rng = np.random.default_rng(0)
    for seed in range(10):
        n = int(rng.integers(2, 9))
        g = generate_instance("uniform_random", n, None, seed)
        labels = rng.integers(0, 3, size=n)
        c = Clustering.from_assignment(labels.tolist())
        satisfied = sum(
            1
            for p in all_pairs(n)
            if (p in g.plus) == c.together(*p)
        )
        assert clustering_cost(g, c) + satisfied == n * (n - 1) // 2


def test_fractional_matches_integral_on_01_metric():
    for seed in range(8):
        g = generate_instance("uniform_random", 7, None, seed)
        labels = np.random.default_rng(seed).integers(0, 3, size=7)
        c = Clustering.from_assignment(labels.tolist())
        assert fractional_cost(g, Metric.from_clustering(c)) == pytest.approx(
            clustering_cost(g, c)
        )


@given(st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=12))
def test_clustering_canonical_ids(labels):
    c = Clustering.from_assignment(labels)
    seen = []
    for cid in c.assignment:
        if cid not in seen:
            seen.append(cid)
    assert seen == list(range(c.num_clusters))


def test_classify_pair():
    pre = PreclusteredInstance(
        6, (frozenset({0, 1}), frozenset({2, 3})), frozenset({(0, 4), (1, 4), (4, 5)}), 0.1
    )
    assert classify_pair(pre, 0, 1) == "atomic"
    assert classify_pair(pre, 1, 0) == "atomic"
    assert classify_pair(pre, 0, 2) == "non_admissible"  # across two atoms
    assert classify_pair(pre, 4, 0) == "admissible"
    with pytest.raises(ValueError):
        classify_pair(pre, 2, 2)
    # the three classes partition all pairs
    counts = {"atomic": 0, "admissible": 0, "non_admissible": 0}
    for (u, v) in all_pairs(6):
        counts[classify_pair(pre, u, v)] += 1
    assert sum(counts.values()) == 15


def test_is_good_clustering():
    pre_free = trivial_preclustering(4)
    singletons = Clustering.from_sets(4, [[0], [1], [2], [3]])
    assert is_good_clustering(pre_free, singletons)
    pre = PreclusteredInstance(4, (frozenset({0, 1}),), frozenset({(0, 2), (1, 2)}), 0.1)
    assert not is_good_clustering(pre, Clustering.from_sets(4, [[0, 2], [1], [3]]))  # splits atom
    assert is_good_clustering(pre, Clustering.from_sets(4, [[0, 1, 2], [3]]))
    # joining vertices of two atoms is never good
    pre2 = PreclusteredInstance(4, (frozenset({0, 1}), frozenset({2, 3})), frozenset(), 0.1)
    assert not is_good_clustering(pre2, Clustering.from_sets(4, [[0, 1, 2, 3]]))


def test_good_monotone_merge_cases():
    pre = PreclusteredInstance(4, (), frozenset({(0, 1), (2, 3), (0, 2)}), 0.1)
    base = Clustering.from_sets(4, [[0], [1], [2], [3]])
    assert is_good_clustering(pre, base)
    # merging along an admissible pair stays good
    assert is_good_clustering(pre, Clustering.from_sets(4, [[0, 1], [2], [3]]))
    # merging that internalizes a non-admissible pair does not
    assert not is_good_clustering(pre, Clustering.from_sets(4, [[0, 3], [1], [2]]))


def test_generators():
    k5 = generate_instance("planted_cliques", 5, {"sizes": [5], "noise": 0.0}, 0)
    assert k5.num_plus == 10
    two = generate_instance("planted_cliques", 6, {"sizes": [3, 3], "noise": 0.0}, 0)
    assert two.is_plus(0, 1) and two.is_plus(3, 4) and not two.is_plus(0, 3)
    assert generate_instance("uniform_random", 6, None, 7) == generate_instance(
        "uniform_random", 6, None, 7
    )
    assert generate_instance("uniform_random", 6, None, 7) != generate_instance(
        "uniform_random", 6, None, 8
    )
    with pytest.raises(ValueError):
        generate_instance("planted_cliques", 6, {"sizes": [3, 4]}, 0)
    with pytest.raises(ValueError):
        generate_instance("uniform_random", 0, None, 0)
    with pytest.raises(ValueError):
        generate_instance("nope", 4, None, 0)
    mix = generate_instance("adversarial_mix", 9, {"sizes": [3, 3], "noise": 0.1}, 4)
    assert mix.n == 9


def test_instance_roundtrip_and_errors():
    k5 = complete_plus(5)
    assert parse_instance(write_instance(k5)) == k5
    g = generate_instance("uniform_random", 7, None, 1)
    for default in "+-":
        assert parse_instance(write_instance(g, default)) == g
    with pytest.raises(ValueError, match="duplicate"):
        parse_instance("n 3 default -\n0 1 +\n0 1 +\n")
    with pytest.raises(ValueError, match="malformed"):
        parse_instance("n 3 default -\n0 1 ?\n")
    with pytest.raises(ValueError, match="malformed"):
        parse_instance("vertices 3\n")
    with pytest.raises(ValueError, match="order"):
        parse_instance("n 3 default -\n1 0 +\n")
    # default '-' completes the complement with -signs
    g2 = parse_instance("n 4 default -\n0 1 +\n2 3 +\n")
    assert g2.plus == frozenset({(0, 1), (2, 3)})
    # headers without a default must list every pair
    full = "n 3\n0 1 +\n0 2 -\n1 2 +\n"
    assert parse_instance(full).plus == frozenset({(0, 1), (1, 2)})
    with pytest.raises(ValueError, match="missing pair"):
        parse_instance("n 3\n0 1 +\n0 2 -\n")


def test_clustering_and_preclustering_files():
    c = Clustering.from_assignment([0, 1, 0, 2])
    assert parse_clustering(write_clustering(c)) == c
    pre = PreclusteredInstance(5, (frozenset({0, 1}),), frozenset({(0, 2), (1, 2)}), 0.1)
    back = parse_preclustering(write_preclustering(pre), 5)
    assert back.proper_atoms == pre.proper_atoms and back.adm == pre.adm


def test_metric_validation():
    bad_range = Metric(3, {(0, 1): 1.5, (0, 2): 0.0, (1, 2): 0.0})
    with pytest.raises(ValueError, match="outside"):
        bad_range.validate()
    bad_tri = Metric(3, {(0, 1): 1.0, (0, 2): 0.0, (1, 2): 0.0})
    with pytest.raises(ValueError, match="triangle"):
        bad_tri.validate()
    pre = PreclusteredInstance(3, (frozenset({0, 1}),), frozenset({(0, 2), (1, 2)}), 0.1)
    with pytest.raises(ValueError, match="atomic"):
        Metric(3, {(0, 1): 0.5, (0, 2): 0.5, (1, 2): 0.5}).validate(pre)


def test_preclustered_instance_validation():
    with pytest.raises(ValueError, match="two atoms"):
        PreclusteredInstance(4, (frozenset({0, 1}), frozenset({1, 2})), frozenset(), 0.1).atom_index
    with pytest.raises(ValueError, match="both endpoints"):
        PreclusteredInstance(4, (frozenset({0, 1}), frozenset({2, 3})), frozenset({(0, 2)}), 0.1).validate()
    with pytest.raises(ValueError, match="non-uniform"):
        PreclusteredInstance(4, (frozenset({0, 1}),), frozenset({(0, 2)}), 0.1).validate()
