from itertools import combinations, product

import numpy as np
import pytest

from corrclust.core import (
    Clustering,
    Metric,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
    generate_instance,
    trivial_preclustering,
)
from corrclust.exact import brute_force_opt_good
from corrclust.lp import (
    LinearProgram,
    build_pivot_lp,
    build_set_lp,
    build_triangle_lp,
    integral_pivot_lift,
    integral_set_lift,
    lifted_from_result,
    separation_from_infeasibility,
    size_window_refinement,
    solve,
    solve_triangle_lp,
    write_lp_text,
)
from corrclust.precluster import AgreementParams, precluster

PPM = SignedGraph(3, frozenset({(0, 1), (0, 2)}))


def test_solve_basics():
    lp = LinearProgram("infeasible")
    lp.add_vars([("x", (0, 1))])
    lp.add_row({0: 1.0}, ">", 1.0)
    lp.add_row({0: 1.0}, "<", 0.0)
    res = solve(lp)
    assert res.status == "infeasible"
    assert res.farkas is not None

    lp2 = LinearProgram("min")
    lp2.add_vars([("x", (0, 1))], ub=5.0)
    lp2.add_row({0: 1.0}, ">", 0.3)
    lp2.set_objective([0], [1.0])
    res2 = solve(lp2)
    assert res2.status == "optimal"
    assert res2.objective == pytest.approx(0.3, abs=1e-9)

    lp3 = LinearProgram("unbounded")
    lp3.add_vars([("x", (0, 1))], lb=0.0, ub=np.inf)
    lp3.set_objective([0], [-1.0])
    assert solve(lp3).status == "unbounded"


def _triangle_grid_opt(g, step=0.05):
    # independent oracle: brute grid scan over the 3-variable metric polytope
    best = np.inf
    vals = np.arange(0.0, 1.0 + step / 2, step)
    for xab, xac, xbc in product(vals, repeat=3):
        if xab > xac + xbc or xac > xab + xbc or xbc > xab + xac:
            continue
        m = Metric(3, {(0, 1): xab, (0, 2): xac, (1, 2): xbc})
        cost = sum(m.values[p] if p in g.plus else 1 - m.values[p] for p in all_pairs(3))
        best = min(best, cost)
    return best


def test_triangle_lp():
    pre = trivial_preclustering(3)
    x, cost = solve_triangle_lp(PPM, pre)
    assert cost == pytest.approx(1.0, abs=1e-9)
    assert _triangle_grid_opt(PPM) == pytest.approx(1.0)
    x.validate(pre)

    allp = SignedGraph(4, frozenset(all_pairs(4)))
    _, c0 = solve_triangle_lp(allp, trivial_preclustering(4))
    assert c0 == pytest.approx(0.0, abs=1e-9)

    # a pinned non-admissible +pair contributes 1 to the optimum
    pre_pin = PreclusteredInstance(3, (), frozenset({(0, 2), (1, 2)}), 0.1)
    allp3 = SignedGraph(3, frozenset(all_pairs(3)))
    xp, cp = solve_triangle_lp(allp3, pre_pin)
    assert xp.x(0, 1) == pytest.approx(1.0)
    assert cp >= 1.0 - 1e-9


def test_solve_deterministic():
    g = generate_instance("uniform_random", 8, None, 5)
    pre = precluster(g, AgreementParams(0.1))
    a = solve(build_triangle_lp(g, pre))
    b = solve(build_triangle_lp(g, pre))
    assert np.array_equal(a.values, b.values)


def _good_clustering_lift_residual(g, seed):
    pre = precluster(g, AgreementParams(0.1))
    cgood, _ = brute_force_opt_good(g, pre)
    x = Metric.from_clustering(cgood)
    lp = build_set_lp(range(g.n), pre, x, r=3, epsilon=0.05)
    clusters = size_window_refinement([set(c) for c in cgood.clusters()], pre, 0.05)
    vec = integral_set_lift(lp, clusters, x)
    resid = lp.residuals(vec)
    lb, ub = np.asarray(lp.lb), np.asarray(lp.ub)
    assert (vec >= lb - 1e-12).all() and (vec <= ub + 1e-12).all()
    return float(resid.max())


def test_set_lp_integral_roundtrip():
    for seed in range(6):
        g = generate_instance("uniform_random", 6, None, seed)
        assert _good_clustering_lift_residual(g, seed) <= 1e-12
    planted = generate_instance("planted_cliques", 8, {"sizes": [4, 4]}, 0)
    assert _good_clustering_lift_residual(planted, 0) <= 1e-12


def test_pivot_lp_integral_roundtrip():
    for seed in range(6):
        g = generate_instance("uniform_random", 6, None, seed)
        pre = precluster(g, AgreementParams(0.1))
        cgood, _ = brute_force_opt_good(g, pre)
        x = Metric.from_clustering(cgood)
        lp = build_pivot_lp(g, pre, x, r=3)
        vec = integral_pivot_lift(lp, cgood)
        assert lp.residuals(vec).max() <= 1e-12


def test_size_window_boundary_cluster_stays_feasible():
    # epsilon * d_adm exactly integral: a good clustering with a cluster of
    # exactly the boundary size must keep a feasible lift (the forbidden
    # margin is open at the top)
    pre = PreclusteredInstance(3, (), frozenset({(0, 1), (0, 2)}), 0.1)
    c = Clustering.from_sets(3, [[0, 1], [2]])
    x = Metric.from_clustering(c)
    # vertex 0: atom size 1, d_adm = 2, epsilon = 0.5 -> boundary size 2
    lp = build_set_lp(range(3), pre, x, r=3, epsilon=0.5)
    clusters = size_window_refinement([set(cl) for cl in c.clusters()], pre, 0.5)
    assert sorted(map(sorted, clusters)) == [[0, 1], [2]]  # no spurious split
    vec = integral_set_lift(lp, clusters, x)
    assert lp.residuals(vec).max() <= 1e-12
    assert solve(lp).status == "optimal"


def test_set_lp_two_vertex_all_minus():
    g = SignedGraph(2, frozenset())
    pre = precluster(g, AgreementParams(0.1))
    assert pre.classify_pair(0, 1) == "non_admissible"
    x = Metric(2, {(0, 1): 1.0})
    lp = build_set_lp([0, 1], pre, x, r=3, epsilon=0.05)
    res = solve(lp)
    assert res.status == "optimal"
    sol = lifted_from_result(lp, res, "set", 3)
    assert sol.ys_of(1, ()) == pytest.approx(2.0, abs=1e-8)
    assert sol.y0 == pytest.approx(2.0, abs=1e-8)


def test_set_lp_pinning_conflict_certificate():
    # an atomic pair forced to distance 1 contradicts its zero pin
    g = generate_instance("planted_cliques", 5, {"sizes": [5]}, 0)
    pre = precluster(g, AgreementParams(0.1))
    bad = dict.fromkeys(all_pairs(5), 0.0)
    bad[(0, 1)] = 1.0
    x = Metric(5, bad)
    lp = build_set_lp(range(5), pre, x, r=3, epsilon=0.05)
    res = solve(lp)
    assert res.status == "infeasible"
    cert = separation_from_infeasibility(lp, x, res)
    assert cert.separates(x)
    assert cert.rejected_value < cert.b
    # the single good clustering here (the atom is all of V) satisfies the plane
    good = Metric.from_clustering(Clustering.from_assignment([0] * 5))
    assert cert.evaluate(good) >= cert.b - 1e-9


def test_pivot_lp_triangle_violation_certificate():
    g = SignedGraph(3, frozenset(all_pairs(3)))
    pre = trivial_preclustering(3)
    x = Metric(3, {(0, 1): 0.0, (0, 2): 0.0, (1, 2): 1.0})
    lp = build_pivot_lp(g, pre, x, r=3)
    res = solve(lp)
    assert res.status == "infeasible"
    cert = separation_from_infeasibility(lp, x, res)
    assert cert.separates(x)
    # every good clustering's metric satisfies the plane
    for labels in product(range(3), repeat=3):
        xm = Metric.from_clustering(Clustering.from_assignment(list(labels)))
        assert cert.evaluate(xm) >= cert.b - 1e-9


def test_separation_requires_infeasibility():
    g = SignedGraph(3, frozenset(all_pairs(3)))
    pre = trivial_preclustering(3)
    x = Metric(3, dict.fromkeys(all_pairs(3), 0.0))
    lp = build_pivot_lp(g, pre, x, r=3)
    res = solve(lp)
    assert res.status == "optimal"
    with pytest.raises(ValueError, match="separation"):
        separation_from_infeasibility(lp, x, res)


def test_pivot_lp_half_triangle_interval():
    # x = 1/2 everywhere on a +++ triangle: the triple weight ranges over
    # [1/4, 1/2] (lower end from the all-split constraint, upper from the
    # pair cap); endpoints derived by hand from the small polytope
    g = SignedGraph(3, frozenset(all_pairs(3)))
    pre = trivial_preclustering(3)
    x = Metric(3, dict.fromkeys(all_pairs(3), 0.5))
    lp = build_pivot_lp(g, pre, x, r=3)
    i = lp.var_keys.index(("y", (0, 1, 2)))
    lp.set_objective([i], [1.0])
    lo = solve(lp).objective
    lp.set_objective([i], [-1.0])
    hi = -solve(lp).objective
    assert lo == pytest.approx(0.25, abs=1e-8)
    assert hi == pytest.approx(0.5, abs=1e-8)


def test_lifted_solution_invariants():
    g = generate_instance("uniform_random", 6, None, 3)
    pre = precluster(g, AgreementParams(0.1))
    x, _ = solve_triangle_lp(g, pre)
    lp = build_set_lp(range(6), pre, x, r=3, epsilon=0.05)
    res = solve(lp)
    sol = lifted_from_result(lp, res, "set", 3)
    verts = range(6)
    tol = 1e-7
    for v in verts:
        assert sol.y_of((v,)) == pytest.approx(1.0, abs=tol)
    for (u, v) in all_pairs(6):
        assert sol.y_of((u, v)) == pytest.approx(1 - sol.xt_of(u, v), abs=tol)
        assert sol.xt_of(u, v) >= x.x(u, v) - tol
        total = sum(sol.ys_of(s, (u, v)) for s in range(1, 7))
        assert total == pytest.approx(sol.y_of((u, v)), abs=tol)
    for s in range(1, 7):
        # size consistency at S = empty
        assert sum(sol.ys_of(s, (u,)) for u in verts) == pytest.approx(
            s * sol.ys_of(s, ()), abs=tol
        )
    # pivot-layer derived quantities stay nonnegative
    lp2 = build_pivot_lp(g, pre, x, r=3)
    sol2 = lifted_from_result(lp2, solve(lp2), "pivot", 3)
    for (a, b, c) in combinations(range(6), 3):
        assert sol2.split_all3(a, b, c) >= -1e-9
        assert sol2.lone_vertex(a, b, c) >= -1e-9


def test_lp_dump():
    lp = LinearProgram("dump")
    lp.add_vars([("x", (0, 1)), ("y", (0,))])
    lp.add_row({0: 1.0, 1: -2.0}, "<", 3.0)
    text = write_lp_text(lp)
    assert "x[0,1]" in text and "<= 3" in text


def test_builder_order_validation():
    g = SignedGraph(3, frozenset(all_pairs(3)))
    pre = trivial_preclustering(3)
    x = Metric(3, dict.fromkeys(all_pairs(3), 0.0))
    with pytest.raises(ValueError):
        build_set_lp(range(3), pre, x, r=1)
    with pytest.raises(ValueError):
        build_pivot_lp(g, pre, x, r=2)
