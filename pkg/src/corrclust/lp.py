"""LP facade and builders for the three relaxations.

A :class:`LinearProgram` separates constraint coefficients on the decision
variables from coefficients on the *input metric* x (parameter columns).
Feasibility is decided by HiGHS; when a program with parameter columns is
infeasible, an auxiliary LP recovers a Farkas combination, which projects to
a hyperplane separating the input x from the convex hull of good clusterings.

Three builders are provided:

* :func:`build_triangle_lp`   - the plain metric LP over x itself,
* :func:`build_set_lp`        - size-stratified lift y^s_S with a relaxed
                                metric copy xt, used by set-based rounding,
* :func:`build_pivot_lp`      - single-layer lift y_S with triangle
                                constraints, used by pivot-based rounding.

Variables indexed by nonempty sets live in [0,1]; the empty-set variables
count clusters (of a given size, for the stratified lift) and are only
required to be nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .core import (
    Clustering,
    Metric,
    Pair,
    PreclusteredInstance,
    SignedGraph,
    all_pairs,
    pair_key,
)

SOLVER_TOL = 1e-9
_WINDOW_TOL = 1e-9  # cluster-size boundary shared by the pin and the refinement
_HIGHS_OPTS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class LPError(RuntimeError):
    """Solver failure that is not plain infeasibility."""


# ---------------------------------------------------------------------------
# Generic LP container
# ---------------------------------------------------------------------------


class LinearProgram:
    """Sparse LP with named variables and optional metric-parameter columns.

    Rows are stored as ``a . vars <sense> rhs0 - p . x`` where x is the input
    metric (fixed at build time, but kept symbolic so infeasibility can be
    projected onto a separating hyperplane in x-space).
    """

    def __init__(self, name: str):
        self.name = name
        self.var_keys: list[tuple] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self._entries: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self._pentries: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self.senses: list[str] = []
        self.rhs0: list[float] = []
        self.param_pairs: list[Pair] = []
        self._param_index: dict[Pair, int] = {}
        self.param_values: list[float] = []
        self.objective: tuple[np.ndarray, np.ndarray, float] | None = None
        self._mats: tuple | None = None

    # -- variables ----------------------------------------------------------

    def add_vars(self, keys: Sequence[tuple], lb: float = 0.0, ub: float = 1.0) -> np.ndarray:
        base = len(self.var_keys)
        self.var_keys.extend(keys)
        self.lb.extend([lb] * len(keys))
        self.ub.extend([ub] * len(keys))
        return np.arange(base, base + len(keys))

    @property
    def num_vars(self) -> int:
        return len(self.var_keys)

    @property
    def num_rows(self) -> int:
        return len(self.senses)

    def set_bounds(self, cols, lb=None, ub=None) -> None:
        cols = np.atleast_1d(np.asarray(cols, dtype=int))
        lbs = np.broadcast_to(np.asarray(lb, dtype=float), cols.shape) if lb is not None else None
        ubs = np.broadcast_to(np.asarray(ub, dtype=float), cols.shape) if ub is not None else None
        for i, c in enumerate(cols):
            if lbs is not None:
                self.lb[c] = float(lbs[i])
            if ubs is not None:
                self.ub[c] = float(ubs[i])

    def fix_vars(self, cols, values) -> None:
        self.set_bounds(cols, lb=values, ub=values)

    # -- parameter (metric) columns ------------------------------------------

    def param_col(self, p: Pair, value: float) -> int:
        idx = self._param_index.get(p)
        if idx is None:
            idx = len(self.param_pairs)
            self._param_index[p] = idx
            self.param_pairs.append(p)
            self.param_values.append(float(value))
        return idx

    # -- rows -----------------------------------------------------------------

    def add_rows(
        self,
        count: int,
        sense: str,
        rhs,
        entries: Iterable[tuple[np.ndarray, np.ndarray, np.ndarray]],
        param_entries: Iterable[tuple[np.ndarray, np.ndarray, np.ndarray]] = (),
    ) -> None:
        """Append ``count`` rows; local row ids in the entry triplets are
        offset by the current row count.  sense is one of '<', '=', '>'
        (the latter is normalized to '<')."""
        if sense not in "<=>":
            raise ValueError(f"bad sense {sense!r}")
        flip = -1.0 if sense == ">" else 1.0
        norm_sense = "<" if sense in "<>" else "="
        base = self.num_rows
        rhs_arr = np.broadcast_to(np.asarray(rhs, dtype=float), (count,))
        self.rhs0.extend((flip * rhs_arr).tolist())
        self.senses.extend([norm_sense] * count)
        for (r, c, v) in entries:
            r = np.asarray(r, dtype=int)
            self._entries.append((r + base, np.asarray(c, dtype=int), flip * np.asarray(v, dtype=float)))
        for (r, c, v) in param_entries:
            r = np.asarray(r, dtype=int)
            self._pentries.append((r + base, np.asarray(c, dtype=int), flip * np.asarray(v, dtype=float)))
        self._mats = None

    def add_row(self, coeffs: Mapping[int, float], sense: str, rhs: float,
                params: Mapping[int, float] | None = None) -> None:
        cols = np.fromiter(coeffs.keys(), dtype=int, count=len(coeffs))
        vals = np.fromiter(coeffs.values(), dtype=float, count=len(coeffs))
        pe = ()
        if params:
            pc = np.fromiter(params.keys(), dtype=int, count=len(params))
            pv = np.fromiter(params.values(), dtype=float, count=len(params))
            pe = [(np.zeros(len(params), dtype=int), pc, pv)]
        self.add_rows(1, sense, [rhs], [(np.zeros(len(coeffs), dtype=int), cols, vals)], pe)

    def set_objective(self, cols, coefs, constant: float = 0.0) -> None:
        self.objective = (np.asarray(cols, dtype=int), np.asarray(coefs, dtype=float), constant)

    # -- matrix assembly -------------------------------------------------------

    def matrices(self):
        """(A, P, rhs0, senses, lb, ub) with A sparse over vars, P over params."""
        if self._mats is None:
            nr, nv, npar = self.num_rows, self.num_vars, len(self.param_pairs)
            if self._entries:
                ri = np.concatenate([e[0] for e in self._entries])
                ci = np.concatenate([e[1] for e in self._entries])
                vi = np.concatenate([e[2] for e in self._entries])
            else:
                ri = ci = vi = np.zeros(0)
            A = sp.coo_matrix((vi, (ri, ci)), shape=(nr, nv)).tocsr()
            if self._pentries:
                ri = np.concatenate([e[0] for e in self._pentries])
                ci = np.concatenate([e[1] for e in self._pentries])
                vi = np.concatenate([e[2] for e in self._pentries])
            else:
                ri = ci = vi = np.zeros(0)
            P = sp.coo_matrix((vi, (ri, ci)), shape=(nr, npar)).tocsr()
            self._mats = (
                A,
                P,
                np.asarray(self.rhs0, dtype=float),
                np.asarray(self.senses),
                np.asarray(self.lb, dtype=float),
                np.asarray(self.ub, dtype=float),
            )
        return self._mats

    def effective_rhs(self) -> np.ndarray:
        A, P, rhs0, senses, lb, ub = self.matrices()
        xv = np.asarray(self.param_values, dtype=float)
        return rhs0 - (P @ xv if len(xv) else 0.0)

    def residuals(self, values: np.ndarray) -> np.ndarray:
        """Per-row violation (positive where violated) at a given point."""
        A, P, rhs0, senses, lb, ub = self.matrices()
        lhs = A @ values
        b = self.effective_rhs()
        out = lhs - b
        eq = senses == "="
        out[eq] = np.abs(out[eq])
        return out

    def value_vector(self, assignment: Mapping[tuple, float], default: float = 0.0) -> np.ndarray:
        vec = np.full(self.num_vars, default)
        for i, key in enumerate(self.var_keys):
            if key in assignment:
                vec[i] = assignment[key]
        return vec


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    values: np.ndarray | None = None
    objective: float | None = None
    farkas: np.ndarray | None = None  # weights over canonical <= rows
    message: str = ""


def _canonical_rows(lp: LinearProgram):
    """All constraints as <= rows, including equalities (split) and finite
    variable bounds.  Returns (M, c0, P) with M u-columns over lp vars."""
    A, P, rhs0, senses, lb, ub = lp.matrices()
    ineq = senses == "<"
    eq = ~ineq
    blocks_M = [A[ineq], A[eq], -A[eq]]
    blocks_P = [P[ineq], P[eq], -P[eq]]
    blocks_c = [rhs0[ineq], rhs0[eq], -rhs0[eq]]
    nv = lp.num_vars
    eye = sp.identity(nv, format="csr")
    fin_ub = np.isfinite(ub)
    fin_lb = np.isfinite(lb)
    zero_p = sp.csr_matrix((int(fin_ub.sum()), P.shape[1]))
    blocks_M.append(eye[fin_ub])
    blocks_P.append(zero_p)
    blocks_c.append(ub[fin_ub])
    zero_p = sp.csr_matrix((int(fin_lb.sum()), P.shape[1]))
    blocks_M.append(-eye[fin_lb])
    blocks_P.append(zero_p)
    blocks_c.append(-lb[fin_lb])
    M = sp.vstack(blocks_M, format="csr")
    Pc = sp.vstack(blocks_P, format="csr")
    c0 = np.concatenate(blocks_c)
    return M, c0, Pc


def _find_farkas(lp: LinearProgram) -> np.ndarray | None:
    """Weights u >= 0 with u.M = 0 and u.(c0 - P x) = -1 over canonical rows."""
    M, c0, Pc = _canonical_rows(lp)
    xv = np.asarray(lp.param_values, dtype=float)
    b_eff = c0 - (Pc @ xv if len(xv) else 0.0)
    nr = M.shape[0]
    A_eq = sp.vstack([M.T.tocsr(), sp.csr_matrix(np.ones((1, nr)))], format="csr")
    b_eq = np.zeros(A_eq.shape[0])
    b_eq[-1] = 1.0
    res = linprog(
        b_eff, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs", options=dict(_HIGHS_OPTS)
    )
    if res.status != 0 or res.fun >= -1e-12:
        return None
    u = res.x / (-res.fun)  # scale so u.(c0 - P x) = -1
    return u


def solve(lp: LinearProgram) -> LPResult:
    """Solve (or decide feasibility of) the program.

    Returns an optimal point, an infeasibility witness (Farkas weights over
    the canonical row form), or an 'unbounded' status.
    """
    A, P, rhs0, senses, lb, ub = lp.matrices()
    b = lp.effective_rhs()
    ineq = senses == "<"
    eq = ~ineq
    c = np.zeros(lp.num_vars)
    const = 0.0
    if lp.objective is not None:
        cols, coefs, const = lp.objective
        np.add.at(c, cols, coefs)
    if lp.num_vars == 0:
        # degenerate but legal (single-vertex instances have no pairs)
        feasible = (b[ineq] >= -SOLVER_TOL).all() and (np.abs(b[eq]) <= SOLVER_TOL).all()
        if feasible:
            return LPResult("optimal", values=np.zeros(0), objective=const)
        return LPResult("infeasible", farkas=_find_farkas(lp))
    res = linprog(
        c,
        A_ub=A[ineq] if ineq.any() else None,
        b_ub=b[ineq] if ineq.any() else None,
        A_eq=A[eq] if eq.any() else None,
        b_eq=b[eq] if eq.any() else None,
        bounds=list(zip(lb, ub)),
        method="highs-ds",
        options=dict(_HIGHS_OPTS),
    )
    if res.status == 0:
        return LPResult("optimal", values=res.x, objective=res.fun + const, message=res.message)
    if res.status == 2:
        farkas = _find_farkas(lp)
        if farkas is None:
            raise LPError(f"{lp.name}: reported infeasible but no Farkas witness found")
        return LPResult("infeasible", farkas=farkas, message=res.message)
    if res.status == 3:
        return LPResult("unbounded", message=res.message)
    raise LPError(f"{lp.name}: solver failure: {res.message}")


# ---------------------------------------------------------------------------
# Separation certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparationCertificate:
    """Hyperplane (w, b) with w.x' >= b for every metric x' of a good
    clustering, but w.x < b for the rejected input x."""

    w: dict[Pair, float]
    b: float
    provenance: str
    rejected_value: float  # w.x at the rejected point
    farkas_weights: tuple[float, ...] = field(repr=False, default=())

    def evaluate(self, x: Metric) -> float:
        return sum(coef * x.x(*p) for p, coef in self.w.items())

    def separates(self, x: Metric, tol: float = 1e-9) -> bool:
        return self.evaluate(x) < self.b - tol


def separation_from_infeasibility(
    lp: LinearProgram, x: Metric, result: LPResult | None = None
) -> SeparationCertificate:
    """Project a Farkas witness for an infeasible lift onto x-space."""
    if result is None:
        result = solve(lp)
    if result.status != "infeasible" or result.farkas is None:
        raise ValueError(f"{lp.name}: separation requested but LP is {result.status}")
    u = result.farkas
    M, c0, Pc = _canonical_rows(lp)
    audit = np.abs(M.T @ u)
    if audit.max(initial=0.0) > 1e-6:
        raise LPError(f"{lp.name}: Farkas audit failed, |u.A| = {audit.max():.2e}")
    if u.min(initial=0.0) < -1e-12:
        raise LPError(f"{lp.name}: Farkas weights not nonnegative")
    w_vec = -(Pc.T @ u)
    b = -float(c0 @ u)
    w = {p: float(w_vec[i]) for i, p in enumerate(lp.param_pairs) if abs(w_vec[i]) > 1e-14}
    cert = SeparationCertificate(
        w=w,
        b=b,
        provenance=lp.name,
        rejected_value=float(sum(w.get(p, 0.0) * xv for p, xv in zip(lp.param_pairs, lp.param_values))),
        farkas_weights=tuple(u.tolist()),
    )
    if not cert.rejected_value < b - 1e-9:
        raise LPError(f"{lp.name}: certificate does not separate the rejected x")
    return cert


# ---------------------------------------------------------------------------
# Triangle LP
# ---------------------------------------------------------------------------


def build_triangle_lp(g: SignedGraph, pre: PreclusteredInstance) -> LinearProgram:
    """Metric LP over x: triangle inequalities, preclustering pins, and the
    disagreement objective."""
    lp = LinearProgram(f"triangle-lp(n={g.n})")
    pairs = list(all_pairs(g.n))
    cols = lp.add_vars([("x", p) for p in pairs])
    col_of = {p: int(c) for p, c in zip(pairs, cols)}
    for p in pairs:
        cls = pre.classify_pair(*p)
        if cls == "atomic":
            lp.fix_vars([col_of[p]], 0.0)
        elif cls == "non_admissible":
            lp.fix_vars([col_of[p]], 1.0)
    tri = list(combinations(range(g.n), 3))
    if tri:
        t = len(tri)
        rows = np.arange(3 * t)
        cuv = np.array([col_of[(a, b)] for (a, b, c) in tri])
        cuw = np.array([col_of[(a, c)] for (a, b, c) in tri])
        cvw = np.array([col_of[(b, c)] for (a, b, c) in tri])
        # x_uv <= x_uw + x_wv, all three rotations
        long_side = np.concatenate([cuv, cuw, cvw])
        short1 = np.concatenate([cuw, cuv, cuv])
        short2 = np.concatenate([cvw, cvw, cuw])
        lp.add_rows(
            3 * t,
            "<",
            0.0,
            [
                (rows, long_side, np.ones(3 * t)),
                (rows, short1, -np.ones(3 * t)),
                (rows, short2, -np.ones(3 * t)),
            ],
        )
    coefs = np.array([1.0 if p in g.plus else -1.0 for p in pairs])
    lp.set_objective(cols, coefs, constant=float(g.num_minus))
    return lp


def solve_triangle_lp(g: SignedGraph, pre: PreclusteredInstance) -> tuple[Metric, float]:
    """Convenience wrapper: optimal fractional metric and its cost."""
    lp = build_triangle_lp(g, pre)
    res = solve(lp)
    if res.status != "optimal":
        raise LPError(f"triangle LP not solvable: {res.status}")
    vals = np.clip(res.values, 0.0, 1.0)
    metric = Metric(g.n, {p: float(v) for (_, p), v in zip(lp.var_keys, vals)})
    return metric, float(res.objective)


# ---------------------------------------------------------------------------
# Shared combinatorics for the lifted programs
# ---------------------------------------------------------------------------


class _SetIndex:
    """Ranks of subsets of local vertices, sizes 0..3, in one contiguous block."""

    def __init__(self, n: int):
        self.n = n
        self.pairs = list(combinations(range(n), 2))
        self.triples = list(combinations(range(n), 3))
        self.m = len(self.pairs)
        self.t = len(self.triples)
        self.block = 1 + n + self.m + self.t
        self.pr = np.full((n, n), -1, dtype=int)
        for k, (i, j) in enumerate(self.pairs):
            self.pr[i, j] = self.pr[j, i] = k
        self.tr: dict[tuple[int, int, int], int] = {
            t: k for k, t in enumerate(self.triples)
        }

    def rank(self, s: tuple[int, ...]) -> int:
        k = len(s)
        if k == 0:
            return 0
        if k == 1:
            return 1 + s[0]
        if k == 2:
            return 1 + self.n + int(self.pr[s[0], s[1]])
        if k == 3:
            return 1 + self.n + self.m + self.tr[tuple(sorted(s))]
        raise ValueError("sets of size > 3 are not indexed")

    def sets(self):
        yield ()
        for i in range(self.n):
            yield (i,)
        yield from self.pairs
        yield from self.triples


def _box_constraint_rows(lp: LinearProgram, col_of, n: int, si: _SetIndex) -> None:
    """Inclusion-exclusion box rows over one layer of set variables.

    ``col_of(rank_array)`` maps local set ranks to LP columns. Emits, for all
    disjoint (S, T) with 1 <= |T| and |S u T| <= 3, the two-sided constraint
    sum_{T' <= T} (-1)^{|T'|} y_{S u T'} in [0, y_S], skipping rows that
    reduce to plain sign constraints.
    """
    one = np.ones
    y0 = col_of(np.array([si.rank(())]))[0]
    yi = col_of(np.array([si.rank((i,)) for i in range(n)]))
    # k=1: S=empty, T={a}, lower side: y_a - y_0 <= 0
    rows = np.arange(n)
    lp.add_rows(n, "<", 0.0, [(rows, yi, one(n)), (rows, np.full(n, y0), -one(n))])
    if si.m:
        A = np.array([p[0] for p in si.pairs])
        B = np.array([p[1] for p in si.pairs])
        yA, yB = yi[A], yi[B]
        yAB = col_of(1 + n + np.arange(si.m))
        m = si.m
        rows = np.arange(m)
        # S=empty, T={a,b}: 0 <= y0 - ya - yb + yab  and  (...) <= y0
        lp.add_rows(
            m, "<", 0.0,
            [(rows, np.full(m, y0), -one(m)), (rows, yA, one(m)), (rows, yB, one(m)), (rows, yAB, -one(m))],
        )
        lp.add_rows(m, "<", 0.0, [(rows, yA, -one(m)), (rows, yB, -one(m)), (rows, yAB, one(m))])
        # S={a}, T={b} and S={b}, T={a}, lower sides: monotonicity
        lp.add_rows(m, "<", 0.0, [(rows, yAB, one(m)), (rows, yA, -one(m))])
        lp.add_rows(m, "<", 0.0, [(rows, yAB, one(m)), (rows, yB, -one(m))])
    if si.t:
        t = len(si.triples)
        TA = np.array([x[0] for x in si.triples])
        TB = np.array([x[1] for x in si.triples])
        TC = np.array([x[2] for x in si.triples])
        ya, yb, yc = yi[TA], yi[TB], yi[TC]
        yab = col_of(1 + n + si.pr[TA, TB])
        yac = col_of(1 + n + si.pr[TA, TC])
        ybc = col_of(1 + n + si.pr[TB, TC])
        yabc = col_of(1 + n + si.m + np.arange(t))
        rows = np.arange(t)
        # S=empty, T={a,b,c}: lower and upper
        lp.add_rows(
            t, "<", 0.0,
            [(rows, np.full(t, y0), -one(t)), (rows, ya, one(t)), (rows, yb, one(t)), (rows, yc, one(t)),
             (rows, yab, -one(t)), (rows, yac, -one(t)), (rows, ybc, -one(t)), (rows, yabc, one(t))],
        )
        lp.add_rows(
            t, "<", 0.0,
            [(rows, ya, -one(t)), (rows, yb, -one(t)), (rows, yc, -one(t)),
             (rows, yab, one(t)), (rows, yac, one(t)), (rows, ybc, one(t)), (rows, yabc, -one(t))],
        )
        # S={a}, T={b,c} (three rotations): lower and upper
        for (s_, p_, q_) in ((ya, yab, yac), (yb, yab, ybc), (yc, yac, ybc)):
            lp.add_rows(
                t, "<", 0.0,
                [(rows, s_, -one(t)), (rows, p_, one(t)), (rows, q_, one(t)), (rows, yabc, -one(t))],
            )
            lp.add_rows(
                t, "<", 0.0,
                [(rows, p_, -one(t)), (rows, q_, -one(t)), (rows, yabc, one(t))],
            )
        # S=pair, T={third}: monotonicity
        for p_ in (yab, yac, ybc):
            lp.add_rows(t, "<", 0.0, [(rows, yabc, one(t)), (rows, p_, -one(t))])


# ---------------------------------------------------------------------------
# Set LP (size-stratified lift)
# ---------------------------------------------------------------------------


def build_set_lp(
    vprime: Sequence[int],
    pre: PreclusteredInstance,
    x: Metric,
    r: int = 3,
    epsilon: float = 0.05,
) -> LinearProgram:
    """Size-stratified lifted feasibility LP on the remaining vertex set.

    Variables: xt (relaxed metric copy), y_S aggregates and y^s_S per cluster
    size s, for |S| <= r.  Cluster-size windows pin y^s_S = 0 whenever some
    u in S cannot live in a size-s cluster (its atom is kept whole, or the
    size is within the forbidden margin above the atom size).
    """
    if r < 2:
        raise ValueError("set LP needs lift order r >= 2")
    if r > 3:
        raise ValueError("set LP supports r <= 3 (sets up to triples)")
    verts = sorted(vprime)
    n = len(verts)
    if n == 0:
        raise ValueError("empty vertex set")
    si = _SetIndex(n)
    lp = LinearProgram(f"set-lp(n'={n},r={r})")
    glob = np.asarray(verts)

    def gpair(i: int, j: int) -> Pair:
        return pair_key(verts[i], verts[j])

    # variables: xt per local pair, then y sets, then y^s sets per s
    xt_keys = [("xt", gpair(i, j)) for (i, j) in si.pairs]
    xt_cols = lp.add_vars(xt_keys)
    set_keys = [("y", tuple(glob[list(s)])) for s in si.sets()]
    y_base = lp.add_vars(set_keys)[0]
    lp.set_bounds([y_base], lb=0.0, ub=float(n))  # y_empty counts clusters
    ys_base = []
    for s in range(1, n + 1):
        cols = lp.add_vars([("ys", s, tuple(glob[list(t)])) for t in si.sets()])
        ys_base.append(cols[0])
        lp.set_bounds([cols[0]], lb=0.0, ub=float(n))

    def ycol(ranks):
        return y_base + np.asarray(ranks, dtype=int)

    def yscol(s, ranks):
        return ys_base[s - 1] + np.asarray(ranks, dtype=int)

    B = si.block
    # (2) y_u = 1
    lp.fix_vars(ycol(1 + np.arange(n)), 1.0)

    # pinning by pair class, size windows, and s < |S|
    atom_local: list[frozenset[int]] = []
    loc_of = {v: i for i, v in enumerate(verts)}
    for v in verts:
        atom_local.append(frozenset(loc_of[w] for w in pre.atom_of(v) if w in loc_of))
    non_adm_pair = np.zeros((n, n), dtype=bool)
    atomic_pair = np.zeros((n, n), dtype=bool)
    for (i, j) in si.pairs:
        cls = pre.classify_pair(verts[i], verts[j])
        if cls == "non_admissible":
            non_adm_pair[i, j] = non_adm_pair[j, i] = True
        elif cls == "atomic":
            atomic_pair[i, j] = atomic_pair[j, i] = True
    # (6) atomic xt = 0
    for k, (i, j) in enumerate(si.pairs):
        if atomic_pair[i, j]:
            lp.fix_vars([xt_cols[k]], 0.0)
    d_adm = [pre.d_adm(v) for v in verts]
    a_size = [len(atom_local[i]) for i in range(n)]

    def size_ok(s: int, i: int, S: tuple[int, ...]) -> bool:
        if s == a_size[i]:
            return all(j in atom_local[i] for j in S)
        # sizes inside the open margin above the atom size are forbidden;
        # the boundary itself stays allowed (the refinement that justifies
        # this pin only splits clusters strictly inside the margin)
        return s >= a_size[i] + epsilon * d_adm[i] - _WINDOW_TOL

    zero_y: list[int] = []
    zero_ys: list[int] = []
    for S in si.sets():
        if len(S) < 2:
            continue
        if any(non_adm_pair[i, j] for (i, j) in combinations(S, 2)):
            rk = si.rank(S)
            zero_y.append(int(ycol([rk])[0]))
            zero_ys.extend(int(yscol(s, [rk])[0]) for s in range(1, n + 1))
    for S in si.sets():
        if not S:
            continue
        rk = si.rank(S)
        for s in range(1, n + 1):
            if s < len(S) or not all(size_ok(s, i, S) for i in S):
                zero_ys.append(int(yscol(s, [rk])[0]))
    if zero_y:
        lp.fix_vars(np.array(zero_y), 0.0)
    if zero_ys:
        lp.fix_vars(np.array(sorted(set(zero_ys))), 0.0)

    # (1) sum_s y^s_S = y_S, for every S
    rows = np.arange(B)
    entries = [(rows, ycol(np.arange(B)), -np.ones(B))]
    for s in range(1, n + 1):
        entries.append((rows, yscol(s, np.arange(B)), np.ones(B)))
    lp.add_rows(B, "=", 0.0, entries)

    # (3) y_uv + xt_uv = 1
    m = si.m
    if m:
        rows = np.arange(m)
        ypair = ycol(1 + n + np.arange(m))
        lp.add_rows(m, "=", 1.0, [(rows, ypair, np.ones(m)), (rows, xt_cols, np.ones(m))])
        # (4) xt_uv >= x_uv  (parameter rows: -xt <= -x)
        pcols = np.array([lp.param_col(gpair(i, j), x.x(verts[i], verts[j])) for (i, j) in si.pairs])
        lp.add_rows(
            m, "<", 0.0, [(rows, xt_cols, -np.ones(m))], [(rows, pcols, np.ones(m))]
        )
        # (7) total slack between xt and x is budgeted
        lp.add_rows(
            1,
            "<",
            epsilon * sum(d_adm),
            [(np.zeros(m, dtype=int), xt_cols, np.ones(m))],
            [(np.zeros(m, dtype=int), pcols, -np.ones(m))],
        )

    # (5) size consistency: sum_{u not in S} y^s_{Su} = (s - |S|) y^s_S, |S| <= 2
    for s in range(1, n + 1):
        row = 0
        entries = []
        # S = empty
        entries.append((np.zeros(n, dtype=int), yscol(s, 1 + np.arange(n)), np.ones(n)))
        entries.append((np.zeros(1, dtype=int), yscol(s, [0]), np.array([-float(s)])))
        lp.add_rows(1, "=", 0.0, entries)
        # S = {i}
        ri, ci, vi = [], [], []
        for i in range(n):
            others = [j for j in range(n) if j != i]
            ranks = 1 + n + si.pr[i, others]
            ri.extend([i] * len(others))
            ci.extend(yscol(s, ranks).tolist())
            vi.extend([1.0] * len(others))
        rows = np.arange(n)
        lp.add_rows(
            n, "=", 0.0,
            [(np.array(ri), np.array(ci), np.array(vi)),
             (rows, yscol(s, 1 + np.arange(n)), np.full(n, -(s - 1.0)))],
        )
        # S = pair
        if m and n > 2:
            ri, ci, vi = [], [], []
            for k, (i, j) in enumerate(si.pairs):
                others = [l for l in range(n) if l != i and l != j]
                ranks = [1 + n + si.m + si.tr[tuple(sorted((i, j, l)))] for l in others]
                ri.extend([k] * len(others))
                ci.extend(yscol(s, np.array(ranks)).tolist())
                vi.extend([1.0] * len(others))
            rows = np.arange(m)
            entries = [(rows, yscol(s, 1 + n + np.arange(m)), np.full(m, -(s - 2.0)))]
            if ri:
                entries.append((np.array(ri), np.array(ci), np.array(vi)))
            lp.add_rows(m, "=", 0.0, entries)
        elif m:
            rows = np.arange(m)
            lp.add_rows(m, "=", 0.0, [(rows, yscol(s, 1 + n + np.arange(m)), np.full(m, -(s - 2.0)))])

    # (9) inclusion-exclusion box constraints, one layer per size s
    for s in range(1, n + 1):
        _box_constraint_rows(lp, lambda ranks, s=s: yscol(s, ranks), n, si)
    return lp


# ---------------------------------------------------------------------------
# Pivot LP (single-layer lift)
# ---------------------------------------------------------------------------


def build_pivot_lp(
    g: SignedGraph, pre: PreclusteredInstance, x: Metric, r: int = 3
) -> LinearProgram:
    """Single-layer lifted feasibility LP over all of V, with the pairwise
    layer pinned to the input metric and triangle constraints on triples."""
    if r < 3:
        raise ValueError("pivot LP needs lift order r >= 3")
    if r > 3:
        raise ValueError("pivot LP supports r <= 3 (sets up to triples)")
    n = g.n
    si = _SetIndex(n)
    lp = LinearProgram(f"pivot-lp(n={n},r={r})")
    set_keys = [("y", tuple(s)) for s in si.sets()]
    cols = lp.add_vars(set_keys)
    y_base = cols[0]
    lp.set_bounds([y_base], lb=0.0, ub=float(n))  # y_empty counts clusters

    def ycol(ranks):
        return y_base + np.asarray(ranks, dtype=int)

    lp.fix_vars(ycol(1 + np.arange(n)), 1.0)
    m = si.m
    rows = np.arange(m)
    ypair = ycol(1 + n + np.arange(m))
    pcols = np.array([lp.param_col((i, j), x.x(i, j)) for (i, j) in si.pairs])
    # y_uv = 1 - x_uv, kept as parameter rows so infeasibility projects to x
    lp.add_rows(m, "<", 1.0, [(rows, ypair, np.ones(m))], [(rows, pcols, np.ones(m))])
    lp.add_rows(m, "<", -1.0, [(rows, ypair, -np.ones(m))], [(rows, pcols, -np.ones(m))])
    # box constraints (single layer)
    _box_constraint_rows(lp, ycol, n, si)
    # triangle rows: y_ab + y_ac + y_bc - 2 y_abc <= 1
    t = si.t
    if t:
        TA = np.array([x_[0] for x_ in si.triples])
        TB = np.array([x_[1] for x_ in si.triples])
        TC = np.array([x_[2] for x_ in si.triples])
        yab = ycol(1 + n + si.pr[TA, TB])
        yac = ycol(1 + n + si.pr[TA, TC])
        ybc = ycol(1 + n + si.pr[TB, TC])
        yabc = ycol(1 + n + m + np.arange(t))
        rows = np.arange(t)
        lp.add_rows(
            t, "<", 1.0,
            [(rows, yab, np.ones(t)), (rows, yac, np.ones(t)), (rows, ybc, np.ones(t)),
             (rows, yabc, -2 * np.ones(t))],
        )
    return lp


# ---------------------------------------------------------------------------
# Lifted solutions
# ---------------------------------------------------------------------------


@dataclass
class LiftedSolution:
    """Point of one of the lifted relaxations, with set-indexed accessors.

    Variables indexed by nonempty sets are clamped to [0,1] (at solver
    tolerance); empty-set variables count clusters and stay unclamped.
    """

    kind: str  # 'set' or 'pivot'
    vertices: tuple[int, ...]
    r: int
    y: dict[tuple[int, ...], float]
    ys: dict[tuple[int, tuple[int, ...]], float]
    xt: dict[Pair, float]

    @property
    def y0(self) -> float:
        return self.y[()]

    def y_of(self, vs: Iterable[int]) -> float:
        return self.y[tuple(sorted(set(vs)))]

    def ys_of(self, s: int, vs: Iterable[int]) -> float:
        return self.ys[(s, tuple(sorted(set(vs))))]

    def xt_of(self, u: int, v: int) -> float:
        return self.xt[pair_key(u, v)]

    # partition-event helpers on triples (pivot-style layer)
    def split_all3(self, a: int, b: int, c: int) -> float:
        return 1.0 - (self.y_of((a, b)) + self.y_of((a, c)) + self.y_of((b, c))) + 2 * self.y_of((a, b, c))

    def lone_vertex(self, a: int, b: int, c: int) -> float:
        """Probability-style weight of {b,c together, a separate}."""
        return self.y_of((b, c)) - self.y_of((a, b, c))


def _clamp01(v: float, tol: float = 1e-6) -> float:
    if -tol <= v <= 1 + tol:
        return min(1.0, max(0.0, v))
    return v


def lifted_from_result(lp: LinearProgram, res: LPResult, kind: str, r: int) -> LiftedSolution:
    if res.status != "optimal" or res.values is None:
        raise ValueError(f"cannot extract a lifted solution from status {res.status}")
    y: dict[tuple[int, ...], float] = {}
    ys: dict[tuple[int, tuple[int, ...]], float] = {}
    xt: dict[Pair, float] = {}
    verts: set[int] = set()
    for key, val in zip(lp.var_keys, res.values):
        v = float(val)
        if key[0] == "y":
            y[key[1]] = _clamp01(v) if key[1] else max(0.0, v)
            verts.update(key[1])
        elif key[0] == "ys":
            ys[(key[1], key[2])] = _clamp01(v) if key[2] else max(0.0, v)
        elif key[0] == "xt":
            xt[key[1]] = _clamp01(v)
    return LiftedSolution(kind, tuple(sorted(verts)), r, y, ys, xt)


# ---------------------------------------------------------------------------
# Integral lifts (used by tests and by exactness checks)
# ---------------------------------------------------------------------------


def size_window_refinement(
    clusters: list[set[int]], pre: PreclusteredInstance, epsilon: float
) -> list[set[int]]:
    """Split off atoms stuck in the forbidden size window, to a fixpoint.
    Mirrors the target-clustering surgery that justifies the size pins."""
    out = [set(c) for c in clusters if c]
    changed = True
    while changed:
        changed = False
        for c in out:
            for v in sorted(c):
                k = pre.atom_of(v) & c
                if len(k) < len(c) < epsilon * pre.d_adm(v) + len(k) - _WINDOW_TOL:
                    out.remove(c)
                    out.append(set(k))
                    rest = c - k
                    if rest:
                        out.append(rest)
                    changed = True
                    break
            if changed:
                break
    return out


def integral_set_lift(
    lp: LinearProgram, clusters: list[set[int]], x: Metric
) -> np.ndarray:
    """Value vector of the indicator lift of a clustering of V' for a set LP."""
    assign: dict[tuple, float] = {}
    cluster_of: dict[int, int] = {}
    for ci, c in enumerate(clusters):
        for v in c:
            cluster_of[v] = ci
    sizes = [len(c) for c in clusters]
    for key in lp.var_keys:
        if key[0] == "xt":
            (u, v) = key[1]
            assign[key] = 0.0 if cluster_of[u] == cluster_of[v] else 1.0
        elif key[0] == "y":
            S = key[1]
            if not S:
                assign[key] = float(len(clusters))
            else:
                cs = {cluster_of[v] for v in S}
                assign[key] = 1.0 if len(cs) == 1 else 0.0
        elif key[0] == "ys":
            s, S = key[1], key[2]
            if not S:
                assign[key] = float(sum(1 for sz in sizes if sz == s))
            else:
                cs = {cluster_of[v] for v in S}
                assign[key] = 1.0 if len(cs) == 1 and sizes[next(iter(cs))] == s else 0.0
    return lp.value_vector(assign)


def integral_pivot_lift(lp: LinearProgram, c: Clustering) -> np.ndarray:
    assign: dict[tuple, float] = {}
    sizes = [len(cl) for cl in c.clusters()]
    for key in lp.var_keys:
        S = key[1]
        if not S:
            assign[key] = float(len(sizes))
        else:
            ids = {c.cluster_of(v) for v in S}
            assign[key] = 1.0 if len(ids) == 1 else 0.0
    return lp.value_vector(assign)


# ---------------------------------------------------------------------------
# Debug dump
# ---------------------------------------------------------------------------


def _key_name(key: tuple) -> str:
    if key[0] == "x":
        return f"x[{key[1][0]},{key[1][1]}]"
    if key[0] == "xt":
        return f"xt[{key[1][0]},{key[1][1]}]"
    if key[0] == "y":
        return "y[" + ",".join(map(str, key[1])) + "]" if key[1] else "y[]"
    if key[0] == "ys":
        inner = ",".join(map(str, key[2]))
        return f"y{key[1]}[{inner}]"
    return str(key)


def write_lp_text(lp: LinearProgram, max_rows: int | None = None) -> str:
    """Human-readable inequality dump for debugging."""
    A, P, rhs0, senses, lb, ub = lp.matrices()
    b = lp.effective_rhs()
    lines = [f"# {lp.name}: {lp.num_rows} rows, {lp.num_vars} vars"]
    A = A.tocsr()
    count = lp.num_rows if max_rows is None else min(max_rows, lp.num_rows)
    for i in range(count):
        row = A.getrow(i)
        terms = " + ".join(
            f"{row.data[k]:g} {_key_name(lp.var_keys[row.indices[k]])}" for k in range(row.nnz)
        )
        op = "<=" if senses[i] == "<" else "=="
        lines.append(f"{terms} {op} {b[i]:g}")
    for j in range(lp.num_vars):
        if lb[j] == ub[j]:
            lines.append(f"{_key_name(lp.var_keys[j])} == {lb[j]:g}")
        else:
            lines.append(f"{lb[j]:g} <= {_key_name(lp.var_keys[j])} <= {ub[j]:g}")
    return "\n".join(lines) + "\n"
