"""Atomic preclustering and admissible-edge construction.

Atoms are found by sparsifying the +graph: drop +edges whose endpoints are
not in weak agreement, drop +edges between two "light" vertices (those that
lost too many incident +edges), and take the connected components of size at
least two.  Admissible pairs are the degree-similar pairs with enough common
degree-similar neighbors, normalized so that all members of an atom end up
with identical admissible neighborhoods.

Threshold comparisons (agreement, lightness, degree similarity) are done in
exact rational arithmetic to avoid float boundary flakiness.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .core import Pair, PreclusteredInstance, SignedGraph, pair_key


def _frac(x: float) -> Fraction:
    """Decimal-faithful rational for a parameter given as a float."""
    try:
        return Fraction(str(x))
    except ValueError:
        return Fraction(x)


def _ratio(x: float) -> tuple[int, int]:
    f = _frac(x)
    return f.numerator, f.denominator


@dataclass(frozen=True)
class AgreementParams:
    """Preclustering knobs; by default beta = lam = epsilon_q.

    epsilon_q is the master agreement parameter; derived quantities:
    eps = sqrt(epsilon_q) (approximation slack of the preclustering) and
    eps_a = epsilon_q**6 / 2 (cost lower-bound coefficient).
    """

    epsilon_q: float
    beta: float | None = None
    lam: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.epsilon_q < 1.0):
            raise ValueError("epsilon_q must lie in (0, 1)")
        if self.beta is None:
            object.__setattr__(self, "beta", self.epsilon_q)
        if self.lam is None:
            object.__setattr__(self, "lam", self.epsilon_q)

    @property
    def eps(self) -> float:
        return self.epsilon_q**0.5

    @property
    def eps_a(self) -> float:
        return self.epsilon_q**6 / 2


def in_weak_agreement(g: SignedGraph, u: int, v: int, i: int, beta: float) -> bool:
    """|N_u symdiff N_v| < i * beta * max(|N_u|, |N_v|), self-loops included.
    Compared by integer cross-multiplication (no float boundary effects)."""
    nu, nv = g.closed_neighborhood(u), g.closed_neighborhood(v)
    sym = len(nu ^ nv)
    num, den = _ratio(beta)
    return sym * den < i * num * max(len(nu), len(nv))


def atomic_preclustering(g: SignedGraph, params: AgreementParams) -> tuple[frozenset[int], ...]:
    """Sparsify the +graph and return its size >= 2 components as atoms."""
    kept: list[Pair] = []
    lost = [0] * g.n
    for (u, v) in sorted(g.plus):
        if in_weak_agreement(g, u, v, 1, params.beta):
            kept.append((u, v))
        else:
            lost[u] += 1
            lost[v] += 1
    lnum, lden = _ratio(params.lam)
    light = [lost[v] * lden > lnum * g.degree(v) for v in range(g.n)]
    surviving = [(u, v) for (u, v) in kept if not (light[u] and light[v])]
    # connected components of the sparsified graph
    parent = list(range(g.n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (u, v) in surviving:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    comps: dict[int, set[int]] = {}
    for v in range(g.n):
        comps.setdefault(find(v), set()).add(v)
    atoms = [frozenset(c) for c in comps.values() if len(c) >= 2]
    return tuple(sorted(atoms, key=min))


def _degree_similar(du: int, dv: int, num: int, den: int) -> bool:
    return num * dv <= den * du and num * du <= den * dv


def admissible_edges(
    g: SignedGraph, atoms: tuple[frozenset[int], ...], params: AgreementParams
) -> frozenset[Pair]:
    """Admissible pairs: one endpoint outside all atoms, degree-similar, and
    enough common neighbors degree-similar to both; then normalized so atom
    members share identical admissible neighborhoods."""
    num, den = _ratio(params.epsilon_q)
    deg = [g.degree(v) for v in range(g.n)]
    in_atom = [False] * g.n
    for a in atoms:
        for v in a:
            in_atom[v] = True
    adm: set[Pair] = set()
    for (u, v) in combinations(range(g.n), 2):
        if in_atom[u] and in_atom[v]:
            continue
        if not _degree_similar(deg[u], deg[v], num, den):
            continue
        common = g.closed_neighborhood(u) & g.closed_neighborhood(v)
        good = sum(
            1
            for w in common
            if _degree_similar(deg[w], deg[u], num, den) and _degree_similar(deg[w], deg[v], num, den)
        )
        if good * den >= num * min(deg[u], deg[v]):
            adm.add((u, v))
    # normalization: if v is in an atom with u and uw is not admissible,
    # vw may not be admissible either; iterate to a fixpoint
    atom_of: dict[int, frozenset[int]] = {}
    for a in atoms:
        for v in a:
            atom_of[v] = a
    changed = True
    while changed:
        changed = False
        for (v, w) in sorted(adm):
            for x, y in ((v, w), (w, v)):
                a = atom_of.get(x)
                if a is None:
                    continue
                if any(u != x and pair_key(u, y) not in adm for u in a):
                    adm.discard((v, w))
                    changed = True
                    break
    return frozenset(adm)


def precluster(g: SignedGraph, params: AgreementParams) -> PreclusteredInstance:
    """Full preclustering: atoms, then normalized admissible pairs."""
    atoms = atomic_preclustering(g, params)
    adm = admissible_edges(g, atoms, params)
    pre = PreclusteredInstance(g.n, atoms, adm, params.epsilon_q)
    pre.validate()
    return pre
