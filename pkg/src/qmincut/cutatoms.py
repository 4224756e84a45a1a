"""Atoms of the near-minimum cut shores of an explicit graph.

For every tree of Karger's set: a generating set of the 2-respecting
near-minimum shores (the 1-respecting ones plus a spanning forest of the
implicit graph ``L`` on tree edges), then the atoms of that generating set
by random subtree hashing.  The trees' partitions are combined by common
refinement.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional

import numpy as np

from .graph import GraphError, Partition, WeightedGraph, common_refinement
from .query import QueryLedger, SearchSpace, grover_search
from .rng import derive_seed, generator
from .solvers import stoer_wagner
from .tworespect import CutEvaluator, RootedTree, TwoRespectId, build_evaluator, root_tree, subtree_add_batch
from .treepack import karger_trees

THRESHOLD_CAP = 1 + Fraction(1, 16)


def _floor(thr) -> int:
    return math.floor(Fraction(thr))


def _shore_sizes(t: RootedTree) -> np.ndarray:
    """``S[u, v]`` = size of the shore named by the pair ``(u, v)``; ``S[u, u]`` for the single edge."""
    size = t.size
    fu, lu = t.first[:, None], t.last[:, None]
    fv, lv = t.first[None, :], t.last[None, :]
    u_above = (fu <= fv) & (lv <= lu)
    v_above = (fv <= fu) & (lu <= lv)
    out = size[:, None] + size[None, :]
    out = np.where(u_above, size[:, None] - size[None, :], out)
    out = np.where(v_above, size[None, :] - size[:, None], out)
    np.fill_diagonal(out, size)
    return out


class ImplicitLGraph:
    """Graph on the tree edges: ``{e, e'}`` is an edge iff its 2-respecting cut is light.

    With ``exclude_stars`` cuts that isolate a single vertex do not count.
    The adjacency is materialized lazily as a boolean matrix indexed by the
    child vertices naming tree edges.
    """

    def __init__(self, ev: CutEvaluator, threshold, exclude_stars: bool = True):
        self.ev = ev
        self.threshold = _floor(threshold)
        self.exclude_stars = exclude_stars
        self.vertices = np.asarray(sorted(ev.tree.children), dtype=np.int64)
        self._adj: Optional[np.ndarray] = None

    def _allowed(self) -> np.ndarray:
        n = self.ev.tree.n
        if not self.exclude_stars:
            return np.ones((n, n), dtype=bool)
        s = _shore_sizes(self.ev.tree)
        return (s >= 2) & (s <= n - 2)

    @property
    def adjacency(self) -> np.ndarray:
        if self._adj is None:
            pm = self.ev.pair_matrix()
            ok = (pm <= self.threshold) & self._allowed()
            vs = self.vertices
            adj = ok[np.ix_(vs, vs)]
            np.fill_diagonal(adj, False)
            self._adj = adj
        return self._adj

    def is_edge(self, a: int, b: int) -> bool:
        """Edge test on positions ``a, b`` in ``vertices``."""
        return bool(self.adjacency[a, b])


def one_respecting_set(ev: CutEvaluator, threshold, exclude_stars: bool = False) -> list[int]:
    """Tree edges whose single cut weighs at most ``threshold``."""
    t = ev.tree
    thr = _floor(threshold)
    out = []
    for c in sorted(t.children):
        if exclude_stars and not 2 <= t.size[c] <= t.n - 2:
            continue
        if ev.single[c] <= thr:
            out.append(c)
    return out


def spanning_forest_L(lg: ImplicitLGraph, ledger: Optional[QueryLedger] = None, seed=0) -> list[tuple[int, int]]:
    """Spanning forest of ``L`` by Borůvka rounds.

    Each live component looks for one outgoing ``L`` edge with a simulated
    Grover search over (inside, outside) pairs, charged to ``ledger``.
    Components without an outgoing edge are complete and drop out.
    """
    k = len(lg.vertices)
    if k < 2:
        return []
    adj = lg.adjacency
    rng = generator(seed, "boruvka")
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    done: set[int] = set()
    forest: list[tuple[int, int]] = []
    while True:
        roots = np.array([find(x) for x in range(k)])
        comps: dict[int, np.ndarray] = {}
        for r in np.unique(roots).tolist():
            if r not in done:
                comps[r] = np.flatnonzero(roots == r)
        # a component with no outgoing edge is never touched again
        if not comps or len(np.unique(roots)) == 1:
            break
        found = []
        for r, inside in comps.items():
            outside = np.flatnonzero(roots != r)
            width = len(outside)

            def batch(idx, inside=inside, outside=outside, width=width):
                return adj[inside[idx // width], outside[idx % width]]

            space = SearchSpace(
                len(inside) * width,
                lambda i, b=batch: bool(b(np.array([i]))[0]),
                1,
                batch,
                ledger,
            )
            hit = grover_search(space, rng)
            if hit is None:
                done.add(r)
            else:
                found.append((int(inside[hit // width]), int(outside[hit % width])))
        if not found:
            break
        for a, b in found:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                forest.append((a, b))
    vs = lg.vertices
    return [(int(vs[a]), int(vs[b])) for a, b in forest]


def generating_set_for_tree(
    g: WeightedGraph,
    t: RootedTree,
    threshold,
    ledger: Optional[QueryLedger] = None,
    seed=0,
    exclude_stars: bool = True,
    ev: Optional[CutEvaluator] = None,
) -> list[TwoRespectId]:
    """At most ``2n - 3`` ids whose shores generate the atoms of all light 2-respecting shores."""
    ev = ev if ev is not None else build_evaluator(g, t)
    q: list[TwoRespectId] = [(c,) for c in one_respecting_set(ev, threshold, exclude_stars)]
    lg = ImplicitLGraph(ev, threshold, exclude_stars)
    if ledger is not None:
        with ledger.subroutine("spanning_forest_L"):
            forest = spanning_forest_L(lg, ledger, seed)
    else:
        forest = spanning_forest_L(lg, None, seed)
    q += [tuple(sorted(p)) for p in forest]
    return q


def atoms_by_hashing(t: RootedTree, q: list[TwoRespectId], seed=0) -> Partition:
    """Atoms of ``shore(q)``, correct with probability at least ``1 - 1/n``.

    Every shore gets a random value modulo ``n^3`` that is added to the keys
    of its vertices through subtree-adds; vertices end up with equal keys iff
    (barring collisions) no shore separates them.
    """
    n = t.n
    if not q:
        return Partition(np.zeros(n, dtype=np.int64))
    modulus = max(n, 2) ** 3
    vals = generator(seed, "hash").integers(0, modulus, size=len(q)).tolist()
    ops: list[tuple[int, int]] = []
    for fid, r in zip(q, vals):
        if len(fid) == 1:
            ops.append((fid[0], r))
            continue
        u, v = fid
        if t.is_ancestor(v, u):
            u, v = v, u
        if t.is_ancestor(u, v):
            ops += [(u, r), (v, -r)]
        else:
            ops += [(u, r), (v, r)]
    return Partition(subtree_add_batch(t, ops, modulus))


def hash_repeats(delta) -> int:
    return max(1, math.ceil(math.log2(1 / Fraction(delta))))


def tree_atoms(
    g: WeightedGraph,
    t: RootedTree,
    threshold,
    delta,
    ledger: Optional[QueryLedger] = None,
    seed=0,
    exclude_stars: bool = True,
) -> Partition:
    """Atoms of the light shores that 2-respect ``t``."""
    q = generating_set_for_tree(g, t, threshold, ledger, derive_seed(seed, "genset"), exclude_stars)
    parts = [atoms_by_hashing(t, q, derive_seed(seed, "hash", i)) for i in range(hash_repeats(delta))]
    return common_refinement(parts)


def learn_cut_atoms(
    h: WeightedGraph,
    threshold,
    delta=Fraction(1, 20),
    seed=0,
    ledger: Optional[QueryLedger] = None,
    exclude_stars: bool = True,
    trees=None,
) -> Partition:
    """Atoms of ``{X : w(Delta_h(X)) <= threshold}`` with probability at least ``1 - delta``.

    With ``exclude_stars`` (the default) only shores with at least two
    vertices on each side are considered.
    """
    n = h.n
    if n < 2:
        return Partition(np.zeros(n, dtype=np.int64))
    if not h.is_connected():
        raise GraphError("graph is disconnected")
    lam, _ = stoer_wagner(h)
    if Fraction(threshold) > THRESHOLD_CAP * lam:
        raise ValueError(f"threshold {threshold} exceeds (1 + 1/16) * lambda = {THRESHOLD_CAP * lam}")
    if exclude_stars and n < 4:
        return Partition(np.zeros(n, dtype=np.int64))
    if trees is None:
        trees = karger_trees(h, derive_seed(seed, "karger"))
    per_step = Fraction(delta) / (len(trees) + 1)
    parts = []
    for i, edges in enumerate(trees):
        t = root_tree(edges, 0, n)
        parts.append(tree_atoms(h, t, threshold, per_step, ledger, derive_seed(seed, "tree", i), exclude_stars))
    return common_refinement(parts)
