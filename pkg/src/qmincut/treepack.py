"""Tree packings and Karger's small set of spanning trees.

The chain is: normalize by the lightest edge, round to integers at 100x,
estimate the minimum cut (Matula), drop everything above the estimate with a
Nagamochi-Ibaraki certificate, sample a skeleton, then pack spanning trees
in the skeleton by matroid union.
"""
from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import GraphError, Partition, WeightedGraph, contract
from .rng import derive_seed, generator
from .solvers import stoer_wagner

log = logging.getLogger(__name__)

MATULA_EPS = Fraction(1, 2)
MATULA_C = 2 + MATULA_EPS          # lambda <= estimate <= MATULA_C * lambda
ROUND_FACTOR = 100
HPROP_DELTA = Fraction(1, 12)
C_SAMPLE = 8                       # skeleton rate p = C_SAMPLE * ln(n) / estimate
C_K = 3 * C_SAMPLE                 # recorded bound: tree count <= C_K * ln(n)
SKELETON_RETRIES = 8


# Nagamochi-Ibaraki scan


def ni_scan(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Interval labels ``(q_start, q_end]`` per edge from a maximum-adjacency scan.

    Scanning ``v`` gives every edge to an unscanned ``u`` the interval
    ``(r(u), r(u) + w]`` and raises ``r(u)``.  Units of an edge at level ``q``
    belong to the ``q``-th forest of the decomposition, so any cut holding such
    a unit weighs at least ``q``.
    """
    n = g.n
    w = g._dense
    idx = np.full((n, n), -1, dtype=np.int64)
    idx[g.u, g.v] = np.arange(g.m)
    idx[g.v, g.u] = np.arange(g.m)
    r = np.zeros(n, dtype=np.int64)
    scanned = np.zeros(n, dtype=bool)
    q_start = np.zeros(g.m, dtype=np.int64)
    q_end = np.zeros(g.m, dtype=np.int64)
    key = np.where(scanned, -1, r)
    for _ in range(n):
        v = int(np.argmax(key))
        scanned[v] = True
        row = w[v]
        nb = np.flatnonzero((row > 0) & ~scanned)
        e = idx[v, nb]
        q_start[e] = r[nb]
        r[nb] += row[nb]
        q_end[e] = r[nb]
        key = np.where(scanned, -1, r)
    return q_start, q_end


def ni_certificate(g: WeightedGraph, c: int) -> WeightedGraph:
    """Subgraph of total weight at most ``c (n-1)`` keeping every cut of weight <= ``c`` intact."""
    if c < 1:
        raise ValueError("certificate threshold must be >= 1")
    q_start, q_end = ni_scan(g)
    kept = np.clip(np.minimum(q_end, c) - q_start, 0, None)
    return g.with_weights(kept)


# Matula


def matula_estimate(g: WeightedGraph) -> int:
    """Integer ``L`` with ``lambda(g) <= L <= 2.5 lambda(g)``.

    Each round records the minimum weighted degree ``d`` and contracts every
    edge whose scan interval ends above ``d / 2.5``; such endpoints are more
    than that well connected, so the contraction keeps the minimum cut unless
    the cut already exceeds ``d / 2.5``.
    """
    if g.n < 2:
        raise GraphError("need at least two vertices")
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    best = None
    cur = g
    while cur.n > 1:
        d = int(cur.weighted_degrees.min())
        best = d if best is None else min(best, d)
        _, q_end = ni_scan(cur)
        heavy = q_end * MATULA_C.numerator > d * MATULA_C.denominator
        parent = list(range(cur.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in zip(cur.u[heavy].tolist(), cur.v[heavy].tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        cur = contract(cur, Partition([find(x) for x in range(cur.n)]))
    return int(best)


# skeletons and rounding


def skeleton_sample(g: WeightedGraph, p, seed=0) -> WeightedGraph:
    """Draw ``ceil(p W)`` edges of the multigraph view uniformly with replacement.

    ``W`` is the total weight, i.e. the edge count of the multigraph in which
    an edge of weight ``w`` is ``w`` parallel unit edges.  The result carries
    the number of draws per edge as its weight.
    """
    p = Fraction(p)
    if not 0 < p <= 1:
        raise ValueError("sampling rate must lie in (0, 1]")
    total = g.total_weight
    draws = math.ceil(p * total)
    rng = generator(seed, "skeleton")
    if draws == 0 or g.m == 0:
        return g.with_weights(np.zeros(g.m, dtype=np.int64), 1)
    pick = rng.choice(g.m, size=draws, p=g.w / total)
    counts = np.bincount(pick, minlength=g.m)
    return g.with_weights(counts, 1)


def round_weights(g: WeightedGraph) -> WeightedGraph:
    """Integer graph with weights ``round(100 w)`` of the real weights ``w = stored / scale``.

    The returned graph has scale 1: its integers are the scaled-up weights.
    """
    s = g.scale
    if g.m and Fraction(int(g.w.min())) < s:
        raise ValueError("every real weight must be at least 1 before rounding")
    num, den = s.numerator, s.denominator
    # round(100 * w * den / num) with halves rounded up
    out = [(2 * ROUND_FACTOR * x * den + num) // (2 * num) for x in g.w.tolist()]
    return WeightedGraph(g.n, g.u, g.v, out, 1)


def normalize(g: WeightedGraph) -> WeightedGraph:
    """Rescale so that the lightest edge weighs exactly 1."""
    return WeightedGraph(g.n, g.u, g.v, g.w, g.min_weight())


# tree packing


@dataclass
class TreePacking:
    """Spanning trees of ``host`` (as canonical edge indices) with positive weights."""

    host: WeightedGraph
    trees: list[tuple[int, ...]]
    weights: list[Fraction] = field(default_factory=list)

    @property
    def value(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def load(self) -> list[Fraction]:
        """Total tree weight on each host edge."""
        out = [Fraction(0)] * self.host.m
        for tree, wt in zip(self.trees, self.weights):
            for e in tree:
                out[e] += wt
        return out

    def is_feasible(self) -> bool:
        return all(x <= int(c) for x, c in zip(self.load(), self.host.w)) and all(
            is_spanning_tree(self.host, t) for t in self.trees
        )

    def edge_lists(self) -> list[list[tuple[int, int]]]:
        u, v = self.host.u, self.host.v
        return [[(int(u[e]), int(v[e])) for e in t] for t in self.trees]


def is_spanning_tree(g: WeightedGraph, edges) -> bool:
    """``edges`` holds edge indices of ``g`` or ``(u, v)`` pairs."""
    edges = list(edges)
    if len(edges) != g.n - 1:
        return False
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        if isinstance(e, (tuple, list)):
            if g.edge_index(*e) is None:
                return False
            a, b = e
        else:
            a, b = g.u[e], g.v[e]
        ra, rb = find(int(a)), find(int(b))
        if ra == rb:
            return False
        parent[ra] = rb
    return True


class _Forests:
    """k edge-disjoint forests over a multigraph given by per-edge capacities.

    Growth is by matroid partition: a new edge copy either drops into a forest
    where it closes no cycle, or displaces a cycle edge that moves elsewhere,
    found by breadth-first search over such exchanges.  A failed search proves
    that the vertices it reached are spanned by every forest, so later edges
    inside that cluster are skipped outright.
    """

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, cap: np.ndarray, k: int):
        self.n, self.k = n, k
        self.u, self.v = u.tolist(), v.tolist()
        self.cap = np.minimum(cap, k).tolist()
        self.adj: list[list[dict[int, int]]] = [[{} for _ in range(n)] for _ in range(k)]
        self.home: list[set[int]] = [set() for _ in range(len(self.u))]
        self.size = 0
        self.cluster = list(range(n))

    def _cfind(self, x: int) -> int:
        c = self.cluster
        while c[x] != x:
            c[x] = c[c[x]]
            x = c[x]
        return x

    def _put(self, e: int, i: int) -> None:
        a, b = self.u[e], self.v[e]
        self.adj[i][a][b] = e
        self.adj[i][b][a] = e
        self.home[e].add(i)

    def _take(self, e: int, i: int) -> None:
        a, b = self.u[e], self.v[e]
        del self.adj[i][a][b]
        del self.adj[i][b][a]
        self.home[e].discard(i)

    def _path(self, i: int, a: int, b: int):
        """Edges on the forest-``i`` path from ``a`` to ``b``, or ``None``."""
        adj = self.adj[i]
        prev = {a: (-1, -1)}
        dq = deque([a])
        while dq:
            x = dq.popleft()
            if x == b:
                out = []
                while x != a:
                    x, e = prev[x]
                    out.append(e)
                return out
            for y, e in adj[x].items():
                if y not in prev:
                    prev[y] = (x, e)
                    dq.append(y)
        return None

    def greedy(self, order) -> None:
        for i in range(self.k):
            parent = list(range(self.n))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            grown = 0
            for e in order:
                if len(self.home[e]) >= self.cap[e]:
                    continue
                ra, rb = find(self.u[e]), find(self.v[e])
                if ra != rb:
                    parent[ra] = rb
                    self._put(e, i)
                    grown += 1
                    if grown == self.n - 1:
                        break
            self.size += grown

    def insert(self, e0: int) -> bool:
        """Add one more copy of edge ``e0``; False if no exchange sequence exists."""
        if self._cfind(self.u[e0]) == self._cfind(self.v[e0]):
            return False
        pred: dict[tuple[int, int], tuple[int, int] | None] = {(e0, -1): None}
        dq = deque([(e0, -1)])
        while dq:
            node = dq.popleft()
            e, src = node
            a, b = self.u[e], self.v[e]
            for i in range(self.k):
                if i == src or i in self.home[e]:
                    continue
                path = self._path(i, a, b)
                if path is None:
                    self._augment(node, i, pred)
                    self.size += 1
                    return True
                for f in path:
                    key = (f, i)
                    if key not in pred:
                        pred[key] = node
                        dq.append(key)
        # every reached edge is spanned in every forest: merge its endpoints
        for e, _ in pred:
            ra, rb = self._cfind(self.u[e]), self._cfind(self.v[e])
            if ra != rb:
                self.cluster[ra] = rb
        return False

    def _augment(self, node, dest: int, pred) -> None:
        while node is not None:
            e, src = node
            if src >= 0:
                self._take(e, src)
            self._put(e, dest)
            dest = src
            node = pred[node]

    def fill(self, order) -> None:
        target = self.k * (self.n - 1)
        self.greedy(order)
        for e in order:
            while self.size < target and len(self.home[e]) < self.cap[e]:
                if not self.insert(e):
                    break
            if self.size >= target:
                break

    def trees(self) -> list[tuple[int, ...]]:
        out = []
        for i in range(self.k):
            es = {e for x in range(self.n) for e in self.adj[i][x].values()}
            out.append(tuple(sorted(es)))
        return out


def pack_trees(h: WeightedGraph, seed=0) -> TreePacking:
    """Tree packing of value at least ``lambda(h) / 2``.

    First try ``ceil(lambda/2)`` edge-disjoint spanning trees of ``h`` viewed as
    a multigraph, each of weight 1.  When that many do not exist, pack
    ``lambda`` trees in the doubled graph instead (they always exist) and give
    each weight 1/2.
    """
    if h.n < 2:
        raise GraphError("need at least two vertices")
    if not h.is_connected():
        raise GraphError("graph is disconnected")
    lam, _ = stoer_wagner(h)
    order = generator(seed, "pack").permutation(h.m).tolist()
    k = -(-lam // 2)
    for cap, count, wt in ((h.w, k, Fraction(1)), (2 * h.w, lam, Fraction(1, 2))):
        if int(np.minimum(cap, count).sum()) < count * (h.n - 1):
            continue
        forests = _Forests(h.n, h.u, h.v, cap, count)
        forests.fill(order)
        if forests.size == count * (h.n - 1):
            trees = forests.trees()
            return TreePacking(h, trees, [wt] * len(trees))
    raise AssertionError("matroid partition fell short of the Nash-Williams bound")


def hprop_graph(g: WeightedGraph, seed=0) -> WeightedGraph:
    """Sparse skeleton ``H`` of an integer graph whose minimum cut is O(log n).

    Matula estimate, then a certificate at ``(1 + 1/12)`` times the estimate,
    then skeleton sampling at rate ``C_SAMPLE ln(n) / estimate``.
    """
    est = matula_estimate(g)
    thr = math.ceil((1 + HPROP_DELTA) * est)
    g2 = ni_certificate(g, thr)
    p = Fraction(C_SAMPLE * math.log(max(g.n, 2))).limit_denominator(10**6) / est
    if p >= 1:
        return g2
    for attempt in range(SKELETON_RETRIES):
        h = skeleton_sample(g2, p, derive_seed(seed, "hprop", attempt))
        if h.n == g.n and h.is_connected():
            return h
    log.debug("skeleton stayed disconnected after %d draws; using the certificate", SKELETON_RETRIES)
    return g2


def karger_packing(g: WeightedGraph, seed=0) -> TreePacking:
    """Tree packing of the skeleton built from ``g``; its trees are spanning trees of ``g``."""
    if g.n < 2:
        raise GraphError("need at least two vertices")
    if not g.is_connected():
        raise GraphError("graph is disconnected")
    g1 = round_weights(normalize(g))
    h = hprop_graph(g1, seed)
    return pack_trees(h, seed)


def karger_trees(g: WeightedGraph, seed=0) -> list[list[tuple[int, int]]]:
    """O(log n) spanning trees of ``g`` such that, with high probability, every
    (1 + 1/16)-near minimum cut 2-respects a quarter of them."""
    return karger_packing(g, seed).edge_lists()


def trees_to_json(g: WeightedGraph, trees: list[list[tuple[int, int]]]) -> str:
    """Each tree as a list of indices into the canonical edge order of ``g``."""
    out = []
    for t in trees:
        idx = []
        for a, b in t:
            e = g.edge_index(a, b)
            if e is None:
                raise GraphError(f"({a}, {b}) is not an edge of the graph")
            idx.append(e)
        out.append(sorted(idx))
    return json.dumps(out, separators=(",", ":"))
