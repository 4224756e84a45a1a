"""Reference minimum-cut solvers: exhaustive enumeration and Stoer-Wagner."""
from __future__ import annotations

import numpy as np

from .graph import GraphError, Shore, WeightedGraph

BRUTE_LIMIT = 24
_CHUNK = 1 << 15


def enumerate_cuts(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    """Weights of all nontrivial cuts, one per complementary pair.

    Shores are encoded as bitmasks over vertices ``0..n-2`` (vertex ``n-1`` is
    never in the shore); masks run over ``1 .. 2^(n-1)-1``.
    """
    n = g.n
    if n < 2:
        raise GraphError("need at least two vertices")
    if n > BRUTE_LIMIT:
        raise GraphError(f"exhaustive enumeration capped at n = {BRUTE_LIMIT}")
    total = (1 << (n - 1)) - 1
    masks = np.arange(1, total + 1, dtype=np.int64)
    weights = np.empty(total, dtype=np.int64)
    u, v, w = g.u, g.v, g.w
    for start in range(0, total, _CHUNK):
        chunk = masks[start:start + _CHUNK]
        bu = (chunk[:, None] >> u[None, :]) & 1
        bv = (chunk[:, None] >> v[None, :]) & 1
        weights[start:start + _CHUNK] = ((bu ^ bv) * w[None, :]).sum(axis=1)
    return masks, weights


def brute_min_cut(g: WeightedGraph) -> tuple[int, Shore]:
    masks, weights = enumerate_cuts(g)
    i = int(np.argmin(weights))
    return int(weights[i]), Shore(g.n, int(masks[i]))


def stoer_wagner(g: WeightedGraph) -> tuple[int, Shore]:
    """Exact minimum cut by maximum-adjacency phases on a dense matrix."""
    n = g.n
    if n < 2:
        raise GraphError("need at least two vertices")
    a = g.dense()
    # members[i] = original vertices merged into super-vertex i
    members = [[i] for i in range(n)]
    alive = np.ones(n, dtype=bool)
    best = None
    best_set: list[int] = []
    for phase in range(n - 1):
        idx = np.flatnonzero(alive)
        start = int(idx[0])
        conn = a[start].copy()
        in_a = ~alive.copy()
        in_a[start] = True
        prev, last = start, start
        for _ in range(len(idx) - 1):
            cand = np.where(in_a, -1, conn)
            nxt = int(np.argmax(cand))
            in_a[nxt] = True
            conn += a[nxt]
            prev, last = last, nxt
        cut = int(cand[last])
        if best is None or cut < best:
            best = cut
            best_set = list(members[last])
        # merge last into prev
        a[prev] += a[last]
        a[:, prev] += a[:, last]
        a[prev, prev] = 0
        a[last, :] = 0
        a[:, last] = 0
        alive[last] = False
        members[prev].extend(members[last])
    return int(best), Shore.from_vertices(n, best_set)
