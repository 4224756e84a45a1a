"""Rooted spanning trees, Euler tours and exact evaluation of 2-respecting cuts.

A tree edge is named by its lower endpoint (the child), so a cut that
2-respects the tree is identified by a tuple of one or two child vertices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import GraphError, Shore, WeightedGraph

TwoRespectId = tuple  # (child,) or (child_a, child_b) with child_a < child_b


class TreeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RootedTree:
    """A spanning tree rooted at ``root``.

    ``tour`` holds the ``2(n-1)`` directed edges of the Euler tour.  For a
    non-root vertex ``first[u]`` is the tour index of the edge entering ``u``
    from its parent and ``last[u]`` the index of the last tour edge pointing
    into ``u``; the root uses ``-1`` and ``2n-3``.  ``pre``/``size`` give the
    same subtrees as contiguous preorder ranges.
    """

    n: int
    root: int
    parent: np.ndarray
    depth: np.ndarray
    tour: np.ndarray
    first: np.ndarray
    last: np.ndarray
    order: np.ndarray
    pre: np.ndarray
    size: np.ndarray

    @property
    def children(self) -> list[int]:
        """Vertices that name a tree edge (every vertex but the root), in preorder."""
        return [int(x) for x in self.order[1:]]

    def edges(self) -> list[tuple[int, int]]:
        return [(int(self.parent[c]), c) for c in self.children]

    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` is an ancestor of ``b`` (or equal to it)."""
        return bool(self.first[a] <= self.first[b] and self.last[b] <= self.last[a])

    def in_subtree(self, u: int, v: int) -> bool:
        return bool(self.first[u] <= self.first[v] <= self.last[u])

    def subtree_mask(self, u: int) -> np.ndarray:
        inside = np.zeros(self.n, dtype=bool)
        inside[self.order[self.pre[u]:self.pre[u] + self.size[u]]] = True
        return inside

    def descendants(self, u: int) -> list[int]:
        return sorted(int(x) for x in self.order[self.pre[u]:self.pre[u] + self.size[u]])


def root_tree(tree_edges: Iterable[Sequence[int]], root: int = 0, n: int | None = None) -> RootedTree:
    """Root the spanning tree given by ``tree_edges`` and compute its Euler tour."""
    tree_edges = [(int(a), int(b)) for a, b, *_ in tree_edges]
    if n is None:
        n = 1 + max((max(a, b) for a, b in tree_edges), default=0)
    if not 0 <= root < n:
        raise TreeError(f"root {root} outside [0, {n})")
    if len(tree_edges) != n - 1:
        raise TreeError(f"a spanning tree on {n} vertices has {n - 1} edges, got {len(tree_edges)}")
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in tree_edges:
        if a == b or not (0 <= a < n and 0 <= b < n):
            raise TreeError(f"bad tree edge ({a}, {b})")
        adj[a].append(b)
        adj[b].append(a)
    for nb in adj:
        nb.sort()

    parent = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    first = np.full(n, -1, dtype=np.int64)
    last = np.full(n, -1, dtype=np.int64)
    order: list[int] = []
    tour: list[tuple[int, int]] = []
    seen = np.zeros(n, dtype=bool)
    seen[root] = True
    stack = [(root, iter(adj[root]))]
    order.append(root)
    while stack:
        x, it = stack[-1]
        for y in it:
            if y == parent[x]:
                continue
            if seen[y]:
                raise TreeError("edges contain a cycle")
            seen[y] = True
            parent[y] = x
            depth[y] = depth[x] + 1
            first[y] = last[y] = len(tour)
            tour.append((x, y))
            order.append(y)
            stack.append((y, iter(adj[y])))
            break
        else:
            stack.pop()
            if stack:
                p = stack[-1][0]
                last[p] = len(tour)
                tour.append((x, p))
    if not seen.all():
        raise TreeError("edges do not span the vertex set")
    last[root] = max(len(tour) - 1, -1)

    order_arr = np.asarray(order, dtype=np.int64)
    pre = np.empty(n, dtype=np.int64)
    pre[order_arr] = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for x in reversed(order[1:]):
        size[parent[x]] += size[x]
    arrays = [parent, depth, np.asarray(tour, dtype=np.int64).reshape(-1, 2), first, last, order_arr, pre, size]
    for a in arrays:
        a.flags.writeable = False
    return RootedTree(n, root, *arrays)


def tree_from_parent(parent: Sequence[int], root: int) -> RootedTree:
    edges = [(int(p), c) for c, p in enumerate(parent) if c != root]
    return root_tree(edges, root, len(parent))


def _check_id(t: RootedTree, fid: TwoRespectId) -> tuple[int, ...]:
    fid = tuple(int(x) for x in fid)
    if len(fid) not in (1, 2) or len(set(fid)) != len(fid):
        raise TreeError(f"an id names one or two distinct tree edges, got {fid}")
    for c in fid:
        if not 0 <= c < t.n or c == t.root:
            raise TreeError(f"vertex {c} does not name a tree edge")
    return tuple(sorted(fid))


def edge_id(t: RootedTree, a: int, b: int) -> int:
    """The child vertex naming tree edge ``{a, b}``."""
    if t.parent[b] == a:
        return b
    if t.parent[a] == b:
        return a
    raise TreeError(f"({a}, {b}) is not a tree edge")


def shore_mask(t: RootedTree, fid: TwoRespectId) -> np.ndarray:
    fid = _check_id(t, fid)
    if len(fid) == 1:
        return t.subtree_mask(fid[0])
    u, v = fid
    if t.is_ancestor(v, u):
        u, v = v, u
    if t.is_ancestor(u, v):
        return t.subtree_mask(u) & ~t.subtree_mask(v)
    return t.subtree_mask(u) | t.subtree_mask(v)


def shore_of(t: RootedTree, fid: TwoRespectId) -> Shore:
    """The shore cut out by the tree edges of ``fid``; it never contains the root."""
    return Shore.from_bool(shore_mask(t, fid))


def crossing_tree_edges(t: RootedTree, member: np.ndarray) -> list[int]:
    """Tree edges (as child vertices) with exactly one endpoint in ``member``."""
    member = np.asarray(member, dtype=bool)
    kids = t.order[1:]
    return sorted(int(c) for c in kids[member[kids] != member[t.parent[kids]]])


def all_ids(t: RootedTree) -> list[TwoRespectId]:
    """Every element of N(T): single tree edges and unordered pairs of them."""
    kids = sorted(t.children)
    out: list[TwoRespectId] = [(c,) for c in kids]
    out += [(a, b) for i, a in enumerate(kids) for b in kids[i + 1:]]
    return out


class CutEvaluator:
    """Exact weights of all cuts that 1- or 2-respect a rooted tree.

    With vertices laid out in preorder every subtree is an interval, so
    ``M[u, v]``, the weight between ``T(u)`` and ``T(v)`` counted over ordered
    pairs, is a rectangle sum of the permuted weight matrix.  A 2D prefix
    table answers each rectangle in constant time.
    """

    def __init__(self, g: WeightedGraph, t: RootedTree):
        if g.n != t.n:
            raise GraphError("tree and graph disagree on vertex count")
        self.g = g
        self.tree = t
        n = g.n
        big = 2 * g.total_weight >= 2**62
        dtype = object if big else np.int64
        w = g.dense()[np.ix_(t.order, t.order)].astype(dtype)
        table = np.zeros((n + 1, n + 1), dtype=dtype)
        table[1:, 1:] = w.cumsum(axis=0).cumsum(axis=1)
        self._table = table
        lo = t.pre
        hi = t.pre + t.size
        self._lo, self._hi = lo, hi
        wdeg = g.weighted_degrees[t.order].astype(dtype)
        deg_prefix = np.concatenate([np.zeros(1, dtype=dtype), wdeg.cumsum()])
        inner = table[hi, hi] - table[lo, hi] - table[hi, lo] + table[lo, lo]
        # C[u] = weight of the single cut around T(u)
        self.single = deg_prefix[hi] - deg_prefix[lo] - inner

    def cross(self, u, v):
        """Ordered-pair weight between ``T(u)`` and ``T(v)``; works on arrays."""
        lo, hi, tb = self._lo, self._hi, self._table
        return tb[hi[u], hi[v]] - tb[lo[u], hi[v]] - tb[hi[u], lo[v]] + tb[lo[u], lo[v]]

    def eval(self, fid: TwoRespectId) -> int:
        fid = _check_id(self.tree, fid)
        if len(fid) == 1:
            return int(self.single[fid[0]])
        u, v = fid
        t = self.tree
        if t.is_ancestor(v, u):
            u, v = v, u
        cu, cv = int(self.single[u]), int(self.single[v])
        if t.is_ancestor(u, v):
            return cu - cv + 2 * int(self.cross(u, v) - self.cross(v, v))
        return cu + cv - 2 * int(self.cross(u, v))

    def pair_matrix(self) -> np.ndarray:
        """``P[u, v]`` = weight of the cut named by ``(u, v)``, for all vertex pairs.

        Entries on the diagonal or in the root's row and column are meaningless.
        """
        t = self.tree
        n = t.n
        idx = np.arange(n)
        uu, vv = np.meshgrid(idx, idx, indexing="ij")
        cross = self.cross(uu, vv)
        c = self.single
        fu, lu = t.first[:, None], t.last[:, None]
        fv, lv = t.first[None, :], t.last[None, :]
        u_above = (fu <= fv) & (lv <= lu)
        v_above = (fv <= fu) & (lu <= lv)
        diag = np.diagonal(cross)
        out = c[:, None] + c[None, :] - 2 * cross
        nested_u = c[:, None] - c[None, :] + 2 * (cross - diag[None, :])
        nested_v = c[None, :] - c[:, None] + 2 * (cross - diag[:, None])
        out = np.where(u_above, nested_u, out)
        out = np.where(v_above & ~u_above, nested_v, out)
        return out


def build_evaluator(g: WeightedGraph, t: RootedTree) -> CutEvaluator:
    return CutEvaluator(g, t)


def subtree_add_batch(t: RootedTree, ops: Iterable[tuple[int, int]], modulus: int | None = None) -> np.ndarray:
    """Key of every vertex after applying all subtree-adds ``(u, delta)``.

    A difference array over preorder positions followed by a prefix sum.
    With ``modulus`` all arithmetic is reduced modulo it.
    """
    ops = list(ops)
    diff = np.zeros(t.n + 1, dtype=np.int64)
    if ops:
        us = np.fromiter((u for u, _ in ops), dtype=np.int64, count=len(ops))
        ds = np.fromiter((d for _, d in ops), dtype=np.int64, count=len(ops))
        if modulus is not None:
            ds = ds % modulus
        np.add.at(diff, t.pre[us], ds)
        np.add.at(diff, t.pre[us] + t.size[us], -ds)
    if modulus is not None:
        diff %= modulus
    acc = np.cumsum(diff[:-1])
    if modulus is not None:
        acc %= modulus
    keys = np.empty(t.n, dtype=np.int64)
    keys[t.order] = acc
    return keys
