"""Exact integer-weighted undirected graphs, cut shores, partitions and atoms."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_TOTAL_WEIGHT = 2**63 - 1
DENSE_LIMIT = 4096


class GraphError(ValueError):
    pass


class InvalidCut(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


class WeightedGraph:
    """Undirected graph on vertices ``0..n-1`` with positive integer edge weights.

    Edges are stored once, canonically as ``u < v`` sorted lexicographically.
    ``scale`` records a fixed-point factor: the real weight of an edge is
    ``w / scale``.  Everything inside the package works on the integers.
    """

    def __init__(self, n: int, u, v, w, scale=1):
        n = int(n)
        if n < 0:
            raise GraphError("negative vertex count")
        u = np.asarray(u, dtype=np.int64).reshape(-1)
        v = np.asarray(v, dtype=np.int64).reshape(-1)
        w = np.asarray(w, dtype=np.int64).reshape(-1)
        if not (len(u) == len(v) == len(w)):
            raise GraphError("edge arrays differ in length")
        if len(u):
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise GraphError("vertex id out of range")
            if np.any(u == v):
                raise GraphError("self-loop")
            if np.any(w <= 0):
                raise GraphError("stored edge weights must be positive")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if len(lo) > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                i = int(np.argmax(dup))
                raise GraphError(f"duplicate vertex pair ({lo[i]}, {hi[i]})")
        if sum(int(x) for x in w) > MAX_TOTAL_WEIGHT:
            raise GraphError("total weight exceeds 2^63-1")
        scale = _as_fraction(scale)
        if scale <= 0:
            raise GraphError("scale must be positive")
        self.n = n
        self.u, self.v, self.w = lo, hi, w
        for a in (self.u, self.v, self.w):
            a.flags.writeable = False
        self.scale = scale

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence], scale=1, merge: bool = False) -> "WeightedGraph":
        """Build from ``(u, v, weight)`` triples; zero weights are dropped.

        With ``merge`` parallel pairs are summed, otherwise they are rejected.
        """
        edges = [(int(a), int(b), int(c)) for a, b, c in edges]
        if any(c < 0 for _, _, c in edges):
            raise GraphError("negative weight")
        edges = [e for e in edges if e[2] > 0]
        if merge:
            acc: dict[tuple[int, int], int] = {}
            for a, b, c in edges:
                if a == b:
                    raise GraphError("self-loop")
                key = (a, b) if a < b else (b, a)
                acc[key] = acc.get(key, 0) + c
            edges = [(a, b, c) for (a, b), c in acc.items()]
        if not edges:
            return cls(n, [], [], [], scale)
        a, b, c = zip(*edges)
        return cls(n, a, b, c, scale)

    # basic quantities

    @property
    def m(self) -> int:
        return len(self.w)

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    @cached_property
    def total_weight(self) -> int:
        return sum(int(x) for x in self.w)

    @cached_property
    def weighted_degrees(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=np.int64)
        np.add.at(d, self.u, self.w)
        np.add.at(d, self.v, self.w)
        return d

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self._csr[0])

    def min_weight(self) -> int:
        if not self.m:
            raise GraphError("edgeless graph")
        return int(self.w.min())

    def max_weight(self) -> int:
        if not self.m:
            raise GraphError("edgeless graph")
        return int(self.w.max())

    def weight_ratio(self) -> Fraction:
        """Edge-weight ratio: largest over smallest edge weight."""
        return Fraction(self.max_weight(), self.min_weight())

    # adjacency

    @cached_property
    def _csr(self):
        src = np.concatenate([self.u, self.v])
        dst = np.concatenate([self.v, self.u])
        wt = np.concatenate([self.w, self.w])
        order = np.lexsort((dst, src))
        src, dst, wt = src[order], dst[order], wt[order]
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        return indptr, dst, wt

    def neighbors(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbors of ``x`` in the fixed adjacency order, with weights."""
        indptr, dst, wt = self._csr
        return dst[indptr[x]:indptr[x + 1]], wt[indptr[x]:indptr[x + 1]]

    @cached_property
    def _pair_index(self) -> dict[tuple[int, int], int]:
        return {(a, b): i for i, (a, b) in enumerate(zip(self.u.tolist(), self.v.tolist()))}

    def weight(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        i = self._pair_index.get((a, b))
        return 0 if i is None else int(self.w[i])

    def edge_index(self, a: int, b: int) -> int | None:
        if a > b:
            a, b = b, a
        return self._pair_index.get((a, b))

    def dense(self) -> np.ndarray:
        """Symmetric weight matrix (int64); only for moderate ``n``."""
        if self.n > DENSE_LIMIT:
            raise GraphError(f"dense matrix refused for n > {DENSE_LIMIT}")
        return self._dense.copy()

    @cached_property
    def _dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        a[self.u, self.v] = self.w
        a[self.v, self.u] = self.w
        a.flags.writeable = False
        return a

    # connectivity

    def component_labels(self) -> np.ndarray:
        parent = list(range(self.n))

        def find(x):
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for a, b in zip(self.u.tolist(), self.v.tolist()):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        roots = np.array([find(x) for x in range(self.n)], dtype=np.int64)
        _, labels = np.unique(roots, return_inverse=True)
        return labels

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return int(self.component_labels().max()) == 0

    # misc

    def with_weights(self, w, scale=None) -> "WeightedGraph":
        """Same edge set (zero weights dropped) with new integer weights."""
        w = np.asarray(w, dtype=np.int64)
        keep = w > 0
        return WeightedGraph(self.n, self.u[keep], self.v[keep], w[keep], self.scale if scale is None else scale)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.scale == other.scale
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m}, total={self.total_weight}, scale={self.scale})"

    # serialization

    def to_dict(self) -> dict:
        d = {"n": self.n, "edges": [[a, b, str(c)] for a, b, c in self.edges]}
        if self.scale != 1:
            d["scale"] = str(self.scale)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "WeightedGraph":
        """Parse the graph JSON object.

        Weight strings may be decimal integers or decimal fractions such as
        ``"1.25"``; fractional inputs are brought to a common fixed-point scale.
        """
        try:
            n = int(d["n"])
            raw = d["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphError(f"malformed graph object: {exc}") from None
        declared = _as_fraction(d.get("scale", 1))
        vals = []
        for item in raw:
            if len(item) != 3:
                raise GraphError(f"edge entry must be [u, v, weight]: {item!r}")
            a, b, c = item
            try:
                vals.append((int(a), int(b), Fraction(str(c))))
            except (ValueError, ZeroDivisionError):
                raise GraphError(f"bad weight {c!r}") from None
        denom = 1
        for _, _, c in vals:
            denom = denom * c.denominator // np.gcd(denom, c.denominator)
        scale = declared * denom
        edges = [(a, b, int(c * denom)) for a, b, c in vals]
        return cls.from_edges(n, edges, scale=scale)

    @classmethod
    def loads(cls, text: str) -> "WeightedGraph":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from None
        return cls.from_dict(d)


@dataclass(frozen=True)
class Shore:
    """A vertex subset over ``[0, n)`` stored as an integer bitmask."""

    n: int
    mask: int

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> "Shore":
        mask = 0
        for x in vertices:
            x = int(x)
            if not 0 <= x < n:
                raise ValueError(f"vertex {x} outside [0, {n})")
            mask |= 1 << x
        return cls(n, mask)

    @classmethod
    def from_bool(cls, member) -> "Shore":
        member = np.asarray(member, dtype=bool)
        packed = np.packbits(member, bitorder="little")
        return cls(len(member), int.from_bytes(packed.tobytes(), "little"))

    def to_bool(self) -> np.ndarray:
        nbytes = (self.n + 7) // 8
        raw = np.frombuffer(self.mask.to_bytes(max(nbytes, 1), "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n].astype(bool)

    def vertices(self) -> list[int]:
        return np.flatnonzero(self.to_bool()).tolist()

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def complement(self) -> "Shore":
        return Shore(self.n, ((1 << self.n) - 1) ^ self.mask)

    def is_nontrivial(self) -> bool:
        return 0 < self.size < self.n

    def separates(self, a: int, b: int) -> bool:
        return ((self.mask >> a) & 1) != ((self.mask >> b) & 1)

    def __contains__(self, x: int) -> bool:
        return bool((self.mask >> x) & 1)


class Partition:
    """Partition of ``[0, n)``; block ids are dense and numbered by first vertex."""

    __slots__ = ("assignment", "block_count")

    def __init__(self, labels):
        labels = np.asarray(labels).reshape(-1)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        # renumber so that block ids follow the order of first appearance
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        self.assignment = rank[inverse].astype(np.int64)
        self.assignment.flags.writeable = False
        self.block_count = len(first)

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        labels = np.full(n, -1, dtype=np.int64)
        for i, block in enumerate(blocks):
            for x in block:
                if labels[x] != -1:
                    raise ValueError(f"vertex {x} in two blocks")
                labels[x] = i
        if np.any(labels < 0):
            raise ValueError("blocks do not cover every vertex")
        return cls(labels)

    @property
    def n(self) -> int:
        return len(self.assignment)

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for x, b in enumerate(self.assignment.tolist()):
            out[b].append(x)
        return out

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` lies inside a block of ``other``."""
        return common_refinement([self, other]).block_count == self.block_count

    def to_dict(self) -> dict:
        return {"blocks": self.blocks()}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __hash__(self) -> int:
        return hash(self.assignment.tobytes())

    def __repr__(self) -> str:
        return f"Partition({self.blocks()})"


def common_refinement(parts: Sequence[Partition]) -> Partition:
    if not parts:
        raise ValueError("need at least one partition")
    sig = np.stack([p.assignment for p in parts], axis=1)
    _, labels = np.unique(sig, axis=0, return_inverse=True)
    return Partition(labels.reshape(-1))


def cut_weight(g: WeightedGraph, x: Shore) -> int:
    """Total weight of edges with exactly one endpoint in ``x``."""
    if x.n != g.n:
        raise InvalidCut(f"shore over {x.n} vertices, graph has {g.n}")
    if not x.is_nontrivial():
        raise InvalidCut("shore must be neither empty nor the full vertex set")
    member = x.to_bool()
    crossing = member[g.u] != member[g.v]
    return int(g.w[crossing].sum())


def total_weight(g: WeightedGraph) -> int:
    return g.total_weight


def atoms(v_count: int, fam: Iterable[Shore]) -> Partition:
    """Coarsest partition in which no shore of ``fam`` splits a block."""
    fam = list(fam)
    if not fam:
        return Partition(np.zeros(v_count, dtype=np.int64))
    for s in fam:
        if s.n != v_count:
            raise ValueError(f"shore over {s.n} vertices, expected {v_count}")
    sig = np.stack([s.to_bool() for s in fam], axis=1)
    _, labels = np.unique(sig, axis=0, return_inverse=True)
    return Partition(labels.reshape(-1))


def union_generating(fam1: Sequence[Shore], fam2: Sequence[Shore]) -> list[Shore]:
    """Concatenate two generating sets; the result generates the atoms of the union."""
    ns = {s.n for s in fam1} | {s.n for s in fam2}
    if len(ns) > 1:
        raise ValueError(f"families over different vertex counts: {sorted(ns)}")
    return list(fam1) + list(fam2)


def contract(g: WeightedGraph, p: Partition) -> WeightedGraph:
    """Quotient graph on the blocks of ``p``; parallel crossing edges are summed."""
    if p.n != g.n:
        raise ValueError("partition and graph disagree on vertex count")
    bu = p.assignment[g.u]
    bv = p.assignment[g.v]
    keep = bu != bv
    bu, bv, w = bu[keep], bv[keep], g.w[keep]
    lo, hi = np.minimum(bu, bv), np.maximum(bu, bv)
    if len(lo) == 0:
        return WeightedGraph(p.block_count, [], [], [], g.scale)
    key = lo * p.block_count + hi
    uniq, inv = np.unique(key, return_inverse=True)
    summed = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(summed, inv, w)
    return WeightedGraph(p.block_count, uniq // p.block_count, uniq % p.block_count, summed, g.scale)
