"""The query algorithm for minimum cut, end to end.

Steps: minimum star cut, edge-weight range, cut sparsifier, near-minimum
cut atoms of the sparsifier, contraction of the input by those atoms, and
an exact minimum cut of the contraction.  Only the first three steps and the
contraction touch the input oracle.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .cutatoms import learn_cut_atoms
from .graph import GraphError, Partition, Shore, WeightedGraph
from .query import (
    MATRIX,
    Faults,
    OracleHandle,
    QueryLedger,
    SearchSpace,
    bounded_learn,
    ceil_sqrt,
    min_find,
)
from .rng import derive_seed, generator
from .solvers import stoer_wagner
from .sparsify import cut_sparsifier

log = logging.getLogger(__name__)

SPARSIFIER_EPS = Fraction(1, 100)
ATOM_SLACK = Fraction(1, 100)
BUDGET_FACTOR = 100
DELTA = Fraction(1, 20)


class BudgetExceeded(RuntimeError):
    """The contraction had more cross edges than the budget allows."""


def contraction_bound(tau, n: int, eps=Fraction(1, 10)) -> Fraction:
    """Weight bound ``68 tau n / (1 - eps)^2`` for contracting near-minimum non-star atoms."""
    eps = Fraction(eps)
    return Fraction(68) * Fraction(tau) * n / (1 - eps) ** 2


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(n, 1)
    return a.astype(np.int64), b.astype(np.int64)


def _array_slots(h: OracleHandle) -> tuple[np.ndarray, np.ndarray]:
    """All ``(vertex, index)`` positions of the adjacency array, index 1-based."""
    deg = h.all_degrees()
    owner = np.repeat(np.arange(h.n, dtype=np.int64), deg)
    start = np.cumsum(deg) - deg
    idx = np.arange(len(owner), dtype=np.int64) - np.repeat(start, deg) + 1
    return owner, idx


def _weighted_degree_batch(h: OracleHandle):
    if h.model == MATRIX:
        n = h.n

        def f(vs):
            vs = np.asarray(vs, dtype=np.int64)
            cols = np.arange(n - 1)[None, :]
            others = cols + (cols >= vs[:, None])
            a = np.repeat(vs, n - 1)
            return h.matrix_query_batch(a, others.reshape(-1)).reshape(len(vs), n - 1).sum(axis=1)

        return f
    deg = h.all_degrees()

    def g(vs):
        vs = np.asarray(vs, dtype=np.int64)
        d = deg[vs]
        owner = np.repeat(vs, d)
        start = np.cumsum(d) - d
        idx = np.arange(int(d.sum()), dtype=np.int64) - np.repeat(start, d) + 1
        _, w = h.array_query_batch(owner, idx)
        out = np.zeros(len(vs), dtype=np.int64)
        np.add.at(out, np.repeat(np.arange(len(vs)), d), w)
        return out

    return g


def _space(size, batch, cost, ledger) -> SearchSpace:
    return SearchSpace(size, lambda i: batch(np.array([i]))[0], cost, batch, ledger)


def find_min_star(h: OracleHandle, delta=DELTA, seed=0, faults: Optional[Faults] = None) -> tuple[int, int]:
    """A vertex of minimum weighted degree and that degree."""
    n = h.n
    if n < 2:
        raise GraphError("need at least two vertices")
    rng = generator(seed, "min_star")
    wdeg = _weighted_degree_batch(h)
    ledger = h.ledger
    with ledger.subroutine("find_min_star"):
        if h.model == MATRIX:
            v = min_find(_space(n, wdeg, n - 1, ledger), rng, faults)
            with ledger.simulating():
                return v, int(wdeg([v])[0])
        deg = h.all_degrees()
        zero = np.flatnonzero(deg == 0)
        if len(zero):
            return int(zero[0]), 0
        best: Optional[tuple[int, int]] = None
        top = max(1, math.ceil(math.log2(n)) + 1)
        for ell in range(1, top + 1):
            bucket = np.flatnonzero((deg >= 1 << (ell - 1)) & (deg < 1 << ell))
            if not len(bucket):
                continue

            def f(idx, bucket=bucket):
                return wdeg(bucket[np.asarray(idx)])

            j = min_find(_space(len(bucket), f, 1 << ell, ledger), rng, faults)
            with ledger.simulating():
                val = int(f([j])[0])
            if best is None or val < best[1]:
                best = (int(bucket[j]), val)
        return best


def _weight_extreme(h: OracleHandle, largest: bool, seed, faults) -> int:
    rng = generator(seed, "max_weight" if largest else "min_weight")
    ledger = h.ledger
    if h.model == MATRIX:
        a, b = _pairs(h.n)

        def raw(idx):
            return h.matrix_query_batch(a[idx], b[idx])
    else:
        owner, slot = _array_slots(h)
        if not len(owner):
            raise GraphError("edgeless graph")

        def raw(idx):
            return h.array_query_batch(owner[idx], slot[idx])[1]

    if largest:
        def val(idx):
            return -raw(np.asarray(idx))
    else:
        big = np.iinfo(np.int64).max

        def val(idx):
            w = raw(np.asarray(idx))
            return np.where(w > 0, w, big)

    size = len(a) if h.model == MATRIX else len(owner)
    if size == 0:
        raise GraphError("edgeless graph")
    i = min_find(_space(size, val, 1, ledger), rng, faults)
    with ledger.simulating():
        w = int(raw(np.array([i]))[0])
    # an injected failure may land on a non-edge; let the caller see it
    if w <= 0 and faults is None:
        raise GraphError("edgeless graph")
    return w


def find_max_weight(h: OracleHandle, delta=DELTA, seed=0, faults: Optional[Faults] = None) -> int:
    with h.ledger.subroutine("find_max_weight"):
        return _weight_extreme(h, True, seed, faults)


def find_min_weight(h: OracleHandle, delta=DELTA, seed=0, faults: Optional[Faults] = None) -> int:
    with h.ledger.subroutine("find_min_weight"):
        return _weight_extreme(h, False, seed, faults)


def learn_contraction(
    h: OracleHandle,
    p: Partition,
    budget: int,
    delta=DELTA,
    seed=0,
    faults: Optional[Faults] = None,
) -> Optional[WeightedGraph]:
    """``contract(g, p)`` learned through the oracle, or ``None`` past ``budget`` cross edges."""
    if p.n != h.n:
        raise ValueError("partition and graph disagree on vertex count")
    budget = int(budget)
    rng = generator(seed, "contraction")
    block = p.assignment
    ledger = h.ledger
    with ledger.subroutine("learn_contraction"):
        if h.model == MATRIX:
            a, b = _pairs(h.n)

            def marked(idx):
                idx = np.asarray(idx)
                w = h.matrix_query_batch(a[idx], b[idx])
                return (w > 0) & (block[a[idx]] != block[b[idx]])

            t = max(budget, 1)
            size = len(a)
        else:
            owner, slot = _array_slots(h)

            def marked(idx):
                idx = np.asarray(idx)
                nb, _ = h.array_query_batch(owner[idx], slot[idx])
                return block[owner[idx]] != block[nb]

            # every cross edge shows up once from each endpoint
            t = max(2 * budget, 1)
            size = len(owner)
        if size == 0:
            return WeightedGraph(p.block_count, [], [], [], h.graph.scale)
        res = bounded_learn(_space(size, marked, 1, ledger), t, rng, faults)
        found = np.asarray(res.items, dtype=np.int64)
        if res.exceeded:
            return None
        if h.model == MATRIX:
            if len(found) > budget:
                return None
            w = h.matrix_query_batch(a[found], b[found])
            bu, bv = block[a[found]], block[b[found]]
        else:
            if len(found) > 2 * budget:
                return None
            nb, w = h.array_query_batch(owner[found], slot[found])
            keep = owner[found] < nb
            bu, bv, w = block[owner[found]][keep], block[nb][keep], w[keep]
        edges = zip(bu.tolist(), bv.tolist(), w.tolist())
        return WeightedGraph.from_edges(p.block_count, edges, h.graph.scale, merge=True)


def find_cut_edges(
    h: OracleHandle,
    x: Shore,
    delta=DELTA,
    tau=None,
    seed=0,
) -> list[tuple[int, int, int]]:
    """The edges crossing ``x``, learned with threshold ``tau (n - 1)``.

    When more edges cross than the threshold allows (possible only for cuts
    heavier than a minimum cut), a second search with the trivial threshold
    is run.
    """
    if not x.is_nontrivial() or x.n != h.n:
        raise ValueError("shore must be nontrivial and match the graph")
    member = x.to_bool()
    rng = generator(seed, "cut_edges")
    ledger = h.ledger
    with ledger.subroutine("find_cut_edges"):
        if tau is None:
            tau = Fraction(_weight_extreme(h, True, seed, None), _weight_extreme(h, False, seed, None))
        t = max(1, math.ceil(Fraction(tau) * (h.n - 1)))
        if h.model == MATRIX:
            a, b = _pairs(h.n)

            def marked(idx):
                idx = np.asarray(idx)
                w = h.matrix_query_batch(a[idx], b[idx])
                return (w > 0) & (member[a[idx]] != member[b[idx]])

            size = len(a)
        else:
            side = np.flatnonzero(member)
            deg = h.all_degrees()
            owner = np.repeat(side, deg[side])
            start = np.cumsum(deg[side]) - deg[side]
            slot = np.arange(len(owner), dtype=np.int64) - np.repeat(start, deg[side]) + 1

            def marked(idx):
                idx = np.asarray(idx)
                nb, _ = h.array_query_batch(owner[idx], slot[idx])
                return ~member[nb]

            size = len(owner)
        if size == 0:
            return []
        space = _space(size, marked, 1, ledger)
        res = bounded_learn(space, t, rng)
        if res.exceeded:
            res = bounded_learn(space, size, rng)
        found = np.asarray(res.items, dtype=np.int64)
        if h.model == MATRIX:
            w = h.matrix_query_batch(a[found], b[found])
            out = zip(a[found].tolist(), b[found].tolist(), w.tolist())
        else:
            nb, w = h.array_query_batch(owner[found], slot[found])
            out = ((min(p, q), max(p, q), c) for p, q, c in zip(owner[found].tolist(), nb.tolist(), w.tolist()))
        return sorted(out)


@dataclass
class MinCutResult:
    """Outcome of one run; ``value`` and ``contraction_weight`` are on the stored integer scale."""

    value: int
    shore: Shore
    scale: Fraction
    model: str
    seed: int
    ledger: QueryLedger
    lgraph_ledger: QueryLedger
    tau: Optional[Fraction] = None
    min_star: Optional[tuple[int, int]] = None
    partition: Optional[Partition] = None
    contraction_weight: Optional[int] = None
    star_answer: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def real_value(self) -> Fraction:
        return Fraction(self.value) / self.scale

    def to_dict(self) -> dict:
        return {
            "lambda": format_rational(self.real_value),
            "shore": self.shore.vertices(),
            "scale": format_rational(self.scale),
            "ledger": self.ledger.to_dict(),
            "lgraph_ledger": self.lgraph_ledger.to_dict(),
            "seed": self.seed,
            "model": self.model,
        }


def format_rational(x) -> str:
    """Decimal string when the value terminates in base 10, ``p/q`` otherwise."""
    x = Fraction(x)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    if digits == 0:
        return str(x.numerator)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def _sparsifier_charge(h: OracleHandle) -> int:
    n = h.n
    if h.model == MATRIX:
        return ceil_sqrt(n**3)
    m = int(h.all_degrees().sum()) // 2
    return ceil_sqrt(m * n)


def min_cut(
    h: OracleHandle,
    seed: int = 0,
    delta=DELTA,
    eps=SPARSIFIER_EPS,
    faults: Optional[Faults] = None,
    lgraph_ledger: Optional[QueryLedger] = None,
) -> MinCutResult:
    """Weight and a shore of a minimum cut; exact with probability at least 3/4.

    Raises ``BudgetExceeded`` when the learned contraction would exceed the
    ``100 tau n`` edge budget.
    """
    g = h.graph
    n = g.n
    if n < 2:
        raise GraphError("need at least two vertices")
    ledger = h.ledger
    lledger = lgraph_ledger if lgraph_ledger is not None else QueryLedger()

    def result(value, shore, **kw):
        return MinCutResult(int(value), shore, g.scale, h.model, seed, ledger, lledger, **kw)

    v, d_min = find_min_star(h, delta, derive_seed(seed, "star"), faults)
    star = Shore.from_vertices(n, [v])
    if d_min == 0:
        return result(0, star, min_star=(v, 0), star_answer=True)
    tau = Fraction(
        max(find_max_weight(h, delta, derive_seed(seed, "max"), faults), 1),
        max(find_min_weight(h, delta, derive_seed(seed, "min"), faults), 1),
    )

    with ledger.subroutine("cut_sparsifier"):
        ledger.charge(_sparsifier_charge(h))
        if not g.is_connected():
            labels = g.component_labels()
            return result(0, Shore.from_bool(labels == labels[0]), tau=tau, min_star=(v, d_min))
        sp = cut_sparsifier(g, eps, derive_seed(seed, "sparsify"))

    lam_h, _ = stoer_wagner(sp)
    threshold = (1 + ATOM_SLACK) * lam_h
    part = learn_cut_atoms(sp, threshold, delta, derive_seed(seed, "atoms"), lledger)
    log.debug("n=%d tau=%s lambda(H)=%d atoms=%d", n, tau, lam_h, part.block_count)
    if part.block_count < 2:
        return result(d_min, star, tau=tau, min_star=(v, d_min), partition=part, star_answer=True)

    budget = math.floor(BUDGET_FACTOR * tau * n)
    gc = learn_contraction(h, part, budget, delta, derive_seed(seed, "contract"), faults)
    if gc is None:
        raise BudgetExceeded(f"contraction exceeds {budget} cross edges")
    lam_c, y = stoer_wagner(gc)
    common = dict(tau=tau, min_star=(v, d_min), partition=part, contraction_weight=gc.total_weight)
    if d_min <= lam_c:
        return result(d_min, star, star_answer=True, **common)
    z = np.isin(part.assignment, np.asarray(y.vertices(), dtype=np.int64))
    return result(lam_c, Shore.from_bool(z), **common)


def solve(g: WeightedGraph, model: str = MATRIX, seed: int = 0, **kw) -> MinCutResult:
    """Convenience wrapper: fresh oracle and ledger, then ``min_cut``."""
    return min_cut(OracleHandle(g, model, QueryLedger()), seed, **kw)


def majority_min_cut(g: WeightedGraph, model: str = MATRIX, seed: int = 0, runs: int = 9, **kw):
    """Run ``runs`` independent solves and keep the most frequent cut value.

    Returns the first run that reports the winning value, plus all values
    (``None`` for aborted runs).  Ties go to the smaller value.
    """
    results: list[Optional[MinCutResult]] = []
    for i in range(runs):
        try:
            results.append(solve(g, model, derive_seed(seed, "repeat", i), **kw))
        except BudgetExceeded:
            results.append(None)
    values = [r.value if r is not None else None for r in results]
    counts = Counter(x for x in values if x is not None)
    if not counts:
        raise BudgetExceeded("every run exceeded the contraction budget")
    best = min(counts, key=lambda x: (-counts[x], x))
    winner = next(r for r in results if r is not None and r.value == best)
    return winner, values
