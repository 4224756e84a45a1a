"""Graph families with known minimum cuts, plus random weighted graphs.

The three lower-bound families hide a bit string ``x`` in the edge weights
so that the minimum cut reveals a threshold property of ``x``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import GraphError, Shore, WeightedGraph
from .rng import derive_seed, generator


class InfeasibleParameters(GraphError):
    pass


@dataclass(frozen=True)
class Instance:
    """A generated graph with its predicted minimum cut (real weight) and, if unique, its shore."""

    graph: WeightedGraph
    lam: Optional[Fraction]
    shore: Optional[Shore] = None


def _bits(x, length: int) -> np.ndarray:
    x = np.asarray([int(b) for b in x], dtype=np.int64)
    if len(x) != length:
        raise InfeasibleParameters(f"bit string must have length {length}, got {len(x)}")
    if np.any((x != 0) & (x != 1)):
        raise InfeasibleParameters("bit string entries must be 0 or 1")
    return x


def bits_with_weight(length: int, weight: int, seed=0) -> np.ndarray:
    """Uniformly random bit string of the given length and Hamming weight."""
    if not 0 <= weight <= length:
        raise InfeasibleParameters(f"weight {weight} outside [0, {length}]")
    out = np.zeros(length, dtype=np.int64)
    out[generator(seed, "bits").choice(length, size=weight, replace=False)] = 1
    return out


def _clique(vertices: Sequence[int], w: int) -> list[tuple[int, int, int]]:
    vs = list(vertices)
    return [(a, b, w) for i, a in enumerate(vs) for b in vs[i + 1:]]


# dense matrix-model family


def matrix_lb_params(n: int, tau: int) -> tuple[int, int]:
    """``(k, N)``: the star weight of ``v_0`` and the length of ``x``."""
    half = n // 2
    if n < 4 or not 1 <= tau or 2 * tau > half - 1:
        raise InfeasibleParameters(f"need 1 <= tau <= (floor(n/2) - 1)/2, got n={n}, tau={tau}")
    return tau * (half - 1), (half - 1) * (n - half)


def gen_matrix_lb(n: int, tau: int, x) -> WeightedGraph:
    """Two ``tau``-weighted cliques ``V_0 = [0, n/2)`` and ``V_1`` joined by the unit edges selected by ``x``.

    Bit ``(i - 1) |V_1| + j`` links vertex ``i`` of ``V_0`` (never ``v_0 = 0``)
    with the ``j``-th vertex of ``V_1``.
    """
    k, length = matrix_lb_params(n, tau)
    x = _bits(x, length)
    half = n // 2
    width = n - half
    edges = _clique(range(half), tau) + _clique(range(half, n), tau)
    for pos in np.flatnonzero(x).tolist():
        i, j = divmod(pos, width)
        edges.append((i + 1, half + j, 1))
    return WeightedGraph.from_edges(n, edges)


def matrix_lb_instance(n: int, tau: int, x) -> Instance:
    k, _ = matrix_lb_params(n, tau)
    hx = int(np.sum(_bits(x, matrix_lb_params(n, tau)[1])))
    shore = Shore.from_vertices(n, range(n // 2)) if hx < k else None
    return Instance(gen_matrix_lb(n, tau, x), Fraction(min(hx, k)), shore)


# complete bipartite array-model family


def bipartite_lb_params(n: int) -> tuple[int, int, int]:
    """``(|L|, |R|, floor(n/8))``."""
    if n < 8 or n % 4:
        raise InfeasibleParameters(f"n must be a multiple of 4 and at least 8, got {n}")
    return 3 * n // 4, n // 4, n // 8


def gen_bipartite_lb(n: int, eps, patterns) -> WeightedGraph:
    """Complete bipartite graph ``L = [0, 3n/4)``, ``R = [3n/4, n)`` with weights ``1 + eps * bit``.

    ``patterns[i]`` is the bit row of ``L``-vertex ``i``; each must have Hamming
    weight ``floor(n/8) +- 1``.  Weights are stored at fixed-point scale
    ``denominator(eps)``.
    """
    left, right, base = bipartite_lb_params(n)
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise InfeasibleParameters("eps must lie in (0, 1]")
    rows = [_bits(p, right) for p in patterns]
    if len(rows) != left:
        raise InfeasibleParameters(f"need {left} patterns, got {len(rows)}")
    for r in rows:
        if int(r.sum()) not in (base - 1, base + 1):
            raise InfeasibleParameters(f"pattern weight must be {base - 1} or {base + 1}")
    den, num = eps.denominator, eps.numerator
    edges = [(i, left + j, den + num * int(r[j])) for i, r in enumerate(rows) for j in range(right)]
    return WeightedGraph.from_edges(n, edges, scale=den)


def bipartite_lb_instance(n: int, eps, patterns) -> Instance:
    left, right, base = bipartite_lb_params(n)
    g = gen_bipartite_lb(n, eps, patterns)
    light = [i for i, p in enumerate(patterns) if sum(int(b) for b in p) == base - 1]
    lam = Fraction(n, 4) + Fraction(eps) * (base - 1 if light else base + 1)
    return Instance(g, lam, None)


def bipartite_patterns(n: int, light: int, seed=0) -> list[np.ndarray]:
    """Patterns for ``gen_bipartite_lb`` with the first ``light`` rows light, the rest heavy."""
    left, right, base = bipartite_lb_params(n)
    if not 0 <= light <= left:
        raise InfeasibleParameters(f"light row count outside [0, {left}]")
    return [
        bits_with_weight(right, base - 1 if i < light else base + 1, derive_seed(seed, "pattern", i))
        for i in range(left)
    ]


# quadruple array-model family


def quadruple_lb_params(n: int, tau: int) -> int:
    """Number of quadruples ``tau n / 10``."""
    if n < 4 or n % 4:
        raise InfeasibleParameters(f"n must be a positive multiple of 4, got {n}")
    if not 1 <= tau or 8 * tau > 5 * n:
        raise InfeasibleParameters(f"need 1 <= tau <= 5n/8, got tau={tau}")
    if (tau * n) % 10:
        raise InfeasibleParameters(f"tau * n / 10 must be an integer, got {tau * n}/10")
    return tau * n // 10


def quadruples(n: int, count: int) -> list[tuple[int, int, int, int]]:
    """Edge-disjoint quadruples over the parts ``V_i = [(i-1)q, iq)``, ``q = n/4``.

    Quadruple ``l = a q + b`` uses offsets ``(a, b, a + b, 2a + b) mod q``.  Each
    consecutive offset pair determines ``(a, b)``, so no pair of consecutive
    vertices repeats across quadruples; up to ``q^2`` exist.
    """
    q = n // 4
    if count > q * q:
        raise InfeasibleParameters(f"at most {q * q} edge-disjoint quadruples, asked for {count}")
    out = []
    for ell in range(count):
        a, b = divmod(ell, q)
        out.append((a, q + b, 2 * q + (a + b) % q, 3 * q + (2 * a + b) % q))
    return out


def gen_quadruple_lb(n: int, tau: int, x) -> WeightedGraph:
    """Four ``tau``-weighted cliques plus, per quadruple, either edges 12 and 34 (bit 1) or 23 and 41 (bit 0)."""
    count = quadruple_lb_params(n, tau)
    x = _bits(x, count)
    q = n // 4
    edges = []
    for i in range(4):
        edges += _clique(range(i * q, (i + 1) * q), tau)
    for (u1, u2, u3, u4), bit in zip(quadruples(n, count), x.tolist()):
        if bit:
            edges += [(u1, u2, 1), (u3, u4, 1)]
        else:
            edges += [(u2, u3, 1), (u4, u1, 1)]
    return WeightedGraph.from_edges(n, edges)


def quadruple_lb_instance(n: int, tau: int, x) -> Instance:
    count = quadruple_lb_params(n, tau)
    hx = int(np.sum(_bits(x, count)))
    q = n // 4
    lam = Fraction(2 * min(hx, count - hx))
    shore = None
    # bit-1 quadruples cross V1+V4 | V2+V3, bit-0 ones cross V1+V2 | V3+V4
    if 2 * hx < count:
        shore = Shore.from_vertices(n, list(range(q)) + list(range(3 * q, n)))
    elif 2 * hx > count:
        shore = Shore.from_vertices(n, range(2 * q))
    return Instance(gen_quadruple_lb(n, tau, x), lam, shore)


# random graphs


def gen_random(n: int, m: int, tau: int, seed=0) -> WeightedGraph:
    """Connected random graph: a random spanning tree plus uniformly chosen extra pairs.

    Integer weights are uniform in ``[1, tau]``.
    """
    if n < 1:
        raise InfeasibleParameters("need at least one vertex")
    if not n - 1 <= m <= n * (n - 1) // 2:
        raise InfeasibleParameters(f"m must lie in [{n - 1}, {n * (n - 1) // 2}], got {m}")
    if tau < 1:
        raise InfeasibleParameters("tau must be >= 1")
    rng = generator(seed, "random-graph")
    perm = rng.permutation(n)
    pairs = set()
    for i in range(1, n):
        a, b = int(perm[i]), int(perm[rng.integers(0, i)])
        pairs.add((min(a, b), max(a, b)))
    extra = m - (n - 1)
    if extra:
        au, av = np.triu_indices(n, 1)
        code = au * n + av
        taken = np.fromiter((a * n + b for a, b in pairs), dtype=np.int64, count=len(pairs))
        free = np.setdiff1d(code, taken)
        pick = rng.choice(free, size=extra, replace=False)
        pairs.update((int(c) // n, int(c) % n) for c in pick)
    pairs = sorted(pairs)
    w = rng.integers(1, tau + 1, size=len(pairs))
    return WeightedGraph.from_edges(n, [(a, b, int(c)) for (a, b), c in zip(pairs, w)])


def two_cluster_max_edges(n: int, bridges: int = 1) -> int:
    """Largest ``m`` accepted by ``gen_two_cluster`` for this ``n``."""
    a = n // 2
    return 2 * (a * (a - 1) // 2) + bridges


def gen_two_cluster(n: int, m: int, tau: int, seed=0, bridges: int = 1) -> WeightedGraph:
    """Two ``gen_random`` halves joined by ``bridges`` unit edges.

    The halves get ``(m - bridges) / 2`` edges each (the first one rounding
    up), so the graph has a non-star cut of weight ``bridges``.
    """
    a, b = n // 2, n - n // 2
    inner = m - bridges
    if a < 2 or bridges < 1 or bridges > a * b:
        raise InfeasibleParameters("need n >= 4 and 1 <= bridges <= |A||B|")
    left = gen_random(a, inner - inner // 2, tau, derive_seed(seed, "left"))
    right = gen_random(b, inner // 2, tau, derive_seed(seed, "right"))
    codes = generator(seed, "bridges").choice(a * b, size=bridges, replace=False)
    edges = [(int(x), int(y), int(c)) for x, y, c in left.edges]
    edges += [(a + int(x), a + int(y), int(c)) for x, y, c in right.edges]
    edges += [(int(c) // b, a + int(c) % b, 1) for c in codes]
    return WeightedGraph.from_edges(n, edges)
