"""Classical cut sparsifier by uniform sampling of the multigraph view.

An edge of weight ``w`` counts as ``w`` parallel unit edges.  Sampling each
unit at rate ``p = 3 d ln(n) / (eps^2 lambda)`` keeps every cut within
``1 +- eps`` of ``p`` times its weight with high probability; the number of
draws is capped at ``C n ln(n) / eps^2`` so the edge bound always holds.
Graphs that are already that small are returned unchanged.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .graph import GraphError, WeightedGraph
from .rng import generator
from .treepack import MATULA_C, matula_estimate

C_EDGES = 1          # |E(H)| <= C_EDGES * n ln(n) / eps^2
SAMPLE_D = 2         # failure probability n^-d per sampling round


class Sparsifier(WeightedGraph):
    """A sampled graph together with the factor that maps its cut weights back.

    ``cut_weight(g, X)`` is estimated by ``factor * cut_weight(h, X)`` on the
    stored integers.  The real-weight ``scale`` is adjusted to match, so real
    cut weights of ``h`` and ``g`` are directly comparable.
    """

    def __init__(self, n, u, v, w, scale, factor):
        super().__init__(n, u, v, w, scale)
        self.factor = Fraction(factor)


def edge_bound(n: int, eps) -> int:
    eps = Fraction(eps)
    return math.floor(C_EDGES * n * math.log(max(n, 2)) / float(eps * eps))


def cut_sparsifier(g: WeightedGraph, eps=Fraction(1, 100), seed=0) -> Sparsifier:
    """Integer-weighted reweighted subgraph approximating every cut of ``g``."""
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 3):
        raise ValueError("eps must lie in (0, 1/3]")
    if g.n >= 2 and not g.is_connected():
        raise GraphError("graph is disconnected")
    bound = edge_bound(g.n, eps)
    if g.m <= bound or g.n < 2:
        return Sparsifier(g.n, g.u, g.v, g.w, g.scale, 1)
    lam_lo = Fraction(matula_estimate(g)) / MATULA_C
    total = g.total_weight
    rate = Fraction(3 * SAMPLE_D * math.log(g.n)).limit_denominator(10**6) / (eps * eps * lam_lo)
    draws = min(math.ceil(rate * total), bound)
    if draws >= total:
        return Sparsifier(g.n, g.u, g.v, g.w, g.scale, 1)
    rng = generator(seed, "sparsify")
    pick = rng.choice(g.m, size=draws, p=g.w / total)
    counts = np.bincount(pick, minlength=g.m)
    keep = counts > 0
    factor = Fraction(total, draws)
    return Sparsifier(g.n, g.u[keep], g.v[keep], counts[keep], g.scale / factor, factor)


def sparsifier_scale(h: WeightedGraph) -> Fraction:
    """Factor mapping cut weights of ``h`` to estimates of the original cut weights."""
    return getattr(h, "factor", Fraction(1))
