import random
from fractions import Fraction

import networkx as nx
import pytest

from oracles import (
    naive_atoms,
    naive_cut,
    near_min_shores,
    nx_min_cut,
    random_graph,
    random_spanning_tree,
    random_tree_edges,
)
from qmincut.graph import WeightedGraph, atoms
from qmincut.query import QueryLedger
from qmincut.cutatoms import (
    ImplicitLGraph,
    atoms_by_hashing,
    generating_set_for_tree,
    hash_repeats,
    learn_cut_atoms,
    one_respecting_set,
    spanning_forest_L,
)
from qmincut.tworespect import all_ids, build_evaluator, edge_id, root_tree, shore_of


def cycle(n):
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])


def dumbbell():
    edges = [(a, b, 1) for a in range(4) for b in range(a + 1, 4)]
    edges += [(a + 4, b + 4, 1) for a in range(4) for b in range(a + 1, 4)]
    return WeightedGraph.from_edges(8, edges + [(3, 4, 1)])


def path_tree(n):
    return root_tree([(i, i + 1) for i in range(n - 1)], 0)


def two_respecting_family(g, t, thr, exclude_stars):
    out = []
    for fid in all_ids(t):
        s = shore_of(t, fid).vertices()
        if exclude_stars and not 2 <= len(s) <= g.n - 2:
            continue
        if naive_cut(g, s) <= thr:
            out.append(s)
    return out


def random_instance(rnd, n):
    g = random_graph(rnd, n, tau=rnd.randint(1, 6), p=rnd.random())
    t = root_tree(random_spanning_tree(rnd, g), 0, n)
    lam = nx_min_cut(g)
    thr = rnd.choice([lam, lam + 1, Fraction(17, 16) * lam, 2 * lam])
    return g, t, thr


class TestOneRespecting:
    def test_threshold_below_everything(self):
        g = random_graph(random.Random(0), 8, tau=3)
        t = root_tree(random_spanning_tree(random.Random(1), g), 0, 8)
        ev = build_evaluator(g, t)
        assert one_respecting_set(ev, min(ev.single[c] for c in t.children) - 1) == []

    def test_weighted_tree(self):
        g = WeightedGraph.from_edges(5, [(0, 1, 3), (1, 2, 1), (1, 3, 4), (3, 4, 1)])
        t = root_tree([(a, b) for a, b, _ in g.edges], 0)
        got = one_respecting_set(build_evaluator(g, t), 1)
        assert sorted(got) == sorted([edge_id(t, 1, 2), edge_id(t, 3, 4)])

    def test_random_filter(self):
        rnd = random.Random(2)
        for _ in range(50):
            g, t, thr = random_instance(rnd, rnd.randint(2, 12))
            ev = build_evaluator(g, t)
            expect = [c for c in t.children if naive_cut(g, shore_of(t, (c,)).vertices()) <= thr]
            assert sorted(one_respecting_set(ev, thr)) == sorted(expect)


class TestSpanningForest:
    def test_empty_L(self):
        g = cycle(6)
        lg = ImplicitLGraph(build_evaluator(g, path_tree(6)), 1, exclude_stars=False)
        assert spanning_forest_L(lg) == []

    def test_cycle_complete_L(self):
        n = 9
        lg = ImplicitLGraph(build_evaluator(cycle(n), path_tree(n)), 2, exclude_stars=False)
        k = n - 1
        assert lg.adjacency.sum() == k * (k - 1)
        led = QueryLedger()
        forest = spanning_forest_L(lg, led, seed=3)
        assert len(forest) == n - 2
        assert led.quantum_charge > 0

    def test_random_components(self):
        rnd = random.Random(3)
        for _ in range(60):
            g, t, thr = random_instance(rnd, rnd.randint(3, 12))
            excl = rnd.random() < 0.5
            lg = ImplicitLGraph(build_evaluator(g, t), thr, excl)
            explicit = nx.Graph()
            explicit.add_nodes_from(t.children)
            for fid in all_ids(t):
                if len(fid) != 2:
                    continue
                s = shore_of(t, fid).vertices()
                if excl and not 2 <= len(s) <= g.n - 2:
                    continue
                if naive_cut(g, s) <= thr:
                    explicit.add_edge(*fid)
            forest = spanning_forest_L(lg, None, rnd.randrange(100))
            fg = nx.Graph()
            fg.add_nodes_from(t.children)
            fg.add_edges_from(forest)
            assert nx.is_forest(fg)
            assert all(explicit.has_edge(a, b) for a, b in forest)
            comps = {frozenset(c) for c in nx.connected_components(explicit)}
            assert comps == {frozenset(c) for c in nx.connected_components(fg)}


class TestGeneratingSet:
    def test_tree_shaped_graph(self):
        g = WeightedGraph.from_edges(6, [(0, 1, 2), (1, 2, 5), (2, 3, 2), (3, 4, 7), (2, 5, 9)])
        t = root_tree([(a, b) for a, b, _ in g.edges], 0)
        q = generating_set_for_tree(g, t, 3, exclude_stars=False)
        assert sorted(q) == sorted([(edge_id(t, 0, 1),), (edge_id(t, 2, 3),)])
        p = atoms(6, [shore_of(t, f) for f in q])
        assert sorted(p.blocks()) == [[0], [1, 2, 5], [3, 4]]

    def test_c6(self):
        q = generating_set_for_tree(cycle(6), path_tree(6), 2, exclude_stars=False)
        assert atoms(6, [shore_of(path_tree(6), f) for f in q]).block_count == 6

    @pytest.mark.parametrize("exclude_stars", [False, True])
    def test_random_against_full_family(self, exclude_stars):
        rnd = random.Random(4 + exclude_stars)
        for _ in range(100):
            n = rnd.randint(2, 12)
            g, t, thr = random_instance(rnd, n)
            q = generating_set_for_tree(g, t, thr, QueryLedger(), rnd.randrange(99), exclude_stars)
            assert len(q) <= max(2 * n - 3, 0)
            got = atoms(n, [shore_of(t, f) for f in q])
            assert got == naive_atoms(n, two_respecting_family(g, t, thr, exclude_stars))

    def test_greedy_generating_bound(self):
        rnd = random.Random(5)
        for _ in range(30):
            n = rnd.randint(3, 12)
            g, t, thr = random_instance(rnd, n)
            fam = [shore_of(t, f) for f in all_ids(t) if naive_cut(g, shore_of(t, f).vertices()) <= thr]
            kept = []
            for s in fam:
                if atoms(n, kept + [s]).block_count > atoms(n, kept).block_count:
                    kept.append(s)
            assert len(kept) <= n - 1
            assert atoms(n, kept) == atoms(n, fam)


class TestHashing:
    def test_empty(self):
        assert atoms_by_hashing(path_tree(5), []).block_count == 1

    def test_leaf_edge(self):
        t = root_tree([(0, 1), (1, 2), (1, 3)], 0)
        p = atoms_by_hashing(t, [(3,)])
        assert sorted(p.blocks()) == [[0, 1, 2], [3]]

    def test_repeats(self):
        assert hash_repeats(Fraction(1, 20)) == 5
        assert hash_repeats(Fraction(1, 2)) == 1

    def test_random_mostly_exact(self):
        rnd = random.Random(6)
        for n in (8, 16, 32):
            bad = 0
            trials = 200
            for i in range(trials):
                t = root_tree(random_tree_edges(rnd, n), rnd.randrange(n), n)
                ids = all_ids(t)
                q = rnd.sample(ids, rnd.randint(0, min(len(ids), 2 * n)))
                expect = atoms(n, [shore_of(t, f) for f in q])
                got = atoms_by_hashing(t, q, seed=i)
                # collisions can only merge blocks
                assert expect.refines(got)
                bad += got != expect
            assert bad <= trials / n


class TestLearnCutAtoms:
    def test_dumbbell(self):
        p = learn_cut_atoms(dumbbell(), 1, seed=0)
        assert sorted(p.blocks()) == [[0, 1, 2, 3], [4, 5, 6, 7]]

    def test_c8(self):
        assert learn_cut_atoms(cycle(8), 2, seed=1).block_count == 8

    def test_threshold_cap(self):
        with pytest.raises(ValueError):
            learn_cut_atoms(cycle(8), 3)

    @pytest.mark.parametrize("exclude_stars", [False, True])
    def test_random_against_naive(self, exclude_stars):
        rnd = random.Random(7)
        ok = 0
        runs = 100
        for i in range(runs):
            n = rnd.randint(2, 10)
            g = random_graph(rnd, n, tau=rnd.randint(1, 6), p=rnd.random())
            thr = Fraction(101, 100) * nx_min_cut(g)
            led = QueryLedger()
            p = learn_cut_atoms(g, thr, seed=i, ledger=led, exclude_stars=exclude_stars)
            expect = naive_atoms(n, near_min_shores(g, thr, exclude_stars))
            ok += p == expect
        assert ok >= 95

    def test_separation_soundness(self):
        rnd = random.Random(8)
        for i in range(40):
            n = rnd.randint(4, 10)
            g = random_graph(rnd, n, tau=3)
            thr = Fraction(17, 16) * nx_min_cut(g)
            p = learn_cut_atoms(g, thr, seed=i)
            shores = near_min_shores(g, thr, exclude_stars=True)
            a = p.assignment
            for x in range(n):
                for y in range(x + 1, n):
                    if a[x] != a[y]:
                        assert any((x in s) != (y in s) for s in shores)
