import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmincut.graph import WeightedGraph
from qmincut.instances import bits_with_weight, gen_matrix_lb, gen_quadruple_lb, quadruple_lb_params
from qmincut.query import (
    ARRAY,
    MATRIX,
    Faults,
    OracleError,
    OracleHandle,
    QueryLedger,
    SearchSpace,
    bounded_learn,
    ceil_sqrt,
    exact_search,
    grover_search,
    min_find,
)
from qmincut.rng import generator
from strategies import graphs


def bits_space(x, ledger=None, cost=1):
    x = np.asarray(x, dtype=bool)
    return SearchSpace(len(x), lambda i: bool(x[i]), cost, lambda idx: x[idx], ledger)


def test_ceil_sqrt():
    assert [ceil_sqrt(k) for k in (0, 1, 2, 4, 5, 16, 17)] == [0, 1, 2, 2, 3, 4, 5]
    big = 10**30 + 1
    assert ceil_sqrt(big) == 10**15 + 1


class TestOracle:
    def test_matrix_queries(self):
        k3 = WeightedGraph.from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        h = OracleHandle(k3, MATRIX)
        assert h.matrix_query(0, 1) == 1
        h2 = OracleHandle(WeightedGraph.from_edges(3, [(0, 1, 1)]), MATRIX)
        assert h2.matrix_query(1, 2) == 0
        assert h.ledger.classical_queries == 1

    def test_matrix_lb_intra_pair(self):
        g = gen_matrix_lb(10, 2, np.zeros(4 * 5, dtype=int))
        assert OracleHandle(g, MATRIX).matrix_query(1, 3) == 2

    def test_array_queries(self):
        star = WeightedGraph.from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)])
        h = OracleHandle(star, ARRAY)
        assert h.array_query(0, 2) == (2, 1)
        cyc = WeightedGraph.from_edges(6, [(i, (i + 1) % 6, 1) for i in range(6)])
        assert OracleHandle(cyc, ARRAY).degree_query(3) == 2
        with pytest.raises(OracleError):
            h.array_query(0, 4)
        with pytest.raises(OracleError):
            h.array_query(0, 0)

    def test_wrong_model(self):
        g = WeightedGraph.from_edges(2, [(0, 1, 1)])
        with pytest.raises(OracleError):
            OracleHandle(g, MATRIX).degree_query(0)
        with pytest.raises(OracleError):
            OracleHandle(g, ARRAY).matrix_query(0, 1)
        with pytest.raises(OracleError):
            OracleHandle(g, "list")

    def test_quadruple_degrees_ignore_x(self):
        n, tau = 20, 2
        count = quadruple_lb_params(n, tau)
        for seed in range(5):
            a = gen_quadruple_lb(n, tau, bits_with_weight(count, seed % (count + 1), seed))
            b = gen_quadruple_lb(n, tau, bits_with_weight(count, (3 * seed + 1) % (count + 1), seed + 9))
            da = [OracleHandle(a, ARRAY).degree_query(v) for v in range(n)]
            db = [OracleHandle(b, ARRAY).degree_query(v) for v in range(n)]
            assert da == db

    @given(graphs(max_n=8))
    def test_answers_agree_with_graph(self, g):
        hm = OracleHandle(g, MATRIX)
        for a in range(g.n):
            for b in range(g.n):
                if a != b:
                    assert hm.matrix_query(a, b) == g.weight(a, b)
        ha = OracleHandle(g, ARRAY)
        seen = set()
        for x in range(g.n):
            for i in range(1, ha.degree_query(x) + 1):
                y, w = ha.array_query(x, i)
                assert g.weight(x, y) == w
                seen.add((min(x, y), max(x, y)))
        assert seen == {(a, b) for a, b, _ in g.edges}
        n_pairs = g.n * (g.n - 1)
        assert hm.ledger.classical_queries == n_pairs

    def test_batches_count_each_query(self):
        g = WeightedGraph.from_edges(4, [(0, 1, 2), (1, 2, 3), (2, 3, 4)])
        h = OracleHandle(g, ARRAY)
        nb, w = h.array_query_batch([1, 1, 2], [1, 2, 2])
        assert nb.tolist() == [0, 2, 3] and w.tolist() == [2, 3, 4]
        assert h.ledger.classical_queries == 3


class TestLedger:
    def test_breakdown_sums_to_total(self):
        led = QueryLedger()
        with led.subroutine("a"):
            led.charge(3)
            with led.subroutine("b"):
                led.charge(4)
        led.charge(1)
        assert led.quantum_charge == sum(led.breakdown.values()) == 8
        assert led.to_dict()["breakdown"] == {"a": 3, "b": 4, "unscoped": 1}

    def test_simulated_probes_are_separate(self):
        led = QueryLedger()
        h = OracleHandle(WeightedGraph.from_edges(3, [(0, 1, 1)]), MATRIX, led)
        space = SearchSpace(2, lambda i: h.matrix_query(0, i + 1) > 0, 1, None, led)
        grover_search(space, generator(0))
        assert led.classical_queries == 0 and led.simulated_probes >= 1


class TestGrover:
    def test_single_marked(self):
        led = QueryLedger()
        x = np.zeros(16)
        x[11] = 1
        assert grover_search(bits_space(x, led), generator(1)) == 11
        assert led.quantum_charge == 4

    def test_none_marked(self):
        led = QueryLedger()
        assert grover_search(bits_space(np.zeros(10), led, cost=3)) is None
        assert led.quantum_charge == 4 * 3

    @given(st.lists(st.booleans(), min_size=1, max_size=200).filter(any), st.integers(0, 99))
    def test_returns_marked(self, x, seed):
        i = grover_search(bits_space(x), generator(seed))
        assert x[i]

    def test_fault_injection(self):
        x = np.ones(50)
        faults = Faults(generator(0), grover=1.0)
        assert grover_search(bits_space(x), generator(0), faults) is None
        assert faults.injected == 1


class TestExactSearch:
    def test_all_marked(self):
        led = QueryLedger()
        assert 0 <= exact_search(bits_space(np.ones(100), led), 100) < 100
        assert led.quantum_charge == 1

    def test_quarter_density(self):
        led = QueryLedger()
        x = np.zeros(64)
        x[[3, 9, 40, 63]] = 1
        assert x[exact_search(bits_space(x, led), 4, generator(2), check=True)]
        assert led.quantum_charge == 4

    def test_broken_promise(self):
        x = np.zeros(8)
        x[1] = 1
        with pytest.raises(AssertionError):
            exact_search(bits_space(x), 2, check=True)


class TestBoundedLearn:
    def test_empty(self):
        res = bounded_learn(bits_space(np.zeros(30)), 3)
        assert res.items == () and not res.exceeded

    def test_exactly_t(self):
        x = np.zeros(40)
        x[[1, 5, 20]] = 1
        led = QueryLedger()
        res = bounded_learn(bits_space(x, led), 3)
        assert res.items == (1, 5, 20) and not res.exceeded
        assert led.quantum_charge == ceil_sqrt(3 * 40)

    def test_over_threshold(self):
        x = np.zeros(40)
        x[:8] = 1
        assert bounded_learn(bits_space(x), 3).exceeded

    def test_proof_charge_decomposition(self):
        n, t = 50, 4
        res = bounded_learn(bits_space(np.zeros(n), cost=2), t)
        expected = sum(math.ceil(math.sqrt(math.ceil(n / k))) for k in range(1, t + 1)) + math.ceil(math.sqrt(n))
        assert res.proof_charge == 2 * expected

    @given(st.integers(1, 500), st.integers(1, 40), st.integers(1, 5))
    def test_charge_formula(self, n, t, cost):
        led = QueryLedger()
        bounded_learn(bits_space(np.zeros(n), led, cost), t)
        assert led.quantum_charge == ceil_sqrt(t * n) * cost


class TestMinFind:
    def test_constant(self):
        s = SearchSpace(9, lambda i: 5)
        assert 0 <= min_find(s) < 9

    def test_identity(self):
        led = QueryLedger()
        s = SearchSpace(30, lambda i: i, 1, lambda idx: idx, led)
        assert min_find(s) == 0
        assert led.quantum_charge == 6

    @given(graphs(max_n=9), st.integers(0, 50))
    def test_weighted_degree_argmin(self, g, seed):
        d = g.weighted_degrees
        v = min_find(SearchSpace(g.n, lambda i: int(d[i])), generator(seed))
        assert d[v] == d.min()

    def test_fault_returns_non_minimum(self):
        s = SearchSpace(5, lambda i: i)
        assert min_find(s, generator(0), Faults(generator(0), min_find=1.0)) != 0
