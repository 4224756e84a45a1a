"""Query access to a graph and cost-charged simulations of quantum search.

The search primitives run classically and always return a correct answer
(unless fault injection is switched on), but they charge the ledger the
query count of the corresponding quantum algorithm with constant 1:

=================  =============================
primitive          charge (times cost per probe)
=================  =============================
grover_search      ceil(sqrt(N))
exact_search       ceil(sqrt(N / k))
bounded_learn      ceil(sqrt(t * N))
min_find           ceil(sqrt(N))
=================  =============================

Oracle queries made while a primitive evaluates its search space are counted
as *simulated probes*, never as classical queries.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .graph import WeightedGraph

MATRIX = "matrix"
ARRAY = "array"
MODELS = (MATRIX, ARRAY)

_SCAN_CHUNK = 1 << 14


def ceil_sqrt(x: int) -> int:
    """Smallest integer c with c*c >= x."""
    x = int(x)
    if x <= 0:
        return 0
    return math.isqrt(x - 1) + 1


class QueryLedger:
    """Counters for one solve.

    ``breakdown`` maps subroutine names to quantum charge, and always sums to
    ``quantum_charge``.
    """

    def __init__(self):
        self.classical_queries = 0
        self.simulated_probes = 0
        self.quantum_charge = 0
        self.breakdown: dict[str, int] = {}
        self.classical_breakdown: dict[str, int] = {}
        self._scope: list[str] = []
        self._simulating = 0

    @property
    def scope(self) -> str:
        return self._scope[-1] if self._scope else "unscoped"

    @contextmanager
    def subroutine(self, name: str):
        self._scope.append(name)
        try:
            yield self
        finally:
            self._scope.pop()

    @contextmanager
    def simulating(self):
        self._simulating += 1
        try:
            yield self
        finally:
            self._simulating -= 1

    def charge(self, units: int) -> None:
        units = int(units)
        if units < 0:
            raise ValueError("negative charge")
        self.quantum_charge += units
        self.breakdown[self.scope] = self.breakdown.get(self.scope, 0) + units

    def count(self, k: int = 1) -> None:
        """Record ``k`` answered oracle queries."""
        if self._simulating:
            self.simulated_probes += k
        else:
            self.classical_queries += k
            self.classical_breakdown[self.scope] = self.classical_breakdown.get(self.scope, 0) + k

    def to_dict(self) -> dict:
        return {
            "classical": self.classical_queries,
            "quantum_charge": self.quantum_charge,
            "breakdown": dict(sorted(self.breakdown.items())),
            "simulated_probes": self.simulated_probes,
        }


class OracleError(ValueError):
    pass


class OracleHandle:
    """Adjacency-matrix or adjacency-array access to a backing graph.

    Every answered query increments exactly one ledger counter.
    """

    def __init__(self, graph: WeightedGraph, model: str = MATRIX, ledger: Optional[QueryLedger] = None):
        if model not in MODELS:
            raise OracleError(f"unknown model {model!r}")
        self.graph = graph
        self.model = model
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._degrees: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.graph.n

    def all_degrees(self) -> np.ndarray:
        """Degrees of every vertex; costs ``n`` queries the first time only."""
        if self._degrees is None:
            self._require(ARRAY)
            self.ledger.count(self.n)
            self._degrees = self.graph.degrees.copy()
        return self._degrees

    # adjacency matrix

    def matrix_query(self, a: int, b: int) -> int:
        self._require(MATRIX)
        if a == b:
            raise OracleError("matrix query on a diagonal pair")
        self.ledger.count()
        return self.graph.weight(a, b)

    def matrix_query_batch(self, a, b) -> np.ndarray:
        self._require(MATRIX)
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if np.any(a == b):
            raise OracleError("matrix query on a diagonal pair")
        self.ledger.count(int(a.size))
        return self.graph._dense[a, b]

    # adjacency array

    def degree_query(self, x: int) -> int:
        self._require(ARRAY)
        self.ledger.count()
        return int(self.graph.degrees[x])

    def array_query(self, x: int, i: int) -> tuple[int, int]:
        """The ``i``-th neighbor of ``x`` (1-based) and the connecting weight."""
        self._require(ARRAY)
        deg = int(self.graph.degrees[x])
        if not 1 <= i <= deg:
            raise OracleError(f"index {i} outside 1..{deg}")
        self.ledger.count()
        nbrs, wts = self.graph.neighbors(x)
        return int(nbrs[i - 1]), int(wts[i - 1])

    def array_query_batch(self, x, i) -> tuple[np.ndarray, np.ndarray]:
        self._require(ARRAY)
        x = np.asarray(x, dtype=np.int64)
        i = np.asarray(i, dtype=np.int64)
        indptr, dst, wt = self.graph._csr
        deg = indptr[x + 1] - indptr[x]
        if np.any(i < 1) or np.any(i > deg):
            raise OracleError("array index out of range")
        self.ledger.count(int(x.size))
        pos = indptr[x] + i - 1
        return dst[pos], wt[pos]

    def _require(self, model: str) -> None:
        if self.model != model:
            raise OracleError(f"{model} query on a {self.model}-model oracle")


@dataclass
class SearchSpace:
    """``size`` items, each evaluated by ``evaluate(i)`` at ``cost_per_probe`` oracle queries.

    ``evaluate_batch`` (optional) evaluates an index array at once and must
    agree with ``evaluate``.  For marked-item searches the evaluator returns a
    truth value; for ``min_find`` it returns a comparable number.
    """

    size: int
    evaluate: Callable[[int], object]
    cost_per_probe: int = 1
    evaluate_batch: Optional[Callable[[np.ndarray], np.ndarray]] = None
    ledger: Optional[QueryLedger] = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("search space must be nonempty")
        if self.cost_per_probe < 0:
            raise ValueError("negative probe cost")

    def values(self, idx: np.ndarray) -> np.ndarray:
        ctx = self.ledger.simulating() if self.ledger is not None else _null()
        with ctx:
            if self.evaluate_batch is not None:
                return np.asarray(self.evaluate_batch(idx))
            return np.array([self.evaluate(int(i)) for i in idx])

    def charge(self, units: int) -> None:
        if self.ledger is not None:
            self.ledger.charge(units * self.cost_per_probe)


@contextmanager
def _null():
    yield


@dataclass
class Faults:
    """Fault injection: each primitive fails with its stated failure probability."""

    rng: np.random.Generator
    grover: float = 0.1
    bounded_learn: float = 0.1
    min_find: float = 1 / 3
    injected: int = field(default=0)

    def fire(self, p: float) -> bool:
        hit = bool(self.rng.random() < p)
        self.injected += hit
        return hit


def _first_marked(s: SearchSpace, order: np.ndarray, skip=None) -> Optional[int]:
    for start in range(0, len(order), _SCAN_CHUNK):
        idx = order[start:start + _SCAN_CHUNK]
        if skip is not None:
            idx = idx[~np.isin(idx, skip)]
            if not len(idx):
                continue
        hit = np.flatnonzero(s.values(idx).astype(bool))
        if len(hit):
            return int(idx[hit[0]])
    return None


def _rng(rng) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(0)


def grover_search(s: SearchSpace, rng=None, faults: Optional[Faults] = None) -> Optional[int]:
    """A marked index, or ``None`` when nothing is marked."""
    s.charge(ceil_sqrt(s.size))
    found = _first_marked(s, _rng(rng).permutation(s.size))
    if found is not None and faults is not None and faults.fire(faults.grover):
        return None
    return found


def exact_search(s: SearchSpace, k: int, rng=None, check: bool = False) -> int:
    """A marked index of a space holding exactly ``k >= 1`` marked items."""
    if k < 1:
        raise ValueError("exact search needs k >= 1")
    s.charge(ceil_sqrt(-(-s.size // k)))
    if check:
        count = int(s.values(np.arange(s.size)).astype(bool).sum())
        if count != k:
            raise AssertionError(f"exact search promised {k} marked items, found {count}")
    found = _first_marked(s, _rng(rng).permutation(s.size))
    if found is None:
        raise AssertionError("exact search precondition violated: no marked item")
    return found


@dataclass(frozen=True)
class LearnResult:
    """Outcome of ``bounded_learn``: the marked set, or ``exceeded`` when more than ``t``."""

    items: tuple[int, ...]
    exceeded: bool
    proof_charge: int


def _loop_charge(n_items: int, t: int) -> int:
    ks = np.arange(1, t + 1, dtype=np.int64)
    per = -(-n_items // ks)
    return _sum_ceil_sqrt(per) + ceil_sqrt(n_items)


def _sum_ceil_sqrt(vals: np.ndarray) -> int:
    r = np.floor(np.sqrt(vals.astype(np.float64))).astype(np.int64)
    # float sqrt may be off by one either way
    r = np.where(r * r > vals, r - 1, r)
    r = np.where((r + 1) * (r + 1) <= vals, r + 1, r)
    return int((r + (r * r < vals)).sum())


def bounded_learn(s: SearchSpace, t: int, rng=None, faults: Optional[Faults] = None) -> LearnResult:
    """Learn every marked index if there are at most ``t`` of them.

    Mirrors the exact-search loop for ``k = t .. 1`` followed by a final
    search for leftovers.  The ledger is charged ``ceil(sqrt(t N))`` per
    probe cost; the loop's own sum is reported as ``proof_charge``.
    """
    if t < 1:
        raise ValueError("bounded_learn needs t >= 1")
    n_items = s.size
    s.charge(ceil_sqrt(t * n_items))
    proof = _loop_charge(n_items, t) * s.cost_per_probe
    marked = np.flatnonzero(s.values(np.arange(n_items)).astype(bool))
    if len(marked) > t:
        if faults is not None and faults.fire(faults.bounded_learn):
            keep = _rng(rng).choice(marked, size=t, replace=False)
            return LearnResult(tuple(sorted(int(i) for i in keep)), False, proof)
        return LearnResult((), True, proof)
    return LearnResult(tuple(int(i) for i in marked), False, proof)


def min_find(s: SearchSpace, rng=None, faults: Optional[Faults] = None) -> int:
    """An index minimising the evaluator."""
    s.charge(ceil_sqrt(s.size))
    best_val = None
    best: list[int] = []
    for start in range(0, s.size, _SCAN_CHUNK):
        idx = np.arange(start, min(s.size, start + _SCAN_CHUNK))
        vals = s.values(idx)
        lo = vals.min()
        if best_val is None or lo < best_val:
            best_val = lo
            best = idx[vals == lo].tolist()
        elif lo == best_val:
            best.extend(idx[vals == lo].tolist())
    gen = _rng(rng)
    if faults is not None and s.size > len(best) and faults.fire(faults.min_find):
        others = np.setdiff1d(np.arange(s.size), best)
        return int(gen.choice(others))
    return int(best[int(gen.integers(len(best)))])
