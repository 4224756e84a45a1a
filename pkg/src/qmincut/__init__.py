"""Exact minimum cuts with simulated quantum query accounting."""
from .graph import (
    GraphError,
    InvalidCut,
    Partition,
    Shore,
    WeightedGraph,
    atoms,
    common_refinement,
    contract,
    cut_weight,
    total_weight,
    union_generating,
)
from .solvers import brute_min_cut, stoer_wagner

__version__ = "0.1.0"

__all__ = [
    "GraphError",
    "InvalidCut",
    "Partition",
    "Shore",
    "WeightedGraph",
    "atoms",
    "brute_min_cut",
    "common_refinement",
    "contract",
    "cut_weight",
    "stoer_wagner",
    "total_weight",
    "union_generating",
]
