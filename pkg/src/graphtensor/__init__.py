"""Graph tensors, their exponent bounds, circuits and reductions."""

from . import circuits, exponents, graphs, kernels, laser, reductions, tensors, treewidth
from .circuits import Circuit, treedec_circuit, yates_circuit
from .exponents import OmegaTable, decompose_optimize, star_sum_bound, table1
from .graphs import (FractionalGraph, cat, clique, cycle, graph_sum, grid, hyperclique_incidence,
                     line_graph, matching, star)
from .laser import optimize_tau_k4, tau_k4_bound
from .reductions import permanent_reduction, ryser
from .tensors import SparseTensor, evaluate, flattening_rank, graph_tensor, kronecker
from .treewidth import exact_treewidth, ltw, ltw_clique_closed_form

__version__ = "0.1.0"

__all__ = [
    "Circuit", "FractionalGraph", "OmegaTable", "SparseTensor", "cat", "circuits", "clique",
    "cycle", "decompose_optimize", "evaluate", "exact_treewidth", "exponents", "flattening_rank",
    "graph_sum", "graph_tensor", "graphs", "grid", "hyperclique_incidence", "kernels",
    "kronecker", "laser", "line_graph", "ltw", "ltw_clique_closed_form", "matching",
    "optimize_tau_k4", "permanent_reduction", "reductions", "ryser", "star", "star_sum_bound",
    "table1", "tau_k4_bound", "tensors", "treedec_circuit", "treewidth", "yates_circuit",
]
