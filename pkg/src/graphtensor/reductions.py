"""Permanent-from-grid and hyperclique-from-incidence-graph reductions, with independent oracles."""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .circuits import GraphCircuit, evaluate_scalar, treedec_circuit
from .graphs import FractionalGraph, grid, grid_vertex, hyperclique_incidence, line_graph
from .tensors import (GraphTensorIndexing, SparseTensor, Substitution, evaluate,
                      evaluate_graph_tensor, graph_tensor)
from .treewidth import TreeDecomposition, decomposition_from_order, exact_treewidth, min_fill_order

PERMANENT_MAX_N = 6
BRUTE_FORCE_EDGE_LIMIT = 24
HYPERCLIQUE_MAX_N = 2
SLOTS = ("t", "r", "b", "l")


class ReductionError(ValueError):
    """Raised on size guards and malformed inputs."""


# -- permanent ------------------------------------------------------------------------------------


def ryser(a: Sequence[Sequence[int]]) -> int:
    """Permanent by Ryser's inclusion-exclusion formula."""
    n = len(a)
    if n == 0:
        return 1
    total = 0
    for mask in range(1, 1 << n):
        cols = [j for j in range(n) if mask >> j & 1]
        prod = 1
        for row in a:
            prod *= sum(row[j] for j in cols)
        total += (-1) ** len(cols) * prod
    return (-1) ** n * total


def _square(a: Sequence[Sequence[int]]) -> list[list[int]]:
    rows = [list(map(int, r)) for r in a]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ReductionError("matrix must be square and nonempty")
    return rows


def _slots(side: int, i: int, j: int, ix: GraphTensorIndexing, g: FractionalGraph,
           mode: int) -> list[str]:
    """Slot names (t, r, b, l) of the incident edges of v_{i,j}, in local-index order."""
    out = []
    for e in ix.incident[mode]:
        other = g.edges[e].other(grid_vertex(side, i, j))
        oi, oj = divmod(other - 1, side)
        out.append({(-1, 0): "t", (0, 1): "r", (1, 0): "b", (0, -1): "l"}[(oi - i, oj - j)])
    return out


def _signature(side: int, i: int, j: int, slots: Sequence[str],
               entry: Callable[[int, int], object]) -> list:
    """Signature table of v_{i,j} indexed by the local index over its incident edges."""
    n = side - 2
    table = []
    for local in range(2 ** len(slots)):
        val = {s: (local >> p) & 1 for p, s in enumerate(slots)}
        if (i in (0, n + 1)) and (j in (0, n + 1)):
            table.append(1)  # corner
        elif i == 0 or j == 0:
            table.append(int(all(v == 0 for v in val.values())))
        elif i == n + 1 or j == n + 1:
            table.append(int(all(v == 1 for v in val.values())))
        else:
            t, r, b, l = (val[s] for s in SLOTS)
            if t == b and l == r:
                table.append(1)
            elif t == l == 0 and r == b == 1:
                table.append(entry(i - 1, j - 1))
            else:
                table.append(0)
    return table


@dataclass(frozen=True)
class PermanentInstance:
    """The (n+2) x (n+2) grid with one signature table per vertex."""

    n: int
    graph: FractionalGraph
    signatures: tuple[tuple, ...]
    slots: tuple[tuple[str, ...], ...]

    @property
    def indexing(self) -> GraphTensorIndexing:
        return GraphTensorIndexing.of(self.graph, 2)

    def coordinates(self, mode: int) -> tuple[int, int]:
        return divmod(self.graph.vertices[mode] - 1, self.n + 2)


def permanent_instance(a: Sequence[Sequence[int]]) -> PermanentInstance:
    rows = _square(a)
    n = len(rows)
    side = n + 2
    g = grid(side, side)
    ix = GraphTensorIndexing.of(g, 2)
    sigs, slots = [], []
    for mode, v in enumerate(g.vertices):
        i, j = divmod(v - 1, side)
        s = _slots(side, i, j, ix, g, mode)
        slots.append(tuple(s))
        sigs.append(tuple(_signature(side, i, j, s, lambda r, c: rows[r][c])))
    return PermanentInstance(n, g, tuple(sigs), tuple(slots))


@dataclass(frozen=True)
class PermanentCircuit:
    n: int
    graph: FractionalGraph
    circuit: GraphCircuit

    def evaluate(self, a: Sequence[Sequence[int]]) -> int:
        inst = permanent_instance(a)
        if inst.n != self.n:
            raise ReductionError(f"circuit is for {self.n} x {self.n} matrices")
        value = evaluate_scalar(self.circuit.circuit, inst.signatures)
        if value.denominator != 1:
            raise AssertionError("integer inputs produced a non-integer value")
        return int(value)


def line_decomposition(g: FractionalGraph) -> TreeDecomposition:
    """Exact for small line graphs, min-fill otherwise."""
    lg = line_graph(g)
    if len(lg.vertices) <= 22:
        return exact_treewidth(lg)[1]
    return decomposition_from_order(lg, min_fill_order(lg))


def permanent_circuit(n: int) -> PermanentCircuit:
    """Decomposition circuit for T_{G,2} on the (n+2) x (n+2) grid; the matrix enters as inputs."""
    if not 1 <= n <= PERMANENT_MAX_N:
        raise ReductionError(f"permanent reduction supports 1 <= n <= {PERMANENT_MAX_N}")
    g = grid(n + 2, n + 2)
    return PermanentCircuit(n, g, treedec_circuit(g, 2, line_decomposition(g)))


def permanent_reduction(a: Sequence[Sequence[int]],
                        circuit: PermanentCircuit | None = None) -> tuple[PermanentCircuit, int]:
    """per(A) as T_{G,2} evaluated at the grid signatures."""
    rows = _square(a)
    if circuit is None:
        circuit = permanent_circuit(len(rows))
    return circuit, circuit.evaluate(rows)


def nonzero_assignments(inst: PermanentInstance):
    """Edge assignments with nonzero weight, by backtracking with per-vertex pruning."""
    g = inst.graph
    ix = inst.indexing
    inc = ix.incident
    mode_of_vertex = {v: m for m, v in enumerate(g.vertices)}
    order = sorted(range(g.num_edges),
                   key=lambda e: (min(mode_of_vertex[g.edges[e].u], mode_of_vertex[g.edges[e].v]), e))
    allowed = [{loc for loc, w in enumerate(sig) if w != 0} for sig in inst.signatures]
    ends = [(mode_of_vertex[e.u], mode_of_vertex[e.v]) for e in g.edges]
    value = [None] * g.num_edges

    def consistent(mode: int) -> bool:
        for loc in allowed[mode]:
            if all(value[e] is None or value[e] == (loc >> p) & 1 for p, e in enumerate(inc[mode])):
                return True
        return False

    def rec(pos: int):
        if pos == len(order):
            yield tuple(value)
            return
        e = order[pos]
        for bit in (0, 1):
            value[e] = bit
            if all(consistent(m) for m in ends[e]):
                yield from rec(pos + 1)
        value[e] = None

    yield from rec(0)


@dataclass(frozen=True)
class BruteForceReport:
    matrix: tuple[tuple[int, ...], ...]
    holant: int
    circuit: int
    ryser: int
    enumerated: int
    nonzero_assignments: int
    flips_form_permutations: bool

    @property
    def passed(self) -> bool:
        return self.holant == self.circuit == self.ryser == self.enumerated \
            and self.flips_form_permutations

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"passed": self.passed}


def flip_vertices(inst: PermanentInstance, assignment: Sequence[int]) -> list[tuple[int, int]]:
    """Interior vertices in the flip state, as 0-based matrix positions."""
    out = []
    for mode, edges in enumerate(inst.indexing.incident):
        i, j = inst.coordinates(mode)
        if not (1 <= i <= inst.n and 1 <= j <= inst.n):
            continue
        val = dict(zip(inst.slots[mode], (assignment[e] for e in edges)))
        if val["t"] == val["l"] == 0 and val["r"] == val["b"] == 1:
            out.append((i - 1, j - 1))
    return out


def permanent_bruteforce_check(a: Sequence[Sequence[int]],
                               circuit: PermanentCircuit | None = None) -> BruteForceReport:
    """Exhaustive Holant sum over all 2^|E| edge assignments, against the circuit and Ryser."""
    rows = _square(a)
    inst = permanent_instance(rows)
    if inst.graph.num_edges > BRUTE_FORCE_EDGE_LIMIT:
        raise ReductionError(f"brute force is capped at {BRUTE_FORCE_EDGE_LIMIT} edges (n = 2)")
    holant = kernels.holant_sum(2, inst.graph.num_edges, [list(x) for x in inst.indexing.incident],
                                [list(s) for s in inst.signatures])
    _, via_circuit = permanent_reduction(rows, circuit)
    enumerated, count, perm_ok = 0, 0, True
    n = len(rows)
    for assignment in nonzero_assignments(inst):
        flips = flip_vertices(inst, assignment)
        count += 1
        perm_ok &= len(flips) == n and sorted(j for _, j in flips) == list(range(n)) \
            and sorted(i for i, _ in flips) == list(range(n))
        weight = 1
        for mode, edges in enumerate(inst.indexing.incident):
            weight *= inst.signatures[mode][sum(assignment[e] << p for p, e in enumerate(edges))]
        enumerated += weight
    return BruteForceReport(tuple(map(tuple, rows)), holant, via_circuit, ryser(rows),
                            enumerated, count, perm_ok)


# -- hypercliques ---------------------------------------------------------------------------------


def hyperclique_modes(h: int, k: int) -> list[tuple[int, ...]]:
    """The h-subsets of [k] (1-based) in lexicographic order."""
    return list(itertools.combinations(range(1, k + 1), h))


def hyperclique_index(values: Sequence[int], big: int) -> int:
    """f|_S as an index, first member most significant."""
    out = 0
    for v in values:
        out = out * big + v
    return out


def hyperclique_tensor(h: int, k: int, big: int, limit: int = 1 << 20) -> SparseTensor:
    """H^N_{h,k} = sum over f: [k] -> [N] of prod_S x^(S)_{f|S}."""
    if not 1 <= h <= k or big < 1:
        raise ReductionError("need 1 <= h <= k and N >= 1")
    if big ** k > limit:
        raise ReductionError(f"H^N_(h,k) has N^k = {big ** k} terms; limit is {limit}")
    modes = hyperclique_modes(h, k)
    coeffs: dict[tuple, Fraction] = {}
    for f in itertools.product(range(big), repeat=k):
        key = tuple(hyperclique_index([f[s - 1] for s in S], big) for S in modes)
        coeffs[key] = coeffs.get(key, Fraction(0)) + 1
    return SparseTensor((big ** h,) * len(modes), coeffs)


def hyperclique_substitution(h: int, k: int, big: int) -> Substitution:
    """Projection of T_{I,N} onto H^N_{h,k}.

    Hypergraph-vertex modes become the indicator of a constant index;
    hyperedge modes are relabeled from the local edge order to H's index.
    """
    g = hyperclique_incidence(h, k)
    ix = GraphTensorIndexing.of(g, big)
    m = len(hyperclique_modes(h, k))
    mode_map, images = [], []
    for mode in range(len(g.vertices)):
        if mode < m:
            img = {}
            for a in range(ix.dims[mode]):
                # Incident edges of hyperedge S are its members in ascending order.
                img[a] = {hyperclique_index(ix.decode(mode, a), big): 1}
            mode_map.append(mode)
            images.append(img)
        else:
            mode_map.append(None)
            images.append({a: int(len(set(ix.decode(mode, a))) == 1) for a in range(ix.dims[mode])})
    return Substitution(ix.dims, (big ** h,) * m, tuple(mode_map), tuple(images))


@dataclass(frozen=True)
class HypercliqueReport:
    h: int
    k: int
    big: int
    graph_nonzeros: int
    target_nonzeros: int
    equal: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def hyperclique_projection_check(big: int, h: int = 3, k: int = 4) -> HypercliqueReport:
    """Apply the substitution to T_{I,N} and compare with H^N_{h,k} coefficient by coefficient."""
    if (h, k) != (3, 4):
        raise ReductionError("the projection check covers (h, k) = (3, 4)")
    if not 1 <= big <= HYPERCLIQUE_MAX_N:
        raise ReductionError(f"T_(I,N) is materialized only for N <= {HYPERCLIQUE_MAX_N}")
    t = graph_tensor(hyperclique_incidence(h, k), big)
    projected = hyperclique_substitution(h, k, big).apply(t)
    target = hyperclique_tensor(h, k, big)
    return HypercliqueReport(h, k, big, t.nnz, target.nnz, projected == target)


def _indicator_inputs(hyperedges, big: int, h: int, k: int) -> list[list[int]]:
    edges = {frozenset(e) for e in hyperedges}
    vec = [int(len(set(f)) == h and frozenset(f) in edges)
           for f in itertools.product(range(big), repeat=h)]
    return [vec for _ in hyperclique_modes(h, k)]


@dataclass(frozen=True)
class HypercliqueCount:
    cliques: int
    via_tensor: int
    via_graph: int

    @property
    def passed(self) -> bool:
        return self.cliques == self.via_tensor == self.via_graph


def hyperclique_count(hyperedges, big: int, h: int = 3, k: int = 4) -> HypercliqueCount:
    """Number of k-hypercliques in an h-uniform hypergraph on vertices 0..N-1, three ways.

    With 0/1 indicator inputs H^N_{h,k} counts injective f: [k] -> [N] whose
    h-subsets are all hyperedges, i.e. k! times the number of cliques.
    """
    edges = {frozenset(e) for e in hyperedges}
    if any(len(e) != h or not all(0 <= v < big for v in e) for e in edges):
        raise ReductionError(f"hyperedges must be {h}-sets of vertices in [0, {big})")
    brute = sum(1 for c in itertools.combinations(range(big), k)
                if all(frozenset(s) in edges for s in itertools.combinations(c, h)))
    ind = _indicator_inputs(edges, big, h, k)
    via_tensor = evaluate(hyperclique_tensor(h, k, big), ind)
    g = hyperclique_incidence(h, k)
    ix = GraphTensorIndexing.of(g, big)
    m = len(hyperclique_modes(h, k))
    graph_inputs = []
    for mode in range(len(g.vertices)):
        if mode < m:
            graph_inputs.append([ind[mode][hyperclique_index(ix.decode(mode, a), big)]
                                 for a in range(ix.dims[mode])])
        else:
            graph_inputs.append([int(len(set(ix.decode(mode, a))) == 1) for a in range(ix.dims[mode])])
    via_graph = evaluate_graph_tensor(g, big, graph_inputs)
    fact = math.factorial(k)
    for v in (via_tensor, via_graph):
        if v % fact:
            raise AssertionError(f"ordered clique count {v} is not divisible by {fact}")
    return HypercliqueCount(brute, int(via_tensor) // fact, int(via_graph) // fact)


__all__ = [
    "BruteForceReport", "HypercliqueCount", "HypercliqueReport", "PERMANENT_MAX_N",
    "PermanentCircuit", "PermanentInstance", "ReductionError", "flip_vertices",
    "hyperclique_count", "hyperclique_index", "hyperclique_modes", "hyperclique_projection_check",
    "hyperclique_substitution", "hyperclique_tensor", "line_decomposition", "nonzero_assignments",
    "permanent_bruteforce_check", "permanent_circuit", "permanent_instance",
    "permanent_reduction", "ryser",
]
