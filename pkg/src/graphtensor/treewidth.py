"""Tree decompositions, exact treewidth by subset DP, and line-treewidth."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .graphs import FractionalGraph, line_graph

EXACT_VERTEX_LIMIT = 22


class TreewidthError(ValueError):
    """Raised on invalid decompositions or oversized exact queries."""


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree on node ids 0..m-1 with a bag per node."""

    bags: tuple[frozenset, ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbours(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def violations(self, g: FractionalGraph) -> list[str]:
        """Every failed validity condition, as messages; empty means valid."""
        out = []
        m = len(self.bags)
        if m == 0:
            return ["decomposition has no nodes"]
        if len(self.tree_edges) != m - 1:
            out.append(f"tree has {len(self.tree_edges)} edges for {m} nodes")
        adj = self.neighbours()
        seen, stack = {0}, [0]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != m:
            out.append("tree is not connected")
        covered = set().union(*self.bags)
        missing = [v for v in g.vertices if v not in covered]
        if missing:
            out.append(f"vertices not covered: {missing}")
        for i, e in enumerate(g.edges):
            if not any(e.u in b and e.v in b for b in self.bags):
                out.append(f"edge {i} ({e.u}, {e.v}) not covered")
        for v in g.vertices:
            holders = {i for i, b in enumerate(self.bags) if v in b}
            if not holders:
                continue
            start = next(iter(holders))
            reach, stack = {start}, [start]
            while stack:
                for y in adj[stack.pop()]:
                    if y in holders and y not in reach:
                        reach.add(y)
                        stack.append(y)
            if reach != holders:
                out.append(f"bags holding {v!r} are not connected")
        return out

    def validate(self, g: FractionalGraph) -> None:
        problems = self.violations(g)
        if problems:
            raise TreewidthError("; ".join(problems))


def _index_adjacency(g: FractionalGraph) -> tuple[list, list[int]]:
    verts = list(g.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    masks = [0] * len(verts)
    for e in g.edges:
        a, b = pos[e.u], pos[e.v]
        masks[a] |= 1 << b
        masks[b] |= 1 << a
    return verts, masks


def decomposition_from_order(g: FractionalGraph, order: Sequence) -> TreeDecomposition:
    """Fill-in bags of an elimination ordering, linked to the next eliminated neighbour."""
    if not g.vertices:
        return TreeDecomposition((frozenset(),))
    if sorted(map(repr, order)) != sorted(map(repr, g.vertices)) or len(order) != len(g.vertices):
        raise TreewidthError("order must list every vertex once")
    adj = {v: set(ns) for v, ns in g.simple_adjacency().items()}
    rank = {v: i for i, v in enumerate(order)}
    bags, later = [], []
    for v in order:
        nb = adj[v]
        bags.append(frozenset(nb | {v}))
        later.append(min(nb, key=rank.__getitem__) if nb else None)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        del adj[v]
    edges = []
    last = len(order) - 1
    for i, nxt in enumerate(later):
        if i == last:
            continue
        # Components with no later neighbour hang off the final bag.
        edges.append((i, rank[nxt] if nxt is not None else last))
    return TreeDecomposition(tuple(bags), tuple(edges))


def elimination_width(g: FractionalGraph, order: Sequence) -> int:
    return decomposition_from_order(g, order).width


def exact_treewidth(g: FractionalGraph,
                    limit: int = EXACT_VERTEX_LIMIT) -> tuple[int, TreeDecomposition]:
    """tw(g) by DP over vertex subsets; parallel edges are irrelevant."""
    if len(g.vertices) > limit:
        raise TreewidthError(f"exact treewidth is capped at {limit} vertices; "
                             "use bounds_treewidth for larger graphs")
    verts, masks = _index_adjacency(g)
    width, order = kernels.treewidth_dp(len(verts), masks)
    td = decomposition_from_order(g, [verts[i] for i in order])
    if td.width != width:
        raise AssertionError(f"decomposition width {td.width} != DP width {width}")
    return width, td


def min_fill_order(g: FractionalGraph) -> list:
    """Greedy min-fill ordering; ties go to smaller degree, then vertex order."""
    adj = {v: set(ns) for v, ns in g.simple_adjacency().items()}
    pos = {v: i for i, v in enumerate(g.vertices)}
    order = []
    while adj:
        def fill(v):
            nb = list(adj[v])
            missing = sum(1 for i, a in enumerate(nb) for b in nb[i + 1:] if b not in adj[a])
            return missing, len(nb), pos[v]
        v = min(adj, key=fill)
        nb = adj.pop(v)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        order.append(v)
    return order


def degeneracy(g: FractionalGraph) -> int:
    adj = {v: set(ns) for v, ns in g.simple_adjacency().items()}
    best = 0
    while adj:
        v = min(adj, key=lambda x: len(adj[x]))
        best = max(best, len(adj[v]))
        for a in adj.pop(v):
            adj[a].discard(v)
    return best


def bounds_treewidth(g: FractionalGraph) -> tuple[int, int, TreeDecomposition]:
    """(degeneracy lower bound, min-fill upper bound, its decomposition)."""
    if not g.vertices:
        return -1, -1, TreeDecomposition((frozenset(),))
    td = decomposition_from_order(g, min_fill_order(g))
    return degeneracy(g), td.width, td


@dataclass(frozen=True)
class LineTreewidth:
    lower: int
    upper: int
    decomposition: TreeDecomposition
    line: FractionalGraph = field(repr=False)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> int:
        if not self.exact:
            raise TreewidthError(f"line-treewidth only known to lie in [{self.lower}, {self.upper}]")
        return self.upper


def ltw(g: FractionalGraph, limit: int = EXACT_VERTEX_LIMIT) -> LineTreewidth:
    """tw of the line graph of the expanded multigraph."""
    lg = line_graph(g)
    if len(lg.vertices) <= limit:
        w, td = exact_treewidth(lg, limit)
        return LineTreewidth(w, w, td, lg)
    lo, hi, td = bounds_treewidth(lg)
    return LineTreewidth(lo, hi, td, lg)


def ltw_clique_closed_form(d: int) -> int:
    """((d-1)/2)^2 + d - 2 for odd d, ((d-2)/2)(d/2) + d - 2 for even d."""
    if d < 1:
        raise TreewidthError("d must be positive")
    if d % 2:
        return ((d - 1) // 2) ** 2 + d - 2
    return ((d - 2) // 2) * (d // 2) + d - 2


@dataclass(frozen=True)
class SandwichReport:
    tw: int
    ltw: int
    max_degree: int

    @property
    def lower(self) -> int:
        return self.tw - 1

    @property
    def upper(self) -> int:
        return (self.tw + 1) * self.max_degree - 1

    @property
    def passed(self) -> bool:
        return self.lower <= self.ltw <= self.upper


def sandwich_check(g: FractionalGraph) -> SandwichReport:
    """tw(g) - 1 <= ltw(g) <= (tw(g) + 1) * maxdeg(g) - 1."""
    g = g.expand()
    tw, _ = exact_treewidth(g)
    return SandwichReport(tw, ltw(g).value, g.max_degree())


# -- PACE text format ------------------------------------------------------------------


def dumps_pace(td: TreeDecomposition, vertices: Sequence) -> str:
    """Vertices are written 1-based in the order given."""
    num = {v: i + 1 for i, v in enumerate(vertices)}
    lines = [f"s td {len(td.bags)} {td.width + 1} {len(vertices)}"]
    for i, bag in enumerate(td.bags):
        lines.append(" ".join(["b", str(i + 1), *map(str, sorted(num[v] for v in bag))]))
    lines.extend(f"{a + 1} {b + 1}" for a, b in td.tree_edges)
    return "\n".join(lines) + "\n"


def loads_pace(text: str, vertices: Sequence) -> TreeDecomposition:
    bags: dict[int, frozenset] = {}
    edges = []
    count = None
    for raw in text.splitlines():
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "s":
            count = int(parts[2])
        elif parts[0] == "b":
            bags[int(parts[1]) - 1] = frozenset(vertices[int(x) - 1] for x in parts[2:])
        else:
            edges.append((int(parts[0]) - 1, int(parts[1]) - 1))
    if count is None or sorted(bags) != list(range(count)):
        raise TreewidthError("malformed PACE decomposition")
    return TreeDecomposition(tuple(bags[i] for i in range(count)), tuple(edges))


def star_sum_treewidth_exponent(d: int) -> Fraction:
    """(2/d)(ltw(K_d) + 1) from the closed form."""
    return Fraction(2, d) * (ltw_clique_closed_form(d) + 1)


__all__ = [
    "EXACT_VERTEX_LIMIT", "LineTreewidth", "SandwichReport", "TreeDecomposition",
    "TreewidthError", "bounds_treewidth", "decomposition_from_order", "degeneracy",
    "dumps_pace", "elimination_width", "exact_treewidth", "loads_pace", "ltw",
    "ltw_clique_closed_form", "min_fill_order", "sandwich_check",
    "star_sum_treewidth_exponent",
]

