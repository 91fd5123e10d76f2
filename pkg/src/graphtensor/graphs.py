"""Fractional multigraphs and the named graph families.

Edges are identified by position: edge ``i`` of a graph is ``graph.edges[i]``.
Vertices are arbitrary hashable, orderable labels; every generator uses the
integers ``1..d``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

Vertex = Hashable
Weight = Fraction

ISOMORPHISM_VERTEX_LIMIT = 10


class GraphError(ValueError):
    """Raised when a graph operation's precondition fails."""


@dataclass(frozen=True)
class Edge:
    u: Vertex
    v: Vertex
    weight: Fraction = Fraction(1)

    def ends(self) -> frozenset:
        return frozenset((self.u, self.v))

    def other(self, w: Vertex) -> Vertex:
        return self.v if w == self.u else self.u


@dataclass(frozen=True)
class FractionalGraph:
    """Multigraph with positive rational edge weights and positional edge ids."""

    vertices: tuple
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError("duplicate vertex identifiers")
        for i, e in enumerate(self.edges):
            if e.u == e.v:
                raise GraphError(f"edge {i} is a self-loop at {e.u!r}")
            if e.u not in vs or e.v not in vs:
                raise GraphError(f"edge {i} has an endpoint outside the vertex list")
            if not isinstance(e.weight, Fraction) or e.weight <= 0:
                raise GraphError(f"edge {i} weight must be a positive Fraction")

    @classmethod
    def build(cls, vertices: Iterable[Vertex],
              edges: Iterable[tuple] = ()) -> FractionalGraph:
        """Create a graph from ``(u, v)`` or ``(u, v, weight)`` tuples."""
        out = []
        for item in edges:
            u, v, *rest = item
            w = Fraction(rest[0]) if rest else Fraction(1)
            out.append(Edge(u, v, w))
        return cls(tuple(vertices), tuple(out))

    # -- basic queries -------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def index(self, v: Vertex) -> int:
        return self.vertices.index(v)

    def incident(self, v: Vertex) -> list[int]:
        """Ids of edges incident with ``v``, ascending."""
        return [i for i, e in enumerate(self.edges) if v in (e.u, e.v)]

    def incidence(self) -> dict[Vertex, list[int]]:
        inc: dict[Vertex, list[int]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            inc[e.u].append(i)
            inc[e.v].append(i)
        return inc

    def degree(self, v: Vertex) -> int:
        return len(self.incident(v))

    def max_degree(self) -> int:
        inc = self.incidence()
        return max((len(x) for x in inc.values()), default=0)

    def is_integral(self) -> bool:
        return all(e.weight.denominator == 1 for e in self.edges)

    def total_weight(self) -> Fraction:
        return sum((e.weight for e in self.edges), Fraction(0))

    def pair_weights(self) -> dict[frozenset, Fraction]:
        """Total weight per unordered vertex pair (parallel edges merged)."""
        out: dict[frozenset, Fraction] = defaultdict(Fraction)
        for e in self.edges:
            out[e.ends()] += e.weight
        return dict(out)

    def expand(self) -> FractionalGraph:
        """Integer weights become parallel unit edges, in edge order.

        Fractional weights are first multiplied by the common denominator.
        """
        d = common_denominator(self)
        out = []
        for e in self.edges:
            copies = e.weight * d
            out.extend(Edge(e.u, e.v) for _ in range(int(copies)))
        return FractionalGraph(self.vertices, tuple(out))

    def subgraph(self, edge_ids: Iterable[int],
                 vertices: Iterable[Vertex] | None = None) -> FractionalGraph:
        ids = sorted(set(edge_ids))
        vs = tuple(self.vertices) if vertices is None else tuple(vertices)
        return FractionalGraph(vs, tuple(self.edges[i] for i in ids))

    def with_vertices(self, vertices: Iterable[Vertex]) -> FractionalGraph:
        """Same edges over a vertex list that must contain every endpoint."""
        return FractionalGraph(tuple(vertices), self.edges)

    def simple_adjacency(self) -> dict[Vertex, set]:
        adj: dict[Vertex, set] = {v: set() for v in self.vertices}
        for e in self.edges:
            adj[e.u].add(e.v)
            adj[e.v].add(e.u)
        return adj

    def __str__(self) -> str:
        parts = [f"{e.u}-{e.v}" + ("" if e.weight == 1 else f":{e.weight}")
                 for e in self.edges]
        return f"Graph(V={list(self.vertices)}, E=[{', '.join(parts)}])"


# -- algebra ---------------------------------------------------------------


def graph_sum(g: FractionalGraph, h: FractionalGraph) -> FractionalGraph:
    """G + H: union of vertex lists, edges of h appended after those of g."""
    vertices = list(g.vertices)
    seen = set(vertices)
    vertices.extend(v for v in h.vertices if v not in seen)
    return FractionalGraph(tuple(vertices), g.edges + h.edges)


def sum_all(graphs: Sequence[FractionalGraph]) -> FractionalGraph:
    out = graphs[0]
    for h in graphs[1:]:
        out = graph_sum(out, h)
    return out


def multiple(g: FractionalGraph, k: int) -> FractionalGraph:
    """k-fold sum k·G (parallel copies, ids block by block)."""
    if k < 1:
        raise GraphError("k must be positive")
    return sum_all([g] * k)


def scale(g: FractionalGraph, a: Fraction | int | str) -> FractionalGraph:
    a = Fraction(a)
    if a <= 0:
        raise GraphError("scale factor must be positive")
    return FractionalGraph(g.vertices, tuple(Edge(e.u, e.v, e.weight * a) for e in g.edges))


def common_denominator(g: FractionalGraph) -> int:
    return math.lcm(*(e.weight.denominator for e in g.edges)) if g.edges else 1


def contract_with_map(g: FractionalGraph, u_set: Iterable[Vertex],
                      label: Vertex | None = None):
    """Contract ``u_set`` into one vertex.

    Returns ``(G/U, a, edge_map, internal)`` where ``edge_map`` sends old edge
    ids of surviving edges to new ids and ``internal`` lists the removed ids.
    The new vertex takes the position of the first member of U in vertex order.
    """
    if not g.is_integral():
        g = g.expand()
    members = set(u_set)
    if not members:
        raise GraphError("cannot contract an empty vertex set")
    missing = members - set(g.vertices)
    if missing:
        raise GraphError(f"vertices not in graph: {sorted(map(repr, missing))}")
    first = next(v for v in g.vertices if v in members)
    w = first if label is None else label
    if label is not None and label in g.vertices and label not in members:
        raise GraphError(f"label {label!r} collides with an existing vertex")
    vertices = []
    for v in g.vertices:
        if v == first:
            vertices.append(w)
        elif v not in members:
            vertices.append(v)
    new_edges: list[Edge] = []
    edge_map: dict[int, int] = {}
    internal: list[int] = []
    a = 0
    for i, e in enumerate(g.edges):
        inu, inv = e.u in members, e.v in members
        if inu or inv:
            a += 1
        if inu and inv:
            internal.append(i)
            continue
        edge_map[i] = len(new_edges)
        new_edges.append(Edge(w if inu else e.u, w if inv else e.v, e.weight))
    return FractionalGraph(tuple(vertices), tuple(new_edges)), a, edge_map, internal


def contract(g: FractionalGraph, u_set: Iterable[Vertex],
             label: Vertex | None = None) -> tuple[FractionalGraph, int]:
    """G/U and a(U), the number of edges incident with U."""
    h, a, _, _ = contract_with_map(g, u_set, label)
    return h, a


def line_graph(g: FractionalGraph) -> FractionalGraph:
    """Simple graph on edge ids, adjacent iff the edges share an endpoint."""
    if not g.is_integral():
        g = g.expand()
    inc = g.incidence()
    pairs = set()
    for ids in inc.values():
        for a, b in itertools.combinations(ids, 2):
            pairs.add((a, b))
    return FractionalGraph.build(range(g.num_edges), sorted(pairs))


# -- isomorphism -----------------------------------------------------------


@dataclass(frozen=True)
class GraphIsomorphism:
    vertex_map: dict
    edge_map: dict


def _pair_profile(g: FractionalGraph) -> dict[frozenset, tuple]:
    prof: dict[frozenset, list] = defaultdict(list)
    for e in g.edges:
        prof[e.ends()].append(e.weight)
    return {k: tuple(sorted(v)) for k, v in prof.items()}


def find_isomorphism(g: FractionalGraph, h: FractionalGraph,
                     limit: int = ISOMORPHISM_VERTEX_LIMIT) -> GraphIsomorphism | None:
    """Exact backtracking search for a weight-preserving isomorphism."""
    if max(len(g.vertices), len(h.vertices)) > limit:
        raise GraphError(f"isomorphism search is capped at {limit} vertices")
    if len(g.vertices) != len(h.vertices) or g.num_edges != h.num_edges:
        return None
    pg, ph = _pair_profile(g), _pair_profile(h)

    def signature(graph, prof, v):
        return tuple(sorted(w for k, ws in prof.items() if v in k for w in ws))

    sig_g = {v: signature(g, pg, v) for v in g.vertices}
    sig_h = {v: signature(h, ph, v) for v in h.vertices}
    if sorted(sig_g.values()) != sorted(sig_h.values()):
        return None
    order = sorted(g.vertices, key=lambda v: -len(sig_g[v]))
    phi: dict = {}
    used: set = set()

    def consistent(v, x) -> bool:
        for u, y in phi.items():
            if pg.get(frozenset((u, v)), ()) != ph.get(frozenset((y, x)), ()):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for x in h.vertices:
            if x in used or sig_h[x] != sig_g[v] or not consistent(v, x):
                continue
            phi[v] = x
            used.add(x)
            if search(i + 1):
                return True
            del phi[v]
            used.discard(x)
        return False

    if not search(0):
        return None
    pool: dict[tuple, list[int]] = defaultdict(list)
    for j, e in enumerate(h.edges):
        pool[(e.ends(), e.weight)].append(j)
    psi = {}
    for i, e in enumerate(g.edges):
        key = (frozenset((phi[e.u], phi[e.v])), e.weight)
        psi[i] = pool[key].pop(0)
    iso = GraphIsomorphism(dict(phi), psi)
    _check_isomorphism(g, h, iso)
    return iso


def _check_isomorphism(g: FractionalGraph, h: FractionalGraph, iso: GraphIsomorphism) -> None:
    inc_g, inc_h = g.incidence(), h.incidence()
    for v in g.vertices:
        if sorted(iso.edge_map[i] for i in inc_g[v]) != sorted(inc_h[iso.vertex_map[v]]):
            raise AssertionError("isomorphism witness violates incidence")


# -- generators ------------------------------------------------------------


def clique(d: int) -> FractionalGraph:
    _positive(d=d)
    return FractionalGraph.build(range(1, d + 1), itertools.combinations(range(1, d + 1), 2))


def star(d: int, center: int) -> FractionalGraph:
    """S_d(center): center joined to every other vertex of [d]."""
    _positive(d=d)
    if not 1 <= center <= d:
        raise GraphError("center must lie in [d]")
    edges = [(center, v) for v in range(1, d + 1) if v != center]
    return FractionalGraph.build(range(1, d + 1), edges)


def matching(k: int) -> FractionalGraph:
    _positive(k=k)
    return FractionalGraph.build(range(1, 2 * k + 1), [(2 * i - 1, 2 * i) for i in range(1, k + 1)])


def cycle(d: int) -> FractionalGraph:
    if d < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return FractionalGraph.build(range(1, d + 1), [(i, i % d + 1) for i in range(1, d + 1)])


def path(m: int) -> FractionalGraph:
    """Path with m edges on vertices 1..m+1."""
    if m < 0:
        raise GraphError("path length must be nonnegative")
    return FractionalGraph.build(range(1, m + 2), [(i, i + 1) for i in range(1, m + 1)])


def grid_vertex(cols: int, i: int, j: int) -> int:
    """Label of the grid vertex in row i, column j (both 0-based)."""
    return i * cols + j + 1


def grid(rows: int, cols: int) -> FractionalGraph:
    """rows x cols grid; horizontal edges row by row, then vertical edges."""
    _positive(rows=rows, cols=cols)
    h = [(grid_vertex(cols, i, j), grid_vertex(cols, i, j + 1))
         for i in range(rows) for j in range(cols - 1)]
    v = [(grid_vertex(cols, i, j), grid_vertex(cols, i + 1, j))
         for i in range(rows - 1) for j in range(cols)]
    return FractionalGraph.build(range(1, rows * cols + 1), h + v)


def cat(k: int, d: int) -> FractionalGraph:
    """S_d(1) + ... + S_d(k)."""
    _positive(k=k, d=d)
    if k > d:
        raise GraphError("cat(k, d) needs k <= d")
    return sum_all([star(d, u) for u in range(1, k + 1)])


def hyperclique_incidence(h: int, k: int) -> FractionalGraph:
    """Bipartite incidence graph of the complete h-uniform hypergraph on [k].

    Vertices 1..C(k,h) are the hyperedges in lexicographic order of their
    vertex sets; vertices C(k,h)+1..C(k,h)+k are the hypergraph vertices.
    For (3,4) hyperedge vertex s is the 3-set at lexicographic position s.
    """
    _positive(h=h, k=k)
    if h > k:
        raise GraphError("need h <= k")
    subsets = list(itertools.combinations(range(1, k + 1), h))
    m = len(subsets)
    edges = [(s + 1, m + j) for s, sub in enumerate(subsets) for j in sub]
    return FractionalGraph.build(range(1, m + k + 1), edges)


def _positive(**params: int) -> None:
    for name, value in params.items():
        if value < 1:
            raise GraphError(f"{name} must be positive")


# -- matchings ---------------------------------------------------------------


def _bipartition(g: FractionalGraph) -> dict | None:
    side: dict = {}
    adj = g.simple_adjacency()
    for s in g.vertices:
        if s in side:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in side:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return None
    return side


def _konig_coloring(g: FractionalGraph) -> list[int]:
    """Proper edge coloring of a bipartite multigraph with max-degree colors."""
    delta = g.max_degree()
    color = [-1] * g.num_edges
    at: dict = {v: {} for v in g.vertices}  # vertex -> color -> edge id
    for i, e in enumerate(g.edges):
        a = next(c for c in range(delta) if c not in at[e.u])
        b = next(c for c in range(delta) if c not in at[e.v])
        if a not in at[e.v]:
            chosen = a
        else:
            # Swap colors a and b along the a/b path starting at e.v.
            path_edges = []
            x, c = e.v, a
            while c in at[x]:
                j = at[x][c]
                path_edges.append(j)
                x = g.edges[j].other(x)
                c = b if c == a else a
            for j in path_edges:
                ej = g.edges[j]
                del at[ej.u][color[j]]
                del at[ej.v][color[j]]
            for j in path_edges:
                ej = g.edges[j]
                color[j] = b if color[j] == a else a
                at[ej.u][color[j]] = j
                at[ej.v][color[j]] = j
            chosen = a
        color[i] = chosen
        at[e.u][chosen] = i
        at[e.v][chosen] = i
    return color


def _greedy_coloring(g: FractionalGraph) -> list[int]:
    """Greedy coloring, then merge passes that empty out the smallest classes."""
    color = [-1] * g.num_edges
    at: dict = {v: set() for v in g.vertices}
    for i, e in enumerate(g.edges):
        c = 0
        while c in at[e.u] or c in at[e.v]:
            c += 1
        color[i] = c
        at[e.u].add(c)
        at[e.v].add(c)
    changed = True
    while changed:
        changed = False
        sizes = Counter(color)
        for c in sorted(sizes, key=lambda c: (sizes[c], -c)):
            members = [i for i, x in enumerate(color) if x == c]
            moves = {}
            for i in members:
                e = g.edges[i]
                for d in sorted(sizes):
                    if d != c and d not in at[e.u] and d not in at[e.v] and \
                            all(not (moves.get(j) == d and g.edges[j].ends() & e.ends())
                                for j in moves):
                        moves[i] = d
                        break
                else:
                    break
            if len(moves) == len(members):
                for i, d in moves.items():
                    e = g.edges[i]
                    at[e.u].discard(c)
                    at[e.v].discard(c)
                    at[e.u].add(d)
                    at[e.v].add(d)
                    color[i] = d
                changed = True
                break
    return color


def edge_partition_into_matchings(g: FractionalGraph) -> list[FractionalGraph]:
    """Split E(g) into matchings.

    Bipartite inputs (grids, hyperclique incidence graphs) get an optimal
    coloring with max-degree colors; other graphs get greedy coloring plus
    merge passes.
    """
    if not g.is_integral():
        raise GraphError("matching partition needs integer weights")
    g = g.expand()
    if not g.edges:
        return []
    colors = _konig_coloring(g) if _bipartition(g) is not None else _greedy_coloring(g)
    classes: dict[int, list[int]] = defaultdict(list)
    for i, c in enumerate(colors):
        classes[c].append(i)
    return [g.subgraph(ids) for _, ids in sorted(classes.items())]


def is_matching(g: FractionalGraph) -> bool:
    return all(len(ids) <= 1 for ids in g.incidence().values())


# -- text format -------------------------------------------------------------


def dumps_graph(g: FractionalGraph) -> str:
    """``d <n>`` then ``e <u> <v> <num>/<den>`` per edge, vertices written 1..n."""
    num = {v: i + 1 for i, v in enumerate(g.vertices)}
    lines = [f"d {len(g.vertices)}"]
    lines.extend(f"e {num[e.u]} {num[e.v]} {e.weight.numerator}/{e.weight.denominator}"
                 for e in g.edges)
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> FractionalGraph:
    """Inverse of dumps_graph; ``c`` lines and blank lines are ignored."""
    count = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        try:
            if parts[0] == "d" and len(parts) == 2 and count is None:
                count = int(parts[1])
            elif parts[0] == "e" and len(parts) in (3, 4):
                w = Fraction(parts[3]) if len(parts) == 4 else Fraction(1)
                edges.append((int(parts[1]), int(parts[2]), w))
            else:
                raise ValueError(raw)
        except ValueError:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}") from None
    if count is None:
        raise GraphError("missing 'd <numVertices>' header")
    return FractionalGraph.build(range(1, count + 1), edges)


FAMILIES = {
    "clique": (clique, 1), "star": (star, 2), "matching": (matching, 1), "cycle": (cycle, 1),
    "path": (path, 1), "grid": (grid, 2), "cat": (cat, 2), "hyperclique": (hyperclique_incidence, 2),
}


def named_graph(name: str, *params: int) -> FractionalGraph:
    """A generator by family name, e.g. ``named_graph("grid", 3, 3)``."""
    try:
        build, arity = FAMILIES[name]
    except KeyError:
        raise GraphError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    if len(params) != arity:
        raise GraphError(f"{name} takes {arity} integer parameter(s)")
    return build(*params)
