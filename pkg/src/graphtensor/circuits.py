"""Arithmetic circuits over Fractions and the generators that build them.

A circuit is a list of gates in topological order.  Each wire carries a
scalar label; an add gate sums ``label * value`` over its wires and a mul
gate multiplies them.  Size is the number of wires.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict, deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .graphs import FractionalGraph, contract_with_map, grid, grid_vertex, line_graph, matching, multiple
from .tensors import GraphTensorIndexing, SparseTensor, flattening_rank, kronecker
from .treewidth import TreeDecomposition, TreewidthError, ltw

CONTRACTION_EDGE_LIMIT = 12
# Pairwise merges: |V| - 1 of them, each with a <= width + 1 edges,
# 2 n^a product wires and n^a sum wires.
TREEDEC_MUL_CONSTANT = 2
TREEDEC_CONSTANT = 3
CONTRACTION_CONSTANT = 2


class CircuitError(ValueError):
    """Raised on malformed circuits, missing inputs and invalid generator inputs."""


@dataclass(frozen=True)
class Gate:
    kind: str  # "input" | "const" | "add" | "mul"
    wires: tuple[tuple[int, Fraction], ...] = ()
    mode: int | None = None
    index: int | None = None
    value: Fraction | None = None


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    input_dims: tuple[int, ...]
    presimplified_size: int | None = None

    @property
    def size(self) -> int:
        return sum(len(g.wires) for g in self.gates)

    def wires_by_kind(self) -> dict[str, int]:
        out: dict[str, int] = defaultdict(int)
        for g in self.gates:
            out[g.kind] += len(g.wires)
        return dict(out)

    @property
    def mul_wires(self) -> int:
        return self.wires_by_kind().get("mul", 0)

    def recount(self) -> int:
        """Independent wire count from the dump format."""
        return sum(1 for line in dumps(self).splitlines() if line.startswith("w "))

    def topological_order(self) -> list[int]:
        indeg = [0] * len(self.gates)
        users: dict[int, list[int]] = defaultdict(list)
        for gid, g in enumerate(self.gates):
            for src, _ in g.wires:
                if not 0 <= src < len(self.gates):
                    raise CircuitError(f"gate {gid} reads unknown gate {src}")
                indeg[gid] += 1
                users[src].append(gid)
        queue = deque(i for i, d in enumerate(indeg) if d == 0)
        order = []
        while queue:
            gid = queue.popleft()
            order.append(gid)
            for u in users[gid]:
                indeg[u] -= 1
                if indeg[u] == 0:
                    queue.append(u)
        if len(order) != len(self.gates):
            raise CircuitError("circuit contains a cycle")
        return order


class CircuitBuilder:
    """Appends gates in topological order; inputs and constants are shared."""

    def __init__(self, input_dims: Sequence[int]):
        self.input_dims = tuple(input_dims)
        self.gates: list[Gate] = []
        self._inputs: dict[tuple[int, int], int] = {}
        self._consts: dict[Fraction, int] = {}
        self.attempted_wires = 0

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def input(self, mode: int, index: int) -> int:
        if not 0 <= mode < len(self.input_dims) or not 0 <= index < self.input_dims[mode]:
            raise CircuitError(f"input ({mode}, {index}) outside dims {self.input_dims}")
        key = (mode, index)
        if key not in self._inputs:
            self._inputs[key] = self._push(Gate("input", mode=mode, index=index))
        return self._inputs[key]

    def const(self, value) -> int:
        value = Fraction(value)
        if value not in self._consts:
            self._consts[value] = self._push(Gate("const", value=value))
        return self._consts[value]

    def add(self, terms: Iterable[tuple[int, object]]) -> int:
        """Sum of label * gate; zero labels are dropped before they become wires."""
        wires = []
        for src, label in terms:
            self.attempted_wires += 1
            label = Fraction(label)
            if label:
                wires.append((src, label))
        if not wires:
            return self.const(0)
        if len(wires) == 1 and wires[0][1] == 1:
            return wires[0][0]
        return self._push(Gate("add", tuple(wires)))

    def mul(self, factors: Sequence[int], label=1) -> int:
        self.attempted_wires += len(factors)
        if not factors:
            return self.const(label)
        if len(factors) == 1 and Fraction(label) == 1:
            return factors[0]
        wires = [(f, Fraction(1)) for f in factors]
        wires[0] = (factors[0], Fraction(label))
        return self._push(Gate("mul", tuple(wires)))

    def embed(self, circuit: Circuit, input_map: Callable[[int, int], int]) -> list[int]:
        """Copy ``circuit`` into this builder; its inputs become ``input_map(mode, index)``."""
        remap: dict[int, int] = {}
        for gid in circuit.topological_order():
            g = circuit.gates[gid]
            if g.kind == "input":
                remap[gid] = input_map(g.mode, g.index)
            elif g.kind == "const":
                remap[gid] = self.const(g.value)
            else:
                self.attempted_wires += len(g.wires)
                remap[gid] = self._push(Gate(g.kind, tuple((remap[s], w) for s, w in g.wires)))
        return [remap[o] for o in circuit.outputs]

    def build(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(tuple(self.gates), tuple(outputs), self.input_dims, self.attempted_wires)


def simplify(c: Circuit) -> Circuit:
    """Fold constant subcircuits, drop zero wires and unreachable gates."""
    values: dict[int, Fraction] = {}
    gates: list[Gate] = []
    remap: dict[int, int] = {}
    consts: dict[Fraction, int] = {}

    def const(v: Fraction) -> int:
        if v not in consts:
            gates.append(Gate("const", value=v))
            consts[v] = len(gates) - 1
        return consts[v]

    for gid in c.topological_order():
        g = c.gates[gid]
        if g.kind == "input":
            gates.append(g)
            remap[gid] = len(gates) - 1
            continue
        if g.kind == "const":
            values[gid] = g.value
            remap[gid] = const(g.value)
            continue
        if all(s in values for s, _ in g.wires):
            vals = [w * values[s] for s, w in g.wires]
            v = sum(vals, Fraction(0)) if g.kind == "add" else math.prod(vals, start=Fraction(1))
            values[gid] = v
            remap[gid] = const(v)
            continue
        if g.kind == "mul":
            coeff = Fraction(1)
            wires = []
            for s, w in g.wires:
                coeff *= w
                if s in values:
                    coeff *= values[s]
                else:
                    wires.append(remap[s])
            if coeff == 0:
                values[gid] = Fraction(0)
                remap[gid] = const(Fraction(0))
                continue
            ws = [(s, Fraction(1)) for s in wires]
            ws[0] = (ws[0][0], coeff)
            gates.append(Gate("mul", tuple(ws)))
        else:
            ws = []
            offset = Fraction(0)
            for s, w in g.wires:
                if s in values:
                    offset += w * values[s]
                elif w:
                    ws.append((remap[s], w))
            if offset:
                ws.append((const(offset), Fraction(1)))
            if not ws:
                values[gid] = Fraction(0)
                remap[gid] = const(Fraction(0))
                continue
            gates.append(Gate("add", tuple(ws)))
        remap[gid] = len(gates) - 1
    outputs = tuple(remap[o] for o in c.outputs)
    return _prune(Circuit(tuple(gates), outputs, c.input_dims, c.presimplified_size))


def _prune(c: Circuit) -> Circuit:
    live = set(c.outputs)
    for gid in reversed(range(len(c.gates))):
        if gid in live:
            live.update(s for s, _ in c.gates[gid].wires)
    keep = sorted(live)
    pos = {g: i for i, g in enumerate(keep)}
    gates = tuple(Gate(c.gates[g].kind, tuple((pos[s], w) for s, w in c.gates[g].wires),
                       c.gates[g].mode, c.gates[g].index, c.gates[g].value) for g in keep)
    return Circuit(gates, tuple(pos[o] for o in c.outputs), c.input_dims, c.presimplified_size)


def evaluate_circuit(c: Circuit, inputs: Sequence[Sequence]) -> list[Fraction]:
    """Values of the output gates given one vector per input mode."""
    if len(inputs) != len(c.input_dims):
        raise CircuitError(f"expected {len(c.input_dims)} input vectors, got {len(inputs)}")
    vec = [[Fraction(x) for x in v] for v in inputs]
    values: dict[int, Fraction] = {}
    for gid in c.topological_order():
        g = c.gates[gid]
        if g.kind == "input":
            try:
                values[gid] = vec[g.mode][g.index]
            except IndexError:
                raise CircuitError(f"missing input ({g.mode}, {g.index})") from None
        elif g.kind == "const":
            values[gid] = g.value
        elif g.kind == "add":
            values[gid] = sum((w * values[s] for s, w in g.wires), Fraction(0))
        elif g.kind == "mul":
            acc = Fraction(1)
            for s, w in g.wires:
                acc *= w * values[s]
            values[gid] = acc
        else:
            raise CircuitError(f"unknown gate kind {g.kind!r}")
    return [values[o] for o in c.outputs]


def evaluate_scalar(c: Circuit, inputs: Sequence[Sequence]) -> Fraction:
    out = evaluate_circuit(c, inputs)
    if len(out) != 1:
        raise CircuitError("circuit has more than one output")
    return out[0]


# -- generic and Yates circuits --------------------------------------------------------------


def monomial_circuit(t: SparseTensor) -> Circuit:
    """Direct sum of coefficient * monomial; a baseline for any sparse tensor."""
    b = CircuitBuilder(t.dims)
    terms = [(b.mul([b.input(m, i) for m, i in enumerate(key)]), c)
             for key, c in sorted(t.coeffs.items())]
    return b.build([b.add(terms)])


@dataclass(frozen=True)
class RankDecomposition:
    """T = sum_p prod_j factors[p][j], each factor a length-n_j vector."""

    factors: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @classmethod
    def of(cls, terms: Iterable[Sequence[Sequence]]) -> RankDecomposition:
        return cls(tuple(tuple(tuple(Fraction(x) for x in v) for v in term) for term in terms))

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.factors[0])

    def tensor(self) -> SparseTensor:
        out: dict[tuple, Fraction] = defaultdict(Fraction)
        for term in self.factors:
            supp = [[(i, x) for i, x in enumerate(v) if x] for v in term]
            for combo in itertools.product(*supp):
                out[tuple(i for i, _ in combo)] += math.prod((x for _, x in combo), start=Fraction(1))
        return SparseTensor(self.dims, out)

    def matrix(self, mode: int) -> list[tuple[Fraction, ...]]:
        """Rows are the mode-``mode`` factors of the r terms."""
        return [term[mode] for term in self.factors]


def monomial_decomposition(t: SparseTensor) -> RankDecomposition:
    """One rank-one term per nonzero coefficient."""
    terms = []
    for key, c in sorted(t.coeffs.items()):
        vecs = []
        for m, (i, d) in enumerate(zip(key, t.dims)):
            v = [Fraction(0)] * d
            v[i] = c if m == 0 else Fraction(1)
            vecs.append(v)
        terms.append(vecs)
    return RankDecomposition.of(terms)


def _digits_msb(x: int, base: int, count: int) -> tuple[int, ...]:
    out = []
    for _ in range(count):
        x, r = divmod(x, base)
        out.append(r)
    return tuple(reversed(out))


def yates_transform(b: CircuitBuilder, rows: Sequence[Sequence[Fraction]], leaves: Callable[[int], int],
                    n: int, k: int, stage_wires: list[int] | None = None) -> dict[tuple, int]:
    """Gates for <X, rows[t_1] x ... x rows[t_k]> for every t in [r]^k.

    ``leaves(i)`` is the gate holding X at flat index i (first factor most
    significant).  Stage q turns the last untransformed digit into a row index.
    """
    r = len(rows)
    layer = {(_digits_msb(i, n, k), ()): leaves(i) for i in range(n ** k)}
    for q in range(1, k + 1):
        before = b.attempted_wires
        nxt = {}
        for h in itertools.product(range(n), repeat=k - q):
            for i in itertools.product(range(r), repeat=q - 1):
                for t in range(r):
                    nxt[(h, (t,) + i)] = b.add((layer[(h + (p,), i)], rows[t][p])
                                               for p in range(n))
        layer = nxt
        if stage_wires is not None:
            stage_wires.append(b.attempted_wires - before)
    return {i: g for (_, i), g in layer.items()}


@dataclass(frozen=True)
class YatesCircuit:
    circuit: Circuit
    stage_wires: tuple[tuple[int, ...], ...]
    rank: int
    power: int
    modes: int

    @property
    def bound_unit(self) -> int:
        """d * k * r^(k+1)."""
        return self.modes * self.power * self.rank ** (self.power + 1)


YATES_CONSTANT = 2


def check_decomposition(dec: RankDecomposition, t: SparseTensor | None = None,
                        require_concise: bool = True) -> SparseTensor:
    dims = dec.dims
    if any(len(v) != d for term in dec.factors for v, d in zip(term, dims)):
        raise CircuitError("rank decomposition factors have inconsistent lengths")
    total = dec.tensor()
    if t is not None and total != t:
        raise CircuitError("rank decomposition does not sum to the tensor")
    if require_concise:
        if any(dec.rank < d for d in dims):
            raise CircuitError("rank decomposition needs r >= n in every mode")
        if any(flattening_rank(total, [m]) != d for m, d in enumerate(dims)):
            raise CircuitError("tensor is not concise")
    return total


def yates_circuit(dec: RankDecomposition, k: int, t: SparseTensor | None = None) -> YatesCircuit:
    """Circuit for the form T^{(x)k} on d input vectors of length n_j^k."""
    if k < 1:
        raise CircuitError("power must be positive")
    check_decomposition(dec, t)
    dims = dec.dims
    r = dec.rank
    b = CircuitBuilder(tuple(n ** k for n in dims))
    stages = []
    tops = []
    for j, n in enumerate(dims):
        sw: list[int] = []
        tops.append(yates_transform(b, dec.matrix(j), lambda i, j=j: b.input(j, i), n, k, sw))
        stages.append(tuple(sw))
    prods = [b.mul([tops[j][i] for j in range(len(dims))])
             for i in itertools.product(range(r), repeat=k)]
    out = b.add((p, 1) for p in prods)
    return YatesCircuit(b.build([out]), tuple(stages), r, k, len(dims))


# -- graph-tensor circuits ---------------------------------------------------------------------


@dataclass
class _Member:
    """A (possibly contracted) vertex: incident edges and a gate per assignment."""

    edges: tuple[int, ...]
    table: dict[tuple[int, ...], int]


def _contract_members(b: CircuitBuilder, members: Sequence[_Member], n: int,
                      stats: list | None = None) -> _Member:
    """Sum out the edges shared by members; the rest index the result."""
    count: dict[int, int] = defaultdict(int)
    for m in members:
        for e in m.edges:
            count[e] += 1
    ext = tuple(sorted(e for e, c in count.items() if c == 1))
    internal = tuple(sorted(e for e, c in count.items() if c == 2))
    if len(members) == 1 and not internal:
        return members[0]
    a = len(ext) + len(internal)
    if a > CONTRACTION_EDGE_LIMIT:
        raise CircuitError(f"contraction touches {a} edges; limit is {CONTRACTION_EDGE_LIMIT}")
    before = b.attempted_wires
    table = {}
    for alpha in itertools.product(range(n), repeat=len(ext)):
        val = dict(zip(ext, alpha))
        terms = []
        for beta in itertools.product(range(n), repeat=len(internal)):
            val.update(zip(internal, beta))
            gates = [m.table[tuple(val[e] for e in m.edges)] for m in members]
            terms.append((b.mul(gates), 1))
        table[alpha] = b.add(terms)
    if stats is not None:
        stats.append({"members": len(members), "a": a, "wires": b.attempted_wires - before})
    return _Member(ext, table)


def _merge_pairwise(b: CircuitBuilder, members: Sequence[_Member], n: int,
                    stats: list | None = None) -> _Member:
    """Fold members two at a time, each step at most 3 n^a wires."""
    acc = members[0]
    for m in members[1:]:
        acc = _contract_members(b, [acc, m], n, stats)
    return acc


def _vertex_member(b: CircuitBuilder, ix: GraphTensorIndexing, mode: int,
                   input_map: Callable[[int, int], int] | None = None) -> _Member:
    edges = ix.incident[mode]
    get = input_map or b.input
    table = {vals: get(mode, ix.encode(mode, vals))
             for vals in itertools.product(range(ix.n), repeat=len(edges))}
    return _Member(edges, table)


@dataclass(frozen=True)
class GraphCircuit:
    circuit: Circuit
    contractions: tuple[dict, ...]
    width: int
    vertices: int
    n: int

    @property
    def bound(self) -> int:
        """|V| * n^(width + 1)."""
        return self.vertices * self.n ** (self.width + 1)

    @property
    def max_a(self) -> int:
        return max((s["a"] for s in self.contractions), default=0)

    @property
    def passed(self) -> bool:
        return (self.max_a <= self.width + 1
                and self.circuit.mul_wires <= TREEDEC_MUL_CONSTANT * self.bound
                and self.circuit.size <= TREEDEC_CONSTANT * self.bound)


def _rooted_children(td: TreeDecomposition, root: int) -> tuple[list[int], dict[int, list[int]]]:
    adj = td.neighbours()
    parent = {root: None}
    order = [root]
    for x in order:
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                order.append(y)
    children: dict[int, list[int]] = defaultdict(list)
    for x in order[1:]:
        children[parent[x]].append(x)
    return order[::-1], children


def treedec_circuit(g: FractionalGraph, n: int, td: TreeDecomposition | None = None) -> GraphCircuit:
    """Circuit for the form T_{G,n} by contracting G bottom-up along a decomposition of L(G).

    Each vertex is assigned to a bag holding all its edges; a node contracts
    its assigned vertices together with the vertices its children produced.
    """
    g = g.expand()
    if td is None:
        td = ltw(g).decomposition
    problems = td.violations(line_graph(g))
    if problems:
        raise TreewidthError("invalid decomposition of the line graph: " + "; ".join(problems))
    ix = GraphTensorIndexing.of(g, n)
    b = CircuitBuilder(ix.dims)
    root = len(td.bags) - 1
    post, children = _rooted_children(td, root)
    depth_rank = {node: i for i, node in enumerate(post)}
    assigned: dict[int, list[int]] = defaultdict(list)
    for mode, edges in enumerate(ix.incident):
        holders = [t for t, bag in enumerate(td.bags) if set(edges) <= bag]
        assigned[min(holders, key=depth_rank.__getitem__)].append(mode)
    produced: dict[int, _Member | None] = {}
    stats: list[dict] = []
    for node in post:
        members = [_vertex_member(b, ix, m) for m in assigned[node]]
        members += [produced[c] for c in children[node] if produced[c] is not None]
        produced[node] = _merge_pairwise(b, members, n, stats) if members else None
    final = produced[root]
    if final is None or final.edges:
        raise AssertionError("contraction did not reach a scalar")
    out = final.table[()]
    return GraphCircuit(b.build([out]), tuple(stats), td.width, len(g.vertices), n)


@dataclass(frozen=True)
class ContractionCircuit:
    circuit: Circuit
    added_wires: int
    members: int
    a: int
    n: int

    @property
    def bound_unit(self) -> int:
        """|U| * n^a(U)."""
        return self.members * self.n ** self.a


def contraction_circuit(g: FractionalGraph, u_set: Iterable, n: int, inner: Circuit,
                        label=None) -> ContractionCircuit:
    """Circuit for T_{G,n} from a circuit for T_{G/U,n}.

    Inputs of the contracted vertex are replaced by subcircuits
    h(alpha) = sum over internal assignments of the product over U.
    """
    g = g.expand()
    members = list(dict.fromkeys(u_set))
    h, a, edge_map, _ = contract_with_map(g, members, label)
    src, dst = GraphTensorIndexing.of(g, n), GraphTensorIndexing.of(h, n)
    if inner.input_dims != dst.dims:
        raise CircuitError(f"inner circuit dims {inner.input_dims} do not match G/U {dst.dims}")
    b = CircuitBuilder(src.dims)
    pos_g = {v: i for i, v in enumerate(g.vertices)}
    kept = set(g.vertices) - set(members)
    w_mode = next(i for i, v in enumerate(h.vertices) if v not in kept)
    inv_edge = {new: old for old, new in edge_map.items()}
    before = b.attempted_wires
    umembers = [_vertex_member(b, src, pos_g[v]) for v in members]
    merged = _contract_members(b, umembers, n)
    added = b.attempted_wires - before
    # merged.edges are old ids of edges leaving U, ascending; so are I(w) in G/U.
    old_ext = tuple(inv_edge[e] for e in dst.incident[w_mode])
    if old_ext != merged.edges:
        raise AssertionError("edge order at the contracted vertex is not preserved")

    def input_map(mode: int, index: int) -> int:
        if mode == w_mode:
            return merged.table[dst.decode(mode, index)]
        return b.input(pos_g[h.vertices[mode]], index)

    out = b.embed(inner, input_map)
    return ContractionCircuit(b.build(out), added, len(members), a, n)


# -- grid contraction ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ContractionStep:
    phase: int
    block: tuple[int, int]
    members: tuple
    a: int
    cost: int
    label: object


@dataclass(frozen=True)
class GridSchedule:
    n_side: int
    k_side: int
    b: int
    steps: tuple[ContractionStep, ...]
    final: FractionalGraph

    @property
    def cost(self) -> int:
        return sum(s.cost for s in self.steps)

    @property
    def formula(self) -> int:
        """(2 b^4 + b) n^2 b^(3 n/k)."""
        m = self.n_side // self.k_side
        return (2 * self.b ** 4 + self.b) * self.n_side ** 2 * self.b ** (3 * m)

    @property
    def passed(self) -> bool:
        return self.cost <= self.formula


def grid_contraction_schedule(n_side: int, k_side: int, b: int) -> GridSchedule:
    """Rows of each block first, then the resulting path, for an n x n grid."""
    if k_side < 1 or n_side % k_side:
        raise CircuitError("k_side must divide n_side")
    m = n_side // k_side
    g = grid(n_side, n_side)
    steps = []
    for bi in range(k_side):
        for bj in range(k_side):
            row_labels = []
            for t in range(m):
                i = bi * m + t
                members = tuple(grid_vertex(n_side, i, bj * m + c) for c in range(m))
                label = ("row", bi, bj, t)
                if len(members) > 1:
                    g, a = _contract_labeled(g, members, label)
                    steps.append(ContractionStep(1, (bi, bj), members, a, len(members) * b ** a, label))
                    row_labels.append(label)
                else:
                    row_labels.append(members[0])
            acc = row_labels[0]
            for t in range(1, m):
                label = ("path", bi, bj, t)
                members = (acc, row_labels[t])
                g, a = _contract_labeled(g, members, label)
                steps.append(ContractionStep(2, (bi, bj), members, a, 2 * b ** a, label))
                acc = label
    return GridSchedule(n_side, k_side, b, tuple(steps), g)


def _contract_labeled(g: FractionalGraph, members, label):
    h, a, _, _ = contract_with_map(g, members, label)
    return h, a


def grid_contraction_circuit(schedule: GridSchedule, n: int) -> Circuit:
    """Circuit for T_{grid,n}: a decomposition circuit for the final graph, unwound step by step."""
    graphs = [grid(schedule.n_side, schedule.n_side)]
    for s in schedule.steps:
        graphs.append(_contract_labeled(graphs[-1], s.members, s.label)[0])
    circuit = treedec_circuit(graphs[-1], n).circuit
    for s, g in zip(reversed(schedule.steps), reversed(graphs[:-1])):
        circuit = contraction_circuit(g, s.members, n, circuit, s.label).circuit
    return circuit


# -- matching, rank-times-circuit -----------------------------------------------------------------


@dataclass(frozen=True)
class MatchingCircuit:
    circuit: Circuit
    k: int
    n: int
    b: int

    @property
    def core_bound(self) -> int:
        """2 k n^b."""
        return 2 * self.k * self.n ** self.b

    @property
    def core_wires(self) -> int:
        """Product wires of the k inner products; the top product adds k more."""
        return self.circuit.mul_wires - (self.k if self.k > 1 else 0)


def matching_graph(k: int, b: int) -> FractionalGraph:
    return multiple(matching(k), b)


def matching_formula_circuit(k: int, n: int, b: int = 1) -> MatchingCircuit:
    """prod_i sum_j x^(2i-1)_j x^(2i)_j over j in [n^b]: the form T_{b*M_k, n}."""
    if k < 1 or n < 1 or b < 1:
        raise CircuitError("k, n and b must be positive")
    dim = n ** b
    bld = CircuitBuilder((dim,) * (2 * k))
    sums = []
    for i in range(k):
        prods = [bld.mul([bld.input(2 * i, j), bld.input(2 * i + 1, j)]) for j in range(dim)]
        sums.append(bld.add((p, 1) for p in prods))
    return MatchingCircuit(bld.build([bld.mul(sums)]), k, n, b)


@dataclass(frozen=True)
class RankTimesCircuit:
    circuit: Circuit
    copies: int
    linear_wires: int
    inner_size: int


def rank_times_circuit(dec: RankDecomposition, inner: Circuit, u_dims: Sequence[int],
                       k: int) -> RankTimesCircuit:
    """Circuit for (U (x) T)^{(x)k}, given ``inner`` for U^{(x)k} and a decomposition of T.

    Mode j of the result has index a * n_j^k + c with a indexing U^{(x)k} and
    c indexing T^{(x)k}.  Each of the r^k copies of ``inner`` reads the
    vectors Z^(j) v_p computed by Yates transforms of the rows of Z^(j).
    """
    check_decomposition(dec, require_concise=False)
    t_dims = dec.dims
    if len(u_dims) != len(t_dims):
        raise CircuitError("U and T must have the same number of modes")
    uk = tuple(d ** k for d in u_dims)
    if inner.input_dims != uk:
        raise CircuitError(f"inner circuit dims {inner.input_dims} != U^k dims {uk}")
    tk = tuple(n ** k for n in t_dims)
    b = CircuitBuilder(tuple(a * c for a, c in zip(uk, tk)))
    before = b.attempted_wires
    # forms[j][a][p] = <row a of Z^(j), v^(j)_p>
    forms = []
    for j, n in enumerate(t_dims):
        rows = dec.matrix(j)
        forms.append([yates_transform(b, rows, lambda c, j=j, a=a: b.input(j, a * tk[j] + c), n, k)
                      for a in range(uk[j])])
    linear = b.attempted_wires - before
    outs = []
    for p in itertools.product(range(dec.rank), repeat=k):
        outs.append(b.embed(inner, lambda mode, a, p=p: forms[mode][a][p])[0])
    total = b.add((o, 1) for o in outs)
    return RankTimesCircuit(b.build([total]), dec.rank ** k, linear, inner.size)


# -- dump format ----------------------------------------------------------------------------------


def dumps(c: Circuit) -> str:
    lines = ["c dims " + " ".join(map(str, c.input_dims))]
    for gid, g in enumerate(c.gates):
        if g.kind == "input":
            lines.append(f"g {gid} input {g.mode} {g.index}")
        elif g.kind == "const":
            lines.append(f"g {gid} const {g.value.numerator}/{g.value.denominator}")
        else:
            lines.append(f"g {gid} {g.kind}")
    for gid, g in enumerate(c.gates):
        for src, w in g.wires:
            lines.append(f"w {src} {gid} {w.numerator}/{w.denominator}")
    lines.extend(f"o {o}" for o in c.outputs)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    dims: tuple[int, ...] | None = None
    kinds: dict[int, tuple] = {}
    wires: dict[int, list] = defaultdict(list)
    outputs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        tag = parts[0]
        if tag == "c" and parts[1] == "dims":
            dims = tuple(int(x) for x in parts[2:])
        elif tag == "g":
            gid, kind = int(parts[1]), parts[2]
            kinds[gid] = (kind, parts[3:])
        elif tag == "w":
            wires[int(parts[2])].append((int(parts[1]), Fraction(parts[3])))
        elif tag == "o":
            outputs.append(int(parts[1]))
        else:
            raise CircuitError(f"line {lineno}: unknown record {tag!r}")
    if dims is None or sorted(kinds) != list(range(len(kinds))):
        raise CircuitError("circuit dump is missing dims or has non-contiguous gate ids")
    gates = []
    for gid in range(len(kinds)):
        kind, rest = kinds[gid]
        if kind == "input":
            gates.append(Gate("input", mode=int(rest[0]), index=int(rest[1])))
        elif kind == "const":
            gates.append(Gate("const", value=Fraction(rest[0])))
        elif kind in ("add", "mul"):
            gates.append(Gate(kind, tuple(wires[gid])))
        else:
            raise CircuitError(f"gate {gid}: unknown kind {kind!r}")
    return Circuit(tuple(gates), tuple(outputs), dims)


def kron_oracle(u: SparseTensor, t: SparseTensor, k: int) -> SparseTensor:
    """U^{(x)k} (x) T^{(x)k}, the tensor rank_times_circuit computes."""
    from .tensors import kronecker_power
    return kronecker(kronecker_power(u, k), kronecker_power(t, k))


__all__ = [
    "Circuit", "CircuitBuilder", "CircuitError", "ContractionCircuit", "ContractionStep",
    "Gate", "GraphCircuit", "GridSchedule", "MatchingCircuit", "RankDecomposition",
    "RankTimesCircuit", "CONTRACTION_CONSTANT", "TREEDEC_CONSTANT", "TREEDEC_MUL_CONSTANT",
    "YATES_CONSTANT", "YatesCircuit", "check_decomposition",
    "contraction_circuit", "dumps", "evaluate_circuit", "evaluate_scalar",
    "grid_contraction_circuit", "grid_contraction_schedule", "kron_oracle", "loads",
    "matching_formula_circuit", "matching_graph", "monomial_circuit",
    "monomial_decomposition", "rank_times_circuit", "simplify", "treedec_circuit",
    "yates_circuit", "yates_transform",
]
