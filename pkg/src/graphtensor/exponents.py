"""Exponent bounds with derivation trees, conic decompositions and Table-style output.

Every bound is an exact Fraction built from the decimal entries of an
``OmegaTable``; its derivation tree recomputes the same Fraction.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import lp
from .graphs import FractionalGraph, cat, clique, edge_partition_into_matchings, multiple
from .tensors import check_sum_rule
from .treewidth import ltw, ltw_clique_closed_form


class ExponentError(ValueError):
    """Raised on missing table entries, invalid decompositions or oversized searches."""


class SearchTooLarge(ExponentError):
    pass


# -- omega table ---------------------------------------------------------------------


@dataclass(frozen=True)
class OmegaTable:
    """Upper bounds on omega(t) keyed by rational t, plus the tau(4) bound."""

    omega: Mapping[Fraction, Fraction]
    tau4: Fraction
    source: str = "builtin"

    def __post_init__(self) -> None:
        for t, w in self.omega.items():
            if t <= 0 or w < 2:
                raise ExponentError(f"invalid omega entry omega({t}) = {w}")
        if self.tau4 <= 0:
            raise ExponentError("tau(4) bound must be positive")

    def omega_of(self, t) -> Fraction:
        t = Fraction(t)
        try:
            return self.omega[t]
        except KeyError:
            raise ExponentError(f"omega({t}) is not in the table; entries: "
                                f"{sorted(map(str, self.omega))}") from None

    @property
    def omega1(self) -> Fraction:
        return self.omega_of(1)

    @classmethod
    def loads(cls, text: str, source: str = "<string>") -> OmegaTable:
        omega: dict[Fraction, Fraction] = {}
        tau = None
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "omega" and len(parts) == 3:
                omega[Fraction(parts[1])] = Fraction(parts[2])
            elif parts[0] == "tau" and len(parts) == 3 and parts[1] == "4":
                tau = Fraction(parts[2])
            else:
                raise ExponentError(f"{source}:{lineno}: cannot parse {raw!r}")
        if tau is None:
            raise ExponentError(f"{source}: missing 'tau 4' line")
        return cls(omega, tau, source)

    @classmethod
    def load(cls, path: str | Path) -> OmegaTable:
        return cls.loads(Path(path).read_text(), str(path))

    @classmethod
    def default(cls) -> OmegaTable:
        text = resources.files("graphtensor").joinpath("data/omega_table.txt").read_text()
        return cls.loads(text, "builtin")

    def dumps(self) -> str:
        lines = [f"omega {t.numerator}/{t.denominator} {_decimal(w)}"
                 for t, w in sorted(self.omega.items())]
        lines.append(f"tau 4 {_decimal(self.tau4)}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {"omega": {str(t): _decimal(w) for t, w in sorted(self.omega.items())},
                "tau4": _decimal(self.tau4), "source": self.source}


def _decimal(x: Fraction, places: int | None = None) -> str:
    """Exact decimal string when x terminates, else rounded to ``places`` (default 12)."""
    if places is None:
        den = x.denominator
        for p in (2, 5):
            while den % p == 0:
                den //= p
        if den == 1:
            places = 0
            while (x * 10 ** places).denominator != 1:
                places += 1
        else:
            places = 12
    scaled = round(x * 10 ** places)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    if places == 0:
        return f"{sign}{scaled}"
    return f"{sign}{scaled // 10 ** places}.{scaled % 10 ** places:0{places}d}"


def round_up(x: Fraction, places: int = 2) -> str:
    """Smallest decimal with ``places`` digits that is >= x."""
    q = Fraction(math.ceil(x * 10 ** places), 10 ** places)
    return _decimal(q, places)


# -- derivation trees -----------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    """One node of a derivation: a leaf value, a sum of children, or a scaled child."""

    rule: str
    value: Fraction
    op: str = "leaf"
    factor: Fraction = Fraction(1)
    children: tuple[Step, ...] = ()
    note: str = ""

    @classmethod
    def leaf(cls, rule: str, value, note: str = "") -> Step:
        return cls(rule, Fraction(value), note=note)

    @classmethod
    def total(cls, rule: str, children: Sequence[Step], note: str = "") -> Step:
        value = sum((c.value for c in children), Fraction(0))
        return cls(rule, value, "sum", children=tuple(children), note=note)

    @classmethod
    def scale(cls, rule: str, factor, child: Step, note: str = "") -> Step:
        factor = Fraction(factor)
        return cls(rule, factor * child.value, "scale", factor, (child,), note)

    def recompute(self) -> Fraction:
        if self.op == "leaf":
            return self.value
        if self.op == "sum":
            return sum((c.recompute() for c in self.children), Fraction(0))
        if self.op == "scale":
            return self.factor * self.children[0].recompute()
        raise ExponentError(f"unknown derivation op {self.op!r}")

    def to_dict(self) -> dict:
        out = {"rule": self.rule, "value": str(self.value), "decimal": _decimal(self.value, 9),
               "op": self.op}
        if self.op == "scale":
            out["factor"] = str(self.factor)
        if self.note:
            out["note"] = self.note
        if self.children:
            out["children"] = [c.to_dict() for c in self.children]
        return out

    def render(self, indent: int = 0) -> str:
        head = f"{'  ' * indent}{self.rule}: {_decimal(self.value, 6)}"
        if self.op == "scale":
            head += f" (x {self.factor})"
        if self.note:
            head += f"  [{self.note}]"
        return "\n".join([head, *(c.render(indent + 1) for c in self.children)])

    def walk(self) -> Iterable[Step]:
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class ExponentBound:
    value: Fraction
    derivation: Step
    conditional: bool = False

    def verify(self) -> bool:
        return self.derivation.recompute() == self.value == self.derivation.value

    def rounded(self, places: int = 2) -> str:
        return round_up(self.value, places)

    def to_dict(self) -> dict:
        return {"value": str(self.value), "decimal": _decimal(self.value, 9),
                "conditional": self.conditional, "derivation": self.derivation.to_dict()}


def _bound(step: Step) -> ExponentBound:
    return ExponentBound(step.value, step)


# -- conic decompositions --------------------------------------------------------------


def pair_key(g_or_vertices, u, v) -> tuple:
    """Vertex pair ordered by position in the vertex list."""
    order = g_or_vertices.vertices if isinstance(g_or_vertices, FractionalGraph) else g_or_vertices
    pos = {x: i for i, x in enumerate(order)}
    return (u, v) if pos[u] < pos[v] else (v, u)


@dataclass(frozen=True)
class Part:
    kind: str  # "triangle" | "edges" | "treewidth"
    graph: FractionalGraph
    weight: Fraction = Fraction(1)
    t: Fraction | None = None
    triangle: tuple | None = None  # (apex, j, k): edge jk carries weight t

    def describe(self) -> str:
        if self.kind == "triangle":
            i, j, k = self.triangle
            return f"{self.weight} x triangle({i},{j},{k}; t={self.t})"
        edges = ", ".join(f"{e.u}{e.v}" for e in self.graph.edges)
        return f"{self.kind}[{edges}]"


def t_triangle(vertices: Sequence, i, j, k, t) -> FractionalGraph:
    """Triangle on i, j, k with weight t on jk and weight 1 on ij and ik."""
    return FractionalGraph.build(vertices, [(i, j, 1), (i, k, 1), (j, k, Fraction(t))])


def triangle_part(vertices: Sequence, i, j, k, t, weight=1) -> Part:
    return Part("triangle", t_triangle(vertices, i, j, k, t), Fraction(weight), Fraction(t), (i, j, k))


@dataclass(frozen=True)
class ConicDecomposition:
    target: FractionalGraph
    parts: tuple[Part, ...]

    def residual(self) -> dict:
        """Target pair weights minus the weighted parts; empty when exact."""
        acc: dict = {}
        for p, w in self.target.pair_weights().items():
            acc[p] = acc.get(p, 0) + w
        for part in self.parts:
            for p, w in part.graph.pair_weights().items():
                acc[p] = acc.get(p, 0) - part.weight * w
        return {p: w for p, w in acc.items() if w}

    def is_valid(self) -> bool:
        return not self.residual()

    def validate(self) -> None:
        bad = self.residual()
        if bad:
            shown = {tuple(sorted(p, key=repr)): str(w) for p, w in bad.items()}
            raise ExponentError(f"decomposition does not sum to the target: residual {shown}")

    def g2(self) -> FractionalGraph:
        edges = [e for p in self.parts if p.kind == "edges" for e in p.graph.edges]
        return FractionalGraph(self.target.vertices, tuple(edges))

    def g3(self) -> FractionalGraph:
        edges = [e for p in self.parts if p.kind == "treewidth" for e in p.graph.edges]
        return FractionalGraph(self.target.vertices, tuple(edges))

    def triangles(self) -> list[Part]:
        return [p for p in self.parts if p.kind == "triangle"]


def omega_bound_triangle(t, table: OmegaTable | None = None) -> Fraction:
    """omega(t) straight from the table; no interpolation."""
    return (table or OmegaTable.default()).omega_of(t)


def _g3_cost(g3: FractionalGraph) -> tuple[int, Step]:
    if not g3.edges:
        return 0, Step.leaf("line-treewidth part", 0, "empty")
    width = ltw(g3).value
    return width + 1, Step.leaf("line-treewidth part", width + 1,
                                f"ltw = {width} over {g3.expand().num_edges} edges")


def conic_bound(dec: ConicDecomposition, table: OmegaTable | None = None,
                copies: int = 1) -> ExponentBound:
    """omega-weighted triangles + |E(G2)| + (ltw(G3) + 1), divided by ``copies``."""
    table = table or OmegaTable.default()
    dec.validate()
    tri_steps = [Step.scale("weighted triangle", p.weight,
                            Step.leaf(f"omega({p.t})", table.omega_of(p.t), "table lookup"),
                            p.describe())
                 for p in dec.triangles()]
    rank_part = Step.total("fractional subadditivity", tri_steps)
    g2 = dec.g2()
    if not g2.is_integral():
        raise ExponentError("rank-one edge part must have integer weights")
    g2_step = Step.leaf("edge part", g2.expand().num_edges, "one factor n per edge")
    _, g3_step = _g3_cost(dec.g3())
    total = Step.total("rank and circuit combination", [rank_part, g2_step, g3_step])
    if copies != 1:
        total = Step.scale("per-copy normalization", Fraction(1, copies), total,
                           f"tensor power {copies}")
    return _bound(total)


def canned_two_k4() -> ConicDecomposition:
    """2*K_4 = four 1/2-triangles + matching {12, 34}."""
    g = multiple(clique(4), 2)
    vs = g.vertices
    half = Fraction(1, 2)
    parts = [triangle_part(vs, 3, 1, 2, half), triangle_part(vs, 4, 1, 2, half),
             triangle_part(vs, 1, 3, 4, half), triangle_part(vs, 2, 3, 4, half),
             Part("treewidth", FractionalGraph.build(vs, [(1, 2), (3, 4)]))]
    return ConicDecomposition(g, tuple(parts))


def canned_cat35() -> ConicDecomposition:
    """cat(3,5) = 1-triangle(1;3,5) + 2-triangle(1;2,3) + edge 24 + path 3-4-1-2-5."""
    g = cat(3, 5)
    vs = g.vertices
    parts = [triangle_part(vs, 1, 3, 5, 1), triangle_part(vs, 1, 2, 3, 2),
             Part("edges", FractionalGraph.build(vs, [(2, 4)])),
             Part("treewidth", FractionalGraph.build(vs, [(3, 4), (1, 4), (1, 2), (2, 5)]))]
    return ConicDecomposition(g, tuple(parts))


# -- decomposition search ------------------------------------------------------------------


@dataclass(frozen=True)
class SearchConfig:
    max_vertices: int = 6
    max_g2: int = 2
    max_g3: int = 5
    max_candidates: int = 400_000


@dataclass(frozen=True)
class SearchReport:
    g3_candidates: int
    candidates: int
    evaluated: int
    lps_solved: int
    pruned: int
    config: SearchConfig
    triangle_ts: tuple[Fraction, ...]

    def to_dict(self) -> dict:
        return {"g3_candidates": self.g3_candidates, "candidates": self.candidates,
                "evaluated": self.evaluated, "lps_solved": self.lps_solved,
                "pruned": self.pruned,
                "max_g2_edges": self.config.max_g2, "max_g3_edges": self.config.max_g3,
                "triangle_t": [str(t) for t in self.triangle_ts]}


@dataclass(frozen=True)
class OptimizeResult:
    decomposition: ConicDecomposition
    bound: ExponentBound
    total: Fraction
    report: SearchReport


def _bounded_vectors(caps: Sequence[int], budget: int) -> list[tuple[int, ...]]:
    out = []

    def rec(i, left, acc):
        if i == len(caps):
            out.append(tuple(acc))
            return
        for c in range(min(caps[i], left) + 1):
            acc.append(c)
            rec(i + 1, left - c, acc)
            acc.pop()

    rec(0, budget, [])
    return out


def _triangle_columns(vertices, pairs, residual, ts):
    """LP columns: (apex, j, k, t) with all three pairs carrying positive residual."""
    index = {p: i for i, p in enumerate(pairs)}
    live = {p for p, w in zip(pairs, residual) if w > 0}
    pos = {v: i for i, v in enumerate(vertices)}

    def key(a, b):
        return (a, b) if pos[a] < pos[b] else (b, a)

    cols = []
    for a, b, c in itertools.combinations(vertices, 3):
        if not {key(a, b), key(a, c), key(b, c)} <= live:
            continue
        for t in ts:
            apexes = (a,) if t == 1 else (a, b, c)
            for i in apexes:
                j, k = [x for x in (a, b, c) if x != i]
                col = [Fraction(0)] * len(pairs)
                col[index[key(i, j)]] += 1
                col[index[key(i, k)]] += 1
                col[index[key(j, k)]] += t
                cols.append(((i, j, k, t), col))
    return cols


def _solve_residual(vertices, pairs, residual, ts, table):
    """Min sum lambda*omega(t) covering ``residual`` exactly; None when infeasible."""
    if not any(residual):
        return Fraction(0), []
    cols = _triangle_columns(vertices, pairs, residual, ts)
    rows = [i for i, w in enumerate(residual) if w > 0]
    covered = {i for _, col in cols for i in rows if col[i]}
    if covered != set(rows) or not cols:
        return None
    a = [[col[i] for _, col in cols] for i in rows]
    b = [residual[i] for i in rows]
    c = [table.omega_of(spec[3]) for spec, _ in cols]
    try:
        res = lp.solve(a, b, c)
    except lp.Infeasible:
        return None
    chosen = [(spec, x) for (spec, _), x in zip(cols, res.x) if x]
    return res.objective, chosen


def decompose_optimize(g: FractionalGraph, table: OmegaTable | None = None,
                       config: SearchConfig | None = None, copies: int = 1) -> OptimizeResult:
    """Best conic decomposition over (G2, G3) candidates with an exact inner LP.

    G3 ranges over every sub-multiset of at most ``max_g3`` unit edges and G2
    over at most ``max_g2`` further unit edges; the rest is covered by
    t-triangles for every t in the table.  Candidates are visited in order of
    a lower bound and ties resolve to the lexicographically least (G2, G3).
    """
    table = table or OmegaTable.default()
    config = config or SearchConfig()
    if len(g.vertices) > config.max_vertices:
        raise SearchTooLarge(f"{len(g.vertices)} vertices exceeds the search limit "
                             f"{config.max_vertices}")
    vertices = g.vertices
    weights = {}
    for (p, w) in g.pair_weights().items():
        u, v = sorted(p, key=vertices.index)
        weights[(u, v)] = w
    pairs = sorted(weights, key=lambda p: (vertices.index(p[0]), vertices.index(p[1])))
    base = [weights[p] for p in pairs]
    units = [int(w) for w in base]
    ts = tuple(sorted(table.omega))
    ratio = min(table.omega_of(t) / (2 + t) for t in ts)

    g3_vectors = _bounded_vectors(units, config.max_g3)
    combos = []
    ltw_cache: dict[tuple, int] = {}
    for m3 in g3_vectors:
        edges3 = [p for p, m in zip(pairs, m3) for _ in range(m)]
        if edges3:
            key3 = tuple(m3)
            if key3 not in ltw_cache:
                ltw_cache[key3] = ltw(FractionalGraph.build(vertices, edges3)).value + 1
            c3 = ltw_cache[key3]
        else:
            c3 = 0
        caps2 = [u - m for u, m in zip(units, m3)]
        for m2 in _bounded_vectors(caps2, config.max_g2):
            residual = [w - a - b for w, a, b in zip(base, m3, m2)]
            lb = sum(m2) + c3 + sum(residual, Fraction(0)) * ratio
            edges2 = [p for p, m in zip(pairs, m2) for _ in range(m)]
            combos.append((lb, tuple(edges2), tuple(edges3), c3, tuple(residual)))
            if len(combos) > config.max_candidates:
                raise SearchTooLarge(f"more than {config.max_candidates} (G2, G3) candidates")
    heapq.heapify(combos)
    candidates = len(combos)

    best = None
    lp_cache: dict[tuple, object] = {}
    evaluated = 0
    while combos:
        lb, edges2, edges3, c3, residual = heapq.heappop(combos)
        if best is not None and lb > best[0]:
            break
        evaluated += 1
        if residual not in lp_cache:
            lp_cache[residual] = _solve_residual(vertices, pairs, residual, ts, table)
        sol = lp_cache[residual]
        if sol is None:
            continue
        total = len(edges2) + c3 + sol[0]
        cand = (total, edges2, edges3)
        if best is None or cand < best[:3]:
            best = (total, edges2, edges3, sol[1])
    if best is None:
        raise ExponentError("no decomposition exists within the search limits")
    total, edges2, edges3, chosen = best
    parts = [triangle_part(vertices, i, j, k, t, x) for (i, j, k, t), x in chosen]
    if edges2:
        parts.append(Part("edges", FractionalGraph.build(vertices, edges2)))
    if edges3:
        parts.append(Part("treewidth", FractionalGraph.build(vertices, edges3)))
    dec = ConicDecomposition(g, tuple(parts))
    bound = conic_bound(dec, table, copies)
    if bound.value * copies != total:
        raise AssertionError("derivation disagrees with the search objective")
    report = SearchReport(len(g3_vectors), candidates, evaluated, len(lp_cache),
                          candidates - evaluated, config, ts)
    return OptimizeResult(dec, bound, total, report)


# -- star sums and the table -----------------------------------------------------------------


def star_sum_bound(d: int, method: str = "rank", table: OmegaTable | None = None,
                   config: SearchConfig | None = None) -> ExponentBound:
    """Exponent bound for a generic d-mode tensor.

    rank: (d-1) tau(4) for d >= 4 and 2 omega / 3 for d = 3.
    treewidth: (2/d)(ltw(K_d) + 1) from the closed form.
    mixed: best of decompose_optimize(cat(k, d)) / k over searchable k.
    """
    if d < 3:
        raise ExponentError("star-sum bounds need d >= 3")
    table = table or OmegaTable.default()
    if method == "rank":
        if d == 3:
            return _bound(Step.scale("Strassen-type star bound", Fraction(2, 3),
                                     Step.leaf("omega(1)", table.omega1, "table lookup")))
        return _bound(Step.scale("star sums into 2K_d", d - 1,
                                 Step.leaf("tau(4)", table.tau4, "table lookup")))
    if method == "treewidth":
        w = ltw_clique_closed_form(d)
        return _bound(Step.scale("star sums into 2K_d", Fraction(2, d),
                                 Step.leaf("line-treewidth circuit", w + 1,
                                           f"ltw(K_{d}) = {w} by closed form")))
    if method == "mixed":
        best = None
        skipped = []
        for k in range(1, d + 1):
            try:
                res = decompose_optimize(cat(k, d), table, config, copies=k)
            except (SearchTooLarge, ExponentError) as exc:
                skipped.append(f"k={k}: {exc}")
                continue
            if best is None or res.bound.value < best.value:
                best = res.bound
        if best is None:
            raise SearchTooLarge("; ".join(skipped))
        return best
    raise ExponentError(f"unknown method {method!r}")


def closed_form_treewidth_exponent(d: int) -> Fraction:
    """d/2 + 1 - (7 + (-1)^d) / (4d)."""
    return Fraction(d, 2) + 1 - Fraction(7 + (-1) ** d, 4 * d)


@dataclass(frozen=True)
class ChromaticBound:
    matchings: int
    multiplicity: int
    vertices: int
    N: int
    size: int
    conditional: bool = True

    def formula(self) -> str:
        t, b = self.matchings, self.multiplicity
        return f"2^{t} * {self.vertices}^{t} * N^{t * b}"


def matching_chromatic_bound(g: FractionalGraph, N: int) -> ChromaticBound:
    """Circuit size 2^t |V|^t N^(t b) if circuit size were submultiplicative (CONDITIONAL)."""
    if not g.is_integral():
        raise ExponentError("matching bound needs integer weights")
    t = len(edge_partition_into_matchings(g))
    b = max((int(w) for w in g.pair_weights().values()), default=0)
    v = len(g.vertices)
    return ChromaticBound(t, b, v, N, 2 ** t * v ** t * N ** (t * b))


@dataclass(frozen=True)
class SumRuleReport:
    graph: str
    k: int
    results: dict

    @property
    def passed(self) -> bool:
        return all(self.results.values())


def sum_rule_check(g: FractionalGraph, k: int, n_range: Iterable[int]) -> SumRuleReport:
    """T_{k*G,n} equals T_{G,n^k} under the canonical re-indexing, for each n."""
    return SumRuleReport(str(g), k, {n: check_sum_rule(g, k, n) for n in n_range})


TABLE_DS = (3, 4, 5, 6, 10)
SPECIALIZED = {4: (lambda: multiple(clique(4), 2), 4), 5: (lambda: cat(3, 5), 3)}


@dataclass(frozen=True)
class TableRow:
    label: str
    cells: dict[int, ExponentBound | None]
    integral: bool = False

    def formatted(self, places: int = 2) -> dict[int, str]:
        def cell(b):
            if b is None:
                return "--"
            return str(b.value) if self.integral else b.rounded(places)
        return {d: cell(b) for d, b in self.cells.items()}


@dataclass(frozen=True)
class Table1:
    rows: tuple[TableRow, ...]
    omega_table: OmegaTable
    search: dict = field(default_factory=dict)

    def row(self, label: str) -> TableRow:
        return next(r for r in self.rows if r.label == label)

    def render(self) -> str:
        width = max(len(r.label) for r in self.rows)
        head = " " * width + "".join(f"  d={d:<5}" for d in TABLE_DS)
        lines = [head]
        for r in self.rows:
            cells = r.formatted()
            lines.append(r.label.ljust(width) + "".join(f"  {cells[d]:<7}" for d in TABLE_DS))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"rows": {r.label: r.formatted() for r in self.rows},
                "omega_table": self.omega_table.as_dict(), "search": self.search}


def table1(table: OmegaTable | None = None, config: SearchConfig | None = None) -> Table1:
    table = table or OmegaTable.default()
    rank = TableRow("AR upper (star sums)", {d: star_sum_bound(d, "rank", table) for d in TABLE_DS})
    tw = TableRow("AC upper (treewidth)", {d: star_sum_bound(d, "treewidth", table)
                                           for d in TABLE_DS})
    special: dict[int, ExponentBound | None] = {d: None for d in TABLE_DS}
    search = {}
    for d, (build, copies) in SPECIALIZED.items():
        res = decompose_optimize(build(), table, config, copies=copies)
        special[d] = res.bound
        search[d] = res.report.to_dict()
    flat = TableRow("AR lower (flattening)",
                    {d: _bound(Step.leaf("flattening rank", d // 2, "floor(d/2)"))
                     for d in TABLE_DS}, integral=True)
    return Table1((rank, tw, TableRow("AC upper (decompositions)", special), flat), table, search)
