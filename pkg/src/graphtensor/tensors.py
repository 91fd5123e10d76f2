"""Sparse exact tensors, graph tensors, and the substitutions used to compare them.

A d-mode tensor is a set-multilinear form: a map from index tuples (one
0-based index per mode) to Fraction coefficients.  Graph tensors use the
local encoding ``index = sum_j f(e_j) * n**j`` over the incident edges of a
vertex sorted by edge id.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import kernels
from .graphs import Edge, FractionalGraph, GraphError, graph_sum, multiple

DEFAULT_NONZERO_LIMIT = 1 << 24
DEFAULT_FLATTENING_LIMIT = 4096
DEFAULT_EPS_DEGREE = 6


class TensorError(ValueError):
    """Raised on dimension mismatches and size-limit violations."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class SparseTensor:
    dims: tuple[int, ...]
    coeffs: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(d < 1 for d in self.dims):
            raise TensorError("mode dimensions must be positive")
        clean = {}
        for key, c in self.coeffs.items():
            if len(key) != len(self.dims):
                raise TensorError(f"key {key} has wrong arity for {len(self.dims)} modes")
            if any(not 0 <= i < d for i, d in zip(key, self.dims)):
                raise TensorError(f"key {key} out of range for dims {self.dims}")
            c = _frac(c)
            if c:
                clean[tuple(key)] = c
        object.__setattr__(self, "coeffs", clean)

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def nnz(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return self.dims == other.dims and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.dims, frozenset(self.coeffs.items())))

    def __add__(self, other: SparseTensor) -> SparseTensor:
        _same_dims(self, other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return SparseTensor(self.dims, out)

    def __sub__(self, other: SparseTensor) -> SparseTensor:
        return self + other.scaled(-1)

    def scaled(self, a) -> SparseTensor:
        a = _frac(a)
        return SparseTensor(self.dims, {k: a * c for k, c in self.coeffs.items()})

    def permute_modes(self, perm: Sequence[int]) -> SparseTensor:
        """Mode ``i`` of the result is mode ``perm[i]`` of self."""
        return SparseTensor(tuple(self.dims[p] for p in perm),
                            {tuple(k[p] for p in perm): c for k, c in self.coeffs.items()})


def _same_dims(a: SparseTensor, b: SparseTensor) -> None:
    if a.dims != b.dims:
        raise TensorError(f"dimension mismatch {a.dims} vs {b.dims}")


def rank_one(vectors: Sequence[Sequence]) -> SparseTensor:
    dims = tuple(len(v) for v in vectors)
    coeffs = {}
    for key in itertools.product(*(range(d) for d in dims)):
        c = Fraction(1)
        for v, i in zip(vectors, key):
            c *= _frac(v[i])
            if not c:
                break
        if c:
            coeffs[key] = c
    return SparseTensor(dims, coeffs)


def unit_tensor(d: int, n: int) -> SparseTensor:
    """The GHZ tensor sum_i x_i^(1)...x_i^(d)."""
    return SparseTensor((n,) * d, {(i,) * d: Fraction(1) for i in range(n)})


# -- graph tensors -------------------------------------------------------------


@dataclass(frozen=True)
class GraphTensorIndexing:
    """Local-assignment encoding for every vertex of an expanded graph."""

    n: int
    vertices: tuple
    incident: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, g: FractionalGraph, n: int) -> GraphTensorIndexing:
        inc = g.incidence()
        return cls(n, g.vertices, tuple(tuple(inc[v]) for v in g.vertices))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.n ** len(ids) for ids in self.incident)

    def encode(self, mode: int, values: Sequence[int]) -> int:
        """Values are f(e) for the incident edges in ascending edge-id order."""
        idx, w = 0, 1
        for x in values:
            idx += x * w
            w *= self.n
        return idx

    def decode(self, mode: int, index: int) -> tuple[int, ...]:
        out = []
        for _ in self.incident[mode]:
            index, r = divmod(index, self.n)
            out.append(r)
        return tuple(out)

    def key(self, f: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.encode(m, [f[e] for e in ids]) for m, ids in enumerate(self.incident))


def graph_tensor(g: FractionalGraph, n: int, limit: int = DEFAULT_NONZERO_LIMIT) -> SparseTensor:
    """T_{G,n}: one monomial per assignment f: E(G) -> [n], coefficient 1."""
    if n < 1:
        raise TensorError("n must be positive")
    g = g.expand()
    needed = n ** g.num_edges
    if needed > limit:
        raise TensorError(f"graph tensor needs {needed} nonzeros, limit is {limit}")
    ix = GraphTensorIndexing.of(g, n)
    one = Fraction(1)
    coeffs = {ix.key(f): one for f in itertools.product(range(n), repeat=g.num_edges)}
    return SparseTensor(ix.dims, coeffs)


def kronecker(s: SparseTensor, t: SparseTensor) -> SparseTensor:
    """Mode-wise tensor product; index (i, j) in a mode maps to i*dim_t + j."""
    if s.order != t.order:
        raise TensorError(f"mode-count mismatch {s.order} vs {t.order}")
    dims = tuple(a * b for a, b in zip(s.dims, t.dims))
    coeffs = {}
    for ki, ci in s.coeffs.items():
        for kj, cj in t.coeffs.items():
            coeffs[tuple(i * b + j for i, j, b in zip(ki, kj, t.dims))] = ci * cj
    return SparseTensor(dims, coeffs)


def kronecker_power(t: SparseTensor, k: int) -> SparseTensor:
    out = t
    for _ in range(k - 1):
        out = kronecker(out, t)
    return out


# -- canonical re-indexings ------------------------------------------------------


@dataclass(frozen=True)
class ModeReindex:
    """Per-mode bijections from a source indexing to a target indexing."""

    source_dims: tuple[int, ...]
    target_dims: tuple[int, ...]
    maps: tuple[dict[int, int], ...]

    def __post_init__(self) -> None:
        for m, (mp, sd, td) in enumerate(zip(self.maps, self.source_dims, self.target_dims)):
            if sd != td or sorted(mp) != list(range(sd)) or sorted(mp.values()) != list(range(td)):
                raise TensorError(f"mode {m} map is not a bijection")

    def apply(self, t: SparseTensor) -> SparseTensor:
        if t.dims != self.source_dims:
            raise TensorError(f"reindex expects dims {self.source_dims}, got {t.dims}")
        return SparseTensor(self.target_dims,
                            {tuple(mp[i] for mp, i in zip(self.maps, k)): c
                             for k, c in t.coeffs.items()})


def _degrees(g: FractionalGraph, vertices: Sequence) -> list[int]:
    inc = g.incidence()
    return [len(inc.get(v, ())) for v in vertices]


def canonical_reindex_product(g: FractionalGraph, h: FractionalGraph, n: int) -> ModeReindex:
    """Bijection from kron(T_{G,n}, T_{H,n}) to T_{G+H,n}, both over V(G+H).

    In G+H the edges of H come after those of G, so at each vertex the local
    index is a_G + n**deg_G(v) * a_H.
    """
    g, h = g.expand(), h.expand()
    union = graph_sum(g, h).vertices
    dg, dh = _degrees(g, union), _degrees(h, union)
    maps = []
    for a, b in zip(dg, dh):
        size_g, size_h = n ** a, n ** b
        maps.append({i * size_h + j: i + size_g * j
                     for i in range(size_g) for j in range(size_h)})
    dims = tuple(n ** (a + b) for a, b in zip(dg, dh))
    return ModeReindex(dims, dims, tuple(maps))


def _digits(x: int, base: int, count: int) -> list[int]:
    out = []
    for _ in range(count):
        x, r = divmod(x, base)
        out.append(r)
    return out


def length_rule_reindex(g: FractionalGraph, n1: int, n2: int) -> ModeReindex:
    """Bijection from kron(T_{G,n1}, T_{G,n2}) to T_{G,n1*n2}.

    Edge values combine as f(e) = f1(e)*n2 + f2(e).
    """
    g = g.expand()
    maps, dims = [], []
    for deg in _degrees(g, g.vertices):
        d1, d2 = n1 ** deg, n2 ** deg
        mp = {}
        for i in range(d1):
            f1 = _digits(i, n1, deg)
            for j in range(d2):
                f2 = _digits(j, n2, deg)
                mp[i * d2 + j] = sum((a * n2 + b) * (n1 * n2) ** p
                                     for p, (a, b) in enumerate(zip(f1, f2)))
        maps.append(mp)
        dims.append(d1 * d2)
    return ModeReindex(tuple(dims), tuple(dims), tuple(maps))


def sum_rule_reindex(g: FractionalGraph, k: int, n: int) -> ModeReindex:
    """Bijection from T_{k*G,n} to T_{G,n**k}.

    Copy c of edge e has id c*|E| + e; its value becomes digit c of f(e) in base n.
    """
    g = g.expand()
    maps, dims = [], []
    big = n ** k
    for deg in _degrees(g, g.vertices):
        mp = {}
        for idx in range(n ** (k * deg)):
            ds = _digits(idx, n, k * deg)
            mp[idx] = sum(sum(ds[c * deg + j] * n ** c for c in range(k)) * big ** j
                          for j in range(deg))
        maps.append(mp)
        dims.append(n ** (k * deg))
    return ModeReindex(tuple(dims), tuple(dims), tuple(maps))


def check_product_identity(g: FractionalGraph, h: FractionalGraph, n: int) -> bool:
    """kron(T_G, T_H) re-indexed equals T_{G+H}, both over the union vertex list."""
    union = graph_sum(g, h).vertices
    tg = graph_tensor(g.with_vertices(union), n)
    th = graph_tensor(h.with_vertices(union), n)
    target = graph_tensor(graph_sum(g, h), n)
    return canonical_reindex_product(g, h, n).apply(kronecker(tg, th)) == target


def check_length_rule(g: FractionalGraph, n1: int, n2: int) -> bool:
    lhs = kronecker(graph_tensor(g, n1), graph_tensor(g, n2))
    return length_rule_reindex(g, n1, n2).apply(lhs) == graph_tensor(g, n1 * n2)


def check_sum_rule(g: FractionalGraph, k: int, n: int) -> bool:
    lhs = graph_tensor(multiple(g, k), n)
    return sum_rule_reindex(g, k, n).apply(lhs) == graph_tensor(g, n ** k)


# -- flattenings -----------------------------------------------------------------


def _integer_rank(rows: list[dict[int, int]]) -> int:
    """Rank of a sparse integer matrix by fraction-free elimination."""
    rank = 0
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        row = {k: v for k, v in row.items() if v}
        while row:
            col = min(row)
            if col not in pivots:
                g = math.gcd(*row.values())
                pivots[col] = {k: v // g for k, v in row.items()}
                rank += 1
                break
            piv = pivots[col]
            a, b = piv[col], row[col]
            new = {k: a * v for k, v in row.items()}
            for k, v in piv.items():
                new[k] = new.get(k, 0) - b * v
            row = {k: v for k, v in new.items() if v}
            if row:
                g = math.gcd(*row.values())
                row = {k: v // g for k, v in row.items()}
    return rank


def flattening_rank(t: SparseTensor, row_modes: Iterable[int],
                    limit: int = DEFAULT_FLATTENING_LIMIT) -> int:
    """Exact rank of the flattening with ``row_modes`` indexing rows."""
    rows_set = sorted(set(row_modes))
    if any(not 0 <= m < t.order for m in rows_set):
        raise TensorError("row mode out of range")
    cols = [m for m in range(t.order) if m not in rows_set]
    nrows = math.prod(t.dims[m] for m in rows_set)
    ncols = math.prod(t.dims[m] for m in cols)
    if nrows > limit or ncols > limit:
        raise TensorError(f"flattening {nrows}x{ncols} exceeds limit {limit}")

    def flat(key, modes):
        idx = 0
        for m in modes:
            idx = idx * t.dims[m] + key[m]
        return idx

    den = math.lcm(*(c.denominator for c in t.coeffs.values())) if t.coeffs else 1
    matrix: dict[int, dict[int, int]] = defaultdict(dict)
    for key, c in t.coeffs.items():
        matrix[flat(key, rows_set)][flat(key, cols)] = int(c * den)
    return _integer_rank(list(matrix.values()))


def is_concise(t: SparseTensor, limit: int = DEFAULT_FLATTENING_LIMIT) -> bool:
    return all(flattening_rank(t, [m], limit) == t.dims[m] for m in range(t.order))


# -- evaluation ----------------------------------------------------------------------


def _check_inputs(t_dims: Sequence[int], inputs: Sequence[Sequence]) -> None:
    if len(inputs) != len(t_dims):
        raise TensorError(f"expected {len(t_dims)} input vectors, got {len(inputs)}")
    for m, (v, d) in enumerate(zip(inputs, t_dims)):
        if len(v) != d:
            raise TensorError(f"mode {m} input has length {len(v)}, expected {d}")


def evaluate(t: SparseTensor, inputs: Sequence[Sequence]) -> Fraction:
    """Sum over monomials of coefficient times the selected input entries."""
    _check_inputs(t.dims, inputs)
    vecs = [[_frac(x) for x in v] for v in inputs]
    total = Fraction(0)
    for key, c in t.coeffs.items():
        term = c
        for v, i in zip(vecs, key):
            term *= v[i]
            if not term:
                break
        total += term
    return total


def evaluate_graph_tensor(g: FractionalGraph, n: int, inputs: Sequence[Sequence]) -> Fraction:
    """T_{G,n} at the given inputs without materializing the tensor.

    Uses the compiled Holant kernel when the scaled integer sum provably fits
    in int64, otherwise an exact Python loop.
    """
    g = g.expand()
    ix = GraphTensorIndexing.of(g, n)
    _check_inputs(ix.dims, inputs)
    scales, ints = [], []
    for v in inputs:
        fr = [_frac(x) for x in v]
        d = math.lcm(*(x.denominator for x in fr)) if fr else 1
        scales.append(d)
        ints.append([int(x * d) for x in fr])
    bound = n ** g.num_edges
    for vec in ints:
        bound *= max((abs(x) for x in vec), default=0)
    denom = math.prod(scales)
    if bound <= kernels.INT64_MAX:
        total = kernels.holant_sum(n, g.num_edges, [list(ids) for ids in ix.incident], ints)
    else:
        total = 0
        for f in itertools.product(range(n), repeat=g.num_edges):
            term = 1
            for vec, idx in zip(ints, ix.key(f)):
                term *= vec[idx]
                if not term:
                    break
            total += term
    return Fraction(total, denom)


# -- substitutions and projections ----------------------------------------------------


@dataclass(frozen=True)
class Substitution:
    """Linear substitution of the variables of one tensor by those of another.

    ``mode_map[i]`` is the target mode of source mode ``i`` or None when the
    mode is replaced by scalars.  ``images[i][a]`` is a dict
    ``{target index: coefficient}`` (kept modes) or a scalar (dropped modes);
    missing entries substitute zero.
    """

    source_dims: tuple[int, ...]
    target_dims: tuple[int, ...]
    mode_map: tuple[int | None, ...]
    images: tuple[dict, ...]

    def __post_init__(self) -> None:
        kept = [m for m in self.mode_map if m is not None]
        if len(kept) != len(set(kept)) or sorted(kept) != list(range(len(self.target_dims))):
            raise TensorError("substitution must map kept modes bijectively onto target modes")

    def apply(self, t: SparseTensor) -> SparseTensor:
        if t.dims != self.source_dims:
            raise TensorError(f"substitution expects dims {self.source_dims}, got {t.dims}")
        out: dict[tuple, Fraction] = defaultdict(Fraction)
        order = len(self.target_dims)
        for key, c in t.coeffs.items():
            scalar = c
            factors: list[list[tuple[int, int, Fraction]]] = []
            for i, a in enumerate(key):
                img = self.images[i].get(a)
                if img is None:
                    scalar = Fraction(0)
                    break
                if self.mode_map[i] is None:
                    scalar *= _frac(img)
                else:
                    factors.append([(self.mode_map[i], b, _frac(w)) for b, w in img.items()])
                if not scalar:
                    break
            if not scalar:
                continue
            for combo in itertools.product(*factors):
                target = [0] * order
                coeff = scalar
                for m, b, w in combo:
                    target[m] = b
                    coeff *= w
                out[tuple(target)] += coeff
        return SparseTensor(self.target_dims, out)


@dataclass(frozen=True)
class Projection:
    substitution: Substitution
    target: FractionalGraph | None = None
    tensor: SparseTensor | None = None


def _identity_images(dim: int) -> dict:
    return {a: {a: Fraction(1)} for a in range(dim)}


def project_subgraph(g: FractionalGraph, edge_ids: Iterable[int], n: int,
                     vertices: Iterable | None = None, materialize: bool = True) -> Projection:
    """Substitution witnessing T_{H,n} <= T_{G,n} for the subgraph H.

    At a kept vertex, a local assignment survives iff every edge outside H
    takes value 0; dropped vertices are set to 1 on the all-zero assignment.
    """
    g = g.expand()
    ids = sorted(set(edge_ids))
    if any(not 0 <= i < g.num_edges for i in ids):
        raise TensorError("edge id outside the graph")
    keep_vs = tuple(g.vertices) if vertices is None else tuple(vertices)
    if not set(keep_vs) <= set(g.vertices):
        raise TensorError("subgraph vertices must be vertices of g")
    h = g.subgraph(ids, keep_vs)
    src = GraphTensorIndexing.of(g, n)
    pos = {v: i for i, v in enumerate(keep_vs)}
    mode_map, images = [], []
    for m, v in enumerate(g.vertices):
        inc = src.incident[m]
        images_m = {}
        for a in range(n ** len(inc)):
            vals = src.decode(m, a)
            if any(x and e not in ids for x, e in zip(vals, inc)):
                continue
            kept = [x for x, e in zip(vals, inc) if e in ids]
            if v in pos:
                images_m[a] = {sum(x * n ** j for j, x in enumerate(kept)): Fraction(1)}
            else:
                images_m[a] = Fraction(1)
        mode_map.append(pos.get(v))
        images.append(images_m)
    hix = GraphTensorIndexing.of(h, n)
    sub = Substitution(src.dims, hix.dims, tuple(mode_map), tuple(images))
    tensor = sub.apply(graph_tensor(g, n)) if materialize else None
    return Projection(sub, h, tensor)


def project_length(g: FractionalGraph, n: int, m: int, materialize: bool = True) -> Projection:
    """Substitution witnessing T_{G,m} <= T_{G,n}: zero every variable using a value >= m."""
    if not 1 <= m <= n:
        raise TensorError("need 1 <= m <= n")
    g = g.expand()
    src, dst = GraphTensorIndexing.of(g, n), GraphTensorIndexing.of(g, m)
    images = []
    for mode in range(len(g.vertices)):
        img = {}
        for a in range(src.dims[mode]):
            vals = src.decode(mode, a)
            if all(x < m for x in vals):
                img[a] = {dst.encode(mode, vals): Fraction(1)}
        images.append(img)
    sub = Substitution(src.dims, dst.dims, tuple(range(len(g.vertices))), tuple(images))
    tensor = sub.apply(graph_tensor(g, n)) if materialize else None
    return Projection(sub, g, tensor)


def suppress_vertex(g: FractionalGraph, w) -> tuple[FractionalGraph, int, int]:
    """Undo a subdivision: replace the path u-w-v by an edge uv.

    The merged edge takes the smaller of the two ids; returns the new graph
    and the two old edge ids (merged id first).
    """
    g = g.expand()
    inc = g.incident(w)
    if len(inc) != 2:
        raise TensorError(f"vertex {w!r} must have degree 2 to be suppressed")
    e1, e2 = inc
    u, v = g.edges[e1].other(w), g.edges[e2].other(w)
    if u == v:
        raise TensorError("suppressing this vertex would create a self-loop")
    edges = list(g.edges)
    edges[e1] = Edge(u, v)
    del edges[e2]
    vertices = tuple(x for x in g.vertices if x != w)
    return FractionalGraph(vertices, tuple(edges)), e1, e2


def project_subdivision(g: FractionalGraph, w, n: int, materialize: bool = True) -> Projection:
    """Substitution witnessing T_{H,n} <= T_{G,n} where G subdivides an edge of H at w.

    The mode of w is replaced by delta(i, j) on its two edges; the other ends
    read the merged edge where they used to read their edge to w.
    """
    g = g.expand()
    h, e1, e2 = suppress_vertex(g, w)
    src, dst = GraphTensorIndexing.of(g, n), GraphTensorIndexing.of(h, n)

    def new_id(e: int) -> int:
        if e == e2:
            return e1
        return e - 1 if e > e2 else e

    mode_map, images = [], []
    t_pos = {v: i for i, v in enumerate(h.vertices)}
    for m, v in enumerate(g.vertices):
        if v == w:
            img = {}
            for a in range(src.dims[m]):
                x, y = src.decode(m, a)
                if x == y:
                    img[a] = Fraction(1)
            mode_map.append(None)
            images.append(img)
            continue
        tm = t_pos[v]
        target_inc = dst.incident[tm]
        img = {}
        for a in range(src.dims[m]):
            vals = dict(zip((new_id(e) for e in src.incident[m]), src.decode(m, a)))
            img[a] = {dst.encode(tm, [vals[e] for e in target_inc]): Fraction(1)}
        mode_map.append(tm)
        images.append(img)
    sub = Substitution(src.dims, dst.dims, tuple(mode_map), tuple(images))
    tensor = sub.apply(graph_tensor(g, n)) if materialize else None
    return Projection(sub, h, tensor)


def star_restriction(t: SparseTensor, center: int) -> Substitution:
    """Substitution witnessing t <= T_{S_d(center), n} (center is 1-based).

    The center variable x_{i_1..i_{d-1}} maps to sum_i t[..., i, ...] y_i and
    every leaf variable maps to itself.
    """
    d = t.order
    if len(set(t.dims)) != 1:
        raise TensorError("star restriction needs equal mode dimensions")
    if not 1 <= center <= d:
        raise TensorError("center must lie in [d]")
    n = t.dims[0]
    c = center - 1
    others = [m for m in range(d) if m != c]
    center_img: dict[int, dict[int, Fraction]] = {}
    for key, coeff in t.coeffs.items():
        a = sum(key[m] * n ** j for j, m in enumerate(others))
        center_img.setdefault(a, {})[key[c]] = coeff
    images = tuple(center_img if m == c else _identity_images(n) for m in range(d))
    src_dims = tuple(n ** (d - 1) if m == c else n for m in range(d))
    return Substitution(src_dims, t.dims, tuple(range(d)), images)


def contract_modes(t: SparseTensor, h_vectors: Sequence[Sequence]) -> SparseTensor:
    """Contract the inner block of every mode against a vector.

    Mode ``i`` of ``t`` must have dimension ``m_i * len(h_i)`` with index
    ``a * len(h_i) + b``; the result has dimension ``m_i`` and entry
    ``sum_b t[(a, b)] * prod_i h_i[b_i]``.
    """
    if len(h_vectors) != t.order:
        raise TensorError("one vector per mode required")
    inner = [len(h) for h in h_vectors]
    for m, (d, p) in enumerate(zip(t.dims, inner)):
        if p < 1 or d % p:
            raise TensorError(f"mode {m}: dimension {d} is not a multiple of {p}")
    hs = [[_frac(x) for x in h] for h in h_vectors]
    out: dict[tuple, Fraction] = defaultdict(Fraction)
    for key, c in t.coeffs.items():
        outer = []
        for i, p, h in zip(key, inner, hs):
            a, b = divmod(i, p)
            c *= h[b]
            outer.append(a)
        if c:
            out[tuple(outer)] += c
    return SparseTensor(tuple(d // p for d, p in zip(t.dims, inner)), out)


# -- CW tensors and degenerations ------------------------------------------------------


def cw_tensor(q: int, k: int, big: bool = False,
              limit: int = DEFAULT_NONZERO_LIMIT) -> SparseTensor:
    """Small (or big) CW k-tensor over dims q+2 with basis x_0..x_{q+1}."""
    if q < 2 or k < 2:
        raise TensorError("need q >= 2 and k >= 2")
    if (q + 2) ** k > limit:
        raise TensorError(f"CW tensor needs {(q + 2) ** k} entries, limit is {limit}")
    coeffs = {}
    for u, v in itertools.combinations(range(k), 2):
        for i in range(1, q + 1):
            key = [0] * k
            key[u] = key[v] = i
            coeffs[tuple(key)] = Fraction(1)
    if big:
        for u in range(k):
            key = [0] * k
            key[u] = q + 1
            coeffs[tuple(key)] = Fraction(1)
    return SparseTensor((q + 2,) * k, coeffs)


Poly = dict  # degree -> Fraction


@dataclass
class EpsilonPolyTensor:
    """Tensor whose coefficients are polynomials in eps, truncated at ``max_degree``."""

    dims: tuple[int, ...]
    max_degree: int = DEFAULT_EPS_DEGREE
    coeffs: dict[tuple, Poly] = field(default_factory=dict)
    truncated_terms: int = 0

    def add_rank_one(self, scale: Poly, factors: Sequence[Sequence[Poly]]) -> None:
        """Add scale * (x-form 1) * ... * (x-form d); each form maps index -> poly."""
        if len(factors) != len(self.dims):
            raise TensorError("one linear form per mode required")
        support = [[i for i, p in enumerate(f) if p] for f in factors]
        for key in itertools.product(*support):
            poly = dict(scale)
            for f, i in zip(factors, key):
                poly = self._mul(poly, f[i])
                if not poly:
                    break
            if poly:
                acc = self.coeffs.setdefault(key, {})
                for deg, c in poly.items():
                    acc[deg] = acc.get(deg, 0) + c
                    if not acc[deg]:
                        del acc[deg]

    def _mul(self, p: Poly, q: Poly) -> Poly:
        out: Poly = {}
        for a, x in p.items():
            for b, y in q.items():
                if a + b > self.max_degree:
                    self.truncated_terms += 1
                    continue
                out[a + b] = out.get(a + b, 0) + x * y
        return {d: c for d, c in out.items() if c}

    def coefficient(self, degree: int) -> SparseTensor:
        if degree > self.max_degree:
            raise TensorError(f"degree {degree} was truncated (max {self.max_degree})")
        return SparseTensor(self.dims, {k: p.get(degree, 0) for k, p in self.coeffs.items()})


@dataclass(frozen=True)
class DegenerationReport:
    q: int
    k: int
    rank_one_terms: int
    vanishing_degrees: tuple[int, ...]
    vanishing_ok: bool
    leading_degree: int
    leading_matches: bool
    entries_checked: int
    truncated_terms: int

    @property
    def passed(self) -> bool:
        return self.vanishing_ok and self.leading_matches


def cw_degeneration(q: int, k: int) -> EpsilonPolyTensor:
    """The (q+2)-term eps-sum whose eps^5 coefficient is the big CW tensor."""
    dim = q + 2
    t = EpsilonPolyTensor((dim,) * k)

    def form(entries: dict[int, Poly]) -> list[Poly]:
        return [entries.get(i, {}) for i in range(dim)]

    one = Fraction(1)
    for i in range(1, q + 1):
        t.add_rank_one({1: one}, [form({0: {0: one}, i: {2: one}})] * k)
    lin = form({0: {0: one}, **{i: {3: one} for i in range(1, q + 1)}})
    t.add_rank_one({0: -one}, [lin] * k)
    t.add_rank_one({0: one, 1: Fraction(-q)}, [form({0: {0: one}, q + 1: {5: one}})] * k)
    return t


def cw_degeneration_check(q: int, k: int) -> DegenerationReport:
    t = cw_degeneration(q, k)
    vanish = tuple(range(5))
    vanishing_ok = all(t.coefficient(d).nnz == 0 for d in vanish)
    target = cw_tensor(q, k, big=True)
    lead = t.coefficient(5)
    return DegenerationReport(q, k, q + 2, vanish, vanishing_ok, 5, lead == target,
                              (q + 2) ** k, t.truncated_terms)


# -- dump format ------------------------------------------------------------------------


def dumps(t: SparseTensor) -> str:
    lines = ["dims " + " ".join(map(str, t.dims))]
    for key in sorted(t.coeffs):
        c = t.coeffs[key]
        lines.append(" ".join(map(str, key)) + f" {c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"


def loads(text: str) -> SparseTensor:
    dims = None
    coeffs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "dims":
            dims = tuple(int(x) for x in parts[1:])
            continue
        if dims is None:
            raise TensorError(f"line {lineno}: coefficient before dims header")
        if len(parts) != len(dims) + 1:
            raise TensorError(f"line {lineno}: expected {len(dims)} indices and a coefficient")
        coeffs[tuple(int(x) for x in parts[:-1])] = Fraction(parts[-1])
    if dims is None:
        raise TensorError("missing dims header")
    return SparseTensor(dims, coeffs)


__all__ = [
    "DegenerationReport", "EpsilonPolyTensor", "GraphError", "GraphTensorIndexing",
    "ModeReindex", "Projection", "SparseTensor", "Substitution", "TensorError",
    "canonical_reindex_product", "check_length_rule", "check_product_identity",
    "check_sum_rule", "contract_modes", "cw_degeneration", "cw_degeneration_check",
    "cw_tensor", "dumps", "evaluate", "evaluate_graph_tensor", "flattening_rank",
    "graph_tensor", "is_concise", "kronecker", "kronecker_power", "length_rule_reindex",
    "loads", "project_length", "project_subdivision", "project_subgraph", "rank_one",
    "star_restriction", "sum_rule_reindex", "suppress_vertex", "unit_tensor",
]
