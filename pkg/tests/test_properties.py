"""Randomized identities over small graphs."""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from graphtensor import circuits, tensors
from graphtensor.graphs import FractionalGraph, graph_sum

SETTINGS = settings(max_examples=25, deadline=None)


@st.composite
def small_graphs(draw, max_vertices=4, max_edges=4):
    v = draw(st.integers(2, max_vertices))
    pairs = st.tuples(st.integers(1, v), st.integers(1, v)).filter(lambda p: p[0] != p[1])
    edges = draw(st.lists(pairs, min_size=1, max_size=max_edges))
    return FractionalGraph.build(range(1, v + 1), edges)


@SETTINGS
@given(small_graphs(), small_graphs())
def test_product_identity(g, h):
    assert tensors.check_product_identity(g, h, 2)


@SETTINGS
@given(small_graphs(max_edges=3))
def test_length_rule(g):
    assert tensors.check_length_rule(g, 2, 2)


@SETTINGS
@given(small_graphs(), st.integers(0, 2 ** 32))
def test_treedec_circuit_matches_holant(g, seed):
    rng = random.Random(seed)
    gc = circuits.treedec_circuit(g, 2)
    x = [[Fraction(rng.randint(-3, 3)) for _ in range(d)] for d in gc.circuit.input_dims]
    assert circuits.evaluate_scalar(gc.circuit, x) == tensors.evaluate_graph_tensor(g, 2, x)
    assert gc.passed


@SETTINGS
@given(small_graphs(), small_graphs())
def test_sum_is_commutative_in_edge_count(g, h):
    assert graph_sum(g, h).num_edges == g.num_edges + h.num_edges


@SETTINGS
@given(small_graphs())
def test_flattening_bounded_by_dimension(g):
    t = tensors.graph_tensor(g, 2)
    r = tensors.flattening_rank(t, [0])
    assert 1 <= r <= t.dims[0]
