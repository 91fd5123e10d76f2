from fractions import Fraction

import pytest

from graphtensor.graphs import (FractionalGraph, GraphError, cat, clique, common_denominator,
                                contract, cycle, dumps_graph, edge_partition_into_matchings,
                                find_isomorphism, graph_sum, grid, hyperclique_incidence,
                                is_matching, line_graph, loads_graph, matching, multiple,
                                named_graph, path, scale, star, sum_all)


def test_sum_of_clique_with_itself_doubles_every_pair():
    g = graph_sum(clique(4), clique(4))
    assert set(g.pair_weights().values()) == {2}
    assert len(g.pair_weights()) == 6


def test_star_sum_is_double_clique():
    stars = sum_all([star(4, c) for c in range(1, 5)])
    assert find_isomorphism(stars, multiple(clique(4), 2)) is not None


def test_sum_with_empty_graph_is_identity():
    g = cycle(5)
    assert graph_sum(g, FractionalGraph.build(g.vertices, [])).pair_weights() == g.pair_weights()


def test_scale_roundtrip():
    g = cycle(4)
    assert scale(scale(g, Fraction(1, 2)), 2).pair_weights() == g.pair_weights()
    assert scale(clique(3), 1).pair_weights() == clique(3).pair_weights()


@pytest.mark.parametrize("weights, lcm", [((1, 1), 1), ((Fraction(1, 2), 1), 2),
                                          ((Fraction(2, 3), Fraction(1, 2)), 6)])
def test_common_denominator(weights, lcm):
    g = FractionalGraph.build([1, 2, 3], [(1, 2, weights[0]), (2, 3, weights[1])])
    assert common_denominator(g) == lcm


def test_contract_triangle_pair():
    h, a = contract(clique(3), [1, 2])
    assert a == 3
    assert len(h.vertices) == 2 and h.num_edges == 2


def test_contract_isolated_vertex():
    g = FractionalGraph.build([1, 2, 3], [(1, 2)])
    h, a = contract(g, [3])
    assert a == 0 and h.num_edges == 1


def test_contract_grid_row():
    h, a = contract(grid(2, 2), [1, 2])
    assert a == 3
    # the other row keeps its edge and both column edges now meet the merged vertex
    assert find_isomorphism(h, clique(3)) is not None


def test_line_graphs():
    assert line_graph(path(2)).num_edges == 1
    assert find_isomorphism(line_graph(clique(3)), clique(3)) is not None
    lk4 = line_graph(clique(4))
    assert len(lk4.vertices) == 6 and all(lk4.degree(v) == 4 for v in lk4.vertices)


def test_isomorphism_rejects_different_degree_sequences():
    assert find_isomorphism(path(3), star(4, 1)) is None


def test_cat_2_4_shape():
    w = cat(2, 4).pair_weights()
    assert w[frozenset({1, 2})] == 2
    assert all(w[frozenset({u, v})] == 1 for u in (1, 2) for v in (3, 4))
    assert frozenset({3, 4}) not in w


def test_hyperclique_incidence_is_k44_minus_matching():
    g = hyperclique_incidence(3, 4)
    assert g.num_edges == 12 and len(g.vertices) == 8
    assert all(g.degree(v) == 3 for v in g.vertices)


def test_grid_2x2_is_c4():
    assert find_isomorphism(grid(2, 2), cycle(4)) is not None


@pytest.mark.parametrize("g, parts", [(grid(6, 6), 4), (matching(3), 1),
                                      (hyperclique_incidence(3, 4), 3)])
def test_matching_partitions(g, parts):
    got = edge_partition_into_matchings(g)
    assert len(got) == parts
    assert all(is_matching(p) for p in got)
    assert sum(p.num_edges for p in got) == g.expand().num_edges


def test_graph_text_roundtrip():
    g = FractionalGraph.build([1, 2, 3], [(1, 2, Fraction(1, 2)), (2, 3, 2)])
    assert loads_graph(dumps_graph(g)).pair_weights() == g.pair_weights()


def test_graph_parse_errors():
    with pytest.raises(GraphError):
        loads_graph("e 1 2 1/1\n")
    with pytest.raises(GraphError):
        loads_graph("d 2\nx 1 2\n")


def test_named_graph():
    assert named_graph("grid", 2, 3).num_edges == 7
    with pytest.raises(GraphError):
        named_graph("nosuch", 1)
