import pytest

from graphtensor.graphs import FractionalGraph, clique, cycle, line_graph, matching, path, star
from graphtensor.treewidth import (bounds_treewidth, dumps_pace, exact_treewidth, loads_pace, ltw,
                                   ltw_clique_closed_form, sandwich_check)


def test_tree_has_width_one():
    assert exact_treewidth(star(6, 1))[0] == 1


def test_clique_width_and_bounds():
    assert exact_treewidth(clique(5))[0] == 4
    lo, hi, td = bounds_treewidth(clique(5))
    assert lo == hi == 4 and len(td.bags) >= 1


def test_empty_graph_width():
    assert exact_treewidth(FractionalGraph.build([], []))[0] == -1


@pytest.mark.parametrize("d, want", [(3, 2), (4, 4), (5, 7), (6, 10)])
def test_line_treewidth_of_cliques(d, want):
    assert ltw_clique_closed_form(d) == want
    w, td = exact_treewidth(line_graph(clique(d)))
    assert w == want
    assert td.violations(line_graph(clique(d))) == []


def test_closed_form_values():
    assert ltw_clique_closed_form(10) == 28
    assert ltw_clique_closed_form(8) == 18


def test_k8_interval_contains_closed_form():
    lo, hi, _ = bounds_treewidth(line_graph(clique(8)))
    assert lo <= 18 <= hi


def test_ltw_small_families():
    assert ltw(path(4)).value == 1
    assert ltw(clique(3)).value == 2
    assert ltw(matching(3)).value == 0


@pytest.mark.parametrize("g", [clique(4), cycle(5), star(5, 1)])
def test_sandwich(g):
    assert sandwich_check(g).passed


def test_pace_roundtrip():
    g = cycle(6)
    _, td = exact_treewidth(g)
    back = loads_pace(dumps_pace(td, g.vertices), g.vertices)
    assert back.width == td.width and back.violations(g) == []
