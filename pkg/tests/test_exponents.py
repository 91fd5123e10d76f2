from fractions import Fraction

import pytest

from graphtensor import exponents
from graphtensor.exponents import (ExponentError, OmegaTable, canned_cat35, canned_two_k4,
                                   conic_bound, decompose_optimize, round_up, star_sum_bound)
from graphtensor.graphs import cat, clique, grid, hyperclique_incidence, matching, multiple


@pytest.fixture(scope="module")
def table():
    return OmegaTable.default()


def test_table_lookups(table):
    assert table.omega_of(Fraction(1, 2)) == Fraction("2.046681")
    assert table.omega_of(2) == Fraction("3.256689")
    assert table.tau4 == Fraction("0.772318")
    with pytest.raises(ExponentError):
        table.omega_of(Fraction(1, 7))


def test_table_text_roundtrip(table):
    back = OmegaTable.loads(table.dumps())
    assert back.omega == table.omega and back.tau4 == table.tau4


def test_table_parse_error():
    with pytest.raises(ExponentError):
        OmegaTable.loads("omega 1 2.37\n")


def test_round_up():
    assert round_up(Fraction("3.089272")) == "3.09"
    assert round_up(Fraction(11, 3)) == "3.67"
    assert round_up(Fraction(2)) == "2.00"


def test_canned_two_k4(table):
    b = conic_bound(canned_two_k4(), table)
    assert b.value == 1 + 4 * table.omega_of(Fraction(1, 2))
    assert b.verify()


def test_canned_cat35(table):
    b = conic_bound(canned_cat35(), table)
    assert b.value == table.omega1 + table.omega_of(2) + 3
    assert b.verify()


def test_optimizer_two_k4(table):
    res = decompose_optimize(multiple(clique(4), 2), table, copies=4)
    assert res.bound.value == Fraction(1, 4) + table.omega_of(Fraction(1, 2))
    assert res.bound.value <= Fraction("2.296682")


def test_optimizer_triangle_is_omega(table):
    assert decompose_optimize(clique(3), table).bound.value == table.omega1


def test_star_sum_bounds(table):
    assert star_sum_bound(5, "rank", table).value == 4 * Fraction("0.772318")
    assert star_sum_bound(3, "rank", table).value == 2 * table.omega1 / 3
    assert star_sum_bound(6, "treewidth", table).value == Fraction(11, 3)
    with pytest.raises(ExponentError):
        star_sum_bound(2)


def test_mixed_d4_uses_decompositions(table):
    assert star_sum_bound(4, "mixed", table).value == Fraction(1, 4) + table.omega_of(Fraction(1, 2))


def test_chromatic_bounds():
    m = exponents.matching_chromatic_bound(matching(3), 5)
    assert (m.matchings, m.size) == (1, 2 * 6 * 5)
    h = exponents.matching_chromatic_bound(hyperclique_incidence(3, 4), 4)
    assert h.matchings == 3 and h.size == 2 ** 3 * 8 ** 3 * 4 ** 3
    assert exponents.matching_chromatic_bound(grid(3, 3), 2).matchings == 4


def test_sum_rule_report():
    assert exponents.sum_rule_check(clique(3), 2, [2]).passed


def test_table_rows_match_published_values(table):
    t = exponents.table1(table)
    assert [t.row("AR upper (star sums)").formatted()[d] for d in exponents.TABLE_DS] == \
        ["1.59", "2.32", "3.09", "3.87", "6.96"]
    assert [t.row("AC upper (treewidth)").formatted()[d] for d in exponents.TABLE_DS] == \
        ["2.00", "2.50", "3.20", "3.67", "5.80"]
    assert t.row("AC upper (decompositions)").formatted()[5] == "2.88"


def test_cat_is_sum_of_stars():
    # three stars with four edges each
    assert cat(3, 5).num_edges == 12
