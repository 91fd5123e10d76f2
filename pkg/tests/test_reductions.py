import random

import pytest

from graphtensor import reductions
from graphtensor.reductions import (hyperclique_count, hyperclique_projection_check,
                                    permanent_bruteforce_check, permanent_circuit,
                                    permanent_reduction, ryser)


def test_ryser_small():
    assert ryser([[5]]) == 5
    assert ryser([[1, 2], [3, 4]]) == 1 * 4 + 2 * 3
    assert ryser([[1] * 3] * 3) == 6


def test_one_by_one():
    assert permanent_reduction([[7]])[1] == 7


@pytest.mark.parametrize("n", [2, 3])
def test_against_ryser(n):
    rng = random.Random(n)
    pc = permanent_circuit(n)
    for _ in range(5):
        a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        assert permanent_reduction(a, pc)[1] == ryser(a)


@pytest.mark.parametrize("a, per", [([[1, 0], [0, 1]], 1), ([[1, 1], [1, 1]], 2)])
def test_bruteforce_holant(a, per):
    rep = permanent_bruteforce_check(a)
    assert rep.passed and rep.to_dict()["holant"] == per


def test_non_square_rejected():
    with pytest.raises(reductions.ReductionError):
        permanent_reduction([[1, 2]])


@pytest.mark.parametrize("big", [1, 2])
def test_hyperclique_projection(big):
    assert hyperclique_projection_check(big).equal


def test_hyperclique_counting():
    tetra = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    res = hyperclique_count(tetra, 4)
    assert res.passed and res.cliques == 1
    assert hyperclique_count(tetra[:3], 4).cliques == 0
