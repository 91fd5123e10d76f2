import itertools
import random
from fractions import Fraction

import pytest

from graphtensor import tensors
from graphtensor.graphs import FractionalGraph, clique, cycle, matching, path
from graphtensor.tensors import (SparseTensor, TensorError, check_length_rule,
                                 check_product_identity, check_sum_rule, evaluate,
                                 evaluate_graph_tensor, flattening_rank, graph_tensor,
                                 is_concise, kronecker, rank_one)


def edge():
    return FractionalGraph.build([1, 2], [(1, 2)])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_single_edge_is_identity(n):
    t = graph_tensor(edge(), n)
    assert t.dims == (n, n)
    assert t.coeffs == {(i, i): 1 for i in range(n)}


def test_triangle_is_matrix_multiplication():
    # sum_{ijk} A_ij B_jk C_ki = trace(ABC) with matrix-encoded inputs
    rng = random.Random(3)
    n = 2
    g = clique(3)
    ix = tensors.GraphTensorIndexing.of(g, n)
    mats = [[[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)] for _ in range(3)]
    inputs = []
    for mode, ids in enumerate(ix.incident):
        vec = []
        for idx in range(n * n):
            a, b = ix.decode(mode, idx)
            vec.append(mats[mode][a][b])
        inputs.append(vec)
    brute = sum(mats[0][f01][f02] * mats[1][f01][f12] * mats[2][f02][f12]
                for f01, f02, f12 in itertools.product(range(n), repeat=3))
    assert evaluate(graph_tensor(g, n), inputs) == brute


def test_matching_flattening_is_identity_rank():
    t = graph_tensor(matching(2), 2)
    assert flattening_rank(t, [0, 2]) == 4


def test_triangle_mode_flattening():
    assert flattening_rank(graph_tensor(clique(3), 2), [0]) == 4


def test_rank_one_flattening():
    t = rank_one([[1, 2], [3, 0, 1], [1, 1]])
    assert all(flattening_rank(t, [m]) == 1 for m in range(3))


def test_kronecker_with_scalar_unit():
    t = graph_tensor(clique(3), 2)
    one = SparseTensor((1, 1, 1), {(0, 0, 0): 1})
    assert kronecker(t, one).coeffs == t.coeffs


def test_all_ones_input_counts_assignments():
    g = cycle(4)
    ones = [[1] * d for d in graph_tensor(g, 3).dims]
    assert evaluate_graph_tensor(g, 3, ones) == 3 ** 4


def test_holant_matches_sparse_evaluation():
    rng = random.Random(5)
    g = clique(4)
    t = graph_tensor(g, 2)
    for _ in range(5):
        x = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(d)] for d in t.dims]
        assert evaluate(t, x) == evaluate_graph_tensor(g, 2, x)


def test_product_identity_fixed_cases():
    assert check_product_identity(clique(3), clique(3), 2)
    assert check_product_identity(edge(), edge(), 2)


def test_length_and_sum_rules():
    assert check_length_rule(cycle(4), 2, 2)
    assert check_sum_rule(edge(), 2, 2)
    assert check_sum_rule(clique(3), 2, 2)
    assert check_sum_rule(path(2), 3, 2)


def test_concise_graph_tensors():
    for g in (clique(3), cycle(4), matching(2)):
        assert is_concise(graph_tensor(g, 2))


def test_tensor_dump_roundtrip():
    t = graph_tensor(clique(3), 2)
    assert tensors.loads(tensors.dumps(t)) == t


def test_bad_keys_rejected():
    with pytest.raises(TensorError):
        SparseTensor((2, 2), {(0, 2): 1})


def test_project_subgraph_of_k4_gives_triangle():
    proj = tensors.project_subgraph(clique(4), [0, 1, 3], 2)
    assert proj.tensor == graph_tensor(proj.target, 2)


def test_project_subdivision_c4_to_c3():
    proj = tensors.project_subdivision(cycle(4), 4, 2)
    assert proj.tensor == graph_tensor(proj.target, 2)
    assert proj.substitution.apply(graph_tensor(cycle(4), 2)) == graph_tensor(proj.target, 2)


def test_project_length_identity():
    proj = tensors.project_length(cycle(3), 3, 3)
    t = graph_tensor(cycle(3), 3)
    assert proj.substitution.apply(t) == t


@pytest.mark.parametrize("q, k", [(2, 3), (2, 4), (3, 3)])
def test_cw_degeneration(q, k):
    rep = tensors.cw_degeneration_check(q, k)
    assert rep.passed
