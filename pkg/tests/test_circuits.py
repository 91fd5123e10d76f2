import random
from fractions import Fraction

import pytest

from graphtensor import circuits, tensors
from graphtensor.circuits import (CircuitBuilder, CircuitError, RankDecomposition,
                                  evaluate_circuit, evaluate_scalar, monomial_decomposition,
                                  treedec_circuit, yates_circuit)
from graphtensor.graphs import FractionalGraph, clique, contract, cycle, grid


def rand_inputs(rng, dims):
    return [[Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(d)] for d in dims]


def test_single_input_echo():
    b = CircuitBuilder((3,))
    c = b.build([b.input(0, 2)])
    assert evaluate_circuit(c, [[4, 5, 6]]) == [6]


def test_cycle_detection():
    c = circuits.Circuit((circuits.Gate("add", ((1, Fraction(1)),)),
                          circuits.Gate("add", ((0, Fraction(1)),))), (0,), ())
    with pytest.raises(CircuitError):
        c.topological_order()


def test_inner_product_yates():
    dec = RankDecomposition.of([[[1, 0], [1, 0]], [[0, 1], [0, 1]]])
    yc = yates_circuit(dec, 1)
    assert evaluate_scalar(yc.circuit, [[2, 3], [5, 7]]) == 2 * 5 + 3 * 7


@pytest.mark.parametrize("k", [1, 2])
def test_yates_triangle_monomials(k):
    t = tensors.graph_tensor(clique(3), 2)
    yc = yates_circuit(monomial_decomposition(t), k, t)
    tk = tensors.kronecker_power(t, k)
    rng = random.Random(k)
    for _ in range(5):
        x = rand_inputs(rng, yc.circuit.input_dims)
        assert evaluate_scalar(yc.circuit, x) == tensors.evaluate(tk, x)
    assert yc.circuit.size <= circuits.YATES_CONSTANT * yc.bound_unit


def test_yates_w_tensor():
    # W = e0 e0 e1 + e0 e1 e0 + e1 e0 e0 as three rank-one terms
    e0, e1 = [1, 0], [0, 1]
    dec = RankDecomposition.of([[e0, e0, e1], [e0, e1, e0], [e1, e0, e0]])
    t = dec.tensor()
    yc = yates_circuit(dec, 3, t)
    rng = random.Random(9)
    t3 = tensors.kronecker_power(t, 3)
    for _ in range(3):
        x = rand_inputs(rng, yc.circuit.input_dims)
        assert evaluate_scalar(yc.circuit, x) == tensors.evaluate(t3, x)
    assert yc.circuit.size <= circuits.YATES_CONSTANT * 3 * 3 * 3 ** 4


@pytest.mark.parametrize("g", [cycle(4), clique(4), grid(3, 3)], ids=["C4", "K4", "grid3x3"])
def test_treedec_matches_holant(g):
    rng = random.Random(1)
    gc = treedec_circuit(g, 2)
    assert gc.passed and gc.max_a <= gc.width + 1
    for _ in range(5):
        x = rand_inputs(rng, gc.circuit.input_dims)
        assert evaluate_scalar(gc.circuit, x) == tensors.evaluate_graph_tensor(g, 2, x)


def test_k2_needs_more_than_unit_constant():
    # one edge: n products, their sum and the output already exceed |V| n^(ltw+1) = 2n
    gc = treedec_circuit(FractionalGraph.build([1, 2], [(1, 2)]), 2)
    assert gc.bound == 4 and gc.circuit.size == 6


def test_k4_core_counts():
    gc = treedec_circuit(clique(4), 2)
    assert gc.width == 4 and gc.bound == 128
    assert gc.circuit.mul_wires <= circuits.TREEDEC_MUL_CONSTANT * gc.bound
    assert gc.circuit.size <= circuits.TREEDEC_CONSTANT * gc.bound


def test_contraction_of_triangle_pair():
    g = clique(3)
    inner = treedec_circuit(*_contracted(g, [1, 2]), 2).circuit
    cc = circuits.contraction_circuit(g, [1, 2], 2, inner)
    rng = random.Random(4)
    for _ in range(5):
        x = rand_inputs(rng, cc.circuit.input_dims)
        assert evaluate_scalar(cc.circuit, x) == tensors.evaluate_graph_tensor(g, 2, x)
    assert cc.added_wires <= circuits.CONTRACTION_CONSTANT * cc.bound_unit


def _contracted(g, u):
    return (contract(g, u)[0],)


def test_contraction_of_grid_row():
    g = grid(2, 2)
    inner = treedec_circuit(*_contracted(g, [1, 2]), 2).circuit
    cc = circuits.contraction_circuit(g, [1, 2], 2, inner)
    rng = random.Random(6)
    x = rand_inputs(rng, cc.circuit.input_dims)
    assert evaluate_scalar(cc.circuit, x) == tensors.evaluate_graph_tensor(g, 2, x)


@pytest.mark.parametrize("n, k, b, cost", [(4, 2, 2, 1152), (6, 3, 2, 6912)])
def test_grid_schedule_accounting(n, k, b, cost):
    s = circuits.grid_contraction_schedule(n, k, b)
    assert s.passed and s.cost == cost


def test_grid_schedule_trivial():
    assert circuits.grid_contraction_schedule(2, 2, 2).cost == 0


def test_grid_contraction_circuit_small():
    s = circuits.grid_contraction_schedule(4, 2, 2)
    c = circuits.grid_contraction_circuit(s, 2)
    g = grid(4, 4)
    rng = random.Random(2)
    # small integers keep the 2^24-term holant oracle in int64
    x = [[rng.randint(-2, 2) for _ in range(d)] for d in c.input_dims]
    assert evaluate_scalar(c, x) == tensors.evaluate_graph_tensor(g, 2, x)


@pytest.mark.parametrize("k, n, b", [(1, 2, 1), (2, 2, 1), (2, 2, 2)])
def test_matching_formula(k, n, b):
    mc = circuits.matching_formula_circuit(k, n, b)
    g = circuits.matching_graph(k, b)
    rng = random.Random(k + b)
    x = rand_inputs(rng, mc.circuit.input_dims)
    assert evaluate_scalar(mc.circuit, x) == tensors.evaluate_graph_tensor(g, n, x)
    assert mc.core_wires <= mc.core_bound == 2 * k * n ** b


def test_rank_times_circuit_matches_kronecker():
    u = clique(3)
    t = tensors.unit_tensor(3, 2)
    dec = RankDecomposition.of([[[1, 0]] * 3, [[0, 1]] * 3])
    ut = tensors.graph_tensor(u, 2)
    for k in (1, 2):
        inner = yates_circuit(monomial_decomposition(ut), k).circuit
        rc = circuits.rank_times_circuit(dec, inner, ut.dims, k)
        oracle = circuits.kron_oracle(ut, t, k)
        rng = random.Random(k)
        x = rand_inputs(rng, rc.circuit.input_dims)
        assert evaluate_scalar(rc.circuit, x) == tensors.evaluate(oracle, x)


def test_dump_roundtrip_and_simplify():
    c = treedec_circuit(cycle(4), 2).circuit
    back = circuits.loads(circuits.dumps(c))
    rng = random.Random(0)
    x = rand_inputs(rng, c.input_dims)
    assert evaluate_scalar(back, x) == evaluate_scalar(c, x)
    assert evaluate_scalar(circuits.simplify(c), x) == evaluate_scalar(c, x)
    assert back.size == c.size == c.recount()


def test_decomposition_checks():
    t = tensors.graph_tensor(clique(3), 2)
    dec = monomial_decomposition(t)
    assert dec.rank == t.nnz and dec.tensor() == t
