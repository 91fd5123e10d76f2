import math
from fractions import Fraction

import pytest

from graphtensor import laser
from graphtensor.laser import (DIAGONAL, PHI, R_1, R_2, R_3, LaserError, F_R, D_of_gamma,
                               marginal_entropy, max_entropy_closed_form, max_entropy_ipf,
                               max_entropy_symmetric, mu, optimize_tau_k4, r_alpha_rank,
                               tau_k4_bound, tau_k4_bound_rearranged, type_class_counting)


def test_support_size():
    assert len(PHI) == 10


@pytest.mark.parametrize("gamma, want", [
    (0, math.log2(6)),
    (0.25, 2.0),
    (0.125, -4 * 0.125 * math.log2(0.125) - 2 * 0.25 * math.log2(1 / 12)),
])
def test_max_entropy_values(gamma, want):
    assert max_entropy_closed_form(gamma) == pytest.approx(want, abs=1e-12)
    assert max_entropy_symmetric(gamma)[1] == pytest.approx(want, abs=1e-12)


def test_ipf_matches_closed_form():
    target = dict(zip(laser.ALPHABET, laser.MarginalSpec(0.1).distribution))
    res = max_entropy_ipf(PHI, [target] * 4)
    assert res.entropy == pytest.approx(max_entropy_closed_form(0.1), abs=1e-10)


def test_ipf_single_point():
    res = max_entropy_ipf([(0, 2)], [{0: 1.0}, {2: 1.0}])
    assert res.entropy == 0


def test_ipf_infeasible():
    with pytest.raises(LaserError):
        max_entropy_ipf([(0, 1)], [{2: 1.0}, {1: 1.0}])


def test_r1_entropy_identity():
    g = 0.1
    h = laser.q_max_entropy(g, R_1).entropy
    assert h == pytest.approx(2 * max_entropy_closed_form(g) - marginal_entropy(g), abs=1e-9)


def test_ranks():
    assert [r_alpha_rank(r) for r in (R_1, R_2, R_3)] == [2, 1, 1]
    assert r_alpha_rank(DIAGONAL) == 0


def test_admissibility():
    assert all(r.is_admissible() for r in (R_1, R_2, R_3))
    assert not DIAGONAL.is_admissible()


@pytest.mark.parametrize("gamma", [0.0, 0.05, 0.2])
def test_fr_lower_bounds_dominate_mu(gamma):
    for rel in (R_1, R_2, R_3):
        rep = F_R(gamma, rel, numeric=True)
        assert rep.value >= mu(gamma) - 1e-9
        assert rep.numeric_value >= rep.value - 1e-9


def test_d_endpoints():
    assert D_of_gamma(0) == pytest.approx(math.log2(27 / 25), abs=1e-9)
    assert D_of_gamma(0.25) == pytest.approx(-1 + 0.75 * math.log2(3), abs=1e-9)


def test_mu_report_consistent():
    assert laser.mu_report(0.0012105179).consistent
    assert mu(0) == pytest.approx(1.0)


def test_tau_values():
    assert tau_k4_bound(7, 0) == pytest.approx(math.log(4.5, 7), abs=1e-12)
    assert tau_k4_bound(7, 0) == pytest.approx(0.772943, abs=1e-6)
    assert tau_k4_bound(7, 0.0012105179) == pytest.approx(0.77231702, abs=5e-6)
    assert tau_k4_bound(2, 0) == pytest.approx(1.0)
    assert tau_k4_bound_rearranged(7, 0.01) == pytest.approx(tau_k4_bound(7, 0.01), rel=1e-12)


def test_tau_rejects_bad_parameters():
    with pytest.raises(LaserError):
        tau_k4_bound(1, 0)
    with pytest.raises(LaserError):
        tau_k4_bound(7, 0.25)


def test_optimizer():
    opt7 = optimize_tau_k4([7])
    assert opt7.gamma == pytest.approx(0.0012105, abs=1e-6)
    assert opt7.bound < 0.772318
    assert optimize_tau_k4(range(2, 17)).q == 7


def test_optimizer_q2_stays_below_one():
    # the gamma-dependent exponent already helps at q = 2
    assert optimize_tau_k4([2]).bound < tau_k4_bound(2, 0) == pytest.approx(1.0)


@pytest.mark.parametrize("gamma, n, m", [(0, 4, 4), (Fraction(1, 8), 8, 4), (Fraction(1, 4), 4, 0)])
def test_type_class_counting(gamma, n, m):
    rep = type_class_counting(gamma, n)
    assert rep.m == m and rep.identities_hold


def test_type_class_needs_integral_counts():
    with pytest.raises(LaserError):
        type_class_counting(Fraction(1, 8), 4)


def test_sweep_small_grid():
    assert laser.verify_lemmas_sweep(101).passed
