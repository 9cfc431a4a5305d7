from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tubecurv.combinatorics import (
    BlockPattern,
    Composition,
    ThetaTable,
    admissible_separations,
    closed_form_phi_psi,
    count_zero_distributions,
    enumerate_compositions,
    iterated_theta_identity_check,
    max_blocks,
    omega,
    omega_bar,
    phi,
    phi_psi_block,
    psi,
    theta,
    theta_bar,
    upsilon,
    upsilon_refined,
    upsilon_shift_formula,
)
from tubecurv.trace_algebra import BlockTracePolynomial, TraceMonomial, TracePolynomial, series_trace_power


def tr(*w, coeff=1):
    return TracePolynomial.tr(*w, coeff=coeff)


# -- compositions -------------------------------------------------------------


def test_compositions_small():
    # [TRIVIAL] letter multiplicities of degree r with i letters
    assert [c.sigma for c in enumerate_compositions(2, 2)] == [(0, 2, 0), (1, 0, 1)]
    assert [c.sigma for c in enumerate_compositions(2, 1)] == [(1, 1)]


@given(st.integers(1, 6), st.integers(0, 7))
def test_compositions_are_consistent(i, r):
    comps = enumerate_compositions(i, r)
    assert len(set(c.sigma for c in comps)) == len(comps)
    for c in comps:
        assert sum(c.sigma) == i
        assert sum(s * k for s, k in enumerate(c.sigma)) == r


def test_composition_validation():
    with pytest.raises(ValueError):
        Composition((1, 1), 3, 1)


# -- theta weights -------------------------------------------------------------


@pytest.mark.parametrize("a", range(1, 13))
def test_theta_is_binomial(a):
    # [REFERENCE] Theta(a, b) = C(a-1, b-1) for 1 <= b <= a
    for b in range(1, a + 1):
        assert theta(a, b) == comb(a - 1, b - 1)


def test_theta_boundaries():
    assert theta(0, 0) == 1
    assert theta(3, 0) == 0
    assert theta(2, 3) == 0
    assert theta_bar(0, 0) == 1
    assert theta_bar(4, 0) == 1
    assert theta_bar(4, 1) == 5
    # [DERIVED] two ways to place the runs when every block boundary holds one
    assert [theta_bar(b, b) for b in range(1, 6)] == [2] * 5


@given(st.integers(1, 10), st.integers(1, 10))
def test_theta_bar_closed_form(a, b):
    assert theta_bar(a, b) == comb(a, b) + comb(a - 1, b - 1)


def test_theta_table_recurrence():
    table = ThetaTable(12)
    assert table.recurrence_holds()
    assert table.theta(5, 2) == 4
    assert table.theta_bar(5, 2) == 14


@pytest.mark.parametrize("closed", [False, True])
def test_theta_counts_zero_distributions(closed):
    # [DERIVED] direct enumeration of run-length vectors
    for a in range(1, 8):
        for c in range(1, 5):
            for b in range(1, c + 1):
                for pat in BlockPattern.all(c, b, closed):
                    want = theta_bar(a, b) if closed else theta(a, b)
                    assert count_zero_distributions(a, pat) == want


def test_block_pattern_validation():
    with pytest.raises(ValueError):
        BlockPattern(2, 3, (1, 2, 3))
    with pytest.raises(ValueError):
        BlockPattern(3, 2, (2, 1))
    assert BlockPattern(3, 2, (1, 3)).closed
    assert not BlockPattern(3, 2, (1, 2)).closed


@pytest.mark.parametrize("a", range(1, 11))
def test_iterated_identity_positive_a(a):
    for b in range(0, 11):
        for e in range(0, 11):
            assert iterated_theta_identity_check(a, b, e)


@pytest.mark.xfail(strict=True, reason="the alternating identity has no valid a = 0 row for any "
                                        "choice of the weight at (0, 0); see notes")
def test_iterated_identity_zero_row():
    assert all(iterated_theta_identity_check(0, b, e) for b in range(11) for e in range(11))


def test_iterated_identity_rejects_negative():
    with pytest.raises(ValueError):
        iterated_theta_identity_check(-1, 0, 0)


# -- admissible sets and pattern sums -------------------------------------------------


def test_admissible_separations_examples():
    assert admissible_separations(5, 7, 2) == [1, 3]
    assert admissible_separations(3, 3, 1) == [2]
    assert max_blocks(5, 7) == 3
    with pytest.raises(ValueError):
        admissible_separations(1, 3, 1)
    with pytest.raises(ValueError):
        admissible_separations(4, 4, 5)


def test_pattern_sums_small():
    assert omega_bar(2, 2, 1, 1, 1) == tr(0, 2)
    assert omega_bar(3, 3, 1, 2, 1) == tr(0, 3)
    assert not omega(2, 2, 1, 1, 1)


# -- refined formula ------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(2, 7))
def test_refined_matches_brute_force(i, r):
    assert upsilon_refined(i, r) == series_trace_power(i, r)[r]


def test_refined_rejects_small_indices():
    with pytest.raises(ValueError):
        upsilon_refined(1, 3)
    with pytest.raises(ValueError):
        upsilon(0, 1)
    with pytest.raises(ValueError):
        upsilon(2, 2, source="magic")


@pytest.mark.parametrize("i,r", [(1, 0), (1, 3), (2, 0), (3, 1), (5, 1), (4, 0)])
def test_boundary_cases(i, r):
    assert upsilon(i, r) == upsilon(i, r, "brute")


def test_generalised_blocks_counted():
    # [DERIVED] brute force: four tuples of Upsilon_45 reduce to tr(A_0 A_2 A_1 A_2)
    mon = TraceMonomial((0, 2, 1, 2))
    assert series_trace_power(4, 5)[5].coefficient(mon) == -4
    assert upsilon_refined(4, 5).coefficient(mon) == -4


@pytest.mark.parametrize("r", range(2, 7))
@pytest.mark.parametrize("e", range(0, 4))
def test_shift_formula(r, e):
    assert upsilon_shift_formula(r, e) == upsilon(r + e, r)


# -- Phi / Psi --------------------------------------------------------------------------


def test_phi_psi_small():
    # [DERIVED] by summing the brute-force coefficients by hand
    assert phi(2, 1) == tr(1, 1) + tr(0, 2)
    assert psi(2, 1) == tr(2) + tr(1, 1) - tr(0, 2, coeff=2)
    assert phi(4, 2) == tr(0, 2, 0, 2) + tr(1, 1, 1, 1)


def test_phi_psi_sources_agree():
    for r in range(2, 7):
        for e in range(0, 4):
            assert phi(r, e) == phi(r, e, "brute")
            assert psi(r, e) == psi(r, e, "brute")


@pytest.mark.parametrize("d", [1, 2, 3])
def test_closed_forms(d):
    for (kind, r, e), form in closed_form_phi_psi(d).items():
        block = phi_psi_block(kind, r, e)
        assert not block.residual
        assert block == form


def test_closed_form_d1_values():
    # [REFERENCE] Phi_2(1) = tr(S^2) + tr(K_bot)/3 and Psi_3(2) = 2 tr(S K_top) + 4 tr(S^3)
    forms = closed_form_phi_psi(1)
    assert forms[("phi", 2, 1)] == BlockTracePolynomial.from_letters(
        {("S", "S"): 1, ("K_bot",): Fraction(1, 3)})
    assert forms[("psi", 3, 2)] == BlockTracePolynomial.from_letters(
        {("S", "K_top"): 2, ("S", "S", "S"): 4})
    with pytest.raises(ValueError):
        closed_form_phi_psi(0)
