from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import newton_oracle, trace_power_coefficients
from tubecurv.geometry import SecondOrderData, block_assignment
from tubecurv.trace_algebra import (
    BlockTracePolynomial,
    BlockWord,
    EvaluationError,
    SymmetricFunctionValues,
    TraceMonomial,
    TracePolynomial,
    block_expand,
    evaluate,
    newton_convert,
    power_sums_from_elementary,
    reduce_word,
    series_trace_power,
)

words = st.lists(st.integers(0, 4), min_size=1, max_size=7)


def tr(*w, coeff=1):
    return TracePolynomial.tr(*w, coeff=coeff)


# -- reduction ---------------------------------------------------------------


def test_reduce_word_vanishes_on_adjacent_zero_one():
    # [TRIVIAL] A_0 A_1 = 0
    assert reduce_word([0, 1, 2]) is None
    assert reduce_word([1, 2, 0]) is None  # cyclic neighbour


def test_reduce_word_collapses_zero_runs_and_rotates():
    # [TRIVIAL] A_0^2 = A_0, cyclic trace
    assert reduce_word([0, 0, 2]) == TraceMonomial((0, 2))
    assert reduce_word([2, 0]) == TraceMonomial((0, 2))
    assert reduce_word([0, 0, 0]) == TraceMonomial((0,))


def test_reduce_word_rejects_bad_input():
    with pytest.raises(ValueError):
        reduce_word([])
    with pytest.raises(ValueError):
        reduce_word([-1, 2])


@given(words, st.integers(0, 6))
def test_reduction_is_rotation_invariant(word, shift):
    k = shift % len(word)
    assert reduce_word(word) == reduce_word(word[k:] + word[:k])


@given(words)
def test_reduction_is_idempotent(word):
    mon = reduce_word(word)
    if mon is not None:
        assert reduce_word(mon.word) == mon


# -- brute-force series ------------------------------------------------------


@pytest.mark.parametrize("i", range(1, 7))
def test_constant_term(i):
    # [REFERENCE] Upsilon_i0 = (-1)^i tr(A_0) = (-1)^i (n - m)
    assert series_trace_power(i, 0)[0] == tr(0, coeff=(-1) ** i)


def test_low_order_series_values():
    # [REFERENCE] low-order table
    assert series_trace_power(1, 2)[2] == tr(2)
    assert series_trace_power(2, 2)[2] == tr(1, 1) - tr(0, 2, coeff=2)
    assert series_trace_power(3, 2)[2] == tr(0, 2, coeff=3)
    assert series_trace_power(3, 0)[0] == tr(0, coeff=-1)
    assert series_trace_power(4, 4)[4] == (tr(1, 1, 1, 1) - tr(0, 4, coeff=4) + tr(0, 2, 2, coeff=4)
                                           + tr(0, 2, 0, 2, coeff=2))


def test_series_rejects_bad_arguments():
    with pytest.raises(ValueError):
        series_trace_power(0, 2)
    with pytest.raises(ValueError):
        series_trace_power(2, -1)


def test_polynomial_arithmetic_is_exact():
    p = tr(0, 2, coeff=Fraction(1, 3)) + tr(0, 2, coeff=Fraction(2, 3))
    assert p == tr(0, 2)
    assert (p - p) == TracePolynomial()
    assert not (p - p)
    assert (p * 3).coefficient(TraceMonomial((0, 2))) == 3
    with pytest.raises(TypeError):
        tr(2) * 0.5


def test_dump_and_pretty():
    p = tr(1, 1) - tr(0, 2, coeff=2)
    assert p.dump() == "-2 * tr(A_0 A_2)\n1 * tr(A_1 A_1)"
    assert p.pretty() == "-2 tr(A_0 A_2) + tr(A_1 A_1)"
    assert TracePolynomial().pretty() == "0"


# -- block words -------------------------------------------------------------


def test_block_word_canonical_under_transpose():
    # [TRIVIAL] tr(X) = tr(X^T)
    w1 = BlockWord.make(["B", "K_bot", "Bt", "S"])
    w2 = BlockWord.make(["S", "B", "K_bot", "Bt"])
    assert w1 == w2
    assert BlockWord.make(["CB", "Bt"]) == BlockWord.make(["B", "CBt"])
    assert w1.transposed() == w1


def test_block_word_rejects_mismatched_letters():
    with pytest.raises(ValueError):
        BlockWord.make(["S", "K_bot"])
    with pytest.raises(ValueError):
        BlockWord.make(["nope"])


def test_block_expand_low_order():
    # [DERIVED] by substituting the block form of A_2 and A_3 by hand
    F = Fraction
    assert block_expand(tr(2)) == BlockTracePolynomial.from_letters(
        {("S", "S"): 1, ("K_top",): 1, ("K_bot",): F(1, 3)})
    assert block_expand(tr(3)) == BlockTracePolynomial.from_letters(
        {("CK_top",): F(1, 2), ("S", "S", "S"): 1, ("S", "K_top"): 1, ("CK_bot",): F(1, 4)})
    assert block_expand(tr(0, 2)) == BlockTracePolynomial.from_letters({("K_bot",): F(1, 3)})
    assert block_expand(tr(0, 2, 0, 2)) == BlockTracePolynomial.from_letters({("K_bot", "K_bot"): F(1, 9)})
    assert block_expand(tr(1, 1)) == BlockTracePolynomial.from_letters({("S", "S"): 1})


def test_block_expand_keeps_high_letters_opaque():
    out = block_expand(tr(0, 4) + tr(2))
    assert out.residual == tr(0, 4)
    assert out.coefficient(BlockWord.make(["K_top"])) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 3), st.integers(1, 3), st.integers(0, 2**31 - 1),
       st.lists(st.integers(0, 3), min_size=1, max_size=5))
def test_block_expand_agrees_numerically(m, k, seed, word):
    rng = np.random.default_rng(seed)
    data = SecondOrderData.random(rng, m, m + k)
    asg = block_assignment(data)
    mon = reduce_word(word)
    if mon is None:
        return
    poly = TracePolynomial({mon: 1})
    a = evaluate(poly, asg)
    b = evaluate(block_expand(poly), asg)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


# -- evaluation --------------------------------------------------------------


def test_evaluate_against_truncated_series_oracle():
    # [DERIVED] direct matrix power series, independent of the symbolic expansion
    rng = np.random.default_rng(7)
    data = SecondOrderData.random(rng, 2, 4)
    asg = block_assignment(data)
    A = [asg[j] for j in range(4)]
    for i in range(1, 5):
        coeffs = trace_power_coefficients(A, i, 3)
        for r, poly in enumerate(series_trace_power(i, 3)):
            assert evaluate(poly, asg) == pytest.approx(coeffs[r], rel=1e-12, abs=1e-12)


def test_evaluate_names_missing_letter():
    with pytest.raises(EvaluationError, match="A_4"):
        evaluate(tr(0, 4), {0: np.eye(2)})
    with pytest.raises(EvaluationError, match="dimension"):
        evaluate(tr(0, 2), {0: np.eye(2), 2: np.eye(3)})
    with pytest.raises(TypeError):
        evaluate("tr", {})


# -- symmetric functions -----------------------------------------------------


def test_newton_examples():
    # [TRIVIAL] roots {1,-1}, {1,1,1}
    assert newton_convert([0, 2]) == [0, -1]
    assert newton_convert([3, 3, 3]) == [3, 3, 1]
    assert newton_convert([0, Fraction(2, 3)]) == [0, Fraction(-1, 3)]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6))
def test_newton_matches_polynomial_oracle(roots):
    psums, elem = newton_oracle(roots)
    got = newton_convert([int(p) for p in psums])
    assert got == [Fraction(int(e)) for e in elem]
    assert power_sums_from_elementary(got) == [Fraction(int(p)) for p in psums]


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5))
def test_symmetric_values_roundtrip(values):
    sv = SymmetricFunctionValues(tuple(values))
    e = newton_convert(sv.power_sums())
    for k, ek in enumerate(e, start=1):
        assert ek == pytest.approx(sv.elementary(k), rel=1e-6, abs=1e-6)
