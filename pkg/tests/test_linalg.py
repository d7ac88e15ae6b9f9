import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from genkoszul import linalg
from genkoszul.linalg import (
    ExactMatrix,
    PrimeField,
    RationalField,
    WellDefinednessViolation,
    induced_map_on_quotients,
    kernel_basis,
    parse_field,
    quotient_structure,
    rank,
    rref,
)

SMALL_P = 7


def minor_rank(rows, modulus=None):
    """Largest k with a nonzero k x k minor, determinants by sympy."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    for k in range(min(nr, nc), 0, -1):
        for rs in itertools.combinations(range(nr), k):
            for cs in itertools.combinations(range(nc), k):
                det = sympy.Matrix([[rows[i][j] for j in cs] for i in rs]).det()
                if (det % modulus if modulus else det) != 0:
                    return k
    return 0


def matrices(max_dim=4, lo=-3, hi=3):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def rationals():
    return st.fractions(min_value=-4, max_value=4, max_denominator=5)


def rational_matrices(max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(rationals(), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# examples ------------------------------------------------------------------


def test_rref_zero_and_identity(fp):
    red, piv = rref(ExactMatrix.zeros(fp, 2, 2))
    assert red.is_zero() and piv == []
    red, piv = rref(ExactMatrix.identity(fp, 3))
    assert red == ExactMatrix.identity(fp, 3) and piv == [0, 1, 2]


def test_rref_hand_example_f7():
    f7 = PrimeField(7)
    red, piv = rref(ExactMatrix(f7, [[1, 2], [2, 4]]))
    assert red.tolist() == [[1, 2], [0, 0]] and piv == [0]


def test_rank_examples(fp, qq):
    assert rank(ExactMatrix.identity(fp, 5)) == 5
    assert rank(ExactMatrix.zeros(qq, 3, 4)) == 0
    assert rank(ExactMatrix(qq, [[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    f5 = PrimeField(5)
    assert kernel_basis(ExactMatrix.identity(f5, 3)).cols == 0
    assert kernel_basis(ExactMatrix.zeros(f5, 2, 3)).tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    k = kernel_basis(ExactMatrix(f5, [[1, 1]]))
    assert k.tolist() == [[4], [1]]


def test_quotient_examples(fp):
    assert quotient_structure(3, ExactMatrix.identity(fp, 3)).dim == 0
    empty = quotient_structure(2, ExactMatrix.zeros(fp, 2, 0))
    assert empty.dim == 2 and empty.projection == ExactMatrix.identity(fp, 2)
    chart = quotient_structure(2, ExactMatrix(fp, [[1], [1]]))
    assert chart.dim == 1
    assert (chart.projection @ ExactMatrix(fp, [[1], [1]])).is_zero()


def test_induced_map_examples(fp):
    span = ExactMatrix(fp, [[1], [0]])
    src = quotient_structure(2, span, keep_span=True)
    dst = quotient_structure(2, span)
    out = induced_map_on_quotients(ExactMatrix.identity(fp, 2), src, dst)
    assert out == ExactMatrix.identity(fp, 1)
    full = quotient_structure(2, ExactMatrix.identity(fp, 2))
    assert induced_map_on_quotients(ExactMatrix.identity(fp, 2), src, full).rows == 0
    swap = ExactMatrix(fp, [[0, 1], [1, 0]])
    with pytest.raises(WellDefinednessViolation):
        induced_map_on_quotients(swap, src, dst)


def test_parse_field():
    assert parse_field("fp:32003") == PrimeField(32003)
    assert parse_field("Q") == RationalField()
    with pytest.raises(ValueError):
        parse_field("fp:32004")
    with pytest.raises(ValueError):
        parse_field("reals")


def test_scalar_arithmetic_exact():
    f = PrimeField(SMALL_P)
    for a in range(1, SMALL_P):
        assert a * f.inv(a) % SMALL_P == 1
        assert (a + f(-a)) % SMALL_P == 0
    assert f(Fraction(1, 2)) == 4
    with pytest.raises(ZeroDivisionError):
        f.inv(0)


# properties ------------------------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_minor_oracle_fp(rows):
    m = ExactMatrix(PrimeField(SMALL_P), rows)
    assert rank(m) == minor_rank(rows, SMALL_P)


@settings(max_examples=80, deadline=None)
@given(rational_matrices())
def test_rank_matches_minor_oracle_q(rows):
    m = ExactMatrix(RationalField(), rows)
    assert rank(m) == minor_rank(rows)


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=4))
def test_rref_pivots_match_minor_oracle(rows):
    red, piv = rref(ExactMatrix(PrimeField(SMALL_P), rows))
    assert len(piv) == minor_rank(rows, SMALL_P)


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=8, lo=-50, hi=50))
def test_rank_transpose_and_nullity(rows):
    m = ExactMatrix(PrimeField(SMALL_P), rows)
    assert rank(m) == rank(m.T)
    k = kernel_basis(m)
    assert k.cols == m.cols - rank(m)
    assert (m @ k).is_zero()
    assert rank(k) == k.cols


@settings(max_examples=100, deadline=None)
@given(matrices(max_dim=8, lo=-50, hi=50))
def test_rref_idempotent_and_increasing(rows):
    m = ExactMatrix(PrimeField(SMALL_P), rows)
    red, piv = rref(m)
    again, piv2 = rref(red)
    assert again == red and piv2 == piv
    assert all(a < b for a, b in zip(piv, piv[1:]))
    for i, c in enumerate(piv):
        col = red.data[:, c]
        assert col[i] == 1 and np.count_nonzero(col) == 1


@settings(max_examples=60, deadline=None)
@given(rational_matrices(max_dim=5))
def test_rational_kernel_exact(rows):
    m = ExactMatrix(RationalField(), rows)
    k = kernel_basis(m)
    assert (m @ k).is_zero()
    assert k.cols + rank(m) == m.cols


@settings(max_examples=60, deadline=None)
@given(matrices(max_dim=6, lo=0, hi=SMALL_P - 1), st.integers(0, 5))
def test_quotient_projection_kills_span(rows, extra):
    f = PrimeField(SMALL_P)
    span = ExactMatrix(f, rows)
    chart = quotient_structure(span.rows, span)
    assert chart.dim == span.rows - rank(span)
    assert (chart.projection @ span).is_zero()
    for i, c in enumerate(chart.complement):
        assert chart.projection.data[i, c] == 1


@settings(max_examples=40, deadline=None)
@given(matrices(max_dim=8, lo=-50, hi=50))
def test_flint_and_numpy_eliminations_agree(rows):
    f = PrimeField(32003)
    m = ExactMatrix(f, rows)
    old = linalg.FLINT_THRESHOLD
    try:
        linalg.FLINT_THRESHOLD = 0
        fast = rref(m), rank(m)
        linalg.FLINT_THRESHOLD = 10**12
        slow = rref(m), rank(m)
    finally:
        linalg.FLINT_THRESHOLD = old
    assert fast[0][0] == slow[0][0] and fast[0][1] == slow[0][1] and fast[1] == slow[1]
