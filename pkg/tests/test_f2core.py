"""Dense F2 matrices, persymmetric blocks and packed polynomials"""

import hypothesis.strategies as st
import pytest
from hypothesis import given

from app.core import gf2x
from app.core.exceptions import ShapeError
from app.core.f2core import (
    BitMatrix,
    CoefficientTriple,
    MixedShape,
    TripleShape,
    persymmetric_matrix,
    rank,
    rank_of_rows,
    stack_double,
    stack_mixed,
    stack_triple,
    transpose,
    truncate_columns,
)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    data = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return BitMatrix(rows, cols, tuple(data))


def test_identity_and_zero_ranks():
    assert rank(BitMatrix.identity(5)) == 5
    assert rank(BitMatrix.zeros(3, 4)) == 0
    assert rank(BitMatrix(0, 3, ())) == 0


def test_rank_of_dependent_rows():
    mat = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rank(mat) == 2


def test_from_rows_rejects_ragged_and_non_bits():
    with pytest.raises(ShapeError):
        BitMatrix.from_rows([[1, 0], [1]])
    with pytest.raises(ShapeError):
        BitMatrix.from_rows([[1, 2]])


def test_persymmetric_entries_follow_antidiagonals():
    coeffs = (1, 0, 1, 1, 0)
    mat = persymmetric_matrix(coeffs, 2, 4)
    assert mat.to_lists() == [[1, 0, 1, 1], [0, 1, 1, 0]]
    for i in range(2):
        for j in range(4):
            assert mat.entry(i, j) == coeffs[i + j]


def test_persymmetric_length_is_checked():
    with pytest.raises(ShapeError):
        persymmetric_matrix((1, 0, 1), 2, 3)


def test_stack_triple_layout():
    shape = TripleShape(1, 1, 0, 2)
    point = CoefficientTriple((1, 1), (0, 1, 1), (1, 0, 0))
    mat = stack_triple(point, shape)
    assert (mat.rows, mat.cols) == (5, 2)
    assert mat.to_lists() == [[1, 1], [0, 1], [1, 1], [1, 0], [0, 0]]
    assert rank(mat) == 2


def test_stack_triple_checks_lengths():
    with pytest.raises(ShapeError):
        stack_triple(CoefficientTriple((1,), (0, 1), (1, 0)), TripleShape(1, 0, 0, 2))


def test_stack_double_and_mixed():
    double = stack_double((1, 0, 1), (0, 1, 1, 0), 1, 2, 3)
    assert double.rows == 3
    ms = MixedShape(1, 0, 0, 2)
    general = BitMatrix.from_rows([[1, 1]])
    mixed = stack_mixed(general, (0, 1), (1, 0), ms)
    assert mixed.to_lists() == [[1, 1], [0, 1], [1, 0]]
    assert rank(mixed) == 2


def test_shape_properties():
    shape = TripleShape(2, 1, 1, 4)
    assert shape.blocks == (2, 3, 4)
    assert shape.total_rows == 9
    assert shape.max_rank == 4
    assert shape.coset_lengths == (5, 6, 7)
    assert shape.coefficient_bits == 18
    assert TripleShape.from_blocks((4, 2, 3), 4) == shape
    with pytest.raises(ShapeError):
        TripleShape(0, 0, 0, 1)


@given(matrices())
def test_transpose_preserves_rank(mat):
    assert rank(transpose(mat)) == rank(mat)
    assert transpose(transpose(mat)) == mat


@given(st.data())
def test_rank_is_subadditive(data):
    a = data.draw(matrices())
    b = data.draw(st.lists(st.integers(0, (1 << a.cols) - 1), min_size=a.rows, max_size=a.rows))
    other = BitMatrix(a.rows, a.cols, tuple(b))
    assert rank(a.xor(other)) <= rank(a) + rank(other)


@given(matrices(), st.data())
def test_truncation_never_raises_rank(mat, data):
    k2 = data.draw(st.integers(1, mat.cols))
    assert rank(truncate_columns(mat, k2)) <= min(rank(mat), k2)


def test_truncated_persymmetric_block_is_a_prefix_block():
    assert truncate_columns(persymmetric_matrix((1, 0, 1, 1), 2, 3), 2) == persymmetric_matrix((1, 0, 1), 2, 2)


@given(matrices().filter(lambda mat: mat.cols >= 2))
def test_dropping_one_column_loses_at_most_one_rank(mat):
    full = rank(mat)
    assert rank(truncate_columns(mat, mat.cols - 1)) in (full, full - 1)


@given(st.data())
def test_persymmetric_truncation_keeps_coefficient_prefix(data):
    rows = data.draw(st.integers(1, 5))
    cols = data.draw(st.integers(1, 6))
    coeffs = tuple(data.draw(st.lists(st.integers(0, 1), min_size=rows + cols - 1, max_size=rows + cols - 1)))
    k2 = data.draw(st.integers(1, cols))
    assert truncate_columns(persymmetric_matrix(coeffs, rows, cols), k2) == persymmetric_matrix(
        coeffs[: rows + k2 - 1], rows, k2
    )


@given(st.data())
def test_triple_stack_truncates_to_the_narrower_stack(data):
    shape = TripleShape(
        data.draw(st.integers(1, 2)), data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2)), data.draw(st.integers(2, 5))
    )
    alpha, beta, gamma = (
        tuple(data.draw(st.lists(st.integers(0, 1), min_size=length, max_size=length)))
        for length in shape.coset_lengths
    )
    narrow = TripleShape(shape.s, shape.m, shape.l, shape.k - 1)
    wide = stack_triple(CoefficientTriple(alpha, beta, gamma), shape)
    assert truncate_columns(wide, shape.k - 1) == stack_triple(
        CoefficientTriple(alpha[:-1], beta[:-1], gamma[:-1]), narrow
    )
    assert rank(wide) - rank(truncate_columns(wide, shape.k - 1)) in (0, 1)


@given(st.lists(st.integers(0, 255), max_size=8))
def test_row_order_does_not_change_rank(rows):
    assert rank_of_rows(rows) == rank_of_rows(list(reversed(rows)))


def test_carry_less_multiplication():
    # (T + 1)^2 = T^2 + 1 over F2
    assert gf2x.mul(0b11, 0b11) == 0b101
    assert gf2x.mul(0, 0b1011) == 0
    assert gf2x.degree(0) == -1
    assert gf2x.degree(0b1000) == 3
    assert gf2x.parity(0b1011) == 1


@given(st.integers(0, 1 << 12), st.integers(0, 1 << 12), st.integers(0, 1 << 12))
def test_multiplication_distributes_over_xor(a, b, c):
    assert gf2x.mul(a, b ^ c) == gf2x.mul(a, b) ^ gf2x.mul(a, c)
    assert gf2x.mul(a, b) == gf2x.mul(b, a)
