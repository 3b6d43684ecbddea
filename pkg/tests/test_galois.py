from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_in_span, brute_rank
from netcomp.galois import (
    FieldMatrix,
    PrimeField,
    add,
    column_submatrix,
    full_rank_row_basis,
    in_span,
    inverse_element,
    is_prime,
    matmul,
    matrix_from_json,
    matrix_to_json,
    rank,
    scale,
    solve_right,
)


@st.composite
def matrices(draw, primes=(2, 3, 5), max_rows=5, max_cols=6):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    return FieldMatrix(p, entries)


def test_field_rejects_composite_and_out_of_range():
    for bad in (0, 1, 4, 9, 65536, 70001):
        with pytest.raises(ValueError):
            PrimeField(bad)
    assert PrimeField(65521).p == 65521


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p", [2, 3, 5, 7, 65521])
def test_inverse(p):
    for c in range(1, min(p, 50)):
        assert (c * inverse_element(p, c)) % p == 1
    with pytest.raises(ZeroDivisionError):
        inverse_element(p, 0)


def test_entries_are_reduced_and_read_only():
    m = FieldMatrix(3, [[4, -1], [3, 5]])
    assert m.to_lists() == [[1, 2], [0, 2]]
    with pytest.raises(ValueError):
        m.array[0, 0] = 2


def test_column_is_one_based():
    m = FieldMatrix(2, [[1, 0, 1], [0, 1, 1]])
    assert m.column(1) == (1, 0)
    assert m.column(3) == (1, 1)
    with pytest.raises(IndexError):
        m.column(0)
    with pytest.raises(IndexError):
        column_submatrix(m, [4])


def test_rank_examples():
    assert rank(FieldMatrix(2, [[1, 1], [1, 1]])) == 1
    assert rank(FieldMatrix(3, [[1, 2], [2, 1]])) == 1  # second row is 2x first
    assert rank(FieldMatrix(5, [[1, 2], [2, 1]])) == 2
    assert rank(FieldMatrix.zeros(7, 3, 4)) == 0
    assert rank(FieldMatrix.identity(65521, 6)) == 6


def test_rank_u23_representations():
    assert rank(FieldMatrix(2, [[0, 1, 1], [1, 1, 0]])) == 2
    assert rank(FieldMatrix(3, [[1, 0, 2], [0, 1, 2], [1, 1, 1], [2, 2, 2]])) == 2


def test_solve_right_free_variables_zero():
    a = FieldMatrix(3, [[1, 1, 0], [0, 0, 1]])
    assert solve_right(a, [2, 1]) == (2, 0, 1)
    assert solve_right(a, (0, 0)) == (0, 0, 0)


def test_solve_right_inconsistent():
    a = FieldMatrix(2, [[1], [1]])
    assert solve_right(a, [1, 0]) is None
    assert not in_span(a, [0, 1])


def test_solve_right_empty_matrix():
    a = FieldMatrix.from_columns(2, [], rows=3)
    assert solve_right(a, [0, 0, 0]) == ()
    assert solve_right(a, [0, 1, 0]) is None


def test_solve_right_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        solve_right(FieldMatrix(2, [[1, 0]]), [1, 0])


def test_full_rank_row_basis_keeps_earliest():
    a = FieldMatrix(2, [[1, 0], [1, 0], [0, 1], [1, 1]])
    b = full_rank_row_basis(a)
    assert b.to_lists() == [[1, 0], [0, 1]]


def test_arithmetic():
    a = FieldMatrix(5, [[1, 2], [3, 4]])
    assert add(a, a).to_lists() == [[2, 4], [1, 3]]
    assert scale(3, a).to_lists() == [[3, 1], [4, 2]]
    assert matmul(a, FieldMatrix.identity(5, 2)) == a
    with pytest.raises(ValueError, match="field"):
        add(a, FieldMatrix(3, [[1, 2], [0, 1]]))
    with pytest.raises(ValueError, match="shape"):
        matmul(a, FieldMatrix(5, [[1, 2, 3]]))


def test_matmul_large_prime_no_overflow():
    p = 65521
    a = FieldMatrix(p, np.full((3, 40), p - 1))
    b = FieldMatrix(p, np.full((40, 2), p - 1))
    assert matmul(a, b).to_lists() == [[40 % p] * 2] * 3


def test_json_roundtrip_and_errors():
    a = FieldMatrix(3, [[1, 2, 0], [0, 1, 1]])
    assert matrix_from_json(matrix_to_json(a)) == a
    with pytest.raises(ValueError, match="entries"):
        matrix_from_json({"p": 3, "rows": 2, "cols": 2})
    with pytest.raises(ValueError, match="rows"):
        matrix_from_json({"p": 3, "rows": 3, "cols": 3, "entries": [[1, 2, 0], [0, 1, 1]]})


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_span_oracle(a):
    cols = a.columns()
    assert rank(a) == brute_rank(cols, a.p, a.rows)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_bounds_and_transpose(a):
    r = rank(a)
    assert 0 <= r <= min(a.shape)
    assert rank(a.T) == r


@settings(max_examples=150, deadline=None)
@given(matrices(max_cols=5), st.data())
def test_solve_right_agrees_with_span_oracle(a, data):
    b = data.draw(st.lists(st.integers(0, a.p - 1), min_size=a.rows, max_size=a.rows))
    x = solve_right(a, b)
    assert (x is not None) == brute_in_span(a.columns(), b, a.p)
    if x is not None:
        got = (a.array @ np.asarray(x, dtype=np.int64)) % a.p
        assert got.tolist() == [v % a.p for v in b]


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_row_basis_preserves_column_matroid(a):
    b = full_rank_row_basis(a)
    assert b.rows == rank(a)
    for mask in range(1, 1 << a.cols):
        idx = [j + 1 for j in range(a.cols) if mask >> j & 1]
        assert rank(column_submatrix(b, idx)) == rank(column_submatrix(a, idx))
