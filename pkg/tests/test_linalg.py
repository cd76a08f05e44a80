from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from minfes import linalg as la
from minfes.linalg import AmbientMismatch, NotContained, Subspace


def rationals():
    return st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    # low-rank products keep kernels interesting
    k = draw(st.integers(0, min(r, c)))
    a = [[draw(rationals()) for _ in range(k)] for _ in range(r)]
    b = [[draw(rationals()) for _ in range(c)] for _ in range(k)]
    rows = [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(c)] for i in range(r)]
    if draw(st.booleans()) and r:
        rows[0] = [draw(rationals()) for _ in range(c)]
    return rows


def sym(rows, ncols):
    return sympy.Matrix(len(rows), ncols, [sympy.Rational(x.numerator, x.denominator) for r in rows for x in r])


def test_rank_examples():
    assert la.rank_and_echelon(la.identity(2))[0] == 2
    assert la.rank_and_echelon(la.zeros(3, 4))[0] == 0
    rk, ech = la.rank_and_echelon(la.mat([[1, 2], [2, 4]]))
    assert rk == 1
    assert la.rows_of(ech)[0] == [1, 2]


def test_kernel_examples():
    assert la.kernel(la.identity(2)).dim == 0
    assert la.kernel(la.zeros(2, 3)).dim == 3
    k = la.kernel(la.mat([[1, 1, 0]]))
    assert k.dim == 2
    assert k.contains([1, -1, 0])


def test_span_examples():
    x = Subspace.span(la.mat([[1, 0]]))
    y = Subspace.span(la.mat([[0, 1]]))
    assert la.span_calc(x, y, "sum").dim == 2
    assert la.span_calc(x, x, "intersect") == x
    plane = Subspace.full(2)
    assert la.span_calc(plane, x, "quotient_dim") == 1
    with pytest.raises(NotContained):
        x.quotient_dim(y)
    with pytest.raises(AmbientMismatch):
        x + Subspace.full(3)


@given(matrices())
def test_rank_matches_sympy(rows):
    m = la.mat(rows, len(rows[0]) if rows else 1)
    assert la.rank(m) == sym(rows, m.ncols()).rank()


@given(matrices())
def test_echelon_matches_sympy(rows):
    m = la.mat(rows, len(rows[0]) if rows else 1)
    rk, ech = la.rank_and_echelon(m)
    ref, piv = sym(rows, m.ncols()).rref()
    assert rk == len(piv)
    for i in range(rk):
        assert [sympy.Rational(int(v.p), int(v.q)) for v in la.rows_of(ech)[i]] == list(ref.row(i))


@given(matrices())
def test_kernel_dim_and_annihilation(rows):
    m = la.mat(rows, len(rows[0]) if rows else 1)
    k = la.kernel(m)
    assert k.dim == len(sym(rows, m.ncols()).nullspace())
    if k.dim and m.nrows():
        assert la.is_zero(m * k.rows.transpose())
    left = la.left_kernel_basis(m)
    assert left.nrows() == m.nrows() - la.rank(m)
    if left.nrows():
        assert la.is_zero(left * m)


@given(matrices(max_cols=5), matrices(max_cols=5))
def test_sum_and_intersection_dimensions(a, b):
    n = 5
    a = [r + [Fraction(0)] * (n - len(r)) for r in a]
    b = [r + [Fraction(0)] * (n - len(r)) for r in b]
    U = Subspace.span(la.mat(a, n), n)
    V = Subspace.span(la.mat(b, n), n)
    S, I = U + V, U & V
    assert S.dim + I.dim == U.dim + V.dim
    assert S.contains(U) and S.contains(V)
    assert U.contains(I) and V.contains(I)


@given(matrices())
def test_subspace_is_canonical(rows):
    if not rows:
        return
    m = la.mat(rows, len(rows[0]))
    U = Subspace.span(m)
    shuffled = Subspace.span(la.mat(list(reversed(rows)) + [[2 * x for x in rows[0]]], m.ncols()))
    assert U == shuffled
    assert U.key() == shuffled.key()


def test_solve():
    m = la.mat([[1, 1], [1, -1]])
    col, ker = la.solve(m, la.mat([[3], [1]]))
    assert la.rows_of(col.transpose())[0] == [2, 1]
    assert ker.dim == 0
    assert la.solve(la.mat([[1, 1], [2, 2]]), la.mat([[1], [3]])) is None


def test_positive_definite():
    assert la.is_positive_definite(la.mat([[2, 1], [1, 2]]))
    assert not la.is_positive_definite(la.mat([[1, 2], [2, 1]]))
