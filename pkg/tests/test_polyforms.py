from fractions import Fraction
from itertools import combinations
from random import Random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from minfes.polyforms import (
    AffineMap,
    PolyForm,
    Polynomial,
    codifferential,
    exterior_derivative,
    hodge_and_codifferential,
    hodge_star,
    homotopy,
    integrate,
    koszul,
    pointwise_inner,
    pullback_affine,
    random_polyform,
    wedge,
)

from oracles import X, basis_vectors, d_eval, evaluate, integrate_cube, integrate_simplex, koszul_eval, poly_expr, wedge_eval


def x(n, i):
    return Polynomial.coordinate(n, i)


def one(n):
    return Polynomial.constant(n)


def form(n, J, p):
    return PolyForm(n, len(J), {J: p})


@st.composite
def forms(draw, n=None, k=None, max_degree=5, homogeneous=False):
    n = draw(st.integers(1, 4)) if n is None else n
    k = draw(st.integers(0, n)) if k is None else k
    deg = draw(st.integers(0, max_degree))
    seed = draw(st.integers(0, 2**32))
    return random_polyform(Random(seed), n, k, deg, homogeneous=homogeneous, density=0.3)


# ---- worked examples


def test_d_examples():
    assert exterior_derivative(form(2, (1,), x(2, 0))) == form(2, (0, 1), one(2))
    assert exterior_derivative(PolyForm.scalar(Polynomial.constant(2, 7))).is_zero()
    u = PolyForm.scalar(Polynomial.monomial((2, 1)))
    expected = PolyForm(2, 1, {(0,): Polynomial.monomial((1, 1), 2), (1,): Polynomial.monomial((2, 0))})
    assert exterior_derivative(u) == expected


def test_koszul_examples():
    assert koszul(form(2, (0, 1), one(2))) == PolyForm(2, 1, {(1,): x(2, 0), (0,): -x(2, 1)})
    assert koszul(form(1, (0,), one(1))) == PolyForm.scalar(x(1, 0))


def test_homotopy_examples():
    assert homotopy(form(1, (0,), one(1))) == PolyForm.scalar(x(1, 0))
    half = Fraction(1, 2)
    assert homotopy(form(2, (0, 1), one(2))) == PolyForm(2, 1, {(1,): x(2, 0) * half, (0,): x(2, 1) * -half})
    u = form(2, (1,), x(2, 0))
    assert exterior_derivative(homotopy(u)) + homotopy(exterior_derivative(u)) == u


def test_wedge_examples():
    dx, dy = form(2, (0,), one(2)), form(2, (1,), one(2))
    assert wedge(dx, dy) == form(2, (0, 1), one(2))
    assert wedge(dy, dx) == form(2, (0, 1), -one(2))
    assert wedge(dx * x(2, 0), dy * x(2, 1)) == form(2, (0, 1), x(2, 0) * x(2, 1))


def test_star_and_delta_examples():
    assert hodge_star(PolyForm.scalar(one(2))) == form(2, (0, 1), one(2))
    assert codifferential(form(1, (0,), x(1, 0))) == PolyForm.scalar(Polynomial.constant(1, -1))
    assert codifferential(form(3, (1,), one(3))).is_zero()
    with pytest.raises(ValueError):
        hodge_and_codifferential(form(1, (0,), one(1)), "laplace")


def test_integrate_examples():
    assert integrate(form(2, (0, 1), one(2)), "cube") == 1
    assert integrate(form(1, (0,), x(1, 0)), "cube") == Fraction(1, 2)
    assert integrate(form(2, (0, 1), x(2, 0) * x(2, 1)), "simplex") == Fraction(1, 24)
    with pytest.raises(ValueError):
        integrate(form(2, (0,), one(2)), "cube")


def test_pullback_examples():
    u = form(2, (1,), x(2, 0))
    bottom = AffineMap.make([[1], [0]], [0, 0], 1)
    right = AffineMap.make([[0], [1]], [1, 0], 1)
    assert pullback_affine(bottom, u).is_zero()
    assert pullback_affine(right, u) == form(1, (0,), one(1))
    w = PolyForm.scalar(Polynomial.monomial((2, 1)))
    assert pullback_affine(right, exterior_derivative(w)) == exterior_derivative(pullback_affine(right, w))


def test_pullback_rejects_high_degree():
    with pytest.raises(ValueError):
        pullback_affine(AffineMap.make([[1], [0]], [0, 0], 1), form(2, (0, 1), one(2)))


# ---- against the sympy oracle


@given(forms(max_degree=3))
def test_d_matches_oracle(u):
    if u.k == u.n:
        assert exterior_derivative(u).is_zero()
        return
    du = exterior_derivative(u)
    for J in combinations(range(u.n), u.k + 1):
        vs = [basis_vectors(u.n)[j] for j in J]
        assert evaluate(du, vs) == d_eval(u, vs)


@given(st.data())
def test_wedge_matches_oracle(data):
    n = data.draw(st.integers(1, 3))
    u = data.draw(forms(n=n, max_degree=2))
    v = data.draw(forms(n=n, k=data.draw(st.integers(0, n - u.k)), max_degree=2))
    w = wedge(u, v)
    for J in combinations(range(n), u.k + v.k):
        vs = [basis_vectors(n)[j] for j in J]
        assert evaluate(w, vs) == wedge_eval(u, v, vs)


@given(forms(max_degree=3))
def test_koszul_matches_oracle(u):
    if u.k == 0:
        with pytest.raises(ValueError):
            koszul(u)
        return
    ku = koszul(u)
    for J in combinations(range(u.n), u.k - 1):
        vs = [basis_vectors(u.n)[j] for j in J]
        assert evaluate(ku, vs) == koszul_eval(u, vs)


@given(forms(max_degree=4), st.sampled_from(["cube", "simplex"]))
def test_integral_matches_oracle(u, shape):
    top = PolyForm(u.n, u.n, {tuple(range(u.n)): p for p in u.terms.values()}) if u.terms else PolyForm.zero(u.n, u.n)
    coeff = top.terms.get(tuple(range(u.n)))
    expr = poly_expr(coeff) if coeff is not None else sympy.Integer(0)
    ref = integrate_cube(expr, u.n) if shape == "cube" else integrate_simplex(expr, u.n)
    got = integrate(top, shape)
    assert sympy.Rational(got.numerator, got.denominator) == ref


@given(st.data())
def test_pullback_matches_oracle(data):
    n = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(1, n))
    u = data.draw(forms(n=n, k=data.draw(st.integers(0, m)), max_degree=2))
    ints = st.integers(-2, 2)
    A = [[data.draw(ints) for _ in range(m)] for _ in range(n)]
    b = [data.draw(ints) for _ in range(n)]
    F = AffineMap.make(A, b, m)
    pu = pullback_affine(F, u)
    T = sympy.symbols(f"t0:{m}")
    image = [sum(A[i][j] * T[j] for j in range(m)) + b[i] for i in range(n)]
    for J in combinations(range(m), u.k):
        cols = [[A[i][j] for i in range(n)] for j in J]
        lhs = evaluate(pu, [basis_vectors(m)[j] for j in J], T)
        rhs = evaluate(u, cols).subs({X[i]: image[i] for i in range(n)}, simultaneous=True)
        assert sympy.expand(lhs - rhs) == 0


@given(forms(max_degree=3))
def test_star_defining_property(u):
    # u ^ *u = |u|^2 vol
    vol = tuple(range(u.n))
    lhs = wedge(u, hodge_star(u))
    rhs = pointwise_inner(u, u)
    assert lhs.terms.get(vol, Polynomial(u.n)) == rhs


def test_codifferential_adjoint():
    rng = Random(3)
    for n in (1, 2, 3):
        bubble = Polynomial.constant(n)
        for i in range(n):
            bubble = bubble * Polynomial.univariate(n, i, [0, 1, -1])
        for k in range(1, n + 1):
            for _ in range(3):
                u = random_polyform(rng, n, k - 1, 2) * bubble
                v = random_polyform(rng, n, k, 2)
                lhs = pointwise_inner(exterior_derivative(u), v).integrate("cube")
                rhs = pointwise_inner(u, codifferential(v)).integrate("cube")
                assert lhs == rhs


# ---- operator identities


@given(forms())
def test_dd_zero(u):
    assert exterior_derivative(exterior_derivative(u)).is_zero()


@given(forms())
def test_koszul_squared_zero(u):
    if u.k >= 2:
        assert koszul(koszul(u)).is_zero()


@given(forms(homogeneous=True))
def test_homogeneity(u):
    s = max((sum(e) for _, e, _ in u.items()), default=0)
    du = exterior_derivative(u) if u.k < u.n else None
    kdu = koszul(du) if du is not None else PolyForm.zero(u.n, u.k)
    if u.k == 0:
        # only the k d half exists on functions
        assert kdu == u * s
        return
    assert exterior_derivative(koszul(u)) + kdu == u * (s + u.k)


@given(forms())
def test_homotopy_formula(u):
    if u.k == 0:
        with pytest.raises(ValueError):
            homotopy(u)
        return
    hdu = homotopy(exterior_derivative(u)) if u.k < u.n else PolyForm.zero(u.n, u.k)
    assert exterior_derivative(homotopy(u)) + hdu == u


@given(forms())
def test_star_star(u):
    assert hodge_star(hodge_star(u)) == u * (-1) ** (u.k * (u.n - u.k))
