"""Independent reference computations in sympy.

Forms are evaluated as alternating multilinear maps on vectors, so these
checks share no index or sign bookkeeping with the package.
"""

from fractions import Fraction
from itertools import permutations

import sympy

X = sympy.symbols("x0:6")


def q(v):
    v = Fraction(v)
    return sympy.Rational(v.numerator, v.denominator)


def poly_expr(p, xs=X):
    return sympy.Add(*[q(c) * sympy.Mul(*[xs[i] ** a for i, a in enumerate(e)]) for e, c in p.coeffs.items()])


def perm_sign(p):
    p = list(p)
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def det(rows):
    k = len(rows)
    if k == 0:
        return sympy.Integer(1)
    return sympy.Matrix(rows).det()


def evaluate(u, vectors, xs=X):
    """``u(v_1, ..., v_k)`` as a sympy expression in the coordinates."""
    total = sympy.Integer(0)
    for J, p in u.terms.items():
        minor = det([[v[j] for v in vectors] for j in J])
        total += poly_expr(p, xs) * minor
    return sympy.expand(total)


def basis_vectors(n):
    return [[sympy.Integer(int(i == j)) for i in range(n)] for j in range(n)]


def d_eval(u, vectors):
    """``du(v_0..v_k) = sum_i (-1)^i D_{v_i} u(.., v_i omitted, ..)`` for constant fields."""
    total = sympy.Integer(0)
    for i, v in enumerate(vectors):
        rest = vectors[:i] + vectors[i + 1:]
        f = evaluate(u, rest)
        total += (-1) ** i * sum(v[j] * sympy.diff(f, X[j]) for j in range(len(v)))
    return sympy.expand(total)


def wedge_eval(u, v, vectors):
    """``(u ^ v)(w) = 1/(k! l!) sum_sigma sgn(sigma) u(w_sigma..) v(w_sigma..)``."""
    k, l = u.k, v.k
    total = sympy.Integer(0)
    for p in permutations(range(k + l)):
        w = [vectors[i] for i in p]
        total += perm_sign(p) * evaluate(u, w[:k]) * evaluate(v, w[k:])
    return sympy.expand(total / (sympy.factorial(k) * sympy.factorial(l)))


def koszul_eval(u, vectors):
    n = u.n
    return evaluate(u, [list(X[:n])] + list(vectors))


def integrate_cube(expr, n):
    for i in range(n):
        expr = sympy.integrate(expr, (X[i], 0, 1))
    return expr


def integrate_simplex(expr, n):
    for i in reversed(range(n)):
        upper = 1 - sum(X[:i])
        expr = sympy.integrate(expr, (X[i], 0, upper))
    return expr
