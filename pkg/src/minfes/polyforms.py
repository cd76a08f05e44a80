"""Polynomial differential forms on R^n with exact rational coefficients.

A k-form is stored as ``{J: Polynomial}`` where ``J`` is a strictly increasing
tuple of 0-based coordinate indices, ``dx_J = dx_{j1} ^ ... ^ dx_{jk}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Iterator, Mapping

Exponent = tuple[int, ...]
Index = tuple[int, ...]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def merge_sign(a: Index, b: Index) -> int:
    """Sign turning ``dx_a ^ dx_b`` into ``dx_{sorted(a+b)}``; 0 if they overlap."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for i in a for j in b if i > j)
    return -1 if inversions % 2 else 1


def complement(J: Index, n: int) -> Index:
    s = set(J)
    return tuple(i for i in range(n) if i not in s)


class Polynomial:
    """Sparse multivariate polynomial ``{exponent tuple: Fraction}``."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[Exponent, object] | None = None):
        self.n = n
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                if len(e) != n:
                    raise ValueError(f"exponent {e} has wrong length for n={n}")
                v = _frac(v)
                if v:
                    c[tuple(e)] = v
        self.coeffs = c

    @classmethod
    def constant(cls, n: int, value=1) -> "Polynomial":
        return cls(n, {(0,) * n: value})

    @classmethod
    def monomial(cls, exps: Exponent, coeff=1) -> "Polynomial":
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def coordinate(cls, n: int, i: int) -> "Polynomial":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def univariate(cls, n: int, i: int, coeffs) -> "Polynomial":
        """``sum_p coeffs[p] * x_i**p`` as an n-variable polynomial."""
        out = {}
        for p, c in enumerate(coeffs):
            e = [0] * n
            e[i] = p
            out[tuple(e)] = c
        return cls(n, out)

    def _new(self, coeffs: dict) -> "Polynomial":
        p = Polynomial.__new__(Polynomial)
        p.n = self.n
        p.coeffs = {e: v for e, v in coeffs.items() if v}
        return p

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=-1)

    def max_degrees(self) -> tuple[int, ...]:
        if not self.coeffs:
            return (-1,) * self.n
        return tuple(max(e[i] for e in self.coeffs) for i in range(self.n))

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, v in sorted(self.coeffs.items(), key=lambda t: (-sum(t[0]), t[0])):
            mono = "*".join(f"x{i}^{p}" if p > 1 else f"x{i}" for i, p in enumerate(e) if p)
            parts.append(f"{v}" if not mono else (mono if v == 1 else f"{v}*{mono}"))
        return " + ".join(parts)

    def __add__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.n, other)
        c = dict(self.coeffs)
        for e, v in other.coeffs.items():
            c[e] = c.get(e, 0) + v
        return self._new(c)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return self._new({e: -v for e, v in self.coeffs.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = _frac(other)
            return self._new({e: v * other for e, v in self.coeffs.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        c: dict = {}
        for e1, v1 in self.coeffs.items():
            for e2, v2 in other.coeffs.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c[e] = c.get(e, 0) + v1 * v2
        return self._new(c)

    __rmul__ = __mul__

    def __pow__(self, p: int) -> "Polynomial":
        out = Polynomial.constant(self.n)
        for _ in range(p):
            out = out * self
        return out

    def diff(self, i: int) -> "Polynomial":
        c = {}
        for e, v in self.coeffs.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                c[tuple(f)] = v * e[i]
        return self._new(c)

    def homogeneous_parts(self) -> dict[int, "Polynomial"]:
        parts: dict[int, dict] = {}
        for e, v in self.coeffs.items():
            parts.setdefault(sum(e), {})[e] = v
        return {s: self._new(c) for s, c in parts.items()}

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for e, v in self.coeffs.items():
            term = v
            for x, p in zip(point, e):
                if p:
                    term *= _frac(x) ** p
            total += term
        return total

    def compose_affine(self, amap: "AffineMap") -> "Polynomial":
        """``p(M t + b)`` as a polynomial in the ``amap.source_dim`` variables t."""
        if amap.target_dim != self.n:
            raise ValueError("affine map target does not match polynomial variables")
        m = amap.source_dim
        lin = []
        for i in range(self.n):
            c = {}
            for j in range(m):
                e = [0] * m
                e[j] = 1
                c[tuple(e)] = amap.matrix[i][j]
            c[(0,) * m] = c.get((0,) * m, 0) + amap.offset[i]
            lin.append(Polynomial(m, c))
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, p: int) -> Polynomial:
            key = (i, p)
            if key not in powers:
                powers[key] = Polynomial.constant(m) if p == 0 else power(i, p - 1) * lin[i]
            return powers[key]

        out: dict = {}
        for e, v in self.coeffs.items():
            term = Polynomial.constant(m, v)
            for i, p in enumerate(e):
                if p:
                    term = term * power(i, p)
            for f, w in term.coeffs.items():
                out[f] = out.get(f, 0) + w
        return Polynomial(m, out)

    def integrate(self, shape: str) -> Fraction:
        """Exact integral over the reference cube ``[0,1]^n`` or unit simplex."""
        total = Fraction(0)
        for e, v in self.coeffs.items():
            total += v * monomial_integral(e, shape)
        return total


def monomial_integral(e: Exponent, shape: str) -> Fraction:
    if shape == "cube":
        out = Fraction(1)
        for a in e:
            out /= a + 1
        return out
    if shape == "simplex":
        num = 1
        for a in e:
            num *= factorial(a)
        return Fraction(num, factorial(len(e) + sum(e)))
    raise ValueError(f"unknown cell shape {shape!r}")


@dataclass(frozen=True)
class AffineMap:
    """``t -> matrix @ t + offset`` from R^source_dim to R^target_dim."""

    matrix: tuple[tuple[Fraction, ...], ...]
    offset: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(_frac(x) for x in row) for row in self.matrix))
        object.__setattr__(self, "offset", tuple(_frac(x) for x in self.offset))
        if len(self.matrix) != len(self.offset):
            raise ValueError("matrix rows and offset length differ")
        widths = {len(r) for r in self.matrix}
        if len(widths) > 1:
            raise ValueError("ragged affine matrix")

    @property
    def target_dim(self) -> int:
        return len(self.offset)

    @property
    def source_dim(self) -> int:
        return len(self.matrix[0]) if self.matrix else self._src

    @classmethod
    def make(cls, matrix, offset, source_dim: int) -> "AffineMap":
        a = cls(tuple(tuple(r) for r in matrix), tuple(offset))
        object.__setattr__(a, "_src", source_dim)
        return a

    @classmethod
    def identity(cls, n: int) -> "AffineMap":
        return cls.make([[1 if i == j else 0 for j in range(n)] for i in range(n)], [0] * n, n)

    def __call__(self, t) -> tuple[Fraction, ...]:
        return tuple(
            sum((a * _frac(x) for a, x in zip(row, t)), Fraction(0)) + b
            for row, b in zip(self.matrix, self.offset)
        )

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``."""
        if inner.target_dim != self.source_dim:
            raise ValueError("cannot compose: dimension mismatch")
        m = inner.source_dim
        mat = [
            [sum((self.matrix[i][k] * inner.matrix[k][j] for k in range(self.source_dim)), Fraction(0)) for j in range(m)]
            for i in range(self.target_dim)
        ]
        off = [
            sum((self.matrix[i][k] * inner.offset[k] for k in range(self.source_dim)), Fraction(0)) + self.offset[i]
            for i in range(self.target_dim)
        ]
        return AffineMap.make(mat, off, m)

    def minor(self, rows: Index, cols: Index) -> Fraction:
        return _det([[self.matrix[i][j] for j in cols] for i in rows])


def _det(a: list[list[Fraction]]) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    a = [list(r) for r in a]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


class PolyForm:
    """A differential k-form on R^n with polynomial coefficients."""

    __slots__ = ("n", "k", "terms")

    def __init__(self, n: int, k: int, terms: Mapping[Index, Polynomial] | None = None):
        if not 0 <= k <= n:
            raise ValueError(f"form degree {k} out of range for n={n}")
        self.n = n
        self.k = k
        t: dict[Index, Polynomial] = {}
        for J, p in (terms or {}).items():
            J = tuple(J)
            if len(J) != k:
                raise ValueError(f"index set {J} does not have length {k}")
            if p.n != n:
                raise ValueError("coefficient polynomial has wrong number of variables")
            if len(set(J)) != k:
                continue
            sign = _sort_sign(J)
            J = tuple(sorted(J))
            q = p if sign == 1 else -p
            if J in t:
                q = t[J] + q
            if q.is_zero():
                t.pop(J, None)
            else:
                t[J] = q
        self.terms = t

    @classmethod
    def zero(cls, n: int, k: int) -> "PolyForm":
        return cls(n, k, {})

    @classmethod
    def scalar(cls, p: Polynomial) -> "PolyForm":
        return cls(p.n, 0, {(): p})

    @classmethod
    def basis_form(cls, n: int, J: Index, coeff: Polynomial | None = None) -> "PolyForm":
        if coeff is None:
            coeff = Polynomial.constant(n)
        return cls(n, len(J), {tuple(J): coeff})

    @classmethod
    def monomial(cls, n: int, J: Index, exps: Exponent, coeff=1) -> "PolyForm":
        return cls(n, len(J), {tuple(J): Polynomial(n, {tuple(exps): coeff})})

    def _raw(self, k: int, terms: dict) -> "PolyForm":
        f = PolyForm.__new__(PolyForm)
        f.n = self.n
        f.k = k
        f.terms = {J: p for J, p in terms.items() if not p.is_zero()}
        return f

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((p.degree() for p in self.terms.values()), default=-1)

    def items(self) -> Iterator[tuple[Index, Exponent, Fraction]]:
        for J, p in self.terms.items():
            for e, v in p.coeffs.items():
                yield J, e, v

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        return self.n == other.n and self.k == other.k and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.k, frozenset((J, hash(p)) for J, p in self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"0 ({self.k}-form on R^{self.n})"
        parts = []
        for J in sorted(self.terms):
            dx = "^".join(f"dx{j}" for j in J)
            parts.append(f"({self.terms[J]}){' ' + dx if dx else ''}")
        return " + ".join(parts)

    def _check(self, other: "PolyForm") -> None:
        if self.n != other.n or self.k != other.k:
            raise ValueError("forms live in different spaces")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        t = dict(self.terms)
        for J, p in other.terms.items():
            t[J] = t[J] + p if J in t else p
        return self._raw(self.k, t)

    def __neg__(self) -> "PolyForm":
        return self._raw(self.k, {J: -p for J, p in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def __mul__(self, other) -> "PolyForm":
        """Multiplication by a scalar or by a polynomial (0-form coefficient)."""
        if isinstance(other, (int, Fraction, Polynomial)):
            return self._raw(self.k, {J: p * other for J, p in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def homogeneous_parts(self) -> dict[int, "PolyForm"]:
        out: dict[int, dict] = {}
        for J, p in self.terms.items():
            for s, q in p.homogeneous_parts().items():
                out.setdefault(s, {})[J] = q
        return {s: self._raw(self.k, t) for s, t in out.items()}

    def d(self) -> "PolyForm":
        return exterior_derivative(self)

    def wedge(self, other: "PolyForm") -> "PolyForm":
        return wedge(self, other)


def _sort_sign(J) -> int:
    J = list(J)
    inv = sum(1 for a in range(len(J)) for b in range(a + 1, len(J)) if J[a] > J[b])
    return -1 if inv % 2 else 1


def exterior_derivative(u: PolyForm) -> PolyForm:
    if u.k == u.n:
        return PolyForm.zero(u.n, u.k)
    out: dict[Index, Polynomial] = {}
    for J, p in u.terms.items():
        for i in range(u.n):
            if i in J:
                continue
            dp = p.diff(i)
            if dp.is_zero():
                continue
            before = sum(1 for j in J if j < i)
            K = tuple(sorted(J + (i,)))
            term = dp if before % 2 == 0 else -dp
            out[K] = out[K] + term if K in out else term
    return u._raw(u.k + 1, out)


def koszul(u: PolyForm) -> PolyForm:
    """Contraction with the radial field ``x -> x``."""
    if u.k == 0:
        raise ValueError("the Koszul operator is not defined on 0-forms")
    out: dict[Index, Polynomial] = {}
    for J, p in u.terms.items():
        for pos, j in enumerate(J):
            K = J[:pos] + J[pos + 1:]
            term = p * Polynomial.coordinate(u.n, j)
            if pos % 2:
                term = -term
            out[K] = out[K] + term if K in out else term
    return u._raw(u.k - 1, out)


def homotopy(u: PolyForm) -> PolyForm:
    """Poincare homotopy with base point 0: ``sum_s kappa(u_s) / (s + k)``."""
    if u.k == 0:
        raise ValueError("the homotopy operator is not defined on 0-forms")
    out = PolyForm.zero(u.n, u.k - 1)
    for s, part in u.homogeneous_parts().items():
        out = out + koszul(part) * Fraction(1, s + u.k)
    return out


def wedge(u: PolyForm, v: PolyForm) -> PolyForm:
    if u.n != v.n:
        raise ValueError("wedge of forms on different spaces")
    if u.k + v.k > u.n:
        raise ValueError(f"wedge degree {u.k + v.k} exceeds dimension {u.n}")
    out: dict[Index, Polynomial] = {}
    for J, p in u.terms.items():
        for K, q in v.terms.items():
            s = merge_sign(J, K)
            if not s:
                continue
            L = tuple(sorted(J + K))
            term = p * q if s > 0 else -(p * q)
            out[L] = out[L] + term if L in out else term
    return u._raw(u.k + v.k, out)


def hodge_star(u: PolyForm) -> PolyForm:
    """Euclidean Hodge star: ``dx_J -> sign(J, J') dx_J'``, so ``dx_J ^ *dx_J = vol``."""
    out = {}
    for J, p in u.terms.items():
        Jc = complement(J, u.n)
        out[Jc] = p if merge_sign(J, Jc) > 0 else -p
    return u._raw(u.n - u.k, out)


def codifferential(u: PolyForm) -> PolyForm:
    """``delta = (-1)^(n(k+1)+1) * d * `` on k-forms; zero on 0-forms.

    With this sign ``delta`` is the formal L2 adjoint of ``d``.
    """
    if u.k == 0:
        return PolyForm.zero(u.n, 0)
    v = hodge_star(exterior_derivative(hodge_star(u)))
    sign = -1 if (u.n * (u.k + 1) + 1) % 2 else 1
    return v if sign > 0 else -v


def hodge_and_codifferential(u: PolyForm, which: str) -> PolyForm:
    if which == "star":
        return hodge_star(u)
    if which == "delta":
        return codifferential(u)
    raise ValueError(f"expected 'star' or 'delta', got {which!r}")


def pointwise_inner(u: PolyForm, v: PolyForm) -> Polynomial:
    """``<u, v>`` with the Euclidean metric (the dx_J are orthonormal)."""
    if u.n != v.n or u.k != v.k:
        raise ValueError("inner product of forms of different type")
    out = Polynomial(u.n)
    for J, p in u.terms.items():
        q = v.terms.get(J)
        if q is not None:
            out = out + p * q
    return out


def integrate(u: PolyForm, shape: str) -> Fraction:
    """Integral of a top-degree form over the reference cell of its dimension."""
    if u.k != u.n:
        raise ValueError(f"can only integrate {u.n}-forms over an {u.n}-cell, got a {u.k}-form")
    p = u.terms.get(tuple(range(u.n)))
    return Fraction(0) if p is None else p.integrate(shape)


def pullback_affine(amap: AffineMap, u: PolyForm) -> PolyForm:
    """Pullback along ``amap : R^m -> R^n``."""
    if amap.target_dim != u.n:
        raise ValueError(f"map target R^{amap.target_dim} does not match form on R^{u.n}")
    m = amap.source_dim
    if u.k > m:
        raise ValueError(f"a {u.k}-form has no nonzero pullback to R^{m}; there is no {u.k}-form space there")
    out: dict[Index, Polynomial] = {}
    targets = list(combinations(range(m), u.k))
    for J, p in u.terms.items():
        q = p.compose_affine(amap)
        for K in targets:
            c = amap.minor(J, K)
            if c:
                term = q * c
                out[K] = out[K] + term if K in out else term
    f = PolyForm.__new__(PolyForm)
    f.n, f.k = m, u.k
    f.terms = {K: p for K, p in out.items() if not p.is_zero()}
    return f


def random_polyform(rng, n: int, k: int, degree: int, *, homogeneous: bool = False, density: float = 0.5,
                    max_coeff: int = 5) -> PolyForm:
    """Random form with integer coefficients in [-max_coeff, max_coeff]."""
    terms = {}
    for J in combinations(range(n), k):
        c = {}
        for e in monomials(n, degree, homogeneous=homogeneous):
            if rng.random() < density:
                v = rng.randint(-max_coeff, max_coeff)
                if v:
                    c[e] = v
        if c:
            terms[J] = Polynomial(n, c)
    return PolyForm(n, k, terms)


def monomials(n: int, degree: int, *, homogeneous: bool = False) -> list[Exponent]:
    """Exponents of total degree <= degree (== degree if homogeneous), graded-lex order."""
    out = []
    degs = [degree] if homogeneous else range(degree + 1)
    for s in degs:
        out.extend(_compositions(n, s))
    return out


def _compositions(n: int, s: int) -> list[Exponent]:
    if n == 0:
        return [()] if s == 0 else []
    out = []
    for first in range(s, -1, -1):
        for rest in _compositions(n - 1, s - first):
            out.append((first,) + rest)
    return out
