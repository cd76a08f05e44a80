"""Exact rational linear algebra.

Matrices are FLINT ``fmpq_mat`` objects.  Vectors are stored as *rows*
throughout the package, so a linear operator sending ambient ``A`` to ambient
``B`` is a ``dim A x dim B`` matrix and images are computed as ``rows @ op``.

A :class:`Subspace` keeps its basis in reduced row echelon form.  Because that
form is unique, two subspaces of the same ambient space are equal exactly when
their stored matrices are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import flint

Mat = flint.fmpq_mat
Scalar = flint.fmpq


class AmbientMismatch(ValueError):
    pass


class NotContained(ValueError):
    pass


def to_fmpq(x) -> Scalar:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, flint.fmpz):
        return flint.fmpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_fraction(x) -> Fraction:
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


def zeros(nrows: int, ncols: int) -> Mat:
    return Mat(nrows, ncols)


def identity(n: int) -> Mat:
    m = Mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def mat(rows: Sequence[Sequence], ncols: int | None = None) -> Mat:
    """Build a matrix from nested Python sequences of ints/Fractions/fmpq."""
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    flat = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged rows")
        flat.extend(to_fmpq(x) for x in r)
    return Mat(len(rows), ncols, flat)


def from_sparse(nrows: int, ncols: int, entries) -> Mat:
    """``entries`` is an iterable of ``(i, j, value)`` triples; repeats add up."""
    flat = [flint.fmpq(0)] * (nrows * ncols)
    for i, j, v in entries:
        flat[i * ncols + j] += to_fmpq(v)
    return Mat(nrows, ncols, flat)


def rows_of(m: Mat) -> list[list[Scalar]]:
    nc = m.ncols()
    e = m.entries()
    return [e[i * nc:(i + 1) * nc] for i in range(m.nrows())]


def take_rows(m: Mat, idx: Sequence[int]) -> Mat:
    nc = m.ncols()
    e = m.entries()
    flat = []
    for i in idx:
        flat.extend(e[i * nc:(i + 1) * nc])
    return Mat(len(idx), nc, flat)


def take_columns(m: Mat, idx: Sequence[int]) -> Mat:
    nc = m.ncols()
    e = m.entries()
    flat = []
    for i in range(m.nrows()):
        base = i * nc
        flat.extend(e[base + j] for j in idx)
    return Mat(m.nrows(), len(idx), flat)


def vstack(mats: Iterable[Mat], ncols: int) -> Mat:
    flat = []
    nrows = 0
    for m in mats:
        if m.ncols() != ncols:
            raise AmbientMismatch(f"vstack: expected {ncols} columns, got {m.ncols()}")
        flat.extend(m.entries())
        nrows += m.nrows()
    return Mat(nrows, ncols, flat)


def hstack(mats: Sequence[Mat], nrows: int) -> Mat:
    for m in mats:
        if m.nrows() != nrows:
            raise AmbientMismatch("hstack: row count mismatch")
    blocks = [rows_of(m) for m in mats]
    ncols = sum(m.ncols() for m in mats)
    flat = []
    for i in range(nrows):
        for b in blocks:
            flat.extend(b[i])
    return Mat(nrows, ncols, flat)


def block_diag(mats: Sequence[Mat]) -> Mat:
    nr = sum(m.nrows() for m in mats)
    nc = sum(m.ncols() for m in mats)
    out = Mat(nr, nc)
    r0 = c0 = 0
    for m in mats:
        e = m.entries()
        w = m.ncols()
        for i in range(m.nrows()):
            for j in range(w):
                v = e[i * w + j]
                if v:
                    out[r0 + i, c0 + j] = v
        r0 += m.nrows()
        c0 += w
    return out


def is_zero(m: Mat) -> bool:
    return all(x == 0 for x in m.entries())


def rank_and_echelon(m: Mat) -> tuple[int, Mat]:
    """Rank and reduced row echelon form (same shape as ``m``)."""
    if m.nrows() == 0 or m.ncols() == 0:
        return 0, Mat(m.nrows(), m.ncols())
    r, rank = m.rref()
    return rank, r


def rank(m: Mat) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def _pivots(echelon: Mat, rank: int) -> list[int]:
    nc = echelon.ncols()
    e = echelon.entries()
    piv = []
    j = 0
    for i in range(rank):
        base = i * nc
        while e[base + j] == 0:
            j += 1
        piv.append(j)
        j += 1
    return piv


def kernel_basis(m: Mat) -> Mat:
    """Rows spanning the right kernel of ``m``, one per free column (not canonicalized)."""
    nc = m.ncols()
    rk, ech = rank_and_echelon(m)
    if rk == 0:
        return identity(nc)
    piv = _pivots(ech, rk)
    pset = set(piv)
    free = [j for j in range(nc) if j not in pset]
    e = ech.entries()
    flat = [flint.fmpq(0)] * (len(free) * nc)
    for a, f in enumerate(free):
        base = a * nc
        flat[base + f] = flint.fmpq(1)
        for i, p in enumerate(piv):
            v = e[i * nc + f]
            if v:
                flat[base + p] = -v
    return Mat(len(free), nc, flat)


def kernel(m: Mat) -> "Subspace":
    """Right kernel ``{x : m x = 0}`` as a canonical subspace of ``Q^cols``."""
    rows = kernel_basis(m)
    if rows.nrows() == m.ncols():
        return Subspace.full(m.ncols())
    return Subspace.span(rows, m.ncols())


def left_kernel_basis(m: Mat) -> Mat:
    return kernel_basis(m.transpose())


def left_kernel(m: Mat) -> "Subspace":
    """``{y : y m = 0}``: coefficient vectors of row dependencies."""
    return kernel(m.transpose())


def solve(m: Mat, rhs: Mat) -> tuple[Mat, "Subspace"] | None:
    """Solve ``m x = rhs`` for a single right-hand-side column.

    Returns ``(particular, kernel)`` with ``particular`` a column vector, or
    ``None`` when the system is inconsistent.
    """
    nr, nc = m.nrows(), m.ncols()
    if rhs.nrows() != nr or rhs.ncols() != 1:
        raise ValueError("rhs must be a column with as many rows as m")
    aug = hstack([m, -rhs], nr)
    ker = kernel(aug)
    rows = rows_of(ker.rows)
    for r in rows:
        if r[nc] != 0:
            x = [v / r[nc] for v in r[:nc]]
            return Mat(nc, 1, x), kernel(m)
    return None


class Subspace:
    """A linear subspace of ``Q^n`` stored by its canonical echelon basis."""

    __slots__ = ("ambient_dim", "rows", "_pivots", "_key")

    def __init__(self, rows: Mat, ambient_dim: int, *, _canonical: bool = False):
        if rows.ncols() != ambient_dim:
            raise AmbientMismatch("basis rows do not match ambient dimension")
        self.ambient_dim = ambient_dim
        self._pivots = None
        self._key = None
        if _canonical:
            self.rows = rows
        else:
            rk, ech = rank_and_echelon(rows)
            self.rows = take_rows(ech, range(rk)) if rk < rows.nrows() else ech

    @classmethod
    def span(cls, vectors: Mat, ambient_dim: int | None = None) -> "Subspace":
        if ambient_dim is None:
            ambient_dim = vectors.ncols()
        return cls(vectors, ambient_dim)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(Mat(0, n), n, _canonical=True)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(identity(n), n, _canonical=True)

    @property
    def dim(self) -> int:
        return self.rows.nrows()

    @property
    def basis(self) -> Mat:
        """Basis vectors as columns (reduced column echelon form)."""
        return self.rows.transpose()

    @property
    def pivots(self) -> list[int]:
        if self._pivots is None:
            self._pivots = _pivots(self.rows, self.dim)
        return self._pivots

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.ambient_dim, self.dim, tuple(self.rows.entries()))
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.dim == other.dim and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatch(f"ambient {self.ambient_dim} != {other.ambient_dim}")

    def coordinates(self, vectors: Mat) -> Mat:
        """Coordinates of row vectors assumed to lie in this subspace."""
        return take_columns(vectors, self.pivots)

    def residual(self, vectors: Mat) -> Mat:
        if self.dim == 0:
            return vectors
        return vectors - self.coordinates(vectors) * self.rows

    def contains(self, item) -> bool:
        """Membership of a Subspace, a row-vector matrix, or a flat sequence."""
        if isinstance(item, Subspace):
            self._check(item)
            if item.dim > self.dim:
                return False
            return is_zero(self.residual(item.rows))
        if not isinstance(item, Mat):
            item = mat([list(item)])
        if item.ncols() != self.ambient_dim:
            raise AmbientMismatch("vector length does not match ambient dimension")
        return is_zero(self.residual(item))

    __contains__ = contains

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.dim == 0:
            return self
        if self.dim == 0:
            return other
        return Subspace(vstack([self.rows, other.rows], self.ambient_dim), self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        stacked = vstack([self.rows, -other.rows], self.ambient_dim)
        deps = left_kernel(stacked)
        if deps.dim == 0:
            return Subspace.zero(self.ambient_dim)
        alpha = take_columns(deps.rows, range(self.dim))
        return Subspace(alpha * self.rows, self.ambient_dim)

    def quotient_dim(self, sub: "Subspace") -> int:
        self._check(sub)
        if not self.contains(sub):
            raise NotContained("quotient_dim requires the second space to be contained in the first")
        return self.dim - sub.dim

    def image(self, op: Mat) -> "Subspace":
        """Span of ``rows @ op``."""
        if op.nrows() != self.ambient_dim:
            raise AmbientMismatch("operator domain does not match ambient dimension")
        if self.dim == 0:
            return Subspace.zero(op.ncols())
        return Subspace(self.rows * op, op.ncols())

    def annihilator(self) -> Mat:
        """Rows ``w`` with ``w . v = 0`` for every ``v`` in the subspace."""
        if self.dim == 0:
            return identity(self.ambient_dim)
        return kernel(self.rows).rows

    def orthogonal_constraints(self, gram: Mat | None) -> Mat:
        """Rows ``c`` such that ``c . x = 0`` iff ``x`` is orthogonal to this space."""
        if gram is None:
            return self.rows
        return self.rows * gram


def span_calc(a: Subspace, b: Subspace, op: str, vector=None):
    """Dispatch helper: ``sum``, ``intersect``, ``quotient_dim`` or ``contains``."""
    a._check(b)
    if op == "sum":
        return a + b
    if op == "intersect":
        return a & b
    if op == "quotient_dim":
        return a.quotient_dim(b)
    if op == "contains":
        return a.contains(b if vector is None else vector)
    raise ValueError(f"unknown span operation {op!r}")


def is_positive_definite(gram: Mat) -> bool:
    """Symmetric and all elimination pivots positive (no row exchanges)."""
    n = gram.nrows()
    if gram.ncols() != n or gram != gram.transpose():
        return False
    a = [list(r) for r in rows_of(gram)]
    for i in range(n):
        p = a[i][i]
        if p <= 0:
            return False
        for r in range(i + 1, n):
            f = a[r][i] / p
            if f:
                row_i = a[i]
                row_r = a[r]
                for c in range(i, n):
                    row_r[c] -= f * row_i[c]
    return True
