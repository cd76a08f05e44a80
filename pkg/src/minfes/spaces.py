"""Coordinatized spaces of polynomial forms.

Every form space lives in a :class:`FormBasis`: the monomial forms
``x^a dx_J`` of one form degree, ordered by ``J`` (lexicographic) and then by
``a`` (graded, then reverse-lexicographic).  Two kinds of degree bound exist:

* ``total``: ``|a| <= degree`` (natural on simplices),
* ``box``:   ``max a_i <= degree`` (natural on cubes; it contains ``total``).

Linear operators (d, kappa, traces, ...) are assembled once per basis and
cached, so spaces are transformed by exact matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from . import linalg as la
from .cells import Face, RefCell
from .linalg import Mat, Subspace
from .polyforms import (
    AffineMap,
    PolyForm,
    Polynomial,
    codifferential,
    exterior_derivative,
    hodge_star,
    koszul,
    merge_sign,
    monomial_integral,
    monomials,
    pullback_affine,
)

FAMILIES = ("Pr", "PrMinus", "Qr", "HomogeneousHt")


class BasisOverflow(ValueError):
    """A form has a monomial outside the requested basis."""


def _box_exponents(n: int, r: int) -> list[tuple[int, ...]]:
    exps = [e for e in product(range(r + 1), repeat=n)]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return exps


@dataclass(frozen=True)
class FormBasis:
    n: int
    k: int
    degree: int
    kind: str = "total"

    def __post_init__(self):
        if self.kind not in ("total", "box", "homogeneous"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"form degree {self.k} out of range for n={self.n}")

    @cached_property
    def exponents(self) -> list[tuple[int, ...]]:
        if self.degree < 0:
            return []
        if self.kind == "box":
            return _box_exponents(self.n, self.degree)
        return monomials(self.n, self.degree, homogeneous=self.kind == "homogeneous")

    @cached_property
    def index_sets(self) -> list[tuple[int, ...]]:
        return list(combinations(range(self.n), self.k))

    @cached_property
    def terms(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(J, e) for J in self.index_sets for e in self.exponents]

    @cached_property
    def index(self) -> dict:
        return {t: i for i, t in enumerate(self.terms)}

    @property
    def size(self) -> int:
        return len(self.index_sets) * len(self.exponents)

    def admits(self, e: tuple[int, ...]) -> bool:
        if self.kind == "box":
            return all(a <= self.degree for a in e)
        if self.kind == "homogeneous":
            return sum(e) == self.degree
        return sum(e) <= self.degree

    def with_k(self, k: int) -> "FormBasis":
        return basis(self.n, k, self.degree, self.kind)

    def vector_entries(self, u: PolyForm, row: int = 0) -> list[tuple[int, int, Fraction]]:
        if u.n != self.n or u.k != self.k:
            raise ValueError(f"form of type ({u.n},{u.k}) does not match basis ({self.n},{self.k})")
        out = []
        idx = self.index
        for J, e, v in u.items():
            i = idx.get((J, e))
            if i is None:
                raise BasisOverflow(f"monomial x^{e} dx_{J} is outside {self}")
            out.append((row, i, v))
        return out

    def vectors(self, forms: Sequence[PolyForm]) -> Mat:
        entries = []
        for r, u in enumerate(forms):
            entries.extend(self.vector_entries(u, r))
        return la.from_sparse(len(forms), self.size, entries)

    def form(self, row: Sequence) -> PolyForm:
        terms: dict = {}
        for (J, e), v in zip(self.terms, row):
            if v:
                terms.setdefault(J, {})[e] = la.to_fraction(v)
        return PolyForm(self.n, self.k, {J: Polynomial(self.n, c) for J, c in terms.items()})

    def forms(self, m: Mat) -> list[PolyForm]:
        return [self.form(r) for r in la.rows_of(m)]

    def __str__(self) -> str:
        return f"{self.kind}-basis(n={self.n}, k={self.k}, deg={self.degree})"


@lru_cache(maxsize=None)
def basis(n: int, k: int, degree: int, kind: str = "total") -> FormBasis:
    return FormBasis(n, k, degree, kind)


def common_basis(a: FormBasis, b: FormBasis) -> FormBasis:
    if (a.n, a.k) != (b.n, b.k):
        raise ValueError("bases of different form types")
    if a == b:
        return a
    kinds = {a.kind, b.kind}
    if kinds == {"total"}:
        return basis(a.n, a.k, max(a.degree, b.degree), "total")
    if "homogeneous" in kinds and kinds <= {"homogeneous", "total"}:
        return basis(a.n, a.k, max(a.degree, b.degree), "total")
    return basis(a.n, a.k, max(a.degree, b.degree), "box")


def _op_matrix(src: FormBasis, dst: FormBasis, op) -> Mat:
    entries = []
    for row, (J, e) in enumerate(src.terms):
        u = PolyForm.monomial(src.n, J, e)
        entries.extend(dst.vector_entries(op(u), row))
    return la.from_sparse(src.size, dst.size, entries)


@lru_cache(maxsize=None)
def embed_matrix(src: FormBasis, dst: FormBasis) -> Mat:
    if src == dst:
        return la.identity(src.size)
    entries = []
    idx = dst.index
    for row, t in enumerate(src.terms):
        j = idx.get(t)
        if j is None:
            raise BasisOverflow(f"{src} does not embed into {dst}")
        entries.append((row, j, 1))
    return la.from_sparse(src.size, dst.size, entries)


def d_target(b: FormBasis) -> FormBasis:
    if b.kind == "homogeneous":
        return basis(b.n, b.k + 1, max(b.degree - 1, 0), "homogeneous")
    return b.with_k(b.k + 1)


@lru_cache(maxsize=None)
def d_matrix(b: FormBasis) -> Mat:
    if b.k >= b.n:
        raise ValueError("d of a top-degree form space")
    return _op_matrix(b, d_target(b), exterior_derivative)


@lru_cache(maxsize=None)
def d_matrix_into(src: FormBasis, dst: FormBasis) -> Mat:
    """``d`` from ``src`` into ``dst``; only the images must fit, not the default target."""
    if d_target(src) == dst:
        return d_matrix(src)
    return _op_matrix(src, dst, exterior_derivative)


def koszul_target(b: FormBasis) -> FormBasis:
    return basis(b.n, b.k - 1, b.degree + 1, b.kind)


@lru_cache(maxsize=None)
def koszul_matrix(b: FormBasis) -> Mat:
    return _op_matrix(b, koszul_target(b), koszul)


@lru_cache(maxsize=None)
def codifferential_matrix(b: FormBasis) -> Mat:
    return _op_matrix(b, b.with_k(b.k - 1), codifferential)


@lru_cache(maxsize=None)
def star_matrix(b: FormBasis) -> Mat:
    return _op_matrix(b, b.with_k(b.n - b.k), hodge_star)


@lru_cache(maxsize=None)
def trace_matrix(b: FormBasis, amap: AffineMap) -> Mat:
    """Pullback along ``amap`` into the same kind of basis on ``R^source_dim``."""
    m = amap.source_dim
    if b.k > m:
        raise ValueError("no trace space: form degree exceeds face dimension")
    dst = basis(m, b.k, b.degree, b.kind if b.kind != "homogeneous" else "total")
    free = _coordinate_injection(amap)
    if free is None:
        return _op_matrix(b, dst, lambda u: pullback_affine(amap, u))
    # x_i = t_a on free coordinates, x_i = const elsewhere
    pos = {i: a for a, i in enumerate(free)}
    pins = [(i, amap.offset[i]) for i in range(amap.target_dim) if i not in pos]
    entries = []
    idx = dst.index
    for row, (J, e) in enumerate(b.terms):
        if any(j not in pos for j in J):
            continue
        c = Fraction(1)
        for i, v in pins:
            if e[i]:
                c *= v ** e[i]
        if not c:
            continue
        col = idx.get((tuple(pos[j] for j in J), tuple(e[i] for i in free)))
        if col is None:
            raise BasisOverflow(f"trace of x^{e} dx_{J} leaves {dst}")
        entries.append((row, col, c))
    return la.from_sparse(b.size, dst.size, entries)


def _coordinate_injection(amap: AffineMap) -> list[int] | None:
    """Free coordinates if ``amap`` is ``t -> (t placed at increasing slots, constants elsewhere)``."""
    free = []
    for a in range(amap.source_dim):
        col = [amap.matrix[i][a] for i in range(amap.target_dim)]
        hits = [i for i, v in enumerate(col) if v]
        if len(hits) != 1 or col[hits[0]] != 1:
            return None
        free.append(hits[0])
    if any(x >= y for x, y in zip(free, free[1:])):
        return None
    if any(amap.offset[i] for i in free):
        return None
    return free


def trace_target(b: FormBasis, m: int) -> FormBasis:
    return basis(m, b.k, b.degree, b.kind if b.kind != "homogeneous" else "total")


@lru_cache(maxsize=None)
def integral_matrix(b: FormBasis, shape: str) -> Mat:
    """Column functional: integral of each top-degree basis form over the reference cell."""
    if b.k != b.n:
        raise ValueError("integration needs top-degree forms")
    vals = [monomial_integral(e, shape) for (_, e) in b.terms]
    return la.mat([[v] for v in vals], 1) if vals else la.zeros(0, 1)


@lru_cache(maxsize=None)
def constants_row(b: FormBasis) -> Mat:
    if b.k != 0:
        raise ValueError("constants are 0-forms")
    return b.vectors([PolyForm.scalar(Polynomial.constant(b.n))])


@lru_cache(maxsize=None)
def wedge_integral_matrix(a: FormBasis, b: FormBasis, shape: str) -> Mat:
    """``[i, j] = int u_i ^ v_j`` over the reference cell, monomial bases."""
    if a.n != b.n or a.k + b.k != a.n:
        raise ValueError("pairing needs complementary form degrees on the same cell")
    entries = []
    for i, (J, e) in enumerate(a.terms):
        for j, (K, f) in enumerate(b.terms):
            s = merge_sign(J, K)
            if not s:
                continue
            v = monomial_integral(tuple(x + y for x, y in zip(e, f)), shape)
            entries.append((i, j, s * v))
    return la.from_sparse(a.size, b.size, entries)


class FormSpace:
    """A finite-dimensional space of k-forms on a reference cell."""

    __slots__ = ("cell", "k", "basis", "space")

    def __init__(self, cell: RefCell, k: int, fbasis: FormBasis, space: Subspace):
        if fbasis.n != cell.dim or fbasis.k != k:
            raise ValueError("basis does not match cell dimension / form degree")
        if space.ambient_dim != fbasis.size:
            raise ValueError("subspace ambient does not match basis size")
        self.cell = cell
        self.k = k
        self.basis = fbasis
        self.space = space

    @classmethod
    def span(cls, cell: RefCell, k: int, fbasis: FormBasis, rows: Mat) -> "FormSpace":
        return cls(cell, k, fbasis, Subspace.span(rows, fbasis.size))

    @classmethod
    def from_forms(cls, cell: RefCell, k: int, fbasis: FormBasis, forms: Sequence[PolyForm]) -> "FormSpace":
        return cls.span(cell, k, fbasis, fbasis.vectors(list(forms)) if forms else la.zeros(0, fbasis.size))

    @classmethod
    def zero(cls, cell: RefCell, k: int, fbasis: FormBasis) -> "FormSpace":
        return cls(cell, k, fbasis, Subspace.zero(fbasis.size))

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def rows(self) -> Mat:
        return self.space.rows

    @property
    def degree_bound(self) -> int:
        return self.basis.degree

    def __repr__(self) -> str:
        return f"FormSpace({self.cell}, k={self.k}, dim={self.dim}, {self.basis})"

    def forms(self) -> list[PolyForm]:
        return self.basis.forms(self.rows)

    def embed(self, fbasis: FormBasis) -> "FormSpace":
        if fbasis == self.basis:
            return self
        if self.dim == 0:
            return FormSpace.zero(self.cell, self.k, fbasis)
        rows = self.rows * embed_matrix(self.basis, fbasis)
        return FormSpace(self.cell, self.k, fbasis, Subspace(rows, fbasis.size, _canonical=_embedding_keeps_form(self.basis, fbasis)))

    def _aligned(self, other: "FormSpace") -> tuple["FormSpace", "FormSpace"]:
        if self.cell != other.cell or self.k != other.k:
            raise ValueError("form spaces on different cells or degrees")
        b = common_basis(self.basis, other.basis)
        return self.embed(b), other.embed(b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormSpace):
            return NotImplemented
        if self.cell != other.cell or self.k != other.k or self.dim != other.dim:
            return False
        a, b = self._aligned(other)
        return a.space == b.space

    __hash__ = None

    def contains(self, item) -> bool:
        if isinstance(item, FormSpace):
            if item.dim == 0:
                return True
            a, b = self._aligned(item)
            return a.space.contains(b.space)
        if isinstance(item, PolyForm):
            try:
                v = self.basis.vectors([item])
            except BasisOverflow:
                return False
            return self.space.contains(v)
        raise TypeError("expected a FormSpace or a PolyForm")

    __contains__ = contains

    def __add__(self, other: "FormSpace") -> "FormSpace":
        a, b = self._aligned(other)
        return FormSpace(a.cell, a.k, a.basis, a.space + b.space)

    def __and__(self, other: "FormSpace") -> "FormSpace":
        a, b = self._aligned(other)
        return FormSpace(a.cell, a.k, a.basis, a.space & b.space)

    def d(self) -> "FormSpace":
        """Image ``d(self)`` as a space of (k+1)-forms."""
        tgt = d_target(self.basis)
        if self.dim == 0:
            return FormSpace.zero(self.cell, self.k + 1, tgt)
        return FormSpace.span(self.cell, self.k + 1, tgt, self.rows * d_matrix(self.basis))

    def d_rows(self) -> Mat:
        return self.rows * d_matrix(self.basis)

    def kernel_of_d(self) -> "FormSpace":
        if self.k == self.cell.dim:
            return self
        dm = self.d_rows()
        deps = la.left_kernel(dm)
        return FormSpace.span(self.cell, self.k, self.basis, deps.rows * self.rows) if deps.dim else FormSpace.zero(self.cell, self.k, self.basis)

    def trace(self, amap: AffineMap, target: RefCell) -> "FormSpace":
        tb = trace_target(self.basis, target.dim)
        if self.dim == 0:
            return FormSpace.zero(target, self.k, tb)
        return FormSpace.span(target, self.k, tb, self.rows * trace_matrix(self.basis, amap))

    def integrals(self) -> Mat:
        """Column of integrals of the basis forms (top degree only)."""
        return self.rows * integral_matrix(self.basis, self.cell.shape)

    def contains_constants(self) -> bool:
        if self.k != 0:
            return False
        return self.space.contains(constants_row(self.basis))

    def serialize_key(self) -> tuple:
        return (self.cell.shape, self.cell.dim, self.k, self.basis.degree, self.basis.kind, self.space.key())


def _embedding_keeps_form(src: FormBasis, dst: FormBasis) -> bool:
    """Reindexing preserves echelon form when the term order is preserved."""
    pos = [dst.index[t] for t in src.terms]
    return all(a < b for a, b in zip(pos, pos[1:]))


def default_kind(cell: RefCell) -> str:
    return "box" if cell.shape == "cube" else "total"


def make_space(cell: RefCell, k: int, r: int, family: str, kind: str | None = None) -> FormSpace:
    """``P_r``, trimmed ``P_r^-``, tensor ``Q_r`` or homogeneous ``H_t`` k-forms on a reference cell."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if not 0 <= k <= cell.dim:
        raise ValueError(f"form degree {k} out of range on {cell}")
    if family == "HomogeneousHt":
        b = basis(cell.dim, k, r, "homogeneous")
        return FormSpace(cell, k, b, Subspace.full(b.size))
    if r < 0:
        kind = kind or default_kind(cell)
        return FormSpace.zero(cell, k, basis(cell.dim, k, 0, kind))
    if family == "Qr":
        if cell.shape != "cube":
            raise ValueError("Q_r spaces are only defined on cubes")
        b = basis(cell.dim, k, r, "box")
        return FormSpace(cell, k, b, Subspace.full(b.size))
    kind = kind or default_kind(cell)
    target = basis(cell.dim, k, r, kind)
    total = basis(cell.dim, k, r, "total")
    if family == "Pr" or k == 0:
        rows = embed_matrix(total, target)
        return FormSpace(cell, k, target, Subspace(rows, target.size, _canonical=_embedding_keeps_form(total, target)))
    # trimmed: u in P_r with kappa(u) of degree <= r, i.e. the degree-(r+1) part of kappa u vanishes
    km = koszul_matrix(total)
    top = [j for j, (_, e) in enumerate(koszul_target(total).terms) if sum(e) == r + 1]
    overflow = la.take_columns(km, top)
    deps = la.left_kernel(overflow)
    rows = deps.rows * embed_matrix(total, target)
    return FormSpace.span(cell, k, target, rows)


def dim_Pr(n: int, k: int, r: int) -> int:
    return comb(r + n, n) * comb(n, k) if r >= 0 else 0


def dim_Pr_zero_cube(n: int, k: int, r: int) -> int:
    """dim of boundary-free ``P_r`` k-forms on ``I^n`` from the bubble description."""
    q = r - 2 * (n - k)
    return comb(n, k) * comb(q + n, n) if q >= 0 else 0


@lru_cache(maxsize=None)
def _facet_trace_stack(b: FormBasis, shape: str) -> Mat | None:
    cell = RefCell(shape, b.n)
    mats = []
    for f in cell.facets():
        if b.k > f.dim:
            continue
        mats.append(trace_matrix(b, f.inclusion_map()))
    if not mats:
        return None
    return la.hstack(mats, b.size)


def boundary_restricted(s: FormSpace) -> FormSpace:
    """Subspace of ``s`` with vanishing trace on every facet (hence every proper face)."""
    if s.dim == 0 or s.cell.dim == 0:
        return s
    stack = _facet_trace_stack(s.basis, s.cell.shape)
    if stack is None:
        return s
    deps = la.left_kernel_basis(s.rows * stack)
    if deps.nrows() == 0:
        return FormSpace.zero(s.cell, s.k, s.basis)
    if deps.nrows() == s.dim:
        return s
    return FormSpace.span(s.cell, s.k, s.basis, deps * s.rows)


def trace(u: PolyForm, face: Face) -> PolyForm:
    """Pull a form on the parent reference cell back to a face's local coordinates."""
    if u.n != face.parent.dim:
        raise ValueError("form does not live on the face's parent cell")
    return pullback_affine(face.inclusion_map(), u)


def bubble(n: int, J: Iterable[int]) -> Polynomial:
    """``prod_{j not in J} x_j (1 - x_j)``."""
    out = Polynomial.constant(n)
    J = set(J)
    for j in range(n):
        if j not in J:
            out = out * Polynomial.univariate(n, j, [0, 1, -1])
    return out


def bubble_space(n: int, k: int, r: int) -> FormSpace:
    """Span of ``u * prod_{j not in J} x_j(1-x_j) dx_J`` with ``u`` of degree ``r - 2(n-k)``."""
    cell = RefCell("cube", n)
    b = basis(n, k, r, "box")
    q = r - 2 * (n - k)
    forms = []
    if q >= 0:
        for J in combinations(range(n), k):
            bub = bubble(n, J)
            for e in monomials(n, q):
                forms.append(PolyForm(n, k, {J: Polynomial.monomial(e) * bub}))
    return FormSpace.from_forms(cell, k, b, forms)
