"""Minimal compatible element systems: the general two-step construction and TNT.

All computations are exact.  A scalar product is a Gram matrix per
``(cell, k)`` over the monomial basis; the default makes the monomial basis
orthonormal.  Orthogonality ``x ⊥ S`` is imposed as the linear constraint
``x G S^T = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

from . import linalg as la
from .cells import Cell, Face, RefCell
from .fes import (
    FES,
    BoundaryFamilies,
    element_system,
    has_all_extensions,
    is_element_system,
    reference_complex,
    tensor_power,
    top_cell,
    trace_rows,
)
from .homology import cell_cohomology, minimal_dims
from .linalg import Mat, Subspace
from .polyforms import AffineMap, PolyForm, Polynomial, exterior_derivative, pullback_affine
from .spaces import (
    FormBasis,
    FormSpace,
    boundary_restricted,
    common_basis,
    d_matrix_into,
    embed_matrix,
    integral_matrix,
    make_space,
)


class PreconditionError(ValueError):
    """An input system does not satisfy the hypotheses of a construction step."""


class NoExtension(ValueError):
    """Boundary data admits no extension of the requested kind."""


@dataclass(frozen=True)
class InnerProduct:
    """``identity``: monomial basis orthonormal; ``l2``: integral of the pointwise product."""

    kind: str = "identity"

    def __post_init__(self):
        if self.kind not in ("identity", "l2"):
            raise ValueError(f"unknown inner product {self.kind!r}")

    def gram(self, cell: RefCell, b: FormBasis) -> Mat | None:
        if self.kind == "identity":
            return None
        return _l2_gram(cell.shape, b)


@lru_cache(maxsize=None)
def _l2_gram(shape: str, b: FormBasis) -> Mat:
    from .polyforms import monomial_integral
    entries = []
    terms = b.terms
    for i, (J, e) in enumerate(terms):
        for j, (K, f) in enumerate(terms):
            if J == K:
                entries.append((i, j, monomial_integral(tuple(x + y for x, y in zip(e, f)), shape)))
    return la.from_sparse(b.size, b.size, entries)


def _ortho(x: Mat, gram: Mat | None, s: Mat) -> Mat:
    """Constraint columns: ``y`` (a row combination of ``x``) is orthogonal to the rows of ``s``."""
    if s.nrows() == 0:
        return la.zeros(x.nrows(), 0)
    if gram is None:
        return x * s.transpose()
    return x * gram * s.transpose()


def _member(x: Mat, s: Subspace) -> Mat:
    """Constraint columns: ``y`` lies in ``s`` (its residual off the pivots vanishes)."""
    if s.dim == s.ambient_dim:
        return la.zeros(x.nrows(), 0)
    piv = s.pivots
    pset = set(piv)
    free = [j for j in range(s.ambient_dim) if j not in pset]
    out = la.take_columns(x, free)
    if s.dim:
        out = out - la.take_columns(x, piv) * la.take_columns(s.rows, free)
    return out


def _solve_rows(constraints: list[Mat], nrows: int) -> Mat:
    """Rows ``c`` with ``c M = 0`` for every constraint block ``M``."""
    # one block at a time keeps each elimination small
    c = None
    for m in constraints:
        if not m.ncols():
            continue
        if c is not None:
            if c.nrows() == 0:
                break
            m = c * m
        k = la.left_kernel_basis(m)
        c = k if c is None else k * c
    return la.identity(nrows) if c is None else c


class _Frame:
    """Shared monomial bases for two nested element systems."""

    def __init__(self, A: FES, B: FES, ip: InnerProduct):
        if A.complex is not B.complex:
            raise PreconditionError("systems live on different complexes")
        self.complex = A.complex
        self.ip = ip
        self.bases = {}
        for T, k, s in A.items():
            self.bases[(T.label, k)] = common_basis(s.basis, B[T, k].basis)
        self.A = self.align(A)
        self.B = self.align(B)
        for T, k, s in self.A.items():
            if not self.B[T, k].space.contains(s.space):
                raise PreconditionError(f"A^{k}({T.label}) is not contained in B^{k}({T.label})")

    def align(self, X: FES) -> FES:
        return FES(X.complex, {(T.label, k): s.embed(self.bases[(T.label, k)]) for T, k, s in X.items()}, X.name)

    def basis(self, T: Cell, k: int) -> FormBasis:
        return self.bases[(T.label, k)]

    def gram(self, T: Cell, k: int) -> Mat | None:
        return self.ip.gram(T.ref, self.basis(T, k))

    def d(self, T: Cell, k: int, rows: Mat) -> Mat:
        return rows * d_matrix_into(self.basis(T, k), self.basis(T, k + 1))

    def tr(self, T: Cell, F: Cell, k: int, rows: Mat) -> Mat:
        return trace_rows(self.complex.inclusion(T, F), rows, self.basis(T, k), self.basis(F, k))

    def size(self, T: Cell, k: int) -> int:
        return self.basis(T, k).size


# ---------------------------------------------------------------- step one


def exact_part(fr: _Frame, A: FES, T: Cell, k: int) -> Mat:
    """Rows spanning ``E^k(T)``: the trace-free additions that kill ``H^{k+1}(A_0(T))``."""
    B = fr.B
    n = T.dim
    size = fr.size(T, k)
    G = fr.gram(T, k)
    dB0 = fr.d(T, k - 1, B.zero_part(T, k - 1).rows) if k > 0 else la.zeros(0, size)
    if k == n:
        if not la.is_zero(A[T, k].integrals()):
            return la.zeros(0, size)
        Bn = B[T, k].rows
        c = _solve_rows([_ortho(Bn, G, dB0)], Bn.nrows())
        return c * Bn
    Z = B.zero_part(T, k).rows
    if Z.nrows() == 0:
        return la.zeros(0, size)
    dZ = fr.d(T, k, Z)
    G1 = fr.gram(T, k + 1)
    dA0 = fr.d(T, k, A.zero_part(T, k).rows)
    cons = [_member(dZ, A.zero_part(T, k + 1).space), _ortho(dZ, G1, dA0), _ortho(Z, G, dB0)]
    c = _solve_rows(cons, Z.nrows())
    return c * Z if c.nrows() else la.zeros(0, size)


@dataclass
class ExactifyResult:
    system: FES
    parts: dict = field(default_factory=dict)


def exactify_with_parts(A: FES, B: FES, ip: InnerProduct | None = None) -> ExactifyResult:
    fr = _Frame(A, B, ip or InnerProduct())
    A = fr.A
    updates = {}
    parts = {}
    for T in fr.complex:
        h = cell_cohomology(A, T, zero=True)
        for k in range(T.dim + 1):
            E = exact_part(fr, A, T, k)
            parts[(T.label, k)] = E.nrows()
            _check_isomorphism(fr, A, T, k, E, h[k + 1])
            if E.nrows():
                s = A[T, k]
                new = Subspace(la.vstack([s.rows, E], s.basis.size), s.basis.size)
                if new.dim != s.dim + E.nrows():
                    raise RuntimeError(f"E^{k}({T.label}) meets A^{k}({T.label})")
                updates[(T.label, k)] = FormSpace(s.cell, k, s.basis, new)
    return ExactifyResult(A.replace(updates, name=f"exact({A.name})"), parts)


def _check_isomorphism(fr: _Frame, A: FES, T: Cell, k: int, E: Mat, h: int) -> None:
    """``d: E^k(T) -> H^{k+1}(A_0(T))`` (integration at top degree) must be bijective."""
    if E.nrows() != h:
        raise RuntimeError(f"dim E^{k}({T.label}) = {E.nrows()} but the cohomology has dimension {h}")
    if not E.nrows():
        return
    if k == T.dim:
        ints = E * integral_matrix(fr.basis(T, k), T.shape)
        ok = la.rank(ints) == E.nrows()
    else:
        dE = fr.d(T, k, E)
        dA0 = fr.d(T, k, A.zero_part(T, k).rows)
        both = la.vstack([dA0, dE], dE.ncols())
        ok = la.rank(dE) == E.nrows() and la.rank(both) == la.rank(dA0) + E.nrows()
    if not ok:
        raise RuntimeError(f"d: E^{k}({T.label}) -> H^{k + 1} is not an isomorphism")


def exactify(A: FES, B: FES, ip: InnerProduct | None = None) -> FES:
    return exactify_with_parts(A, B, ip).system


# ---------------------------------------------------------------- step two


class _Boundary:
    """Boundary data of ``T`` in degree ``k``: facet-wise monomial coefficients, concatenated."""

    def __init__(self, fr: _Frame, cur: FES, T: Cell, k: int):
        self.fr = fr
        self.T = T
        self.k = k
        self.fam = BoundaryFamilies(cur, T, k)
        self.facets = self.fam.facets
        self.sizes = [fr.size(F, k) for F in self.facets]
        self.width = sum(self.sizes)
        blocks = [fs.rows for fs in self.fam.facet_spaces]
        lift = la.block_diag(blocks) if blocks else la.zeros(0, 0)
        self.families = (self.fam.space.rows * lift) if self.fam.dim else la.zeros(0, self.width)
        grams = [fr.gram(F, k) for F in self.facets]
        if any(g is not None for g in grams):
            self.gram = la.block_diag([g if g is not None else la.identity(s) for g, s in zip(grams, self.sizes)])
        else:
            self.gram = None

    def trace(self, rows: Mat) -> Mat:
        parts = [self.fr.tr(self.T, F, self.k, rows) for F in self.facets]
        return la.hstack(parts, rows.nrows()) if parts else la.zeros(rows.nrows(), 0)

    def d(self, rows: Mat, nxt: "_Boundary") -> Mat:
        """Facet-wise exterior derivative into the next degree's boundary ambient."""
        out = []
        off = 0
        for F, s in zip(self.facets, self.sizes):
            block = la.take_columns(rows, range(off, off + s))
            out.append(self.fr.d(F, self.k, block))
            off += s
        return la.hstack(out, rows.nrows()) if out else la.zeros(rows.nrows(), 0)

    def vector(self, data: dict) -> Mat:
        parts = []
        for F in self.facets:
            if F.label not in data:
                raise NoExtension(f"no boundary datum for facet {F.label}")
            parts.append(self.fr.basis(F, self.k).vectors([data[F.label]]))
        return la.hstack(parts, 1)


@dataclass
class ExtensionParts:
    F: int
    G: int
    F_tilde: int
    G_tilde: int
    trace_dim: int
    family_dim: int
    decomposition: bool  # trace + F + G fill the boundary families


def extend_to_compatible_with_parts(A: FES, B: FES, ip: InnerProduct | None = None,
                                    check: bool = True) -> tuple[FES, dict]:
    """Add extensions of boundary families cell by cell, in increasing dimension.

    On a cell ``T`` of dimension ``l + 1`` and for ``k <= l``, ``F^k`` is extended by
    mixed extension and ``G^k`` harmonically in ``B``.  When the chosen scalar
    product does not make ``tr A^k(T) + F^k + G^k`` fill the boundary families,
    ``G^k`` is replaced by the orthogonal complement of ``tr A^k(T) + F^k`` and
    extended with ``du~`` in the already enlarged ``A^{k+1}(T)``; degrees are
    therefore processed from ``l`` down to ``0``.
    """
    fr = _Frame(A, B, ip or InnerProduct())
    A = fr.A
    B = fr.B
    if check:
        for T in fr.complex:
            if not cell_cohomology(A, T, zero=True).is_exact():
                raise PreconditionError(f"boundary-condition sequence of {T.label} is not exact")
    cur = A
    parts = {}
    for dim in range(1, fr.complex.dim + 1):
        updates = {}
        for T in fr.complex.cells_of_dim(dim):
            l = dim - 1
            bds = [_Boundary(fr, cur, T, k) for k in range(l + 1)]
            trA = [bd.trace(A[T, k].rows) for k, bd in enumerate(bds)]
            enlarged = {l + 1: A[T, l + 1].space}
            for k in range(l, -1, -1):
                bd = bds[k]
                size = fr.size(T, k)
                Fk, Gk = _fg_spaces(bd, bds[k + 1] if k < l else None, trA[k], trA[k + 1] if k < l else None)
                tdim = la.rank(trA[k]) if trA[k].nrows() else 0
                ok = tdim + Fk.nrows() + Gk.nrows() == bd.fam.dim
                if ok and Gk.nrows():
                    ok = la.rank(la.vstack([trA[k], Fk, Gk], bd.width)) == bd.fam.dim
                Ft = _mixed_rows(fr, A, B, T, k, bd, Fk, A[T, k + 1].space) if Fk.nrows() else la.zeros(0, size)
                if ok:
                    Gt = _harmonic_rows(fr, B, T, k, bd, Gk) if Gk.nrows() else la.zeros(0, size)
                else:
                    Gk = _complement(bd, la.vstack([trA[k], Fk], bd.width))
                    Gt = _mixed_rows(fr, A, B, T, k, bd, Gk, enlarged[k + 1]) if Gk.nrows() else la.zeros(0, size)
                parts[(T.label, k)] = ExtensionParts(Fk.nrows(), Gk.nrows(), Ft.nrows(), Gt.nrows(), tdim, bd.fam.dim, ok)
                if Ft.nrows() != Fk.nrows() or Gt.nrows() != Gk.nrows():
                    raise RuntimeError(f"extension of F/G on {T.label}, k={k} is not unique")
                s = A[T, k]
                new = s.space
                if Ft.nrows() or Gt.nrows():
                    new = Subspace(la.vstack([s.rows, Ft, Gt], size), size)
                    if new.dim != s.dim + Ft.nrows() + Gt.nrows():
                        raise RuntimeError(f"sum A + F~ + G~ on {T.label}, k={k} is not direct")
                    updates[(T.label, k)] = FormSpace(s.cell, k, s.basis, new)
                enlarged[k] = new
        cur = cur.replace(updates)
    return cur.replace({}, name=f"compatible({A.name})"), parts


def _complement(bd: _Boundary, sub: Mat) -> Mat:
    """Orthogonal complement of ``sub`` inside the boundary families."""
    W = bd.families
    if W.nrows() == 0:
        return W
    c = _solve_rows([_ortho(W, bd.gram, sub)], W.nrows())
    return c * W


def _fg_spaces(bd: _Boundary, nxt: _Boundary | None, trA: Mat, trA1: Mat | None) -> tuple[Mat, Mat]:
    W = bd.families
    if W.nrows() == 0:
        return W, W
    G = bd.gram
    if nxt is None:
        # top degree on the boundary: d vanishes on facets, so G = 0
        c = _solve_rows([_ortho(W, G, trA)], W.nrows())
        return c * W, la.zeros(0, W.ncols())
    dW = bd.d(W, nxt)
    tr1 = Subspace.span(trA1, nxt.width) if trA1.nrows() else Subspace.zero(nxt.width)
    cF = _solve_rows([_ortho(W, G, trA), _member(dW, tr1)], W.nrows())
    Kd = la.left_kernel_basis(dW) * W
    cG = _solve_rows([_ortho(dW, nxt.gram, trA1), _ortho(W, G, Kd)], W.nrows())
    return cF * W, cG * W


def _mixed_rows(fr: _Frame, A: FES, B: FES, T: Cell, k: int, bd: _Boundary, target: Mat,
                upper: Subspace) -> Mat:
    """Extensions ``u~ in B^k(T)`` with trace in span(target), ``du~ in upper``,
    ``du~ ⊥ dA^k_0(T)`` and ``u~ ⊥ dB^{k-1}_0(T)``."""
    Bk = B[T, k].rows
    dBk = fr.d(T, k, Bk)
    G = fr.gram(T, k)
    G1 = fr.gram(T, k + 1)
    cons = [
        _member(bd.trace(Bk), Subspace.span(target, bd.width)),
        _member(dBk, upper),
        _ortho(dBk, G1, fr.d(T, k, A.zero_part(T, k).rows)),
    ]
    if k > 0:
        cons.append(_ortho(Bk, G, fr.d(T, k - 1, B.zero_part(T, k - 1).rows)))
    c = _solve_rows(cons, Bk.nrows())
    return c * Bk


def _harmonic_rows(fr: _Frame, E: FES, T: Cell, k: int, bd: _Boundary, target: Mat) -> Mat:
    """``E``-harmonic extensions of the span of ``target``."""
    Ek = E[T, k].rows
    dEk = fr.d(T, k, Ek)
    G = fr.gram(T, k)
    G1 = fr.gram(T, k + 1)
    cons = [
        _member(bd.trace(Ek), Subspace.span(target, bd.width)),
        _ortho(dEk, G1, fr.d(T, k, E.zero_part(T, k).rows)),
    ]
    if k > 0:
        cons.append(_ortho(Ek, G, fr.d(T, k - 1, E.zero_part(T, k - 1).rows)))
    c = _solve_rows(cons, Ek.nrows())
    return c * Ek


def extend_to_compatible(A: FES, B: FES, ip: InnerProduct | None = None) -> FES:
    return extend_to_compatible_with_parts(A, B, ip)[0]


def default_ambient(n: int, r: int) -> FES:
    """Tensor product of ``n`` interval systems ``P^-_{r+1}``: contains ``P_r`` and ``Q_r`` on ``I^n``."""
    return _default_ambient(n, r)


@lru_cache(maxsize=None)
def _default_ambient(n: int, r: int) -> FES:
    interval = element_system(RefCell("cube", 1), "PrMinus", r + 1)
    return tensor_power([interval] * n) if n > 1 else interval


def build_mcfes(A: FES, B: FES | None = None, ip: InnerProduct | None = None) -> FES:
    """Minimal compatible system containing ``A`` (inside the compatible ``B``)."""
    ip = ip or InnerProduct()
    if B is None:
        n = A.complex.dim
        if A.complex is not reference_complex("cube", n):
            raise PreconditionError("a default ambient system exists only on the reference cube")
        B = default_ambient(n, A.max_degree())
    out = extend_to_compatible(exactify(A, B, ip), B, ip)
    return out.replace({}, name=f"mcfes({A.name})")


# ----------------------------------------------------------- single extensions


def _single_frame(E: FES, T) -> tuple[_Frame, Cell]:
    if isinstance(T, str):
        T = E.complex[T]
    return _Frame(E, E, InnerProduct()), T


def harmonic_extension(boundary_data, E: FES, T, k: int, ip: InnerProduct | None = None) -> PolyForm:
    """The ``E``-harmonic extension of boundary data on ``T``.

    ``boundary_data`` maps facet labels to forms in facet coordinates.  For
    ``k = dim T`` it is the prescribed integral instead.
    """
    if isinstance(T, str):
        T = E.complex[T]
    fr = _Frame(E, E, ip or InnerProduct())
    E = fr.A
    if not cell_cohomology(E, T, zero=True).is_exact():
        raise PreconditionError(f"boundary-condition sequence of {T.label} is not exact")
    Ek = E[T, k].rows
    G = fr.gram(T, k)
    cols = []
    rhs = []
    if k == T.dim:
        cols.append(Ek * integral_matrix(fr.basis(T, k), T.shape))
        rhs.append(la.mat([[boundary_data]]))
    else:
        bd = _Boundary(fr, E, T, k)
        cols.append(bd.trace(Ek))
        rhs.append(bd.vector(boundary_data))
        cols.append(_ortho(fr.d(T, k, Ek), fr.gram(T, k + 1), fr.d(T, k, E.zero_part(T, k).rows)))
        rhs.append(la.zeros(1, cols[-1].ncols()))
    if k > 0:
        cols.append(_ortho(Ek, G, fr.d(T, k - 1, E.zero_part(T, k - 1).rows)))
        rhs.append(la.zeros(1, cols[-1].ncols()))
    return _unique_solution(fr, T, k, Ek, cols, rhs)


def mixed_extension(u: dict, A: FES, B: FES, T, k: int, ip: InnerProduct | None = None) -> PolyForm:
    """The extension ``u~ in B^k(T)`` of facet data ``u`` with ``du~ in A^{k+1}(T)``,
    ``du~ ⊥ dA^k_0(T)`` and ``u~ ⊥ dB^{k-1}_0(T)``.

    Existence and uniqueness are decided by the linear solve itself.
    """
    if isinstance(T, str):
        T = A.complex[T]
    if k >= T.dim:
        raise ValueError("mixed extension needs k < dim T")
    fr = _Frame(A, B, ip or InnerProduct())
    A, B = fr.A, fr.B
    bd = _Boundary(fr, B, T, k)
    data = bd.vector(u)
    if k + 1 < T.dim:
        nxt = _Boundary(fr, B, T, k + 1)
        du = bd.d(data, nxt)
        trA1 = nxt.trace(A[T, k + 1].rows)
        if not Subspace.span(trA1, nxt.width).contains(du):
            raise NoExtension("d u is not the trace of an element of A^{k+1}(T)")
    Bk = B[T, k].rows
    dBk = fr.d(T, k, Bk)
    cols = [bd.trace(Bk), _member(dBk, A[T, k + 1].space),
            _ortho(dBk, fr.gram(T, k + 1), fr.d(T, k, A.zero_part(T, k).rows))]
    rhs = [data, la.zeros(1, cols[1].ncols()), la.zeros(1, cols[2].ncols())]
    if k > 0:
        cols.append(_ortho(Bk, fr.gram(T, k), fr.d(T, k - 1, B.zero_part(T, k - 1).rows)))
        rhs.append(la.zeros(1, cols[-1].ncols()))
    return _unique_solution(fr, T, k, Bk, cols, rhs)


def _unique_solution(fr: _Frame, T: Cell, k: int, space_rows: Mat, cols: list[Mat], rhs: list[Mat]) -> PolyForm:
    n = space_rows.nrows()
    M = la.hstack(cols, n)
    R = la.hstack(rhs, 1)
    sol = la.solve(M.transpose(), R.transpose())
    if sol is None:
        raise NoExtension("the boundary data has no extension of the requested kind")
    x, ker = sol
    if ker.dim:
        raise PreconditionError("the extension is not unique")
    return fr.basis(T, k).form(la.rows_of(x.transpose() * space_rows)[0])


# ---------------------------------------------------------------- TNT


def shifted_legendre(r: int) -> Polynomial:
    """Degree-``r`` Legendre polynomial on ``[0, 1]`` (value 1 at ``x = 1``)."""
    coeffs = [(-1) ** (r + j) * comb(r, j) * comb(r + j, j) for j in range(r + 1)]
    return Polynomial.univariate(1, 0, coeffs)


def _antiderivative(p: Polynomial) -> Polynomial:
    return Polynomial(1, {(e[0] + 1,): c / (e[0] + 1) for e, c in p.coeffs.items()})


def _in_direction(p: Polynomial, n: int, i: int) -> Polynomial:
    return Polynomial(n, {tuple(e[0] if j == i else 0 for j in range(n)): c for e, c in p.coeffs.items()})


@dataclass
class TntGenerators:
    n: int
    r: int
    P: Polynomial
    Q: Polynomial
    f: dict
    g: dict


def tnt_generators(n: int, r: int) -> TntGenerators:
    """``f_J`` (n-forms) and ``g_J`` ((n-1)-forms) for nonempty ``J`` (0-based indices)."""
    if r < 1:
        raise ValueError("need r >= 1")
    P = shifted_legendre(r)
    Q = _antiderivative(P)
    Ps = [_in_direction(P, n, i) for i in range(n)]
    Qs = [_in_direction(Q, n, i) for i in range(n)]
    full = tuple(range(n))
    f, g = {}, {}
    for size in range(1, n + 1):
        for J in combinations(range(n), size):
            prod = Polynomial.constant(n)
            for j in J:
                prod = prod * Ps[j]
            f[J] = PolyForm(n, n, {full: prod})
            terms = {}
            for i in J:
                c = Qs[i]
                for j in J:
                    if j != i:
                        c = c * Ps[j]
                # dx_i comes first in dx_i ^ dx_{full minus i} after i transpositions
                terms[tuple(j for j in full if j != i)] = c * (-1) ** i
            g[J] = PolyForm(n, n - 1, terms)
    return TntGenerators(n, r, P, Q, f, g)


def tnt_extend(u: PolyForm, face: Face) -> PolyForm:
    """Extend a form on a cube face to the cube, vanishing on the other faces of that dimension."""
    n = face.parent.dim
    if face.parent.shape != "cube" or u.n != face.dim:
        raise ValueError("tnt_extend needs a form on a face of a cube")
    proj = AffineMap.make([[int(j == i) for j in range(n)] for i in face.free], [0] * face.dim, n)
    out = pullback_affine(proj, u)
    weight = Polynomial.constant(n)
    for i, v in face.pins:
        weight = weight * (Polynomial.coordinate(n, i) if v else Polynomial.constant(n) - Polynomial.coordinate(n, i))
    return out * weight


@lru_cache(maxsize=None)
def tnt_cube_spaces(m: int, r: int) -> tuple[FormSpace, ...]:
    """``B^k(I^m)`` for ``k = 0..m``: ``Q_r`` plus extended generators of every face."""
    cube = RefCell("cube", m)
    spaces = []
    for k in range(m + 1):
        q = make_space(cube, k, r, "Qr")
        b = common_basis(q.basis, FormBasis(m, k, r + 1, "box"))
        forms = []
        if k < m:
            for face in cube.faces(k + 1):
                forms.extend(tnt_extend(g, face) for g in tnt_generators(k + 1, r).g.values())
        extra = b.vectors(forms) if forms else la.zeros(0, b.size)
        qs = q.embed(b)
        rows = la.vstack([qs.rows, extra], b.size)
        spaces.append(FormSpace(cube, k, b, Subspace(rows, b.size)))
    return tuple(spaces)


def build_tnt(n: int, r: int) -> FES:
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    C = reference_complex("cube", n)
    per_dim = {m: tnt_cube_spaces(m, r) for m in range(n + 1)}
    return FES.build(C, lambda T, k: per_dim[T.dim][k], name=f"TNT[{n},{r}]")


def qr_system(n: int, r: int) -> FES:
    return element_system(RefCell("cube", n), "Qr", r)


def cube_symmetries(n: int) -> list[AffineMap]:
    """Generators of the symmetry group of ``I^n``: adjacent swaps and one reflection."""
    out = []
    for i in range(n - 1):
        m = [[int(j == (i + 1 if a == i else i if a == i + 1 else a)) for j in range(n)] for a in range(n)]
        out.append(AffineMap.make(m, [0] * n, n))
    if n:
        m = [[(-1 if a == j == 0 else int(a == j)) for j in range(n)] for a in range(n)]
        out.append(AffineMap.make(m, [1] + [0] * (n - 1), n))
    return out


def is_symmetric(s: FormSpace) -> bool:
    """Invariance of a space on ``I^n`` under all coordinate permutations and reflections."""
    for g in cube_symmetries(s.cell.dim):
        moved = [pullback_affine(g, u) for u in s.forms()]
        if not all(s.contains(v) for v in moved):
            return False
    return True


def tnt_checks(n: int, r: int, augment_end: bool = True) -> dict:
    """Named ``(value, expected)`` pairs certifying ``build_tnt(n, r)``."""
    B = build_tnt(n, r)
    out = {
        "element_system": (is_element_system(B), True),
        "extensions": (has_all_extensions(B), True),
        "cohomology": (all(cell_cohomology(B, T).is_exact()
                           and cell_cohomology(B, T, zero=True, augment=augment_end).is_exact()
                           for T in B.complex), True),
    }
    for m in range(1, n + 1):
        cube = RefCell("cube", m)
        extra = boundary_restricted(tnt_cube_spaces(m, r)[m - 1]).dim
        base = boundary_restricted(make_space(cube, m - 1, r, "Qr")).dim
        out[f"dim_zero_{m}"] = (extra, base + 2 ** m - 1)
    bd = {key: B.zero_part(*key).dim for key in ((T.label, k) for T in B.complex for k in range(T.dim + 1))}
    out["minimal_dims"] = (bd, minimal_dims(qr_system(n, r), augment_end))
    gens = tnt_generators(n, r)
    out["dg"] = (all(exterior_derivative(gens.g[J]) == gens.f[J] * len(J) for J in gens.g), True)
    T = top_cell(B)
    out["symmetry"] = (all(is_symmetric(B[T, k]) for k in range(n + 1)), True)
    return out
