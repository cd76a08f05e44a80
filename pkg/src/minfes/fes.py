"""Finite element systems on cell complexes.

An :class:`FES` assigns a :class:`FormSpace` (in the cell's local coordinates)
to each pair ``(cell, k)`` with ``0 <= k <= dim cell``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

from . import linalg as la
from .cells import Cell, CellComplex, Face, RefCell
from .linalg import Mat, Subspace
from .polyforms import AffineMap, pullback_affine, wedge
from .spaces import (
    FormBasis,
    FormSpace,
    basis,
    boundary_restricted,
    common_basis,
    embed_matrix,
    make_space,
    trace_matrix,
    trace_target,
)


class FES:
    def __init__(self, complex: CellComplex, spaces: dict, name: str = ""):
        self.complex = complex
        self.name = name
        self._spaces: dict[tuple[str, int], FormSpace] = {}
        for (T, k), s in spaces.items():
            label = T if isinstance(T, str) else T.label
            cell = complex[label]
            if s.cell != cell.ref or s.k != k:
                raise ValueError(f"space for ({label}, {k}) lives on {s.cell} / degree {s.k}")
            self._spaces[(label, k)] = s
        for T in complex:
            for k in range(T.dim + 1):
                if (T.label, k) not in self._spaces:
                    raise ValueError(f"missing space for ({T.label}, {k})")
        self._zero: dict = {}

    def __getitem__(self, key) -> FormSpace:
        T, k = key
        label = T if isinstance(T, str) else T.label
        return self._spaces[(label, k)]

    def __repr__(self) -> str:
        return f"FES({self.name or '?'}, {len(self.complex)} cells)"

    @property
    def cells(self) -> list[Cell]:
        return self.complex.cells

    def items(self):
        for T in self.complex:
            for k in range(T.dim + 1):
                yield T, k, self[T, k]

    def replace(self, updates: dict, name: str | None = None) -> "FES":
        spaces = {(T, k): s for T, k, s in ((T.label, k, s) for T, k, s in self.items())}
        changed = set()
        for (T, k), s in updates.items():
            key = (T if isinstance(T, str) else T.label, k)
            spaces[key] = s
            changed.add(key)
        out = FES(self.complex, spaces, self.name if name is None else name)
        out._zero = {key: v for key, v in self._zero.items() if key not in changed}
        return out

    def zero_part(self, T, k: int) -> FormSpace:
        """``A^k_0(T)``: the forms in ``A^k(T)`` with vanishing trace on the boundary."""
        label = T if isinstance(T, str) else T.label
        key = (label, k)
        if key not in self._zero:
            self._zero[key] = boundary_restricted(self[key])
        return self._zero[key]

    def trace(self, T: Cell, S: Cell, k: int) -> FormSpace:
        """Image of ``A^k(T)`` under the trace onto the face ``S``."""
        return self[T, k].trace(self.complex.inclusion(T, S), S.ref)

    def max_degree(self) -> int:
        return max(s.basis.degree for _, _, s in self.items())

    @classmethod
    def from_family(cls, complex: CellComplex, family: str, r: int) -> "FES":
        spaces = {}
        for T in complex:
            for k in range(T.dim + 1):
                spaces[(T.label, k)] = make_space(T.ref, k, r, family)
        return cls(complex, spaces, f"{family}[{r}]")

    @classmethod
    def build(cls, complex: CellComplex, rule: Callable[[Cell, int], FormSpace], name: str = "") -> "FES":
        spaces = {(T.label, k): rule(T, k) for T in complex for k in range(T.dim + 1)}
        return cls(complex, spaces, name)


@lru_cache(maxsize=None)
def reference_complex(shape: str, n: int) -> CellComplex:
    return RefCell(shape, n).complex()


def element_system(cell: RefCell, family: str, r: int) -> FES:
    """The standard family on every face of a reference cell."""
    return FES.from_family(reference_complex(cell.shape, cell.dim), family, r)


def top_cell(A: FES) -> Cell:
    tops = A.complex.cells_of_dim(A.complex.dim)
    if len(tops) != 1:
        raise ValueError("expected a complex with a single top cell")
    return tops[0]


def is_element_system(A: FES) -> bool:
    """Closed under d on each cell and under traces to every face."""
    C = A.complex
    for T in C:
        for k in range(T.dim):
            if not A[T, k + 1].contains(A[T, k].d()):
                return False
        for S in C.faces_of(T):
            for k in range(S.dim + 1):
                if not A[S, k].contains(A.trace(T, S, k)):
                    return False
    return True


def trace_rows(amap: AffineMap, rows: Mat, src: FormBasis, dst: FormBasis) -> Mat:
    """Coefficients in ``dst`` of the traces of ``rows`` (given in ``src``) along ``amap``."""
    tb = trace_target(src, amap.source_dim)
    m = trace_matrix(src, amap)
    if tb != dst:
        m = m * embed_matrix(tb, dst)
    return rows * m


class BoundaryFamilies:
    """Compatible families ``(u_F)`` over the facets ``F`` of a cell.

    A family is stored through its coordinates with respect to the echelon
    bases of the facet spaces; ``space`` is the subspace of compatible
    coordinate vectors.
    """

    def __init__(self, A: FES, T: Cell, k: int):
        C = A.complex
        self.complex = C
        self.cell = T
        self.k = k
        self.facets = C.facets_of(T) if T.dim > k else []
        self.facet_spaces = [A[F, k] for F in self.facets]
        dims = [s.dim for s in self.facet_spaces]
        self.offsets = [sum(dims[:i]) for i in range(len(dims) + 1)]
        ncoord = self.offsets[-1]
        blocks = []
        for i, F in enumerate(self.facets):
            for j in range(i + 1, len(self.facets)):
                G = self.facets[j]
                R = C.shared_face(F, G)
                if R is None or R.dim < k or R.dim != T.dim - 2:
                    continue
                fa, fb = self.facet_spaces[i], self.facet_spaces[j]
                dst = common_basis(trace_target(fa.basis, R.dim), trace_target(fb.basis, R.dim))
                ta = trace_rows(C.inclusion(F, R), fa.rows, fa.basis, dst)
                tb = trace_rows(C.inclusion(G, R), fb.rows, fb.basis, dst)
                blk = la.zeros(ncoord, dst.size)
                _place(blk, ta, self.offsets[i])
                _place(blk, -tb, self.offsets[j])
                blocks.append(blk)
        if blocks and ncoord:
            self.space = la.left_kernel(la.hstack(blocks, ncoord))
        else:
            self.space = Subspace.full(ncoord)

    @property
    def dim(self) -> int:
        return self.space.dim

    def coordinates_of_trace(self, s: FormSpace, rows: Mat | None = None) -> Mat:
        """Facet coordinates of the traces of ``rows`` (default: basis of ``s``).

        Raises ``ValueError`` if a trace falls outside a facet space.
        """
        if rows is None:
            rows = s.rows
        parts = []
        for F, fs in zip(self.facets, self.facet_spaces):
            tr = trace_rows(self.complex.inclusion(self.cell, F), rows, s.basis, fs.basis)
            if not la.is_zero(fs.space.residual(tr)):
                raise ValueError(f"trace onto {F} leaves the facet space")
            parts.append(fs.space.coordinates(tr))
        return la.hstack(parts, rows.nrows()) if parts else la.zeros(rows.nrows(), 0)

    def facet_block(self, coords: Mat, i: int) -> Mat:
        """Monomial coefficients of the ``i``-th facet member for each coordinate row."""
        a, b = self.offsets[i], self.offsets[i + 1]
        return la.take_columns(coords, range(a, b)) * self.facet_spaces[i].rows


def _place(blk: Mat, part: Mat, offset: int) -> Mat:
    for i in range(part.nrows()):
        for j in range(part.ncols()):
            v = part[i, j]
            if v:
                blk[offset + i, j] = v
    return blk


def boundary_families(A: FES, T: Cell, k: int) -> BoundaryFamilies:
    return BoundaryFamilies(A, T, k)


def has_extensions(A: FES, T: Cell | str, k: int) -> bool:
    """Is the trace ``A^k(T) -> {compatible families on the boundary of T}`` onto?"""
    if isinstance(T, str):
        T = A.complex[T]
    if T.dim == 0 or k >= T.dim:
        return True
    fam = boundary_families(A, T, k)
    if fam.dim == 0:
        return True
    tr = fam.coordinates_of_trace(A[T, k])
    return la.rank(tr) == fam.dim


def has_all_extensions(A: FES) -> bool:
    return all(has_extensions(A, T, k) for T in A.complex for k in range(T.dim))


def global_space(A: FES, k: int) -> tuple[list[Cell], list[int], Subspace]:
    """Compatible families ``(u_T)`` over all cells; coordinates per cell space."""
    C = A.complex
    cells = [T for T in C if T.dim >= k]
    dims = [A[T, k].dim for T in cells]
    offs = [sum(dims[:i]) for i in range(len(dims) + 1)]
    pos = {T.label: i for i, T in enumerate(cells)}
    ncoord = offs[-1]
    blocks = []
    for T in cells:
        for F in C.facets_of(T):
            if F.dim < k:
                continue
            sT, sF = A[T, k], A[F, k]
            tr = trace_rows(C.inclusion(T, F), sT.rows, sT.basis, sF.basis)
            size = tr.ncols()
            rhs = sF.rows
            blk = la.zeros(ncoord, size)
            _place(blk, tr, offs[pos[T.label]])
            _place(blk, -rhs, offs[pos[F.label]])
            blocks.append(blk)
    if not blocks or ncoord == 0:
        return cells, offs, Subspace.full(ncoord)
    return cells, offs, la.left_kernel(la.hstack(blocks, ncoord))


def global_space_dim(A: FES, k: int) -> int:
    return global_space(A, k)[2].dim


def tensor_product(B: FES, C: FES) -> FES:
    """Tensor product of element systems on the face lattices of ``I^p`` and ``I^q``."""
    p, q = B.complex.dim, C.complex.dim
    n = p + q
    cube = RefCell("cube", n)
    target = reference_complex("cube", n)
    deg = max(B.max_degree(), C.max_degree())
    spaces = {}
    for face in cube.all_faces():
        fu = Face(RefCell("cube", p), free=tuple(i for i in face.free if i < p),
                  pins=tuple((i, v) for i, v in face.pins if i < p))
        fv = Face(RefCell("cube", q), free=tuple(i - p for i in face.free if i >= p),
                  pins=tuple((i - p, v) for i, v in face.pins if i >= p))
        U = B.complex[f"cube{p}{fu.label()}"]
        V = C.complex[f"cube{q}{fv.label()}"]
        a, b = fu.dim, fv.dim
        m = a + b
        pu = AffineMap.make([[int(i == j) for j in range(m)] for i in range(a)], [0] * a, m)
        pv = AffineMap.make([[int(i + a == j) for j in range(m)] for i in range(b)], [0] * b, m)
        label = f"cube{n}{face.label()}"
        ref = RefCell("cube", m)
        for k in range(m + 1):
            fb = basis(m, k, deg, "box")
            forms = []
            for l in range(max(0, k - b), min(k, a) + 1):
                us = [pullback_affine(pu, u) for u in B[U, l].forms()]
                vs = [pullback_affine(pv, v) for v in C[V, k - l].forms()]
                forms.extend(wedge(u, v) for u in us for v in vs)
            spaces[(label, k)] = FormSpace.from_forms(ref, k, fb, forms)
    name = f"({B.name})x({C.name})"
    return FES(target, spaces, name)


def tensor_power(factors: Iterable[FES]) -> FES:
    factors = list(factors)
    out = factors[0]
    for f in factors[1:]:
        out = tensor_product(out, f)
    return out
