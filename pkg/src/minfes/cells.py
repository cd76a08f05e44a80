"""Reference simplices and cubes, their face lattices, and small cell complexes.

The reference cube is ``[0,1]^n``; the reference simplex is
``{x_i >= 0, sum x_i <= 1}`` with vertices ``0, e_1, ..., e_n``.  Every cell of a
complex carries an affine parametrization from the reference cell of its own
dimension, and forms on a cell are always written in those local coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import comb

import flint

from .polyforms import AffineMap

SHAPES = ("simplex", "cube")
Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class RefCell:
    shape: str
    dim: int

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.dim < 0:
            raise ValueError("cell dimension must be non-negative")

    def __str__(self) -> str:
        return f"{self.shape.capitalize()}({self.dim})"

    def vertices(self) -> list[Point]:
        n = self.dim
        if self.shape == "cube":
            return [tuple(Fraction(b) for b in bits) for bits in product((0, 1), repeat=n)]
        out = [tuple(Fraction(0) for _ in range(n))]
        for i in range(n):
            out.append(tuple(Fraction(int(i == j)) for j in range(n)))
        return out

    def faces(self, d: int) -> list["Face"]:
        """All faces of dimension ``d`` in a fixed order."""
        n = self.dim
        if not 0 <= d <= n:
            raise ValueError(f"face dimension {d} out of range for {self}")
        if self.shape == "cube":
            out = []
            for free in combinations(range(n), d):
                pinned = [i for i in range(n) if i not in free]
                for values in product((0, 1), repeat=len(pinned)):
                    out.append(Face(self, free=free, pins=tuple(zip(pinned, values))))
            return out
        return [Face(self, vertex_ids=vs) for vs in combinations(range(n + 1), d + 1)]

    def all_faces(self) -> list["Face"]:
        return [f for d in range(self.dim + 1) for f in self.faces(d)]

    def num_faces(self, d: int) -> int:
        if self.shape == "cube":
            return comb(self.dim, d) * 2 ** (self.dim - d)
        return comb(self.dim + 1, d + 1)

    def facets(self) -> list["Face"]:
        return self.faces(self.dim - 1) if self.dim > 0 else []

    def whole(self) -> "Face":
        return self.faces(self.dim)[0]

    def complex(self) -> "CellComplex":
        return CellComplex.from_faces(self)


@dataclass(frozen=True)
class Face:
    """A face of a reference cell.

    Cube faces are ``{x : x_i = N(i) for i not in free}`` given by the free
    indices ``J_T`` and the pins ``N_T``; simplex faces by a vertex subset.
    Local coordinates: for cubes the free coordinates in increasing order, for
    simplices ``v0 + sum t_i (v_i - v0)`` over the ordered vertex subset.
    """

    parent: RefCell
    free: tuple[int, ...] = ()
    pins: tuple[tuple[int, int], ...] = ()
    vertex_ids: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        if self.parent.shape == "cube":
            return len(self.free)
        return len(self.vertex_ids) - 1

    @property
    def cell(self) -> RefCell:
        return RefCell(self.parent.shape, self.dim)

    @property
    def pin_map(self) -> dict[int, int]:
        return dict(self.pins)

    def label(self) -> str:
        if self.parent.shape == "cube":
            pins = self.pin_map
            coords = [str(pins[i]) if i in pins else "*" for i in range(self.parent.dim)]
            return "(" + ",".join(coords) + ")"
        return "[" + ",".join(map(str, self.vertex_ids)) + "]"

    def inclusion_map(self) -> AffineMap:
        """Parametrization from the reference cell of dimension ``self.dim``."""
        n = self.parent.dim
        d = self.dim
        if self.parent.shape == "cube":
            pins = self.pin_map
            mat = [[0] * d for _ in range(n)]
            off = [0] * n
            for a, i in enumerate(self.free):
                mat[i][a] = 1
            for i, v in pins.items():
                off[i] = v
            return AffineMap.make(mat, off, d)
        verts = self.parent.vertices()
        v0 = verts[self.vertex_ids[0]]
        cols = [[verts[v][i] - v0[i] for i in range(n)] for v in self.vertex_ids[1:]]
        mat = [[cols[a][i] for a in range(d)] for i in range(n)]
        return AffineMap.make(mat, list(v0), d)

    def vertices(self) -> frozenset[Point]:
        amap = self.inclusion_map()
        return frozenset(amap(v) for v in self.cell.vertices())

    def contains(self, other: "Face") -> bool:
        return other.vertices() <= self.vertices()


@dataclass(frozen=True)
class Cell:
    """A cell of a :class:`CellComplex`: a reference cell placed by an affine map."""

    shape: str
    dim: int
    param: AffineMap
    label: str
    face: Face | None = field(default=None, compare=False)

    @property
    def ref(self) -> RefCell:
        return RefCell(self.shape, self.dim)

    @cached_property
    def vertices(self) -> frozenset[Point]:
        return frozenset(self.param(v) for v in self.ref.vertices())

    def __str__(self) -> str:
        return self.label


def _left_inverse_map(outer: AffineMap, inner: AffineMap) -> AffineMap:
    """The affine ``m`` with ``outer o m == inner`` (outer injective)."""
    N, d = outer.target_dim, outer.source_dim
    dp = inner.source_dim
    if d == 0:
        return AffineMap.make([], [], dp)
    M = flint.fmpq_mat(N, d, [flint.fmpq(x.numerator, x.denominator) for row in outer.matrix for x in row])
    Mt = M.transpose()
    L = (Mt * M).inv() * Mt
    rhs_cols = []
    for j in range(dp):
        rhs_cols.append([inner.matrix[i][j] for i in range(N)])
    rhs_cols.append([inner.offset[i] - outer.offset[i] for i in range(N)])
    R = flint.fmpq_mat(N, dp + 1, [flint.fmpq(c[i].numerator, c[i].denominator) for i in range(N) for c in rhs_cols])
    S = L * R
    mat = [[Fraction(int(S[i, j].p), int(S[i, j].q)) for j in range(dp)] for i in range(d)]
    off = [Fraction(int(S[i, dp].p), int(S[i, dp].q)) for i in range(d)]
    m = AffineMap.make(mat, off, dp)
    if outer.compose(m) != inner:
        raise ValueError("cell is not contained in the affine hull of the other cell")
    return m


class CellComplex:
    """A finite complex of affinely placed reference cells glued face to face."""

    def __init__(self, cells: list[Cell], ambient_dim: int):
        self.ambient_dim = ambient_dim
        self.cells = sorted(cells, key=lambda c: (c.dim, c.label))
        self._by_label = {c.label: c for c in self.cells}
        if len(self._by_label) != len(self.cells):
            raise ValueError("duplicate cell labels")
        self._maps: dict[tuple[str, str], AffineMap] = {}

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, label: str) -> Cell:
        return self._by_label[label]

    @property
    def dim(self) -> int:
        return max(c.dim for c in self.cells)

    def cells_of_dim(self, d: int) -> list[Cell]:
        return [c for c in self.cells if c.dim == d]

    def faces_of(self, T: Cell) -> list[Cell]:
        """Proper faces of ``T`` in the complex."""
        return [c for c in self.cells if c.dim < T.dim and c.vertices <= T.vertices]

    def facets_of(self, T: Cell) -> list[Cell]:
        return [c for c in self.faces_of(T) if c.dim == T.dim - 1]

    def inclusion(self, T: Cell, S: Cell) -> AffineMap:
        """Map from the reference cell of ``S`` into that of ``T`` (``S`` a face of ``T``)."""
        key = (T.label, S.label)
        if key not in self._maps:
            if not S.vertices <= T.vertices:
                raise ValueError(f"{S} is not a face of {T}")
            self._maps[key] = _left_inverse_map(T.param, S.param)
        return self._maps[key]

    def shared_face(self, A: Cell, B: Cell) -> Cell | None:
        common = A.vertices & B.vertices
        for c in self.cells:
            if c.vertices == common:
                return c
        return None

    @classmethod
    def from_faces(cls, cell: RefCell) -> "CellComplex":
        cells = []
        for f in cell.all_faces():
            label = f"{cell.shape}{cell.dim}{f.label()}"
            cells.append(Cell(cell.shape, f.dim, f.inclusion_map(), label, f))
        return cls(cells, cell.dim)

    @classmethod
    def from_top_cells(cls, shape: str, params: list[AffineMap]) -> "CellComplex":
        """Glue the images of reference cells; faces are identified by vertex sets."""
        N = params[0].target_dim
        d = params[0].source_dim
        ref = RefCell(shape, d)
        found: dict[frozenset, Cell] = {}
        for top in params:
            for f in ref.all_faces():
                p = top.compose(f.inclusion_map())
                verts = frozenset(p(v) for v in f.cell.vertices())
                if verts in found:
                    continue
                label = "{" + ";".join(",".join(str(x) for x in v) for v in sorted(verts)) + "}"
                found[verts] = Cell(shape, f.dim, p, label)
        return cls(list(found.values()), N)


def translate(n: int, shift) -> AffineMap:
    return AffineMap.make([[int(i == j) for j in range(n)] for i in range(n)], list(shift), n)


def two_intervals() -> CellComplex:
    return CellComplex.from_top_cells("cube", [translate(1, [0]), translate(1, [1])])


def two_squares() -> CellComplex:
    return CellComplex.from_top_cells("cube", [translate(2, [0, 0]), translate(2, [1, 0])])


def two_cubes() -> CellComplex:
    return CellComplex.from_top_cells("cube", [translate(3, [0, 0, 0]), translate(3, [1, 0, 0])])


def two_triangles() -> CellComplex:
    """The unit square split along its diagonal."""
    lower = AffineMap.make([[1, 0], [0, 1]], [0, 0], 2)
    upper = AffineMap.make([[0, -1], [-1, 0]], [1, 1], 2)
    return CellComplex.from_top_cells("simplex", [lower, upper])
