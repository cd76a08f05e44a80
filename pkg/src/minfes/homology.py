"""Cohomology of form complexes, compatibility, and minimal dimensions.

Augmentations are explicit.  ``augment_start`` prepends ``R -> E^0`` (the
constants), ``augment_end`` appends ``E^n -> R`` (integration over the cell).
Results index the extra slots as degrees ``-1`` and ``n + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from . import linalg as la
from .cells import Cell, RefCell
from .fes import FES, has_extensions, tensor_power, element_system
from .linalg import Mat
from .spaces import (
    FormSpace,
    boundary_restricted,
    constants_row,
    d_matrix,
    d_target,
    common_basis,
    embed_matrix,
    make_space,
)


class NotAComplex(ValueError):
    """Consecutive maps do not compose to zero, or d leaves the next space."""


class ConsistencyError(RuntimeError):
    """Two criteria that must agree on a system with extensions disagree."""


def binom(a: int, b: int) -> int:
    """Binomial coefficient, zero when ``a < 0``, ``b < 0`` or ``a < b``."""
    if a < 0 or b < 0 or a < b:
        return 0
    return comb(a, b)


@dataclass
class CochainComplex:
    """Spaces ``X^0 .. X^m`` with coordinate matrices ``maps[k]: X^k -> X^(k+1)``.

    Matrices act on row vectors of coordinates.  ``start`` is a ``1 x dim X^0``
    row (image of ``1``), ``end`` a ``dim X^m x 1`` column.
    """

    dims: list[int]
    maps: list[Mat]
    augment_start: bool = False
    augment_end: bool = False
    start: Mat | None = None
    end: Mat | None = None
    spaces: list[FormSpace] = field(default_factory=list)

    def __post_init__(self):
        if len(self.maps) != len(self.dims) - 1:
            raise ValueError("need one map between consecutive spaces")
        for k, m in enumerate(self.maps):
            if (m.nrows(), m.ncols()) != (self.dims[k], self.dims[k + 1]):
                raise ValueError(f"map {k} has the wrong shape")
        chain = ([self.start] if self.augment_start else []) + list(self.maps)
        if self.augment_end:
            chain.append(self.end)
        for a, b in zip(chain, chain[1:]):
            if a.nrows() and b.ncols() and not la.is_zero(a * b):
                raise NotAComplex("consecutive maps do not compose to zero")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    @classmethod
    def from_spaces(cls, spaces: list[FormSpace], augment_start: bool = False,
                    augment_end: bool = False) -> "CochainComplex":
        """The de Rham sequence ``spaces[0] -> spaces[1] -> ...`` under ``d``."""
        for a, b in zip(spaces, spaces[1:]):
            if b.k != a.k + 1 or b.cell != a.cell:
                raise ValueError("spaces must be consecutive form degrees on one cell")
        maps = []
        for a, b in zip(spaces, spaces[1:]):
            maps.append(d_coordinates(a, b))
        start = end = None
        if augment_start:
            s0 = spaces[0]
            if s0.k != 0:
                raise ValueError("start augmentation needs 0-forms")
            start = constants_coordinates(s0)
        if augment_end:
            sn = spaces[-1]
            if sn.k != sn.cell.dim:
                raise ValueError("end augmentation needs top-degree forms")
            end = sn.integrals() if sn.dim else la.zeros(0, 1)
        return cls([s.dim for s in spaces], maps, augment_start, augment_end, start, end, list(spaces))

    def ranks(self) -> list[int]:
        return [la.rank(m) if m.nrows() and m.ncols() else 0 for m in self.maps]


def d_coordinates(a: FormSpace, b: FormSpace) -> Mat:
    """Matrix of ``d: a -> b`` in the echelon coordinates of both spaces."""
    if a.dim == 0 or b.dim == 0:
        if a.dim and not la.is_zero(a.d_rows()):
            raise NotAComplex(f"d does not map {a} into {b}")
        return la.zeros(a.dim, b.dim)
    img = a.d_rows()
    tb = d_target(a.basis)
    cb = common_basis(tb, b.basis)
    if cb != b.basis:
        # b must be re-expressed in the larger basis
        b_rows = b.rows * embed_matrix(b.basis, cb)
        sub = la.Subspace(b_rows, cb.size)
    else:
        sub = b.space
    if tb != cb:
        img = img * embed_matrix(tb, cb)
    if not la.is_zero(sub.residual(img)):
        raise NotAComplex(f"d does not map {a} into {b}")
    return sub.coordinates(img)


def constants_coordinates(s: FormSpace) -> Mat:
    """Coordinates of the constant 1 in ``s`` (a zero row if it is absent)."""
    one = constants_row(s.basis)
    if s.dim and la.is_zero(s.space.residual(one)):
        return s.space.coordinates(one)
    return la.zeros(1, s.dim)


@dataclass(frozen=True)
class Cohomology:
    dims: dict
    augment_start: bool
    augment_end: bool

    def __getitem__(self, k: int) -> int:
        return self.dims.get(k, 0)

    def is_exact(self) -> bool:
        return all(v == 0 for v in self.dims.values())

    def as_list(self) -> list[int]:
        return [self.dims[k] for k in sorted(self.dims)]

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}


def cohomology_dims(c: CochainComplex) -> Cohomology:
    ranks = c.ranks()
    m = c.top
    rk_start = la.rank(c.start) if c.augment_start and c.start.ncols() else 0
    rk_end = la.rank(c.end) if c.augment_end and c.end.nrows() else 0
    out = {}
    if c.augment_start:
        out[-1] = 1 - rk_start
    for k in range(m + 1):
        outgoing = ranks[k] if k < m else rk_end
        incoming = ranks[k - 1] if k > 0 else rk_start
        out[k] = c.dims[k] - outgoing - incoming
    if c.augment_end:
        out[m + 1] = 1 - rk_end
    return Cohomology(out, c.augment_start, c.augment_end)


def cell_spaces(A: FES, T, zero: bool = False) -> list[FormSpace]:
    if isinstance(T, str):
        T = A.complex[T]
    if zero:
        return [A.zero_part(T, k) for k in range(T.dim + 1)]
    return [A[T, k] for k in range(T.dim + 1)]


def cell_cohomology(A: FES, T, zero: bool = False, augment: bool = True) -> Cohomology:
    """Cohomology of ``A(T)`` (start-augmented) or of ``A_0(T)`` (end-augmented)."""
    spaces = cell_spaces(A, T, zero)
    if zero:
        return cohomology_dims(CochainComplex.from_spaces(spaces, augment_end=augment))
    return cohomology_dims(CochainComplex.from_spaces(spaces, augment_start=augment))


def zero_complex_cohomology(spaces: list[FormSpace], augment_end: bool = True) -> Cohomology:
    return cohomology_dims(CochainComplex.from_spaces([boundary_restricted(s) for s in spaces],
                                                      augment_end=augment_end))


@dataclass
class CompatibilityReport:
    extensions: dict = field(default_factory=dict)
    local_exact: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    boundary_exact: dict = field(default_factory=dict)

    @property
    def has_extensions(self) -> bool:
        return all(self.extensions.values())

    @property
    def locally_exact(self) -> bool:
        return all(self.local_exact.values())

    @property
    def boundary_criterion(self) -> bool:
        return all(self.constants.values()) and all(self.boundary_exact.values())

    @property
    def compatible(self) -> bool:
        return self.has_extensions and self.locally_exact

    def failures(self) -> list[str]:
        out = []
        for name in ("extensions", "local_exact", "constants", "boundary_exact"):
            out += [f"{name}:{key}" for key, ok in getattr(self, name).items() if not ok]
        return out


def compatibility_report(A: FES) -> CompatibilityReport:
    rep = CompatibilityReport()
    for T in A.complex:
        for k in range(T.dim):
            rep.extensions[(T.label, k)] = has_extensions(A, T, k)
        rep.local_exact[T.label] = cell_cohomology(A, T).is_exact()
        rep.constants[T.label] = A[T, 0].contains_constants()
        rep.boundary_exact[T.label] = cell_cohomology(A, T, zero=True).is_exact()
    return rep


def is_compatible(A: FES) -> bool:
    """Extensions everywhere and local exactness on every cell.

    On systems with extensions, local exactness must coincide with the
    boundary criterion (constants present and the boundary-condition sequences
    exact); a disagreement raises :class:`ConsistencyError`.
    """
    rep = compatibility_report(A)
    if rep.has_extensions and rep.locally_exact != rep.boundary_criterion:
        raise ConsistencyError(f"exactness criteria disagree: {rep.failures()}")
    return rep.compatible


def minimal_dims(A: FES, augment_end: bool = True) -> dict:
    """Lower bound ``dim A^k_0(T) + dim H^{k+1}(A_0(T))`` for every ``(T, k)``."""
    out = {}
    for T in A.complex:
        h = cell_cohomology(A, T, zero=True, augment=augment_end)
        for k in range(T.dim + 1):
            out[(T.label, k)] = A.zero_part(T, k).dim + h[k + 1]
    return out


def boundary_dims(A: FES) -> dict:
    return {(T.label, k): A.zero_part(T, k).dim for T in A.complex for k in range(T.dim + 1)}


def hk_closed_form(n: int, r: int, k: int) -> int:
    """dim H^k of the boundary-condition ``P_r`` complex on ``I^n`` (end-augmented)."""
    return binom(r + 2 * k - n - 1, k - 1) * binom(r + k - n - 1, n - k)


def dim_Pr_zero(n: int, k: int, r: int) -> int:
    q = r - 2 * (n - k)
    return binom(n, k) * binom(q + n, n) if q >= 0 else 0


def small_pleasures_dim(n: int, r: int, k: int) -> int:
    if r < 1 or not 0 <= k <= n:
        raise ValueError("need r >= 1 and 0 <= k <= n")
    return dim_Pr_zero(n, k, r) + hk_closed_form(n, r, k + 1)


def pr_zero_cohomology(n: int, r: int, augment_end: bool = True) -> tuple[list[FormSpace], Cohomology]:
    cube = RefCell("cube", n)
    spaces = [boundary_restricted(make_space(cube, k, r, "Pr")) for k in range(n + 1)]
    return spaces, cohomology_dims(CochainComplex.from_spaces(spaces, augment_end=augment_end))


def small_pleasures_bruteforce(n: int, r: int) -> list[int]:
    """All ``k`` at once: boundary dims and cohomology by rank computations."""
    spaces, h = pr_zero_cohomology(n, r)
    return [spaces[k].dim + h[k + 1] for k in range(n + 1)]


TABLE1 = {
    0: [0, 1, 4, 10, 20, 35, 56],
    1: [11, 27, 54, 95, 153, 231, 332],
    2: [45, 81, 133, 204, 297, 415, 561],
    3: [35, 56, 84, 120, 165, 220, 286],
}
TABLE1_R = list(range(4, 11))


def table1(bruteforce: bool = True) -> dict:
    """``{(k, r): (closed, brute)}`` for the cube ``I^3`` and ``r = 4..10``."""
    out = {}
    for r in TABLE1_R:
        brute = small_pleasures_bruteforce(3, r) if bruteforce else [None] * 4
        for k in range(4):
            out[(k, r)] = (small_pleasures_dim(3, r, k), brute[k])
    return out


@dataclass
class TrimmedCheck:
    n: int
    r: int
    k: int
    lhs: int
    rhs: int
    images_equal: bool

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs and self.images_equal


def trimmed_check(n: int, r: int, k: int) -> TrimmedCheck:
    simplex = RefCell("simplex", n)
    trimmed0 = boundary_restricted(make_space(simplex, k, r, "PrMinus"))
    lower = [boundary_restricted(make_space(simplex, j, r - 1, "Pr")) for j in range(n + 1)]
    h = cohomology_dims(CochainComplex.from_spaces(lower, augment_end=True))
    rhs = lower[k].dim + h[k + 1]
    if k < n:
        full0 = boundary_restricted(make_space(simplex, k, r, "Pr"))
        images = trimmed0.d() == full0.d()
    else:
        images = True
    return TrimmedCheck(n, r, k, trimmed0.dim, rhs, images)


def verify_trimmed_identity(n: int, r: int, k: int) -> bool:
    if r < 1:
        raise ValueError("need r >= 1")
    return trimmed_check(n, r, k).ok


@dataclass
class ExactnessCheck:
    n: int
    r: int
    k: int
    kernel_dim: int
    image_dim: int
    ok: bool


def zeroce_checks(n: int, r: int) -> list[ExactnessCheck]:
    """Exactness of ``P_{r+1}L^{k-1}_0 -> P_r L^k_0 -> P_{r-1}L^{k+1}_0`` on ``I^n`` at the middle.

    For ``k = n`` the last arrow is integration over the cube.
    """
    cube = RefCell("cube", n)
    out = []
    for k in range(n + 1):
        mid = boundary_restricted(make_space(cube, k, r, "Pr"))
        if k > 0:
            prev = boundary_restricted(make_space(cube, k - 1, r + 1, "Pr"))
            image = prev.d()
            if not mid.contains(image):
                out.append(ExactnessCheck(n, r, k, -1, image.dim, False))
                continue
        else:
            image = None
        if k < n:
            nxt = boundary_restricted(make_space(cube, k + 1, r - 1, "Pr"))
            if not nxt.contains(mid.d()):
                out.append(ExactnessCheck(n, r, k, -1, -1, False))
                continue
            ker = mid.kernel_of_d()
        else:
            ints = mid.integrals()
            deps = la.left_kernel(ints)
            ker = FormSpace.span(cube, k, mid.basis, deps.rows * mid.rows) if deps.dim else FormSpace.zero(cube, k, mid.basis)
        img_dim = image.dim if image is not None else 0
        ok = ker.dim == img_dim and (image is None or ker.contains(image))
        out.append(ExactnessCheck(n, r, k, ker.dim, img_dim, ok))
    return out


def verify_zeroce(n: int, r: int) -> bool:
    return all(c.ok for c in zeroce_checks(n, r))


def serendipity_checks(m: int, r: int) -> dict:
    """``dim H^{k+1}`` of the end-augmented complex ``P_{r-k} L^k_0(I^m)``, ``k = 0..m``.

    All zero means the boundary-free spaces already meet the minimal
    dimensions, so a compatible system containing ``P_{r-k} L^k`` is minimal
    exactly when its boundary-free spaces are these.
    """
    if r < m:
        raise ValueError("need r >= m")
    cube = RefCell("cube", m)
    spaces = [boundary_restricted(make_space(cube, k, r - k, "Pr")) for k in range(m + 1)]
    h = cohomology_dims(CochainComplex.from_spaces(spaces, augment_end=True))
    return {k: h[k + 1] for k in range(m + 1)}


def kunneth_check(n: int, r: int, zero: bool = True) -> tuple[Cohomology, dict]:
    """Cohomology of ``Q_r`` on ``I^n`` (or its boundary version) and the Kunneth prediction.

    Both unaugmented.  The prediction is the graded product of the interval
    factor cohomologies.
    """
    interval = element_system(RefCell("cube", 1), "Pr", r)
    T1 = interval.complex.cells_of_dim(1)[0]
    factor = cell_cohomology(interval, T1, zero=zero, augment=False)
    A = tensor_power([interval] * n)
    top = A.complex.cells_of_dim(n)[0]
    h = cell_cohomology(A, top, zero=zero, augment=False)
    poly = {0: 1}
    for _ in range(n):
        nxt: dict = {}
        for a, x in poly.items():
            for b in (0, 1):
                nxt[a + b] = nxt.get(a + b, 0) + x * factor[b]
        poly = nxt
    pred = {k: poly.get(k, 0) for k in range(n + 1)}
    return h, pred


def verify_kunneth(n: int, r: int) -> bool:
    for zero in (False, True):
        h, pred = kunneth_check(n, r, zero)
        if any(h[k] != pred[k] for k in range(n + 1)):
            return False
    return True


def comp_identity_holds(spaces: list[FormSpace]) -> bool:
    """``dim X^k + dim H^{k+1} = dim ker d|X^{k+1} + dim ker d|X^k`` for each ``k``."""
    c = CochainComplex.from_spaces(spaces, augment_end=spaces[-1].k == spaces[-1].cell.dim)
    h = cohomology_dims(c)
    ranks = c.ranks()
    m = c.top
    rk_end = la.rank(c.end) if c.augment_end and c.end.nrows() else 0
    kers = [c.dims[j] - (ranks[j] if j < m else rk_end) for j in range(m + 1)]
    return all(c.dims[k] + h[k + 1] == kers[k + 1] + kers[k] for k in range(m))
