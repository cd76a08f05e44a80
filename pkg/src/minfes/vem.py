"""Polynomial bookkeeping behind mixed virtual elements, and wedge pairings."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .cells import RefCell
from .linalg import Mat
from .polyforms import PolyForm, Polynomial, complement, integrate, merge_sign, wedge
from .spaces import (
    FormSpace,
    boundary_restricted,
    codifferential_matrix,
    make_space,
    wedge_integral_matrix,
)


@dataclass
class ZSpace:
    cell: RefCell
    k: int
    r: int
    space: FormSpace

    @property
    def dim(self) -> int:
        return self.space.dim


def z_space(cell: RefCell, r: int, k: int) -> ZSpace:
    """Co-closed forms of degree at most ``r - 1``; zero in top degree."""
    if r < 1:
        raise ValueError("need r >= 1")
    base = make_space(cell, k, r - 1, "Pr")
    if k == cell.dim:
        return ZSpace(cell, k, r, FormSpace.zero(cell, k, base.basis))
    if k == 0:
        return ZSpace(cell, k, r, base)
    img = base.rows * codifferential_matrix(base.basis)
    deps = la.left_kernel(img)
    space = FormSpace.span(cell, k, base.basis, deps.rows * base.rows) if deps.dim else FormSpace.zero(cell, k, base.basis)
    return ZSpace(cell, k, r, space)


def vem_dim_sides(n: int, r: int, k: int, shape: str = "simplex") -> tuple[int, int]:
    cell = RefCell(shape, n)
    trimmed = make_space(cell, n - k, r, "PrMinus").dim
    lower = z_space(cell, r, k - 1).dim if k > 0 else 0
    if k == n:
        return 1 + lower, trimmed
    return z_space(cell, r, k).dim + lower, trimmed


def verify_vem_dim_identity(n: int, r: int, k: int, shape: str = "simplex") -> bool:
    lhs, rhs = vem_dim_sides(n, r, k, shape)
    return lhs == rhs


def pairing_matrix(U: FormSpace, V: FormSpace) -> Mat:
    """``[i, j] = int u_i ^ v_j`` over the reference cell."""
    if U.cell != V.cell:
        raise ValueError("spaces live on different cells")
    if U.k + V.k != U.cell.dim:
        raise ValueError("form degrees must add up to the cell dimension")
    W = wedge_integral_matrix(U.basis, V.basis, U.cell.shape)
    if U.dim == 0 or V.dim == 0:
        return la.zeros(U.dim, V.dim)
    return U.rows * W * V.rows.transpose()


def is_invertible(m: Mat) -> bool:
    return m.nrows() == m.ncols() and (m.nrows() == 0 or la.rank(m) == m.nrows())


def zerodual_pair(n: int, r: int, k: int) -> tuple[FormSpace, FormSpace]:
    """Boundary-free ``P_r`` k-forms on ``I^n`` and ``P_{r-2(n-k)}`` (n-k)-forms."""
    cube = RefCell("cube", n)
    U = boundary_restricted(make_space(cube, k, r, "Pr"))
    V = make_space(cube, n - k, r - 2 * (n - k), "Pr")
    return U, V


def verify_zerodual(n: int, r: int, k: int) -> bool:
    U, V = zerodual_pair(n, r, k)
    return is_invertible(pairing_matrix(U, V))


def divide_by_bubble(p: Polynomial, j: int) -> Polynomial:
    """Exact quotient of ``p`` by ``x_j (1 - x_j)``; raises if it does not divide."""
    by_rest: dict = {}
    for e, c in p.coeffs.items():
        rest = e[:j] + (0,) + e[j + 1:]
        by_rest.setdefault(rest, {})[e[j]] = c
    out = {}
    for rest, col in by_rest.items():
        top = max(col)
        b = {}
        prev = Fraction(0)
        if col.get(0, 0):
            raise ValueError("polynomial does not vanish where the bubble does")
        for a in range(0, top - 1):
            cur = col.get(a + 1, Fraction(0)) + prev
            b[a] = cur
            prev = cur
        for a, v in b.items():
            if v:
                e = list(rest)
                e[j] = a
                out[tuple(e)] = v
    q = Polynomial(p.n, out)
    bubble = Polynomial.univariate(p.n, j, [0, 1, -1])
    if q * bubble != p:
        raise ValueError("polynomial is not divisible by the bubble")
    return q


def dual_witness(u: PolyForm) -> PolyForm:
    """``v = sum_J eps_J w_J dx_J'`` where ``u_J = w_J prod_{j not in J} x_j(1 - x_j)``.

    ``eps_J`` makes ``eps_J dx_J ^ dx_J'`` the volume form, so ``int u ^ v`` is a
    sum of integrals of ``w_J^2`` times nonnegative bubbles.
    """
    n = u.n
    out = {}
    for J, p in u.terms.items():
        w = p
        for j in range(n):
            if j not in J:
                w = divide_by_bubble(w, j)
        Jc = complement(J, n)
        out[Jc] = w * merge_sign(J, Jc)
    return PolyForm(n, n - u.k, out)


def witness_pairing(u: PolyForm) -> Fraction:
    return integrate(wedge(u, dual_witness(u)), "cube")
