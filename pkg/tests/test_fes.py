import pytest

from minfes.cells import RefCell, two_cubes, two_intervals, two_squares, two_triangles
from minfes.fes import (
    FES,
    BoundaryFamilies,
    element_system,
    global_space_dim,
    has_all_extensions,
    has_extensions,
    is_element_system,
    reference_complex,
    tensor_product,
    top_cell,
)
from minfes.homology import is_compatible
from minfes.spaces import FormSpace, make_space

square = RefCell("cube", 2)


def test_element_system_examples():
    assert is_element_system(element_system(square, "Pr", 2))
    assert is_element_system(element_system(RefCell("cube", 3), "Qr", 1))
    A = element_system(square, "Pr", 1)
    broken = A.replace({(T.label, 1): FormSpace.zero(T.ref, 1, A[T, 1].basis) for T in A.complex.cells_of_dim(1)})
    assert not is_element_system(broken)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_pr_on_square_lacks_vertex_extensions(r):
    # 4r boundary values against dim P_r minus the interior bubbles
    A = element_system(square, "Pr", r)
    T = top_cell(A)
    assert BoundaryFamilies(A, T, 0).dim == 4 * r
    assert not has_extensions(A, T, 0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_extensions_for_standard_families(r):
    assert has_all_extensions(element_system(square, "Qr", r))
    assert has_all_extensions(element_system(RefCell("simplex", 2), "PrMinus", r))
    assert has_all_extensions(element_system(RefCell("simplex", 3), "Pr", r))


def test_small_pleasures_pre_system_lacks_extensions():
    A = element_system(square, "Pr", 2)
    assert not has_extensions(A, top_cell(A), 1)


def test_global_dims_on_meshes():
    A = FES.from_family(two_intervals(), "Pr", 1)
    assert global_space_dim(A, 0) == 3
    assert sum(A.zero_part(T, 0).dim for T in A.complex) == 3
    assert global_space_dim(A, 1) == 4
    Q = FES.from_family(two_squares(), "Qr", 1)
    assert [global_space_dim(Q, k) for k in range(3)] == [6, 14, 8]
    T = FES.from_family(two_triangles(), "Pr", 1)
    assert [global_space_dim(T, k) for k in range(3)] == [4, 10, 6]


@pytest.mark.parametrize("r", [1, 2, 3])
def test_continuous_tensor_counts(r):
    # continuous Q_r on a 2x1 and a 2x1x1 box: products of 1D nodal counts
    Q2 = FES.from_family(two_squares(), "Qr", r)
    assert global_space_dim(Q2, 0) == (2 * r + 1) * (r + 1)
    assert global_space_dim(Q2, 2) == 2 * (r + 1) ** 2
    Q3 = FES.from_family(two_cubes(), "Qr", r)
    assert global_space_dim(Q3, 0) == (2 * r + 1) * (r + 1) ** 2


def test_tensor_product_examples():
    I = element_system(RefCell("cube", 1), "Pr", 2)
    A = tensor_product(I, I)
    Q = element_system(square, "Qr", 2)
    for T, k, s in A.items():
        assert s == Q[T.label, k]
    P1 = element_system(RefCell("cube", 1), "Pr", 1)
    B = tensor_product(P1, P1)
    assert B[top_cell(B), 1].dim == 8
    W = element_system(RefCell("cube", 1), "PrMinus", 2)
    assert is_compatible(tensor_product(W, W))


def test_fes_rejects_bad_tables():
    A = element_system(square, "Pr", 1)
    T = top_cell(A)
    with pytest.raises(ValueError):
        FES(A.complex, {(T.label, 0): make_space(RefCell("cube", 3), 0, 1, "Pr")})
    spaces = {(S.label, k): s for S, k, s in A.items() if (S.label, k) != (T.label, 2)}
    with pytest.raises(ValueError):
        FES(A.complex, spaces)


def test_reference_complex_is_shared():
    assert reference_complex("cube", 2) is reference_complex("cube", 2)
    assert len(reference_complex("simplex", 3)) == 15
