"""Exact computations with polynomial differential forms and minimal compatible finite element systems."""

from .cells import CellComplex, RefCell, two_cubes, two_intervals, two_squares, two_triangles
from .construct import (
    InnerProduct,
    NoExtension,
    PreconditionError,
    build_mcfes,
    build_tnt,
    default_ambient,
    exactify,
    extend_to_compatible,
    harmonic_extension,
    mixed_extension,
    tnt_generators,
)
from .fes import FES, element_system, global_space_dim, has_extensions, is_element_system
from .homology import (
    cell_cohomology,
    hk_closed_form,
    is_compatible,
    minimal_dims,
    small_pleasures_dim,
    table1,
)
from .polyforms import AffineMap, PolyForm, Polynomial
from .spaces import FormBasis, FormSpace, make_space

__version__ = "0.1.0"
