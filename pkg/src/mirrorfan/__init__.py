"""Stacky fans, tropical spines, FLTZ skeleta and patchworked amoebas."""

from .cli import load_fixture
from .fan import (
    PLFunction,
    StackyFan,
    boundary_cover,
    is_quasiprojective,
    knutson_construct,
    quotient_fan,
    validate,
    wedge,
)
from .lattice import quotient_group, smith_normal_form, solve_integer
from .polyhedra import Cone, LatticePolytope, dual_cone, hilbert_basis
from .skeleton import build_skeleton, sector_cover, subtorus_intersections
from .spine import bounded_component, dual_complex, legendre, poset_antiequivalence

__all__ = [
    "Cone",
    "LatticePolytope",
    "PLFunction",
    "StackyFan",
    "boundary_cover",
    "bounded_component",
    "build_skeleton",
    "dual_complex",
    "dual_cone",
    "hilbert_basis",
    "is_quasiprojective",
    "knutson_construct",
    "legendre",
    "load_fixture",
    "poset_antiequivalence",
    "quotient_fan",
    "quotient_group",
    "sector_cover",
    "smith_normal_form",
    "solve_integer",
    "subtorus_intersections",
    "validate",
    "wedge",
]
