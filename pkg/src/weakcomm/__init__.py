"""Weak commutativity groups of small finite groups.

Builds the group generated by two commuting-by-pairs copies of a finite
group, extracts its canonical subgroups and maps, and checks the exponent,
class, and order laws they satisfy, over a corpus of small groups.
"""

from .catalogue import standard_presentation, resolve_group_name
from .cayley import CayleyElement, CayleyTable, RegularGroup, element_words, table_to_perm_group
from .chi import ChiGroup, build_chi, chi_presentation, exterior_square_order, kernel_section, schur_multiplier
from .coset import CosetTable, todd_coxeter
from .groups import (
    Homomorphism,
    PermGroup,
    SubgroupHandle,
    TupleElement,
    center,
    closure,
    commutator_subgroup,
    derived_length,
    direct_product,
    exponent,
    hom_kernel,
    intersect,
    nilpotency_class,
    quotient,
    series,
    subgroup,
)
from .permutation import Permutation, commutator, compose, conjugate
from .words import Presentation, Word, parse_presentation

__version__ = "0.1.0"
