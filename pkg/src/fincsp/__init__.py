"""Finite-template homomorphism problems: structures, clones, congruence
types, homomorphism enumerators and solvers."""

from .structure import Congruence, Signature, Structure
from .finstr import dump_structure, load_structure, parse_structure, serialize_structure
from .homs import count_homs, enumerate_homs, find_hom, hom_exists, is_homomorphism

__version__ = "0.1.0"

__all__ = [
    "Congruence",
    "Signature",
    "Structure",
    "count_homs",
    "dump_structure",
    "enumerate_homs",
    "find_hom",
    "hom_exists",
    "is_homomorphism",
    "load_structure",
    "parse_structure",
    "serialize_structure",
]
