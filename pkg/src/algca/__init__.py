"""Exact computation with cellular automata whose local rules are polynomial maps.

Groups are Z^d or explicit finite groups; alphabets are point sets of
varieties over F_p, finite symbol tables, or affine spaces over Q.
"""

__version__ = "0.1.0"

from .alphabets import (RationalAffineAlphabet, RegularMap, TableAlphabet, VarietyAlphabet, affine_line,
                        enumerate_points, polynomial_rule, projective_line, projective_rule, table_rule)
from .ca import (CellularAutomaton, WindowPattern, apply_window, compose, identity_ca, make_ca,
                 minimal_memory, pad_memory, restrict, same_semantics, shift_ca)
from .decide import decide_1d
from .fields import QQ, PrimeField
from .groups import CosetSpace, FiniteGroup, FreeAbelian, diagonal, sublattice
from .periodic import (build_tilde, certify_inverse, conjugation_check, injectivity_scan, rho,
                       surjectivity_scan, synthesize_inverse)
from .rulefile import load_rule_file, parse_rule_file, serialize

__all__ = [
    "QQ", "PrimeField", "FreeAbelian", "FiniteGroup", "CosetSpace", "diagonal", "sublattice",
    "VarietyAlphabet", "TableAlphabet", "RationalAffineAlphabet", "RegularMap", "affine_line",
    "enumerate_points", "projective_line", "polynomial_rule", "projective_rule", "table_rule",
    "CellularAutomaton", "WindowPattern", "make_ca", "identity_ca", "shift_ca", "apply_window",
    "compose", "restrict", "minimal_memory", "pad_memory", "same_semantics", "decide_1d",
    "rho", "build_tilde", "conjugation_check", "injectivity_scan", "surjectivity_scan",
    "synthesize_inverse", "certify_inverse", "parse_rule_file", "load_rule_file", "serialize",
]
