"""Dedekind zeta functions, ideal-norm sieves and the measures m_q(f) over number fields."""

__version__ = "0.1.0"

from .fields import (FieldInvariants, FieldKind, KappaMethod, NumberField, make_monogenic, make_quadratic,
                     parse_field_spec, rational_field)
from .measures import TestFunction, error_curve, exponent_fit, m_limit, m_q
from .sieve import CoeffTable, SieveTables, TableKind, build_table, build_tables
from .zeta import compute_invariants, residue_kappa, zeta_K

__all__ = [
    "CoeffTable", "FieldInvariants", "FieldKind", "KappaMethod", "NumberField", "SieveTables", "TableKind",
    "TestFunction", "build_table", "build_tables", "compute_invariants", "error_curve", "exponent_fit",
    "m_limit", "m_q", "make_monogenic", "make_quadratic", "parse_field_spec", "rational_field",
    "residue_kappa", "zeta_K",
]
