"""Modular invariants of modular tensor categories and their relative tensor product."""
__version__ = "0.1.0"

from .numerics import Precision, DEFAULT_PRECISION
from .modular_data import (
    ModularDatum, FusionTensor, su2_data, trivial_datum, toric_code_datum,
    opposite, validate, verlinde, save_datum, load_datum,
)
from .invariants import (
    ModularInvariant, Library, t_support, commutant_basis, entry_bound,
    weighted_sum_identity, classify, classify_physical,
)
from .fusion import (
    FusionOutcome, product, decompose, fuse, fusion_table, associativity_audit,
)
