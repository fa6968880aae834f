"""Dynamics of g(z^d) over F_p(t) and over finite fields."""

from __future__ import annotations

from .family import (
    CharPFamily,
    CriticalSet,
    CritStatus,
    FamilyTestResult,
    FamilyVerdict,
    FFLambda,
    HypothesisViolation,
    ScanRow,
    Specialization,
    charp_critical_points,
    ff_crit_lambda,
    ff_family_pcf_test,
    ff_green,
    postcritical_set,
    postcritical_size,
    specialization_scan,
    theorem2_check,
)
from .ffrat import FFPlace, FFRat, ff_abs_log, infinity, product_formula_sum, support_places
from .fq import MODULUS_TABLE, FqElem, FqField, field

__all__ = [
    "CharPFamily", "CriticalSet", "CritStatus", "FamilyTestResult", "FamilyVerdict", "FFLambda",
    "HypothesisViolation", "ScanRow", "Specialization", "charp_critical_points", "ff_crit_lambda",
    "ff_family_pcf_test", "ff_green", "postcritical_set", "postcritical_size", "specialization_scan",
    "theorem2_check", "FFPlace", "FFRat", "ff_abs_log", "infinity", "product_formula_sum",
    "support_places", "MODULUS_TABLE", "FqElem", "FqField", "field",
]
