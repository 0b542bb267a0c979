"""Finite DR-semigroups, ample partial categories and the constructions between them."""
from .core import (
    CheckReport,
    FiniteBiunarySemigroup,
    NoSmallestProjection,
    PreconditionError,
    Relation,
    TheoremViolation,
    Witness,
    check_ample,
    check_associativity,
    check_cat_semigroup,
    check_congruence_conditions,
    check_dr_axioms,
    check_generalized_ample,
    check_monotone,
    check_projections_commute,
    check_trace_cat,
    derive_dr_from_e,
)
from .esn import AmplePartialCategory, derive_CS, pseudoproduct
from .pcat import FinitePartialCategory, check_category, check_partial_category, is_category

__all__ = [
    "AmplePartialCategory",
    "CheckReport",
    "FiniteBiunarySemigroup",
    "FinitePartialCategory",
    "NoSmallestProjection",
    "PreconditionError",
    "Relation",
    "TheoremViolation",
    "Witness",
    "check_ample",
    "check_associativity",
    "check_cat_semigroup",
    "check_category",
    "check_congruence_conditions",
    "check_dr_axioms",
    "check_generalized_ample",
    "check_monotone",
    "check_partial_category",
    "check_projections_commute",
    "check_trace_cat",
    "derive_CS",
    "derive_dr_from_e",
    "is_category",
    "pseudoproduct",
]
