"""Believes/assumes structures, completeness checks and fixpoint certificates."""

from bkfix.completeness import (
    WitnessReport,
    box_set,
    boxplus_set,
    is_assumption_complete,
    is_belief_complete,
    is_vwps,
    is_wps,
)
from bkfix.errors import BKError
from bkfix.formula import evaluate, extension, parse_formula, sort_check
from bkfix.kernels import BACKEND
from bkfix.model import (
    BeliefCycle,
    BeliefStructure,
    Predicate,
    PredicateFamily,
    Relation,
    compose,
    diagonal,
    dump_model,
    image,
    load_model,
    load_model_file,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BKError",
    "BeliefCycle",
    "BeliefStructure",
    "Predicate",
    "PredicateFamily",
    "Relation",
    "WitnessReport",
    "box_set",
    "boxplus_set",
    "compose",
    "diagonal",
    "dump_model",
    "evaluate",
    "extension",
    "image",
    "is_assumption_complete",
    "is_belief_complete",
    "is_vwps",
    "is_wps",
    "load_model",
    "load_model_file",
    "parse_formula",
    "sort_check",
]
