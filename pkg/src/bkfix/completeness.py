"""Comprehension and the four completeness notions.

All searches report the least witnessing state, so reports are
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from bkfix.errors import SortMismatch
from bkfix.model import Predicate, PredicateFamily, Relation


@dataclass(frozen=True)
class WitnessReport:
    holds: bool
    witnesses: dict = field(default_factory=dict)  # Predicate -> least witness state
    failing_predicate: Predicate | None = None

    def __post_init__(self):
        if self.holds and self.failing_predicate is not None:
            raise ValueError("a holding report has no failing predicate")
        if not self.holds and (self.failing_predicate is None or self.witnesses):
            raise ValueError("a failing report names its failing predicate and nothing else")

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": {str(p): x for p, x in self.witnesses.items()},
            "failing_predicate": (
                list(self.failing_predicate.members) if self.failing_predicate is not None else None
            ),
        }


def _family_on(r: Relation, family, sort, size):
    if isinstance(family, PredicateFamily):
        preds = family.predicates
        fam_sort, fam_size = family.sort, family.size
    else:
        preds = tuple(family)
        fam_sort, fam_size = sort, size
    if (fam_sort, fam_size) != (sort, size):
        raise SortMismatch(f"family on {fam_sort} but relation targets {sort}")
    for p in preds:
        if (p.sort, p.size) != (sort, size):
            raise SortMismatch(f"predicate on {p.sort} but relation targets {sort}")
    return preds


def _search(preds, find) -> WitnessReport:
    witnesses = {}
    for p in preds:
        x = find(p.bits)
        if x < 0:
            return WitnessReport(False, {}, p)
        witnesses[p] = x
    return WitnessReport(True, witnesses)


def _require_endogenous(r: Relation):
    if not r.is_endogenous():
        raise SortMismatch(f"needs an endogenous relation, got {r.from_sort}->{r.to_sort}")


def boxplus_set(r: Relation, p: Predicate) -> Predicate:
    """States whose image is exactly ``p``."""
    if (p.sort, p.size) != (r.to_sort, r.width):
        raise SortMismatch(f"predicate on {p.sort} but relation targets {r.to_sort}")
    return Predicate(r.from_sort, r.height, r.kernel().boxplus_mask(r.rows, p.bits))


def box_set(r: Relation, p: Predicate) -> Predicate:
    """States whose image is contained in ``p``."""
    if (p.sort, p.size) != (r.to_sort, r.width):
        raise SortMismatch(f"predicate on {p.sort} but relation targets {r.to_sort}")
    return Predicate(r.from_sort, r.height, r.kernel().box_mask(r.rows, p.bits))


def is_assumption_complete(r: Relation, family) -> WitnessReport:
    preds = _family_on(r, family, r.to_sort, r.width)
    k = r.kernel()
    return _search(preds, lambda bits: k.first_equal(r.rows, bits))


def is_belief_complete(r: Relation, family) -> WitnessReport:
    preds = _family_on(r, family, r.to_sort, r.width)
    k = r.kernel()
    return _search(preds, lambda bits: k.first_believing(r.rows, bits))


def is_wps(r: Relation, family) -> WitnessReport:
    """Every predicate is represented pointwise: some x has R(x, y) <=> p(y)
    for all y."""
    _require_endogenous(r)
    preds = _family_on(r, family, r.to_sort, r.width)
    k = r.kernel()
    return _search(preds, lambda bits: k.first_representing(r.rows, bits, r.width))


def is_vwps(r: Relation, family) -> WitnessReport:
    """Every predicate agrees with the diagonal of ``r`` at some point."""
    _require_endogenous(r)
    preds = _family_on(r, family, r.to_sort, r.width)
    k = r.kernel()
    return _search(preds, lambda bits: k.first_diag_match(r.rows, bits))
