"""Gluing belief relations.

``composition_lemma_check`` evaluates the three hypotheses under which
``r_ab ; r_bc`` inherits assumption-completeness, and the conclusion itself.
``characterize_belief_completeness`` decides belief-completeness and, when
it fails, builds the two-point characteristic-function relation that
breaks assumption-completeness of the composite.
"""

from __future__ import annotations

from dataclasses import dataclass

from bkfix.completeness import (
    WitnessReport,
    boxplus_set,
    is_assumption_complete,
    is_belief_complete,
)
from bkfix.errors import InvariantViolation, PreconditionError, SortMismatch, ValidationError
from bkfix.model import Predicate, PredicateFamily, Relation, compose

CHI_SORT = "C"
# state 1 of the two-point carrier means "inside p"
INSIDE, OUTSIDE = 1, 0


def _require_nonempty(family: PredicateFamily, label: str):
    for p in family:
        if p.is_empty():
            raise ValidationError(f"empty predicate in {label}; predicates here must be non-empty")


@dataclass(frozen=True)
class ComprehensionItem:
    predicate: Predicate   # p in P(C)
    boxplus: Predicate     # states of B assuming p
    in_family: bool


@dataclass(frozen=True)
class CompositionReport:
    hypothesis_1: WitnessReport            # r_ab belief-complete for P(B)
    hypothesis_2: WitnessReport            # r_bc assumption-complete for P(C)
    hypothesis_3: tuple[ComprehensionItem, ...]
    conclusion: WitnessReport              # r_ab ; r_bc assumption-complete for P(C)
    composite: Relation

    @property
    def comprehension_holds(self) -> bool:
        return all(item.in_family for item in self.hypothesis_3)

    @property
    def hypotheses_hold(self) -> bool:
        return self.hypothesis_1.holds and self.hypothesis_2.holds and self.comprehension_holds

    @property
    def consistent(self) -> bool:
        return not self.hypotheses_hold or self.conclusion.holds

    def to_json(self) -> dict:
        return {
            "hypothesis_1": self.hypothesis_1.to_json(),
            "hypothesis_2": self.hypothesis_2.to_json(),
            "hypothesis_3": {
                "verdict": "holds" if self.comprehension_holds else "fails",
                "items": [
                    {
                        "predicate": list(i.predicate.members),
                        "boxplus": list(i.boxplus.members),
                        "in_family": i.in_family,
                    }
                    for i in self.hypothesis_3
                ],
            },
            "conclusion": self.conclusion.to_json(),
            "consistent": self.consistent,
        }


def composition_lemma_check(
    r_ab: Relation,
    r_bc: Relation,
    family_b: PredicateFamily,
    family_c: PredicateFamily,
    strict: bool = True,
) -> CompositionReport:
    """Evaluate all hypotheses and the conclusion.

    With ``strict`` a report whose hypotheses hold but whose conclusion fails
    raises ``InvariantViolation``; such a report would contradict the lemma.
    """
    if r_ab.to_sort != r_bc.from_sort or r_ab.width != r_bc.height:
        raise SortMismatch(
            f"cannot chain {r_ab.from_sort}->{r_ab.to_sort} with {r_bc.from_sort}->{r_bc.to_sort}"
        )
    _require_nonempty(family_b, "P(B)")
    _require_nonempty(family_c, "P(C)")
    h1 = is_belief_complete(r_ab, family_b)
    h2 = is_assumption_complete(r_bc, family_c)
    items = []
    for p in family_c:
        box = boxplus_set(r_bc, p)
        items.append(ComprehensionItem(p, box, box in family_b))
    composite = compose(r_ab, r_bc)
    report = CompositionReport(h1, h2, tuple(items), is_assumption_complete(composite, family_c), composite)
    if strict and not report.consistent:
        raise InvariantViolation("composition hypotheses hold but the composite is not assumption-complete")
    return report


def characteristic_relation(p: Predicate, chi_sort: str = CHI_SORT) -> Relation:
    """``S: B -> {0, 1}`` sending members of ``p`` to 1 and the rest to 0."""
    rows = tuple(1 << (INSIDE if x in p else OUTSIDE) for x in range(p.size))
    return Relation(p.sort, chi_sort, rows, 2)


def chi_family(chi_sort: str = CHI_SORT) -> PredicateFamily:
    return PredicateFamily(chi_sort, 2, (Predicate(chi_sort, 2, 1 << INSIDE),), True)


@dataclass(frozen=True)
class Counterexample:
    relation: Relation            # the r under test, A -> B
    predicate: Predicate          # p, not believed by any serial state
    s: Relation                   # characteristic function of p, B -> C
    family_c: PredicateFamily     # {{1}}
    composite: Relation           # r ; s
    s_witness: int                # a state of B assuming {1}
    evidence: tuple               # per x in A: ("empty_image",) or ("escaping_y", y)

    @property
    def c_size(self) -> int:
        return 2

    def to_json(self) -> dict:
        evidence = []
        for x, ev in enumerate(self.evidence):
            if ev[0] == "empty_image":
                evidence.append({"state": x, "reason": "empty_image"})
            else:
                evidence.append({"state": x, "reason": "escaping_y", "escaping_y": ev[1]})
        return {
            "predicate": list(self.predicate.members),
            "C": self.c_size,
            "S": [list(pair) for pair in self.s.pairs()],
            "P_C": [list(q.members) for q in self.family_c],
            "composite": [list(pair) for pair in self.composite.pairs()],
            "S_witness": self.s_witness,
            "evidence": evidence,
        }


def belief_incompleteness_counterexample(r: Relation, p: Predicate) -> Counterexample:
    """Certificate that ``r`` is not belief-complete for ``{p}``.

    Builds the characteristic relation ``S`` of ``p`` and checks that ``S`` is
    assumption-complete for ``{{1}}`` while ``r ; S`` is not.
    """
    if (p.sort, p.size) != (r.to_sort, r.width):
        raise SortMismatch(f"predicate on {p.sort} but relation targets {r.to_sort}")
    if p.is_empty():
        raise ValidationError("predicate must be non-empty")
    if is_belief_complete(r, [p]).holds:
        raise PreconditionError(f"relation is belief-complete for {p}")

    s = characteristic_relation(p)
    fam = chi_family()
    s_report = is_assumption_complete(s, fam)
    composite = compose(r, s)
    comp_report = is_assumption_complete(composite, fam)
    if not s_report.holds or comp_report.holds:
        raise InvariantViolation("characteristic-function counterexample does not verify")

    evidence = []
    for x, row in enumerate(r.rows):
        if row == 0:
            evidence.append(("empty_image",))
            continue
        escaping = row & ~p.bits
        # not believing p with a non-empty image means some successor escapes p
        y = (escaping & -escaping).bit_length() - 1
        evidence.append(("escaping_y", y))
    return Counterexample(r, p, s, fam, composite, s_report.witnesses[fam.predicates[0]], tuple(evidence))


@dataclass(frozen=True)
class Characterization:
    complete: bool
    report: WitnessReport
    counterexample: Counterexample | None = None

    @property
    def verdict(self) -> str:
        return "complete" if self.complete else "incomplete"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": self.report.to_json()["witnesses"],
            "counterexample": self.counterexample.to_json() if self.counterexample else None,
        }


def characterize_belief_completeness(r: Relation, family_b: PredicateFamily) -> Characterization:
    _require_nonempty(family_b, "P(B)")
    report = is_belief_complete(r, family_b)
    if report.holds:
        return Characterization(True, report)
    return Characterization(False, report, belief_incompleteness_counterexample(r, report.failing_predicate))
