"""Believes-assumes assumptions, the diagonal predicate and its fixpoints.

For relations ``ra: A -> B`` and ``rb: B -> A``, a state ``c`` of ``A``
satisfies the assumptions for a predicate ``p`` on ``A`` when

* A1: ``ra(c, y) and rb(y, x)`` implies ``p(x)``,
* A2: ``ra(c, y) and p(x)`` implies ``rb(y, x)``,
* A3: ``ra(c, y)`` for some ``y``,

i.e. ``c |= [ra][[rb]] p and <ra> true``. Under them ``p(c)`` coincides with
the diagonal predicate ``q(c) = exists y. ra(c, y) and rb(y, c)``, so taking
``p = O(q)`` makes ``q(c)`` a fixpoint of ``O``. Negation has no fixpoint,
hence no state ever satisfies the assumptions for ``not q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from bkfix import formula as fm
from bkfix import kernels
from bkfix.errors import InvariantViolation, PreconditionError, SortMismatch, StateOutOfRange
from bkfix.model import (
    BeliefCycle,
    BeliefStructure,
    Predicate,
    PredicateFamily,
    Relation,
    compose,
    compose_chain,
    diagonal,
)


@dataclass(frozen=True)
class PropOperator:
    """A unary operator on truth values, given by its table."""

    name: str
    at_false: bool
    at_true: bool

    def __call__(self, v: bool) -> bool:
        return self.at_true if v else self.at_false

    def fixpoints(self) -> list[bool]:
        return [v for v in (False, True) if self(v) == v]

    def is_monotone(self) -> bool:
        return not (self.at_false and not self.at_true)


IDENTITY = PropOperator("id", False, True)
CONST_FALSE = PropOperator("false", False, False)
CONST_TRUE = PropOperator("true", True, True)
NEGATION = PropOperator("not", True, False)
OPERATORS = {op.name: op for op in (IDENTITY, CONST_FALSE, CONST_TRUE, NEGATION)}

LABELS = ("A1", "A2", "A3")


def _rel(m: BeliefStructure, r) -> Relation:
    return r if isinstance(r, Relation) else m.relation(r)


def _pair(m, ra, rb):
    ra, rb = _rel(m, ra), _rel(m, rb)
    if ra.to_sort != rb.from_sort or rb.to_sort != ra.from_sort:
        raise SortMismatch(
            f"need ra: A->B and rb: B->A, got {ra.from_sort}->{ra.to_sort} "
            f"and {rb.from_sort}->{rb.to_sort}"
        )
    return ra, rb


def _check_state(c, size, sort):
    if not 0 <= c < size:
        raise StateOutOfRange(f"state {c} out of range for {sort} (size {size})")


def _check_pred(p: Predicate, sort, size):
    if (p.sort, p.size) != (sort, size):
        raise SortMismatch(f"predicate on {p.sort}, expected one on {sort}")


@dataclass(frozen=True)
class AssumptionCheck:
    a1: bool
    a2: bool
    a3: bool

    @property
    def holds(self) -> bool:
        return self.a1 and self.a2 and self.a3

    @property
    def failing(self) -> list[str]:
        return [label for label, ok in zip(LABELS, (self.a1, self.a2, self.a3)) if not ok]

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))


def q_predicate(m: BeliefStructure, ra, rb) -> Predicate:
    """Diagonal of ``ra ; rb``."""
    ra, rb = _pair(m, ra, rb)
    return diagonal(compose(ra, rb))


def check_bk_assumptions(m: BeliefStructure, ra, rb, p: Predicate, c: int) -> AssumptionCheck:
    ra, rb = _pair(m, ra, rb)
    _check_pred(p, ra.from_sort, ra.height)
    _check_state(c, ra.height, ra.from_sort)
    k = kernels.for_width(ra.width, rb.width)
    return AssumptionCheck(*k.bk_conjuncts(ra.rows, rb.rows, p.bits, c))


def assumption_formula(ra: str, rb: str, atom: str = "p") -> fm.Formula:
    """``[ra][[rb]] atom and <ra> true``."""
    return fm.And(fm.Box(ra, fm.BoxPlus(rb, fm.Atom(atom))), fm.Diamond(ra, fm.Top()))


@dataclass(frozen=True)
class LemmaCheck:
    """Both sides of the equivalence checked at one state."""

    lhs: bool
    rhs: bool

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def basic_lemma_verify(m: BeliefStructure, ra, rb, p: Predicate, c: int) -> LemmaCheck:
    """Check ``p(c) <=> q(c)`` at a state satisfying the assumptions.

    ``lhs`` is ``p(c)``, ``rhs`` is ``q(c)``. Raises ``PreconditionError``
    when the assumptions fail at ``c``.
    """
    check = check_bk_assumptions(m, ra, rb, p, c)
    if not check.holds:
        raise PreconditionError(
            f"assumptions fail at state {c} for {p}: {', '.join(check.failing)}"
        )
    q = q_predicate(m, ra, rb)
    return LemmaCheck(c in p, c in q)


def operator_predicate(m: BeliefStructure, ra, rb, op: PropOperator) -> Predicate:
    """``{x | op(q(x))}``, built without reference to any particular state."""
    q = q_predicate(m, ra, rb)
    bits = 0
    for x in range(q.size):
        if op(x in q):
            bits |= 1 << x
    return Predicate(q.sort, q.size, bits)


@dataclass(frozen=True)
class FixpointResult:
    value: bool
    state: int
    operator: PropOperator
    predicate: Predicate


def operator_fixpoint(m: BeliefStructure, ra, rb, op: PropOperator, c: int) -> FixpointResult:
    """The truth value ``q(c)``, a fixpoint of ``op``, when ``c`` satisfies
    the assumptions for ``op . q``."""
    p = operator_predicate(m, ra, rb, op)
    check = check_bk_assumptions(m, ra, rb, p, c)
    if not check.holds:
        raise PreconditionError(
            f"assumptions fail at state {c} for {op.name}(q) = {p}: {', '.join(check.failing)}"
        )
    v = c in q_predicate(m, ra, rb)
    if op(v) != v:
        raise InvariantViolation(f"{op.name}({v}) != {v} although the assumptions hold at {c}")
    return FixpointResult(v, c, op, p)


def find_assuming_state(m: BeliefStructure, ra, rb, p: Predicate) -> int | None:
    """Least state satisfying the assumptions for ``p``."""
    ra, rb = _pair(m, ra, rb)
    for c in range(ra.height):
        if check_bk_assumptions(m, ra, rb, p, c).holds:
            return c
    return None


@dataclass(frozen=True)
class DiagonalCertificate:
    q: Predicate
    d: Predicate
    searched: int
    witness_found: bool
    per_state_failure: tuple[tuple[str, ...], ...]
    d_in_class: bool = True
    witness: int | None = None

    def to_json(self) -> dict:
        return {
            "q": list(self.q.members),
            "D": list(self.d.members),
            "d_in_class": self.d_in_class,
            "searched": self.searched,
            "witness_found": self.witness_found,
            "witness": self.witness,
            "per_state_failure": {str(c): list(labels) for c, labels in enumerate(self.per_state_failure)},
        }


def diagonal_certificate(
    m: BeliefStructure, ra, rb, family: PredicateFamily | None = None
) -> DiagonalCertificate:
    """Show by exhaustion that no state satisfies the assumptions for ``not q``.

    With a ``family`` standing for the definable predicates, ``d_in_class``
    records whether ``not q`` belongs to it; if not, the impossibility
    argument does not apply even though the search is still reported.
    """
    ra, rb = _pair(m, ra, rb)
    q = q_predicate(m, ra, rb)
    d = q.complement()
    in_class = True
    if family is not None:
        _check_pred_family(family, ra.from_sort, ra.height)
        in_class = d in family
    failures = []
    witness = None
    for c in range(ra.height):
        check = check_bk_assumptions(m, ra, rb, d, c)
        failures.append(tuple(check.failing))
        if check.holds and witness is None:
            witness = c
    return DiagonalCertificate(
        q, d, ra.height, witness is not None, tuple(failures), in_class, witness
    )


def _check_pred_family(family, sort, size):
    if (family.sort, family.size) != (sort, size):
        raise SortMismatch(f"family on {family.sort}, expected one on {sort}")


# --- belief cycles ---------------------------------------------------------


def _cycle(m: BeliefStructure, cycle) -> tuple[list[str], list[Relation]]:
    if isinstance(cycle, str):
        cycle = m.cycle(cycle)
    if not isinstance(cycle, BeliefCycle):
        cycle = BeliefCycle(tuple(cycle))
    rels = m.cycle_relations(cycle)
    return list(cycle.relations), rels


def cycle_formulas(names: Sequence[str], atom: str = "p") -> tuple[fm.Formula, list[fm.Formula]]:
    """The assumes-chain ``[r1]..[rn][[r_{n+1}]] p`` and the seriality chains
    ``[r1]..[r_{k-1}]<r_k> true`` for ``k = 1..n``."""
    *believes, assumes = names
    chain: fm.Formula = fm.BoxPlus(assumes, fm.Atom(atom))
    for r in reversed(believes):
        chain = fm.Box(r, chain)
    serial = []
    for k in range(len(believes)):
        f: fm.Formula = fm.Diamond(believes[k], fm.Top())
        for r in reversed(believes[:k]):
            f = fm.Box(r, f)
        serial.append(f)
    return chain, serial


@dataclass(frozen=True)
class CycleCheck:
    assumes_chain: bool
    seriality: tuple[bool, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return self.assumes_chain and all(self.seriality)

    @property
    def failing(self) -> list[str]:
        out = [] if self.assumes_chain else ["assumes"]
        return out + [f"serial{k + 1}" for k, ok in enumerate(self.seriality) if not ok]


_P = "__p"


def generalized_assumptions_check(m: BeliefStructure, cycle, p: Predicate, c: int) -> CycleCheck:
    names, rels = _cycle(m, cycle)
    base = rels[0]
    _check_pred(p, base.from_sort, base.height)
    _check_state(c, base.height, base.from_sort)
    chain, serial = cycle_formulas(names, _P)
    atoms = {_P: p}
    ok_chain = fm.evaluate(fm.sort_check(chain, m, atoms=atoms), c)
    ok_serial = tuple(fm.evaluate(fm.sort_check(f, m, atoms=atoms), c) for f in serial)
    return CycleCheck(ok_chain, ok_serial)


def generalized_basic_lemma_verify(m: BeliefStructure, cycle, p: Predicate, c: int) -> LemmaCheck:
    """Check the vwps equation ``R(c, c) <=> p(c)`` for the composite ``R``
    of the cycle. ``lhs`` is ``R(c, c)``, ``rhs`` is ``p(c)``."""
    check = generalized_assumptions_check(m, cycle, p, c)
    if not check.holds:
        raise PreconditionError(
            f"generalized assumptions fail at state {c} for {p}: {', '.join(check.failing)}"
        )
    _, rels = _cycle(m, cycle)
    composite = compose_chain(rels)
    return LemmaCheck((c, c) in composite, c in p)
