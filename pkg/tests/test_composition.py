import pytest

import oracle
from bkfix import composition as cp
from bkfix.errors import PreconditionError, SortMismatch, ValidationError
from bkfix.model import Predicate, PredicateFamily, Relation, compose, identity


def test_identity_then_rb(m1):
    rep = cp.composition_lemma_check(
        identity("Ub", 2), m1.relation("Rb"), m1.family("single_b"), m1.family("single_a")
    )
    assert rep.hypotheses_hold
    assert rep.conclusion.holds


def test_ra_then_rb_fails_first_hypothesis(m1):
    rep = cp.composition_lemma_check(
        m1.relation("Ra"), m1.relation("Rb"), m1.family("single_b"), m1.family("single_a")
    )
    assert not rep.hypothesis_1.holds
    assert rep.hypothesis_1.failing_predicate.members == (0,)
    assert rep.consistent


def test_composition_input_checks(m1):
    with pytest.raises(SortMismatch):
        cp.composition_lemma_check(m1.relation("Ra"), m1.relation("Ra"), m1.family("single_b"), m1.family("single_b"))
    empty = PredicateFamily.of("Ub", 2, [[]])
    with pytest.raises(ValidationError):
        cp.composition_lemma_check(m1.relation("Ra"), m1.relation("Rb"), empty, m1.family("single_a"))


def test_characteristic_relation():
    p = Predicate.from_members("B", 3, [0, 2])
    s = cp.characteristic_relation(p)
    assert s.pairs() == [(0, 1), (1, 0), (2, 1)]
    assert [q.members for q in cp.chi_family()] == [(1,)]


def test_belief_completeness_m1(m1):
    assert cp.characterize_belief_completeness(m1.relation("Ra"), m1.family("one_b")).complete
    result = cp.characterize_belief_completeness(m1.relation("Ra"), m1.family("zero_b"))
    assert result.verdict == "incomplete"
    cx = result.counterexample
    assert cx.to_json()["S"] == [[0, 1], [1, 0]]
    assert cx.to_json()["P_C"] == [[1]]
    assert cx.s_witness == 0


def test_counterexample_preconditions(m1):
    with pytest.raises(PreconditionError):
        cp.belief_incompleteness_counterexample(m1.relation("Ra"), Predicate.from_members("Ub", 2, [1]))
    with pytest.raises(ValidationError):
        cp.belief_incompleteness_counterexample(m1.relation("Ra"), Predicate("Ub", 2, 0))


def test_counterexample_evidence_is_accurate():
    r = Relation.from_pairs("A", 3, "B", 2, [(0, 0), (0, 1), (2, 1)])
    p = Predicate.from_members("B", 2, [0])
    cx = cp.belief_incompleteness_counterexample(r, p)
    assert cx.evidence == (("escaping_y", 1), ("empty_image",), ("escaping_y", 1))
    comp = oracle.compose(oracle.pairs_of(r), oracle.pairs_of(cx.s))
    assert comp == set(compose(r, cx.s).pairs())
    assert not oracle.assumption_complete(comp, 3, [{1}])
