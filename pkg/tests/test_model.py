import json

import pytest

import oracle
from bkfix.errors import ModelParseError, SortMismatch, StateOutOfRange, UnknownName, ValidationError
from bkfix.model import (
    Predicate,
    PredicateFamily,
    Relation,
    compose,
    compose_chain,
    diagonal,
    dump_model,
    identity,
    image,
    load_model,
)
from bkfix.sweeps import all_relations


def test_m1_loads_with_two_belief_relations(m1):
    assert m1.sorts == {"Ua": 2, "Ub": 2}
    assert m1.relation("Ra").pairs() == [(0, 0), (0, 1), (1, 1)]
    assert m1.relation("Rb").pairs() == [(0, 0), (1, 1)]


def test_round_trip_is_stable(m1):
    text = dump_model(m1)
    again = load_model(text)
    assert again == m1
    assert dump_model(again) == text


def test_images_in_m1(m1):
    assert image(m1.relation("Ra"), 0).members == (0, 1)
    assert image(m1.relation("Rb"), 1).members == (1,)


def test_compose_and_diagonal_in_m1(m1):
    comp = compose(m1.relation("Ra"), m1.relation("Rb"))
    assert comp.pairs() == [(0, 0), (0, 1), (1, 1)]
    assert diagonal(comp).members == (0, 1)


def test_compose_matches_triple_loop():
    rels = list(all_relations("A", 2, "A", 2))
    for r in rels:
        for s in rels:
            expected = oracle.compose(oracle.pairs_of(r), oracle.pairs_of(s))
            assert set(compose(r, s).pairs()) == expected


def test_compose_rejects_unchained_sorts(m1):
    with pytest.raises(SortMismatch):
        compose(m1.relation("Ra"), m1.relation("Ra"))


def test_diagonal_needs_endogenous(m1):
    with pytest.raises(SortMismatch):
        diagonal(m1.relation("Ra"))


def test_compose_chain_of_identity_is_identity():
    i = identity("A", 3)
    assert compose_chain([i, i, i]) == i
    with pytest.raises(ValueError):
        compose_chain([])


def test_image_out_of_range(m1):
    with pytest.raises(StateOutOfRange):
        image(m1.relation("Ra"), 2)


def test_predicate_algebra():
    p = Predicate.from_members("A", 3, [0, 2])
    q = Predicate.from_members("A", 3, [1, 2])
    assert (p & q).members == (2,)
    assert (p | q).members == (0, 1, 2)
    assert p.complement().members == (1,)
    assert str(p) == "{0,2}"
    with pytest.raises(SortMismatch):
        p & Predicate.from_members("B", 3, [])
    with pytest.raises(ValidationError):
        Predicate.from_members("A", 2, [2])


def test_relation_from_pairs_validates():
    assert Relation.from_pairs("A", 2, "B", 1, [(1, 0)]).rows == (0, 1)
    with pytest.raises(ValidationError):
        Relation.from_pairs("A", 2, "B", 1, [(0, 1)])


def test_family_dedupes_and_keeps_order():
    fam = PredicateFamily.of("A", 2, [[1], [0], [1]])
    assert [p.members for p in fam] == [(1,), (0,)]
    with pytest.raises(ValidationError):
        PredicateFamily.of("A", 2, [[]], require_nonempty=True)


def test_unknown_names(m1):
    for getter in (m1.relation, m1.predicate, m1.family, m1.cycle, m1.size):
        with pytest.raises(UnknownName):
            getter("nope")


BASE = {"sorts": {"A": 1}, "relations": {"R": {"from": "A", "to": "A", "pairs": [[0, 0]]}}}


def _doc(**patch):
    doc = json.loads(json.dumps(BASE))
    doc.update(patch)
    return json.dumps(doc)


@pytest.mark.parametrize(
    "text, where",
    [
        (_doc(extra=1), "$"),
        (_doc(sorts={"A": -1}), "sorts.A"),
        (_doc(sorts={"A": 1.0}), "sorts.A"),
        (_doc(sorts={"A": True}), "sorts.A"),
        (_doc(relations={"R": {"from": "B", "to": "A", "pairs": []}}), "relations.R.from"),
        (_doc(relations={"R": {"from": "A", "to": "A", "pairs": [[0, 1]]}}), "relations.R.pairs[0]"),
        (_doc(relations={"R": {"from": "A", "to": "A", "pairs": [[0]]}}), "relations.R.pairs[0]"),
        (_doc(predicates={"p": {"sort": "A", "members": [3]}}), "predicates.p.members[0]"),
        (_doc(families={"F": {"sort": "A", "nonempty": True, "predicates": [[]]}}), "families.F.predicates[0]"),
        (_doc(cycles={"c": []}), "cycles.c"),
    ],
)
def test_bad_documents_report_a_path(text, where):
    with pytest.raises((ModelParseError, ValidationError)) as info:
        load_model(text)
    assert info.value.path == where


def test_cycle_must_typecheck():
    text = _doc(sorts={"A": 1, "B": 1}, cycles={"c": ["R", "S"]}, relations={
        "R": {"from": "A", "to": "B", "pairs": []},
        "S": {"from": "A", "to": "B", "pairs": []},
    })
    with pytest.raises((ValidationError, SortMismatch)):
        load_model(text)


@pytest.mark.parametrize(
    "text",
    [b"{", b'{"sorts": {}, "sorts": {}, "relations": {}}', b"\xff\xfe", b"[]"],
)
def test_malformed_documents(text):
    with pytest.raises((ModelParseError, ValidationError)):
        load_model(text)


def test_parse_error_position():
    with pytest.raises(ModelParseError) as info:
        load_model('{\n  "sorts": }')
    assert info.value.line == 2
