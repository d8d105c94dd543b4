from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from bkfix import fixpoint as fx
from bkfix import formula as fm
from bkfix.completeness import is_assumption_complete, is_wps
from bkfix.model import BeliefStructure, Predicate, Relation, compose, dump_model, load_model


@st.composite
def relations(draw, from_sort="A", to_sort="A", n_from=None, n_to=None):
    n_from = draw(st.integers(0, 5)) if n_from is None else n_from
    n_to = draw(st.integers(0, 5)) if n_to is None else n_to
    rows = tuple(draw(st.integers(0, (1 << n_to) - 1)) for _ in range(n_from))
    return Relation(from_sort, to_sort, rows, n_to)


@st.composite
def two_sorted(draw, max_size=5):
    na = draw(st.integers(1, max_size))
    nb = draw(st.integers(1, max_size))
    ra = draw(relations("Ua", "Ub", na, nb))
    rb = draw(relations("Ub", "Ua", nb, na))
    p = Predicate("Ua", na, draw(st.integers(0, (1 << na) - 1)))
    q = Predicate("Ub", nb, draw(st.integers(0, (1 << nb) - 1)))
    return BeliefStructure({"Ua": na, "Ub": nb}, {"Ra": ra, "Rb": rb}, {"p": p, "q": q})


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(*(relations(n_from=n, n_to=n) for _ in range(3)))))
def test_composition_is_associative(rels):
    r, s, t = rels
    assert compose(compose(r, s), t) == compose(r, compose(s, t))


@given(two_sorted())
def test_basic_lemma_on_random_structures(m):
    n = m.size("Ua")
    q = fx.q_predicate(m, "Ra", "Rb")
    for bits in range(1 << n):
        p = Predicate("Ua", n, bits)
        for c in range(n):
            if fx.check_bk_assumptions(m, "Ra", "Rb", p, c).holds:
                assert (c in p) == (c in q)


@given(two_sorted())
def test_diagonal_predicate_never_assumed(m):
    assert not fx.diagonal_certificate(m, "Ra", "Rb").witness_found


@given(two_sorted())
def test_model_round_trip(m):
    assert load_model(dump_model(m)) == m


@given(st.integers(1, 5).flatmap(lambda n: relations(n_from=n, n_to=n)))
def test_wps_against_full_powerset_fails(r):
    n = r.height
    fam = [Predicate("A", n, b) for b in range(1 << n)]
    assert not is_wps(r, fam).holds
    assert is_wps(r, fam).holds == is_assumption_complete(r, fam).holds


def formulas():
    leaves = st.sampled_from([fm.Top(), fm.Bottom(), fm.Atom("p")])

    def extend(children):
        return st.one_of(
            st.builds(fm.Not, children),
            st.builds(fm.And, children, children),
            st.builds(fm.Or, children, children),
        )

    return st.recursive(leaves, extend, max_leaves=6)


def _on(sort, body):
    """Rename atom p to the predicate living on ``sort``."""
    name = "p" if sort == "Ua" else "q"
    if isinstance(body, fm.Atom):
        return fm.Atom(name)
    if isinstance(body, fm.Not):
        return fm.Not(_on(sort, body.body))
    if isinstance(body, (fm.And, fm.Or)):
        return type(body)(_on(sort, body.left), _on(sort, body.right))
    return body


@st.composite
def sorted_formulas(draw):
    """A formula on Ua of modal depth up to two, alternating Ra and Rb."""
    m = draw(two_sorted(4))
    modal = st.sampled_from([fm.Box, fm.Diamond, fm.BoxPlus])
    depth = draw(st.integers(0, 2))
    f = _on("Ua" if depth != 1 else "Ub", draw(formulas()))
    if depth == 2:
        f = draw(modal)("Rb", f)
    if depth >= 1:
        f = draw(modal)("Ra", f)
    if draw(st.booleans()):
        f = fm.Or(fm.Atom("p"), f)
    return m, f


@settings(max_examples=200)
@given(sorted_formulas())
def test_pointwise_and_setwise_semantics_agree(case):
    m, f = case
    sf = fm.sort_check(f, m, hint="Ua")
    ext = fm.extension(sf)
    for x in range(sf.size):
        expected = oracle.eval_formula(f, m, "Ua", x)
        assert fm.evaluate(sf, x) == expected == (x in ext)


@given(formulas())
def test_print_parse_round_trip(f):
    assert fm.parse_formula(str(f)) == f
