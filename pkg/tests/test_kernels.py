import random

import pytest

import oracle
from bkfix import kernels
from bkfix import _pykernels as python
from bkfix.completeness import is_assumption_complete
from bkfix.model import Predicate, PredicateFamily, Relation
from bkfix.sweeps import all_relations


def _rows(pairs, n_from):
    rows = [0] * n_from
    for x, y in pairs:
        rows[x] |= 1 << y
    return rows


def _bits(s):
    return sum(1 << x for x in s)


def test_primitives_match_oracle(backend):
    for r in all_relations("A", 2, "A", 2):
        pairs = oracle.pairs_of(r)
        rows = list(r.rows)
        assert backend.diagonal_mask(rows) == _bits(oracle.diagonal(pairs, 2))
        for s in all_relations("A", 2, "A", 2):
            assert backend.compose_rows(rows, list(s.rows)) == _rows(oracle.compose(pairs, oracle.pairs_of(s)), 2)
        for p in oracle.all_subsets(2):
            pb = _bits(p)
            assert backend.boxplus_mask(rows, pb) == _bits(oracle.boxplus(pairs, 2, p))
            assert backend.box_mask(rows, pb) == _bits(oracle.box(pairs, 2, p))
            assert backend.diamond_mask(rows, pb) == _bits(oracle.diamond(pairs, 2, p))
            assert (backend.first_equal(rows, pb) >= 0) == oracle.assumption_complete(pairs, 2, [p])
            assert (backend.first_believing(rows, pb) >= 0) == oracle.belief_complete(pairs, 2, [p])
            assert (backend.first_representing(rows, pb, 2) >= 0) == oracle.wps(pairs, 2, 2, [p])
            assert (backend.first_diag_match(rows, pb) >= 0) == oracle.vwps(pairs, 2, [p])


def test_conjuncts_match_oracle(backend):
    for ra in all_relations("A", 2, "B", 2):
        for rb in all_relations("B", 2, "A", 2):
            ra_p, rb_p = oracle.pairs_of(ra), oracle.pairs_of(rb)
            for p in oracle.all_subsets(2):
                for c in range(2):
                    got = tuple(bool(v) for v in backend.bk_conjuncts(list(ra.rows), list(rb.rows), _bits(p), c))
                    assert got == oracle.bk_conjuncts(ra_p, rb_p, p, c, 2)


@pytest.mark.parametrize("bounds", [(1, 2), (2, 2), (2, 1)])
def test_sweeps_agree_across_backends(bounds):
    if kernels.compiled is None:
        pytest.skip("compiled kernels not built")
    assert kernels.compiled.sweep_basic_lemma(*bounds) == python.sweep_basic_lemma(*bounds)
    assert kernels.compiled.sweep_diagonal(*bounds) == python.sweep_diagonal(*bounds)
    assert kernels.compiled.sweep_wps_vwps(bounds[0], bounds[1]) == python.sweep_wps_vwps(bounds[0], bounds[1])


def test_sweep_counts_match_enumeration():
    structures, checked, violations = python.sweep_basic_lemma(1, 1)
    # sizes (0,0),(0,1),(1,0) give one structure each, (1,1) gives 4
    assert structures == 7
    assert violations == 0


def test_random_rows_agree_across_backends():
    if kernels.compiled is None:
        pytest.skip("compiled kernels not built")
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 64)
        rows = [rng.getrandbits(n) for _ in range(n)]
        other = [rng.getrandbits(n) for _ in range(n)]
        p = rng.getrandbits(n)
        c = rng.randrange(n)
        for name in ("diagonal_mask",):
            assert getattr(kernels.compiled, name)(rows) == getattr(python, name)(rows)
        for name in ("boxplus_mask", "box_mask", "diamond_mask", "first_equal", "first_believing", "first_diag_match"):
            assert getattr(kernels.compiled, name)(rows, p) == getattr(python, name)(rows, p)
        assert kernels.compiled.first_representing(rows, p, n) == python.first_representing(rows, p, n)
        assert list(kernels.compiled.compose_rows(rows, other)) == list(python.compose_rows(rows, other))
        assert tuple(map(bool, kernels.compiled.bk_conjuncts(rows, other, p, c))) == tuple(
            map(bool, python.bk_conjuncts(rows, other, p, c))
        )


def test_wide_carriers_use_python_twin():
    assert kernels.for_width(65) is python
    n = 70
    r = Relation("A", "A", tuple(1 << ((x + 1) % n) for x in range(n)), n)
    fam = PredicateFamily("A", n, (Predicate("A", n, 1 << 0), Predicate("A", n, 1 << 69)))
    report = is_assumption_complete(r, fam)
    assert report.witnesses == {fam.predicates[0]: 69, fam.predicates[1]: 68}


def test_compiled_sweep_guards():
    if kernels.compiled is None:
        pytest.skip("compiled kernels not built")
    with pytest.raises(ValueError):
        kernels.compiled.sweep_basic_lemma(6, 6)
