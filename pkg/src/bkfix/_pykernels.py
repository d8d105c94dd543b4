"""Pure-Python bit-vector kernels.

Row convention shared with ``_ckernels``: a relation ``A -> B`` is a sequence
of ints, one per source state, bit ``y`` of ``rows[x]`` set iff ``R(x, y)``.
Every function here has a twin of the same name and signature in the
compiled module; ``bkfix.kernels`` picks one at import time.
"""

from itertools import combinations


def _bits(mask):
    y = 0
    while mask:
        if mask & 1:
            yield y
        mask >>= 1
        y += 1


def compose_rows(r_rows, s_rows):
    out = []
    for row in r_rows:
        acc = 0
        for y in _bits(row):
            acc |= s_rows[y]
        out.append(acc)
    return out


def diagonal_mask(rows):
    mask = 0
    for x, row in enumerate(rows):
        if (row >> x) & 1:
            mask |= 1 << x
    return mask


def boxplus_mask(rows, p):
    mask = 0
    for x, row in enumerate(rows):
        if row == p:
            mask |= 1 << x
    return mask


def box_mask(rows, p):
    mask = 0
    for x, row in enumerate(rows):
        if row & ~p == 0:
            mask |= 1 << x
    return mask


def diamond_mask(rows, p):
    mask = 0
    for x, row in enumerate(rows):
        if row & p:
            mask |= 1 << x
    return mask


def first_equal(rows, p):
    for x, row in enumerate(rows):
        if row == p:
            return x
    return -1


def first_believing(rows, p):
    for x, row in enumerate(rows):
        if row and row & ~p == 0:
            return x
    return -1


def first_representing(rows, p, width):
    # literal per-point form of wps: for all y, R(x, y) <=> p(y)
    for x, row in enumerate(rows):
        for y in range(width):
            if ((row >> y) & 1) != ((p >> y) & 1):
                break
        else:
            return x
    return -1


def first_diag_match(rows, p):
    for x, row in enumerate(rows):
        if ((row >> x) & 1) == ((p >> x) & 1):
            return x
    return -1


def bk_conjuncts(ra_rows, rb_rows, p, c):
    row = ra_rows[c]
    a1 = a2 = True
    for y in _bits(row):
        target = rb_rows[y]
        if target & ~p:
            a1 = False
        if p & ~target:
            a2 = False
    return a1, a2, row != 0


def _unpack(bits, n_from, n_to):
    full = (1 << n_to) - 1
    return [(bits >> (x * n_to)) & full for x in range(n_from)]


def sweep_basic_lemma(max_a, max_b):
    """All structures up to the given carrier sizes; returns
    ``(structures, checked, violations)``."""
    structures = checked = violations = 0
    for na in range(max_a + 1):
        for nb in range(max_b + 1):
            for ra_bits in range(1 << (na * nb)):
                ra = _unpack(ra_bits, na, nb)
                for rb_bits in range(1 << (na * nb)):
                    rb = _unpack(rb_bits, nb, na)
                    structures += 1
                    q = diagonal_mask(compose_rows(ra, rb))
                    for c in range(na):
                        for p in range(1 << na):
                            a1, a2, a3 = bk_conjuncts(ra, rb, p, c)
                            if a1 and a2 and a3:
                                checked += 1
                                if ((p >> c) & 1) != ((q >> c) & 1):
                                    violations += 1
    return structures, checked, violations


def sweep_diagonal(max_a, max_b):
    """Search every structure for a state satisfying the assumptions for the
    complement of its diagonal predicate; returns
    ``(structures, searched, witnesses)``."""
    structures = searched = witnesses = 0
    for na in range(max_a + 1):
        full_a = (1 << na) - 1
        for nb in range(max_b + 1):
            for ra_bits in range(1 << (na * nb)):
                ra = _unpack(ra_bits, na, nb)
                for rb_bits in range(1 << (na * nb)):
                    rb = _unpack(rb_bits, nb, na)
                    structures += 1
                    d = ~diagonal_mask(compose_rows(ra, rb)) & full_a
                    for c in range(na):
                        searched += 1
                        if all(bk_conjuncts(ra, rb, d, c)):
                            witnesses += 1
    return structures, searched, witnesses


def sweep_wps_vwps(max_n, max_family):
    """Endogenous relations on carriers ``0..max_n`` against every family of
    at most ``max_family`` distinct predicates; returns
    ``(relations, families, wps_without_vwps, wps_ac_disagreements)``."""
    relations = families = bad_vwps = bad_ac = 0
    for n in range(max_n + 1):
        preds = range(1 << n)
        for bits in range(1 << (n * n)):
            rows = _unpack(bits, n, n)
            relations += 1
            wps = [first_representing(rows, p, n) >= 0 for p in preds]
            ac = [first_equal(rows, p) >= 0 for p in preds]
            vwps = [first_diag_match(rows, p) >= 0 for p in preds]
            for size in range(max_family + 1):
                for fam in combinations(preds, size):
                    families += 1
                    w = all(wps[p] for p in fam)
                    if w and not all(vwps[p] for p in fam):
                        bad_vwps += 1
                    if w != all(ac[p] for p in fam):
                        bad_ac += 1
    return relations, families, bad_vwps, bad_ac
