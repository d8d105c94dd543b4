# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-vector kernels; same names and semantics as ``_pykernels``.

Masks are limited to 64 bits. ``bkfix.kernels`` only routes calls here when
every carrier involved fits.
"""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef enum:
    MAXROWS = 64


cdef u64* _copy_rows(rows, Py_ssize_t *n) except NULL:
    cdef Py_ssize_t i, k = len(rows)
    cdef u64 *buf = <u64*> malloc((k if k > 0 else 1) * sizeof(u64))
    if buf == NULL:
        raise MemoryError()
    for i in range(k):
        buf[i] = rows[i]
    n[0] = k
    return buf


def compose_rows(r_rows, s_rows):
    cdef Py_ssize_t ns, i
    cdef u64 *s = _copy_rows(s_rows, &ns)
    cdef u64 row, acc
    cdef int y
    out = []
    try:
        for r in r_rows:
            row = r
            acc = 0
            y = 0
            while row:
                if row & 1:
                    acc |= s[y]
                row >>= 1
                y += 1
            out.append(acc)
    finally:
        free(s)
    return out


def diagonal_mask(rows):
    cdef u64 mask = 0, row
    cdef int x = 0
    for r in rows:
        row = r
        if (row >> x) & 1:
            mask |= (<u64>1) << x
        x += 1
    return mask


def boxplus_mask(rows, p):
    cdef u64 mask = 0, pp = p
    cdef int x = 0
    for r in rows:
        if <u64>r == pp:
            mask |= (<u64>1) << x
        x += 1
    return mask


def box_mask(rows, p):
    cdef u64 mask = 0, pp = p
    cdef int x = 0
    for r in rows:
        if (<u64>r) & ~pp == 0:
            mask |= (<u64>1) << x
        x += 1
    return mask


def diamond_mask(rows, p):
    cdef u64 mask = 0, pp = p
    cdef int x = 0
    for r in rows:
        if (<u64>r) & pp:
            mask |= (<u64>1) << x
        x += 1
    return mask


def first_equal(rows, p):
    cdef u64 pp = p
    cdef int x = 0
    for r in rows:
        if <u64>r == pp:
            return x
        x += 1
    return -1


def first_believing(rows, p):
    cdef u64 pp = p, row
    cdef int x = 0
    for r in rows:
        row = r
        if row and (row & ~pp) == 0:
            return x
        x += 1
    return -1


cdef inline bint _represents(u64 row, u64 p, int width) nogil:
    cdef int y
    for y in range(width):
        if ((row >> y) & 1) != ((p >> y) & 1):
            return False
    return True


def first_representing(rows, p, int width):
    cdef u64 pp = p
    cdef int x = 0
    for r in rows:
        if _represents(<u64>r, pp, width):
            return x
        x += 1
    return -1


def first_diag_match(rows, p):
    cdef u64 pp = p, row
    cdef int x = 0
    for r in rows:
        row = r
        if ((row >> x) & 1) == ((pp >> x) & 1):
            return x
        x += 1
    return -1


cdef inline int _conjuncts(u64 *ra, u64 *rb, u64 p, int c) nogil:
    # bit 0: A1, bit 1: A2, bit 2: A3
    cdef u64 row = ra[c], target
    cdef int y = 0, out = 3
    if row:
        out |= 4
    while row:
        if row & 1:
            target = rb[y]
            if target & ~p:
                out &= ~1
            if p & ~target:
                out &= ~2
        row >>= 1
        y += 1
    return out


def bk_conjuncts(ra_rows, rb_rows, p, int c):
    cdef Py_ssize_t na, nb
    cdef u64 *ra = _copy_rows(ra_rows, &na)
    cdef u64 *rb
    cdef int out
    try:
        rb = _copy_rows(rb_rows, &nb)
        try:
            out = _conjuncts(ra, rb, <u64>p, c)
        finally:
            free(rb)
    finally:
        free(ra)
    return bool(out & 1), bool(out & 2), bool(out & 4)


cdef inline void _unpack(u64 bits, int n_from, int n_to, u64 *rows) nogil:
    cdef u64 full = ((<u64>1) << n_to) - 1
    cdef int x
    for x in range(n_from):
        rows[x] = (bits >> (x * n_to)) & full


cdef inline u64 _diag_of_composite(u64 *ra, u64 *rb, int na) nogil:
    cdef u64 q = 0, row, acc
    cdef int x, y
    for x in range(na):
        row = ra[x]
        acc = 0
        y = 0
        while row:
            if row & 1:
                acc |= rb[y]
            row >>= 1
            y += 1
        if (acc >> x) & 1:
            q |= (<u64>1) << x
    return q


def sweep_basic_lemma(int max_a, int max_b):
    if max_a * max_b > 30:
        raise ValueError("sweep too large")
    cdef u64 ra[MAXROWS]
    cdef u64 rb[MAXROWS]
    cdef long long structures = 0, checked = 0, violations = 0
    cdef int na, nb, c
    cdef u64 ra_bits, rb_bits, span, q, p
    with nogil:
        for na in range(max_a + 1):
            for nb in range(max_b + 1):
                span = (<u64>1) << (na * nb)
                for ra_bits in range(span):
                    _unpack(ra_bits, na, nb, ra)
                    for rb_bits in range(span):
                        _unpack(rb_bits, nb, na, rb)
                        structures += 1
                        q = _diag_of_composite(ra, rb, na)
                        for c in range(na):
                            for p in range((<u64>1) << na):
                                if _conjuncts(ra, rb, p, c) == 7:
                                    checked += 1
                                    if ((p >> c) & 1) != ((q >> c) & 1):
                                        violations += 1
    return structures, checked, violations


def sweep_diagonal(int max_a, int max_b):
    if max_a * max_b > 30:
        raise ValueError("sweep too large")
    cdef u64 ra[MAXROWS]
    cdef u64 rb[MAXROWS]
    cdef long long structures = 0, searched = 0, witnesses = 0
    cdef int na, nb, c
    cdef u64 ra_bits, rb_bits, span, d, full_a
    with nogil:
        for na in range(max_a + 1):
            full_a = ((<u64>1) << na) - 1
            for nb in range(max_b + 1):
                span = (<u64>1) << (na * nb)
                for ra_bits in range(span):
                    _unpack(ra_bits, na, nb, ra)
                    for rb_bits in range(span):
                        _unpack(rb_bits, nb, na, rb)
                        structures += 1
                        d = ~_diag_of_composite(ra, rb, na) & full_a
                        for c in range(na):
                            searched += 1
                            if _conjuncts(ra, rb, d, c) == 7:
                                witnesses += 1
    return structures, searched, witnesses


def sweep_wps_vwps(int max_n, int max_family):
    if max_n > 5 or max_family > 16:
        raise ValueError("sweep too large")
    cdef u64 rows[MAXROWS]
    cdef char wps[32]
    cdef char ac[32]
    cdef char vwps[32]
    cdef int idx[17]
    cdef long long relations = 0, families = 0, bad_vwps = 0, bad_ac = 0
    cdef int n, npred, size, k, x, j
    cdef u64 bits, p, span
    cdef bint w, v, a
    with nogil:
        for n in range(max_n + 1):
            npred = 1 << n
            span = (<u64>1) << (n * n)
            for bits in range(span):
                _unpack(bits, n, n, rows)
                relations += 1
                for p in range(<u64>npred):
                    wps[p] = 0
                    ac[p] = 0
                    vwps[p] = 0
                    for x in range(n):
                        if _represents(rows[x], p, n):
                            wps[p] = 1
                        if rows[x] == p:
                            ac[p] = 1
                        if ((rows[x] >> x) & 1) == ((p >> x) & 1):
                            vwps[p] = 1
                for size in range(max_family + 1):
                    if size > npred:
                        break
                    for k in range(size):
                        idx[k] = k
                    while True:
                        families += 1
                        w = True
                        v = True
                        a = True
                        for k in range(size):
                            if not wps[idx[k]]:
                                w = False
                            if not vwps[idx[k]]:
                                v = False
                            if not ac[idx[k]]:
                                a = False
                        if w and not v:
                            bad_vwps += 1
                        if w != a:
                            bad_ac += 1
                        # next combination in lexicographic order
                        j = size - 1
                        while j >= 0 and idx[j] == npred - size + j:
                            j -= 1
                        if j < 0:
                            break
                        idx[j] += 1
                        for k in range(j + 1, size):
                            idx[k] = idx[k - 1] + 1
    return relations, families, bad_vwps, bad_ac
