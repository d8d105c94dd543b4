"""Exhaustive and sampled enumeration of small structures.

The three heavy sweeps run inside the kernel backend; everything else here
is plain enumeration over the public API.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations, product

from bkfix import kernels
from bkfix.model import BeliefStructure, Predicate, PredicateFamily, Relation


def all_relations(from_sort, n_from, to_sort, n_to):
    full = (1 << n_to) - 1
    for bits in range(1 << (n_from * n_to)):
        rows = tuple((bits >> (x * n_to)) & full for x in range(n_from))
        yield Relation(from_sort, to_sort, rows, n_to)


def random_relation(rng: random.Random, from_sort, n_from, to_sort, n_to, density=None):
    if density is None:
        density = rng.random()
    rows = []
    for _ in range(n_from):
        row = 0
        for y in range(n_to):
            if rng.random() < density:
                row |= 1 << y
        rows.append(row)
    return Relation(from_sort, to_sort, tuple(rows), n_to)


def all_predicates(sort, size, nonempty=False):
    return [Predicate(sort, size, b) for b in range(1 if nonempty else 0, 1 << size)]


def all_families(sort, size, max_size, min_size=0, nonempty=False):
    """Families of distinct predicates, in lexicographic bit-vector order."""
    preds = all_predicates(sort, size, nonempty)
    for k in range(min_size, max_size + 1):
        for combo in combinations(preds, k):
            yield PredicateFamily(sort, size, combo, nonempty)


def two_sorted(ra: Relation, rb: Relation) -> BeliefStructure:
    return BeliefStructure(
        {ra.from_sort: ra.height, ra.to_sort: ra.width},
        {"Ra": ra, "Rb": rb},
    )


def all_two_sorted(max_a, max_b, min_size=0):
    for na, nb in product(range(min_size, max_a + 1), range(min_size, max_b + 1)):
        for ra in all_relations("Ua", na, "Ub", nb):
            for rb in all_relations("Ub", nb, "Ua", na):
                yield two_sorted(ra, rb)


def random_two_sorted(rng: random.Random, max_size, min_size=1):
    na = rng.randint(min_size, max_size)
    nb = rng.randint(min_size, max_size)
    return two_sorted(
        random_relation(rng, "Ua", na, "Ub", nb), random_relation(rng, "Ub", nb, "Ua", na)
    )


def all_cycles(length, max_size, min_size=1):
    """Every cycle structure ``A0 -> A1 -> ... -> A0`` of the given length.

    Yields ``(structure, relation_names)``.
    """
    sorts = [f"A{i}" for i in range(length)]
    names = [f"R{i + 1}" for i in range(length)]
    for sizes in product(range(min_size, max_size + 1), repeat=length):
        pools = [
            list(all_relations(sorts[i], sizes[i], sorts[(i + 1) % length], sizes[(i + 1) % length]))
            for i in range(length)
        ]
        sort_map = dict(zip(sorts, sizes))
        for rels in product(*pools):
            yield BeliefStructure(sort_map, dict(zip(names, rels))), names


@dataclass(frozen=True)
class SweepCount:
    cases: int
    checked: int
    violations: int


def basic_lemma_sweep(max_a, max_b) -> SweepCount:
    """Every two-sorted structure, predicate and state: where the assumptions
    hold, count states at which the predicate and the diagonal disagree."""
    return SweepCount(*kernels.active().sweep_basic_lemma(max_a, max_b))


def diagonal_sweep(max_a, max_b) -> SweepCount:
    """Every two-sorted structure: count states satisfying the assumptions
    for the complement of the diagonal."""
    return SweepCount(*kernels.active().sweep_diagonal(max_a, max_b))


@dataclass(frozen=True)
class WpsSweep:
    relations: int
    families: int
    wps_without_vwps: int
    wps_ac_disagreements: int


def wps_sweep(max_n, max_family) -> WpsSweep:
    return WpsSweep(*kernels.active().sweep_wps_vwps(max_n, max_family))
