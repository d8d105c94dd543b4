"""Finite multi-sorted belief structures.

States of a sort of size ``n`` are the integers ``0..n-1``. Predicates and
relation rows are bit vectors stored as Python ints (bit ``i`` set means
state ``i`` is a member), so carriers of any size are supported; the
compiled kernels take over whenever a carrier fits in a machine word.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from bkfix import kernels
from bkfix.errors import (
    ModelParseError,
    SortMismatch,
    StateOutOfRange,
    UnknownName,
    ValidationError,
)


def _mask(members: Iterable[int]) -> int:
    bits = 0
    for i in members:
        bits |= 1 << i
    return bits


def _members(bits: int) -> tuple[int, ...]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Predicate:
    """A subset of one sort's carrier."""

    sort: str
    size: int
    bits: int = 0

    def __post_init__(self):
        if self.size < 0:
            raise ValidationError(f"negative carrier size {self.size}")
        if self.bits < 0 or self.bits >> self.size:
            raise ValidationError(
                f"predicate on {self.sort} has members outside 0..{self.size - 1}"
            )

    @classmethod
    def from_members(cls, sort: str, size: int, members: Iterable[int]) -> Predicate:
        members = list(members)
        for i in members:
            if not 0 <= i < size:
                raise ValidationError(f"state {i} out of range for {sort} (size {size})")
        return cls(sort, size, _mask(members))

    @classmethod
    def full(cls, sort: str, size: int) -> Predicate:
        return cls(sort, size, (1 << size) - 1)

    @property
    def members(self) -> tuple[int, ...]:
        return _members(self.bits)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.size and bool((self.bits >> x) & 1)

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self):
        return iter(self.members)

    def is_empty(self) -> bool:
        return self.bits == 0

    def complement(self) -> Predicate:
        return Predicate(self.sort, self.size, ~self.bits & ((1 << self.size) - 1))

    def _same_sort(self, other: Predicate):
        if (self.sort, self.size) != (other.sort, other.size):
            raise SortMismatch(f"predicates on {self.sort} and {other.sort}")

    def __and__(self, other: Predicate) -> Predicate:
        self._same_sort(other)
        return Predicate(self.sort, self.size, self.bits & other.bits)

    def __or__(self, other: Predicate) -> Predicate:
        self._same_sort(other)
        return Predicate(self.sort, self.size, self.bits | other.bits)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


@dataclass(frozen=True)
class Relation:
    """A relation between two sorts, one bit-vector row per source state."""

    from_sort: str
    to_sort: str
    rows: tuple[int, ...]
    width: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if self.width < 0:
            raise ValidationError(f"negative carrier size {self.width}")
        for x, row in enumerate(self.rows):
            if row < 0 or row >> self.width:
                raise ValidationError(
                    f"row {x} of relation {self.from_sort}->{self.to_sort} "
                    f"exceeds width {self.width}"
                )

    @classmethod
    def from_pairs(cls, from_sort, n_from, to_sort, n_to, pairs) -> Relation:
        rows = [0] * n_from
        for x, y in pairs:
            if not (0 <= x < n_from and 0 <= y < n_to):
                raise ValidationError(
                    f"pair ({x},{y}) outside {from_sort}:{n_from} x {to_sort}:{n_to}"
                )
            rows[x] |= 1 << y
        return cls(from_sort, to_sort, tuple(rows), n_to)

    @property
    def height(self) -> int:
        return len(self.rows)

    def is_endogenous(self) -> bool:
        return self.from_sort == self.to_sort and self.height == self.width

    def pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x, row in enumerate(self.rows) for y in _members(row)]

    def __contains__(self, pair) -> bool:
        x, y = pair
        return 0 <= x < self.height and 0 <= y < self.width and bool((self.rows[x] >> y) & 1)

    def kernel(self):
        return kernels.for_width(self.width, self.height)


def identity(sort: str, size: int) -> Relation:
    return Relation(sort, sort, tuple(1 << x for x in range(size)), size)


def empty_relation(from_sort, n_from, to_sort, n_to) -> Relation:
    return Relation(from_sort, to_sort, (0,) * n_from, n_to)


def full_relation(from_sort, n_from, to_sort, n_to) -> Relation:
    return Relation(from_sort, to_sort, ((1 << n_to) - 1,) * n_from, n_to)


def image(r: Relation, x: int) -> Predicate:
    """The set of states ``x`` is related to."""
    if not 0 <= x < r.height:
        raise StateOutOfRange(f"state {x} out of range for {r.from_sort} (size {r.height})")
    return Predicate(r.to_sort, r.width, r.rows[x])


def compose(r: Relation, s: Relation) -> Relation:
    """Relational composition ``r ; s``: ``(x, z)`` iff some ``y`` has
    ``r(x, y)`` and ``s(y, z)``."""
    if r.to_sort != s.from_sort or r.width != s.height:
        raise SortMismatch(
            f"cannot compose {r.from_sort}->{r.to_sort} with {s.from_sort}->{s.to_sort}"
        )
    k = kernels.for_width(r.width, s.width)
    return Relation(r.from_sort, s.to_sort, tuple(k.compose_rows(r.rows, s.rows)), s.width)


def compose_chain(relations: Iterable[Relation]) -> Relation:
    relations = list(relations)
    if not relations:
        raise ValueError("empty chain")
    out = relations[0]
    for r in relations[1:]:
        out = compose(out, r)
    return out


def diagonal(r: Relation) -> Predicate:
    if not r.is_endogenous():
        raise SortMismatch(f"diagonal needs an endogenous relation, got {r.from_sort}->{r.to_sort}")
    return Predicate(r.from_sort, r.height, r.kernel().diagonal_mask(r.rows))


@dataclass(frozen=True)
class PredicateFamily:
    sort: str
    size: int
    predicates: tuple[Predicate, ...] = ()
    require_nonempty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(self.predicates))
        for p in self.predicates:
            if (p.sort, p.size) != (self.sort, self.size):
                raise SortMismatch(f"predicate on {p.sort} in family on {self.sort}")
            if self.require_nonempty and p.is_empty():
                raise ValidationError(f"empty predicate in non-empty family on {self.sort}")

    @classmethod
    def of(cls, sort, size, member_lists, require_nonempty=False) -> PredicateFamily:
        """Build from member lists, dropping repeats (first occurrence wins)."""
        seen = set()
        preds = []
        for members in member_lists:
            p = Predicate.from_members(sort, size, members)
            if p.bits not in seen:
                seen.add(p.bits)
                preds.append(p)
        return cls(sort, size, tuple(preds), require_nonempty)

    @classmethod
    def all_predicates(cls, sort, size) -> PredicateFamily:
        return cls(sort, size, tuple(Predicate(sort, size, b) for b in range(1 << size)))

    def __iter__(self):
        return iter(self.predicates)

    def __len__(self):
        return len(self.predicates)

    def __contains__(self, p) -> bool:
        return p in self.predicates


@dataclass(frozen=True)
class BeliefCycle:
    """Relation names ``r_1 .. r_{n+1}`` forming a closed typed chain."""

    relations: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        if not self.relations:
            raise ValidationError("belief cycle needs at least one relation")

    @property
    def n(self) -> int:
        """Number of ``believes`` steps before the final ``assumes``."""
        return len(self.relations) - 1


@dataclass(frozen=True)
class BeliefStructure:
    """Sorts with carrier sizes, typed relations, named predicates/families/cycles.

    Treat the mappings as read-only; all operations are pure.
    """

    sorts: Mapping[str, int] = field(default_factory=dict)
    relations: Mapping[str, Relation] = field(default_factory=dict)
    predicates: Mapping[str, Predicate] = field(default_factory=dict)
    families: Mapping[str, PredicateFamily] = field(default_factory=dict)
    cycles: Mapping[str, BeliefCycle] = field(default_factory=dict)

    def __post_init__(self):
        for name, n in self.sorts.items():
            if type(n) is not int or n < 0:
                raise ValidationError(f"bad carrier size {n!r}", f"sorts.{name}")
        for name, r in self.relations.items():
            where = f"relations.{name}"
            for key in (r.from_sort, r.to_sort):
                if key not in self.sorts:
                    raise ValidationError(f"unknown sort {key!r}", where)
            if r.height != self.sorts[r.from_sort] or r.width != self.sorts[r.to_sort]:
                raise ValidationError("dimensions disagree with sort sizes", where)
        for name, p in self.predicates.items():
            self._check_sort(p.sort, p.size, f"predicates.{name}")
        for name, fam in self.families.items():
            self._check_sort(fam.sort, fam.size, f"families.{name}")
        for name, cyc in self.cycles.items():
            self.cycle_relations(cyc, where=f"cycles.{name}")

    def _check_sort(self, sort, size, where):
        if sort not in self.sorts:
            raise ValidationError(f"unknown sort {sort!r}", where)
        if self.sorts[sort] != size:
            raise ValidationError("width disagrees with sort size", where)

    def size(self, sort: str) -> int:
        try:
            return self.sorts[sort]
        except KeyError:
            raise UnknownName(f"unknown sort {sort!r}") from None

    def relation(self, name: str) -> Relation:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownName(f"unknown relation {name!r}") from None

    def predicate(self, name: str) -> Predicate:
        try:
            return self.predicates[name]
        except KeyError:
            raise UnknownName(f"unknown predicate {name!r}") from None

    def family(self, name: str) -> PredicateFamily:
        try:
            return self.families[name]
        except KeyError:
            raise UnknownName(f"unknown family {name!r}") from None

    def cycle(self, name: str) -> BeliefCycle:
        try:
            return self.cycles[name]
        except KeyError:
            raise UnknownName(f"unknown cycle {name!r}") from None

    def cycle_relations(self, cycle: BeliefCycle, where: str | None = None) -> list[Relation]:
        """Resolve and type-check a cycle against this structure."""
        rels = []
        for name in cycle.relations:
            if name not in self.relations:
                raise ValidationError(f"unknown relation {name!r}", where)
            rels.append(self.relations[name])
        for a, b in zip(rels, rels[1:] + rels[:1]):
            if a.to_sort != b.from_sort:
                raise ValidationError(
                    f"chain breaks between {a.from_sort}->{a.to_sort} and "
                    f"{b.from_sort}->{b.to_sort}",
                    where,
                )
        return rels


# --- JSON model format -------------------------------------------------------

_TOP_KEYS = {"sorts", "relations", "predicates", "families", "cycles"}


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ModelParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _expect(cond, message, path):
    if not cond:
        raise ModelParseError(message, path=path)


def _obj(value, path, required=(), optional=()):
    _expect(isinstance(value, dict), "expected an object", path)
    allowed = set(required) | set(optional)
    for key in value:
        _expect(key in allowed, f"unknown key {key!r}", path)
    for key in required:
        _expect(key in value, f"missing key {key!r}", path)
    return value


def _int(value, path):
    _expect(type(value) is int, f"expected an integer, got {value!r}", path)
    return value


def _str(value, path):
    _expect(isinstance(value, str) and value, "expected a non-empty string", path)
    return value


def _int_list(value, path):
    _expect(isinstance(value, list), "expected an array", path)
    return [_int(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _sort_size(sorts, name, path):
    if name not in sorts:
        raise ValidationError(f"unknown sort {name!r}", path)
    return sorts[name]


def _check_states(members, size, sort, path):
    for i, x in enumerate(members):
        if not 0 <= x < size:
            raise ValidationError(f"state {x} out of range for {sort} (size {size})", f"{path}[{i}]")


def load_model(text: str | bytes) -> BeliefStructure:
    """Parse and validate a JSON model document."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ModelParseError(f"not valid UTF-8: {exc.reason}") from None
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, line=exc.lineno, column=exc.colno) from None

    _obj(doc, "$", required=("sorts", "relations"), optional=_TOP_KEYS)

    sorts: dict[str, int] = {}
    _expect(isinstance(doc["sorts"], dict), "expected an object", "sorts")
    for name, n in doc["sorts"].items():
        _str(name, "sorts")
        _int(n, f"sorts.{name}")
        if n < 0:
            raise ValidationError(f"negative carrier size {n}", f"sorts.{name}")
        sorts[name] = n

    relations: dict[str, Relation] = {}
    rel_doc = doc["relations"]
    _expect(isinstance(rel_doc, dict), "expected an object", "relations")
    for name, spec in rel_doc.items():
        path = f"relations.{name}"
        _str(name, "relations")
        _obj(spec, path, required=("from", "to", "pairs"))
        src = _str(spec["from"], f"{path}.from")
        dst = _str(spec["to"], f"{path}.to")
        n_from = _sort_size(sorts, src, f"{path}.from")
        n_to = _sort_size(sorts, dst, f"{path}.to")
        pairs = spec["pairs"]
        _expect(isinstance(pairs, list), "expected an array", f"{path}.pairs")
        rows = [0] * n_from
        for i, pair in enumerate(pairs):
            ppath = f"{path}.pairs[{i}]"
            _expect(isinstance(pair, list) and len(pair) == 2, "expected [int, int]", ppath)
            x, y = _int(pair[0], ppath), _int(pair[1], ppath)
            if not (0 <= x < n_from and 0 <= y < n_to):
                raise ValidationError(
                    f"pair ({x},{y}) outside {src}:{n_from} x {dst}:{n_to}", ppath
                )
            rows[x] |= 1 << y
        relations[name] = Relation(src, dst, tuple(rows), n_to)

    predicates: dict[str, Predicate] = {}
    pred_doc = doc.get("predicates", {})
    _expect(isinstance(pred_doc, dict), "expected an object", "predicates")
    for name, spec in pred_doc.items():
        path = f"predicates.{name}"
        _obj(spec, path, required=("sort", "members"))
        sort = _str(spec["sort"], f"{path}.sort")
        size = _sort_size(sorts, sort, f"{path}.sort")
        members = _int_list(spec["members"], f"{path}.members")
        _check_states(members, size, sort, f"{path}.members")
        predicates[name] = Predicate(sort, size, _mask(members))

    families: dict[str, PredicateFamily] = {}
    fam_doc = doc.get("families", {})
    _expect(isinstance(fam_doc, dict), "expected an object", "families")
    for name, spec in fam_doc.items():
        path = f"families.{name}"
        _obj(spec, path, required=("sort", "predicates"), optional=("nonempty",))
        sort = _str(spec["sort"], f"{path}.sort")
        size = _sort_size(sorts, sort, f"{path}.sort")
        nonempty = spec.get("nonempty", False)
        _expect(isinstance(nonempty, bool), "expected a boolean", f"{path}.nonempty")
        lists = spec["predicates"]
        _expect(isinstance(lists, list), "expected an array", f"{path}.predicates")
        member_lists = []
        for i, members in enumerate(lists):
            mpath = f"{path}.predicates[{i}]"
            members = _int_list(members, mpath)
            _check_states(members, size, sort, mpath)
            if nonempty and not members:
                raise ValidationError("empty predicate in a non-empty family", mpath)
            member_lists.append(members)
        families[name] = PredicateFamily.of(sort, size, member_lists, nonempty)

    cycles: dict[str, BeliefCycle] = {}
    cyc_doc = doc.get("cycles", {})
    _expect(isinstance(cyc_doc, dict), "expected an object", "cycles")
    for name, names in cyc_doc.items():
        path = f"cycles.{name}"
        _expect(isinstance(names, list) and names, "expected a non-empty array", path)
        cycles[name] = BeliefCycle(tuple(_str(n, f"{path}[{i}]") for i, n in enumerate(names)))

    return BeliefStructure(sorts, relations, predicates, families, cycles)


def load_model_file(path) -> BeliefStructure:
    with open(path, "rb") as fh:
        return load_model(fh.read())


def model_to_dict(m: BeliefStructure) -> dict:
    doc: dict = {
        "sorts": dict(m.sorts),
        "relations": {
            name: {"from": r.from_sort, "to": r.to_sort, "pairs": [list(p) for p in r.pairs()]}
            for name, r in m.relations.items()
        },
    }
    if m.predicates:
        doc["predicates"] = {
            name: {"sort": p.sort, "members": list(p.members)} for name, p in m.predicates.items()
        }
    if m.families:
        doc["families"] = {
            name: {
                "sort": f.sort,
                "nonempty": f.require_nonempty,
                "predicates": [list(p.members) for p in f],
            }
            for name, f in m.families.items()
        }
    if m.cycles:
        doc["cycles"] = {name: list(c.relations) for name, c in m.cycles.items()}
    return doc


def dump_model(m: BeliefStructure) -> str:
    """Serialize to the JSON model format; ``load_model`` inverts this."""
    return json.dumps(model_to_dict(m), indent=2) + "\n"
