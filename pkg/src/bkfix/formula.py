"""Modal formula language: parsing, sort checking and evaluation.

Surface syntax (ASCII)::

    formula := or
    or      := and { "or" and }
    and     := unary { "and" unary }
    unary   := "not" unary | "[[" NAME "]]" unary | "[" NAME "]" unary
             | "<" NAME ">" unary | atom
    atom    := "true" | "false" | NAME | "(" formula ")"

``[R] f`` is box (every R-successor satisfies f), ``<R> f`` is diamond, and
``[[R]] f`` is the "assumes" modality: the R-successors are exactly the
states satisfying f.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from bkfix.errors import (
    AmbiguousSort,
    FormulaSyntaxError,
    SortError,
    StateOutOfRange,
    UnknownName,
)
from bkfix.model import BeliefStructure, Predicate, Relation


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom:
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not:
    body: Formula

    def __str__(self):
        return f"not {_wrap(self.body)}"


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left, And)} and {_wrap(self.right, Not)}"


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left, Or)} or {_wrap(self.right, And)}"


@dataclass(frozen=True)
class Box:
    rel: str
    body: Formula

    def __str__(self):
        return f"[{self.rel}] {_wrap(self.body)}"


@dataclass(frozen=True)
class Diamond:
    rel: str
    body: Formula

    def __str__(self):
        return f"<{self.rel}> {_wrap(self.body)}"


@dataclass(frozen=True)
class BoxPlus:
    rel: str
    body: Formula

    def __str__(self):
        return f"[[{self.rel}]] {_wrap(self.body)}"


Formula = Union[Top, Bottom, Atom, Not, And, Or, Box, Diamond, BoxPlus]
_MODAL = (Box, Diamond, BoxPlus)
_UNARY = (Top, Bottom, Atom, Not) + _MODAL


def _wrap(f, *loose):
    # parenthesise anything that binds looser than a unary operand
    if isinstance(f, _UNARY) or isinstance(f, loose):
        return str(f)
    return f"({f})"


def is_regular(f: Formula) -> bool:
    """True for the top/and/exists fragment (exists only through diamond)."""
    if isinstance(f, (Top, Atom)):
        return True
    if isinstance(f, And):
        return is_regular(f.left) and is_regular(f.right)
    if isinstance(f, Diamond):
        return is_regular(f.body)
    return False


# --- parser ----------------------------------------------------------------

_KEYWORDS = {"true", "false", "not", "and", "or"}
_TOKEN = re.compile(r"\s*(?:(\[\[|\]\]|[\[\]<>()])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            tokens.append((m.group(1), m.group(1), start))
        elif m.group(2) in _KEYWORDS:
            tokens.append((m.group(2), m.group(2), start))
        else:
            tokens.append(("NAME", m.group(2), start))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise FormulaSyntaxError(f"expected {kind!r}, found {found}", tok[2])
        self.i += 1
        return tok

    def formula(self):
        left = self.conj()
        while self.peek()[0] == "or":
            self.i += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek()[0] == "and":
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        kind = self.peek()[0]
        if kind == "not":
            self.i += 1
            return Not(self.unary())
        for opener, closer, node in (("[[", "]]", BoxPlus), ("[", "]", Box), ("<", ">", Diamond)):
            if kind == opener:
                self.i += 1
                name = self.take("NAME")[1]
                self.take(closer)
                return node(name, self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "true":
            self.i += 1
            return Top()
        if kind == "false":
            self.i += 1
            return Bottom()
        if kind == "NAME":
            self.i += 1
            return Atom(value)
        if kind == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return inner
        found = "end of input" if kind == "EOF" else repr(value)
        raise FormulaSyntaxError(f"expected a formula, found {found}", pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.take("EOF")
    return f


# --- sort checking ---------------------------------------------------------


@dataclass(frozen=True)
class SortedFormula:
    """A formula annotated with its sort, atoms and relations resolved.

    ``children`` mirrors the AST; ``predicate`` is set on atoms and
    ``relation`` on modal nodes.
    """

    formula: Formula
    sort: str
    size: int
    children: tuple[SortedFormula, ...] = ()
    predicate: Predicate | None = None
    relation: Relation | None = None

    def recheck(self) -> bool:
        """Re-verify every sort annotation in the tree."""
        f = self.formula
        if isinstance(f, Atom):
            ok = self.predicate is not None and self.predicate.sort == self.sort
        elif isinstance(f, _MODAL):
            r, body = self.relation, self.children[0]
            ok = r is not None and r.from_sort == self.sort and body.sort == r.to_sort
        else:
            ok = all(c.sort == self.sort for c in self.children)
        return ok and all(c.recheck() for c in self.children)


def _infer(f, m, atoms):
    """Bottom-up sort inference; ``None`` means sort-polymorphic."""
    if isinstance(f, (Top, Bottom)):
        return None
    if isinstance(f, Atom):
        return _lookup_atom(f.name, m, atoms).sort
    if isinstance(f, Not):
        return _infer(f.body, m, atoms)
    if isinstance(f, (And, Or)):
        left = _infer(f.left, m, atoms)
        right = _infer(f.right, m, atoms)
        if left is not None and right is not None and left != right:
            raise SortError(f"sort conflict in {f}: {left} vs {right}")
        return left if left is not None else right
    r = _lookup_relation(f.rel, m)
    body = _infer(f.body, m, atoms)
    if body is not None and body != r.to_sort:
        raise SortError(
            f"relation {f.rel} leads to {r.to_sort} but its body speaks about {body}"
        )
    return r.from_sort


def _lookup_atom(name, m, atoms):
    if atoms and name in atoms:
        return atoms[name]
    if name in m.predicates:
        return m.predicates[name]
    raise UnknownName(f"unknown atom {name!r}")


def _lookup_relation(name, m):
    if name not in m.relations:
        raise UnknownName(f"unknown relation {name!r}")
    return m.relations[name]


def _annotate(f, sort, m, atoms):
    size = m.sorts[sort]
    if isinstance(f, Atom):
        return SortedFormula(f, sort, size, predicate=_lookup_atom(f.name, m, atoms))
    if isinstance(f, (Top, Bottom)):
        return SortedFormula(f, sort, size)
    if isinstance(f, Not):
        return SortedFormula(f, sort, size, (_annotate(f.body, sort, m, atoms),))
    if isinstance(f, (And, Or)):
        kids = (_annotate(f.left, sort, m, atoms), _annotate(f.right, sort, m, atoms))
        return SortedFormula(f, sort, size, kids)
    r = _lookup_relation(f.rel, m)
    return SortedFormula(f, sort, size, (_annotate(f.body, r.to_sort, m, atoms),), relation=r)


def sort_check(
    f: Formula | str,
    m: BeliefStructure,
    hint: str | None = None,
    atoms: Mapping[str, Predicate] | None = None,
) -> SortedFormula:
    """Infer the unique sort ``f`` speaks about and resolve its names.

    ``atoms`` binds extra predicate names (shadowing the model's). ``hint``
    is needed only when nothing in the formula fixes its sort.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    sort = _infer(f, m, atoms)
    if hint is not None:
        if hint not in m.sorts:
            raise UnknownName(f"unknown sort {hint!r}")
        if sort is not None and sort != hint:
            raise SortError(f"formula speaks about {sort}, hint says {hint}")
        sort = hint
    if sort is None:
        raise AmbiguousSort(f"cannot infer a sort for {f}; supply a hint")
    return _annotate(f, sort, m, atoms)


# --- semantics -------------------------------------------------------------


def evaluate(sf: SortedFormula, x: int) -> bool:
    """Truth of ``sf`` at state ``x``, straight from the pointwise clauses."""
    if not 0 <= x < sf.size:
        raise StateOutOfRange(f"state {x} out of range for {sf.sort} (size {sf.size})")
    return _holds(sf, x)


def _successors(r, x):
    row = r.rows[x]
    return [y for y in range(r.width) if (row >> y) & 1]


def _holds(sf, x):
    f = sf.formula
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        return x in sf.predicate
    if isinstance(f, Not):
        return not _holds(sf.children[0], x)
    if isinstance(f, And):
        return _holds(sf.children[0], x) and _holds(sf.children[1], x)
    if isinstance(f, Or):
        return _holds(sf.children[0], x) or _holds(sf.children[1], x)
    r, body = sf.relation, sf.children[0]
    if isinstance(f, Box):
        return all(_holds(body, y) for y in _successors(r, x))
    if isinstance(f, Diamond):
        return any(_holds(body, y) for y in _successors(r, x))
    # BoxPlus: for all y, R(x, y) <=> body(y)
    return all((((r.rows[x] >> y) & 1) == 1) == _holds(body, y) for y in range(r.width))


def extension(sf: SortedFormula) -> Predicate:
    """The set of states satisfying ``sf``, computed a whole set at a time."""
    return Predicate(sf.sort, sf.size, _ext(sf))


def _ext(sf):
    f = sf.formula
    full = (1 << sf.size) - 1
    if isinstance(f, Top):
        return full
    if isinstance(f, Bottom):
        return 0
    if isinstance(f, Atom):
        return sf.predicate.bits
    if isinstance(f, Not):
        return ~_ext(sf.children[0]) & full
    if isinstance(f, And):
        return _ext(sf.children[0]) & _ext(sf.children[1])
    if isinstance(f, Or):
        return _ext(sf.children[0]) | _ext(sf.children[1])
    r = sf.relation
    body = _ext(sf.children[0])
    k = r.kernel()
    if isinstance(f, Box):
        return k.box_mask(r.rows, body)
    if isinstance(f, Diamond):
        return k.diamond_mask(r.rows, body)
    return k.boxplus_mask(r.rows, body)
