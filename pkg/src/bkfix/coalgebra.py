"""Terminal sequence of the twisted pair functor ``F(X, Y) = (P(Sb x Y), P(Sa x X))``.

``P`` is the bounded powerset: subsets of cardinality strictly below ``m``.
Stage 0 is the pair of one-point sets. A stage-``k+1`` element of ``X`` is a
set of pairs ``(s, y)`` with ``s`` a strategy of the other agent and ``y`` an
index into the stage-``k`` ``Y`` carrier; symmetrically for ``Y``. Each stage
``k >= 1`` stores the connecting maps back to stage ``k-1`` (direct image
along ``id x pi``).

From stage ``d+1`` a finite belief model is read off: states are
(strategy, type) pairs and a type believes exactly the pullback of the set
of (strategy, stage-``d`` type) pairs it contains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from bkfix.completeness import box_set, boxplus_set, is_assumption_complete
from bkfix.errors import CapExceeded, PreconditionError, ValidationError
from bkfix.model import BeliefStructure, Predicate, PredicateFamily, Relation

DEFAULT_CAP = 20_000

Term = tuple  # sorted tuple of (strategy, previous-stage index) pairs


@dataclass(frozen=True)
class StrategyProfile:
    sa: int
    sb: int
    m: int

    def __post_init__(self):
        if self.sa < 1 or self.sb < 1:
            raise ValidationError("strategy sets must be non-empty")
        if self.m < 1:
            raise ValidationError("powerset bound m must be at least 1")


def bounded_powerset_size(n: int, m: int) -> int:
    return sum(comb(n, i) for i in range(min(m, n + 1)))


def bounded_powerset(n: int, m: int) -> list[tuple[int, ...]]:
    """Subsets of ``{0..n-1}`` of size ``< m`` as sorted tuples, in
    lexicographic order."""
    out = []
    for size in range(min(m, n + 1)):
        out.extend(combinations(range(n), size))
    out.sort()
    return out


@dataclass(eq=False)
class Stage:
    level: int
    x_terms: tuple[Term, ...]
    y_terms: tuple[Term, ...]
    pi_x: tuple[int, ...] = ()    # X_level -> X_{level-1}; empty at level 0
    pi_y: tuple[int, ...] = ()
    x_index: dict = field(default_factory=dict, repr=False)
    y_index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.x_index:
            self.x_index = {t: i for i, t in enumerate(self.x_terms)}
        if not self.y_index:
            self.y_index = {t: i for i, t in enumerate(self.y_terms)}

    @property
    def sizes(self) -> tuple[int, int]:
        return len(self.x_terms), len(self.y_terms)


def initial_stage() -> Stage:
    return Stage(0, ((),), ((),))


def _lift(n_strat, prev_size, m):
    # elements of P_{<m}(S x prev) as sorted (s, j) pair tuples
    return tuple(
        tuple(divmod(i, prev_size) for i in subset)
        for subset in bounded_powerset(n_strat * prev_size, m)
    )


def _direct_image(term, pi, level):
    if level == 0:
        return ()
    return tuple(sorted({(s, pi[j]) for s, j in term}))


def functor_apply(stage: Stage, profile: StrategyProfile, cap: int = DEFAULT_CAP) -> Stage:
    """Stage ``k+1`` from stage ``k``."""
    nx, ny = stage.sizes
    for n_strat, prev in ((profile.sb, ny), (profile.sa, nx)):
        count = bounded_powerset_size(n_strat * prev, profile.m)
        if count > cap:
            raise CapExceeded(
                f"stage {stage.level + 1} would have {count} elements (cap {cap})"
            )
    x_terms = _lift(profile.sb, ny, profile.m)
    y_terms = _lift(profile.sa, nx, profile.m)
    if stage.level == 0:
        pi_x = (0,) * len(x_terms)
        pi_y = (0,) * len(y_terms)
    else:
        pi_x = tuple(stage.x_index[_direct_image(t, stage.pi_y, stage.level)] for t in x_terms)
        pi_y = tuple(stage.y_index[_direct_image(t, stage.pi_x, stage.level)] for t in y_terms)
    return Stage(stage.level + 1, x_terms, y_terms, pi_x, pi_y)


def _bijective(pi, target_size):
    return len(pi) == target_size and len(set(pi)) == target_size


@dataclass
class TerminalSequence:
    profile: StrategyProfile
    stages: list[Stage]
    converged_at: int | None = None

    @property
    def depth(self) -> int:
        return len(self.stages) - 1

    def sizes(self) -> list[tuple[int, int]]:
        return [s.sizes for s in self.stages]

    def to_json(self) -> dict:
        return {
            "profile": {"sa": self.profile.sa, "sb": self.profile.sb, "m": self.profile.m},
            "depth": self.depth,
            "stages": [{"level": s.level, "x": s.sizes[0], "y": s.sizes[1]} for s in self.stages],
            "converged_at": self.converged_at,
        }


def connecting_maps_bijective(seq: TerminalSequence, k: int) -> bool:
    """Whether both maps from stage ``k`` down to stage ``k-1`` are bijections."""
    stage, prev = seq.stages[k], seq.stages[k - 1]
    return _bijective(stage.pi_x, prev.sizes[0]) and _bijective(stage.pi_y, prev.sizes[1])


def terminal_sequence(profile: StrategyProfile, depth: int, cap: int = DEFAULT_CAP) -> TerminalSequence:
    """Stages ``0..depth``.

    ``converged_at`` is the least ``k >= 1`` whose connecting maps are both
    bijective. Raises ``CapExceeded`` carrying the sequence built so far when
    a stage would outgrow ``cap``.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    seq = TerminalSequence(profile, [initial_stage()])
    for _ in range(depth):
        try:
            seq.stages.append(functor_apply(seq.stages[-1], profile, cap))
        except CapExceeded as exc:
            raise CapExceeded(str(exc), seq) from None
        k = seq.depth
        if seq.converged_at is None and connecting_maps_bijective(seq, k):
            seq.converged_at = k
    return seq


# --- rendering --------------------------------------------------------------


class _Renderer:
    def __init__(self, seq):
        self.seq = seq
        self.memo = {}

    def term(self, side, level, index):
        key = (side, level, index)
        if key not in self.memo:
            if level == 0:
                text = "*"
            else:
                stage = self.seq.stages[level]
                t = (stage.x_terms if side == "x" else stage.y_terms)[index]
                other = "y" if side == "x" else "x"
                text = "{" + ",".join(
                    f"({s},{self.term(other, level - 1, j)})" for s, j in t
                ) + "}"
            self.memo[key] = text
        return self.memo[key]


def render_term(seq: TerminalSequence, side: str, level: int, index: int) -> str:
    """Canonical string of an ``x`` or ``y`` element at ``level``."""
    return _Renderer(seq).term(side, level, index)


# --- extracted belief models ------------------------------------------------


@dataclass
class ExtractedModel:
    structure: BeliefStructure
    profile: StrategyProfile
    depth: int
    seeds_b: tuple[Term, ...]       # p0 behind each predicate of P_Ub, in order
    seeds_a: tuple[Term, ...]
    witnesses_a: dict               # p0 -> states of Ua assuming its pullback
    witnesses_b: dict
    state_names: dict               # sort -> list of canonical strings

    @property
    def family_b(self) -> PredicateFamily:
        return self.structure.families["P_Ub"]

    @property
    def family_a(self) -> PredicateFamily:
        return self.structure.families["P_Ua"]


def _require_depth(seq, d):
    if d < 0 or len(seq.stages) < d + 2:
        raise PreconditionError(f"need stages through {d + 1}, have {seq.depth}")


def _fibers(n_strat, pi, prev_size):
    # mask of states (s, t) over (s, pi(t)) for each (s, j)
    n_types = len(pi)
    fibers = {(s, j): 0 for s in range(n_strat) for j in range(prev_size)}
    for s in range(n_strat):
        for t, j in enumerate(pi):
            fibers[(s, j)] |= 1 << (s * n_types + t)
    return fibers


def extract_belief_model(seq: TerminalSequence, d: int) -> ExtractedModel:
    _require_depth(seq, d)
    prof = seq.profile
    top, prev = seq.stages[d + 1], seq.stages[d]
    nx, ny = top.sizes
    ua, ub = prof.sa * nx, prof.sb * ny

    fib_b = _fibers(prof.sb, top.pi_y, prev.sizes[1])
    fib_a = _fibers(prof.sa, top.pi_x, prev.sizes[0])

    def pullback(term, fib):
        bits = 0
        for pair in term:
            bits |= fib[pair]
        return bits

    x_masks = [pullback(t, fib_b) for t in top.x_terms]
    y_masks = [pullback(t, fib_a) for t in top.y_terms]
    ra = Relation("Ua", "Ub", tuple(x_masks[i % nx] for i in range(ua)), ub)
    rb = Relation("Ub", "Ua", tuple(y_masks[i % ny] for i in range(ub)), ua)

    seeds_b = tuple(t for t in top.x_terms if t)
    seeds_a = tuple(t for t in top.y_terms if t)
    fam_b = PredicateFamily(
        "Ub", ub, tuple(Predicate("Ub", ub, x_masks[top.x_index[t]]) for t in seeds_b), True
    )
    fam_a = PredicateFamily(
        "Ua", ua, tuple(Predicate("Ua", ua, y_masks[top.y_index[t]]) for t in seeds_a), True
    )
    witnesses_a = {t: tuple(s * nx + top.x_index[t] for s in range(prof.sa)) for t in seeds_b}
    witnesses_b = {t: tuple(s * ny + top.y_index[t] for s in range(prof.sb)) for t in seeds_a}

    r = _Renderer(seq)
    names = {
        "Ua": [f"({s},{r.term('x', d + 1, t)})" for s in range(prof.sa) for t in range(nx)],
        "Ub": [f"({s},{r.term('y', d + 1, t)})" for s in range(prof.sb) for t in range(ny)],
    }
    structure = BeliefStructure(
        {"Ua": ua, "Ub": ub},
        {"Ra": ra, "Rb": rb},
        {},
        {"P_Ua": fam_a, "P_Ub": fam_b},
    )
    return ExtractedModel(structure, prof, d, seeds_b, seeds_a, witnesses_a, witnesses_b, names)


@dataclass(frozen=True)
class RetractionReport:
    holds_a: bool
    holds_b: bool
    checked_a: int
    checked_b: int

    @property
    def holds(self) -> bool:
        return self.holds_a and self.holds_b


def _section_then_retract(family, n_strat, terms, index, pi, n_types):
    # section: predicate -> its direct image along (id x pi), as a type
    # retraction: type -> the predicate of states whose projection it contains
    for p in family:
        image = set()
        for state in p.members:
            s, t = divmod(state, n_types)
            image.add((s, pi[t]))
        term = tuple(sorted(image))
        if term not in index:
            return False
        contained = set(terms[index[term]])
        back = 0
        for state in range(n_strat * n_types):
            s, t = divmod(state, n_types)
            if (s, pi[t]) in contained:
                back |= 1 << state
        if back != p.bits:
            return False
    return True


def check_retraction(seq: TerminalSequence, d: int) -> RetractionReport:
    """Check ``r . s = id`` on both extracted predicate families, where ``s``
    maps a predicate to the type naming its projection and ``r`` maps a
    type to the predicate it assumes."""
    _require_depth(seq, d)
    model = extract_belief_model(seq, d)
    prof = seq.profile
    top = seq.stages[d + 1]
    nx, ny = top.sizes
    ok_a = _section_then_retract(model.family_b, prof.sb, top.x_terms, top.x_index, top.pi_y, ny)
    ok_b = _section_then_retract(model.family_a, prof.sa, top.y_terms, top.y_index, top.pi_x, nx)
    return RetractionReport(ok_a, ok_b, len(model.family_b), len(model.family_a))


@dataclass(frozen=True)
class ClosureRow:
    family: str
    operation: str
    checked: int
    holds: int
    fails: int
    not_measurable: int

    @property
    def closed(self) -> bool:
        return self.fails == 0


@dataclass(frozen=True)
class ClosureReport:
    m: int
    depth: int
    rows: tuple[ClosureRow, ...]

    def row(self, family, operation) -> ClosureRow:
        for r in self.rows:
            if (r.family, r.operation) == (family, operation):
                return r
        raise KeyError((family, operation))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "depth": self.depth,
            "rows": [
                {
                    "family": r.family,
                    "operation": r.operation,
                    "checked": r.checked,
                    "holds": r.holds,
                    "fails": r.fails,
                    "not_measurable": r.not_measurable,
                }
                for r in self.rows
            ],
        }


def verify_closure(model: ExtractedModel) -> ClosureReport:
    """Tabulate which constructions on extracted predicates stay inside the
    extracted families.

    Binary operations are applied to seeds first; a result that is empty or
    has ``m`` or more elements has no name in the family and is counted as
    not measurable. Modal images of members of one family are tested for
    membership in the family on the other side.
    """
    m = model.profile.m
    rows = []
    st = model.structure
    sides = (
        ("P_Ub", model.seeds_b, st.families["P_Ub"], st.relations["Ra"], st.families["P_Ua"]),
        ("P_Ua", model.seeds_a, st.families["P_Ua"], st.relations["Rb"], st.families["P_Ub"]),
    )
    for name, seeds, fam, rel, other in sides:
        preds = fam.predicates
        for op in ("intersection", "union"):
            checked = holds = fails = unmeasurable = 0
            for (i, s1), (j, s2) in combinations(enumerate(seeds), 2):
                checked += 1
                a, b = set(s1), set(s2)
                seed = a & b if op == "intersection" else a | b
                if not 0 < len(seed) < m:
                    unmeasurable += 1
                    continue
                result = preds[i] & preds[j] if op == "intersection" else preds[i] | preds[j]
                if result in fam:
                    holds += 1
                else:
                    fails += 1
            rows.append(ClosureRow(name, op, checked, holds, fails, unmeasurable))
        # rel maps the states assuming members of this family to the family's sort
        for op, image in (("assumes", boxplus_set), ("believes", box_set)):
            checked = holds = fails = 0
            for p in preds:
                checked += 1
                if image(rel, p) in other:
                    holds += 1
                else:
                    fails += 1
            rows.append(ClosureRow(name, op, checked, holds, fails, 0))
    return ClosureReport(m, model.depth, tuple(rows))


def extracted_is_complete(model: ExtractedModel) -> bool:
    st = model.structure
    return (
        is_assumption_complete(st.relations["Ra"], model.family_b).holds
        and is_assumption_complete(st.relations["Rb"], model.family_a).holds
    )
