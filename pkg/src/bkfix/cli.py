"""``bk``: command-line front end.

Exit status: 0 when the checked property holds (or the formula is true),
1 when it fails, 2 on usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

from bkfix import coalgebra as co
from bkfix import completeness as cm
from bkfix import composition as cp
from bkfix import fixpoint as fx
from bkfix import formula as fm
from bkfix.errors import BKError, CapExceeded, PreconditionError
from bkfix.model import dump_model, load_model_file

EXIT_HOLDS, EXIT_FAILS, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _load(args):
    try:
        return load_model_file(args.model)
    except OSError as exc:
        raise UsageError(f"cannot read model {args.model}: {exc.strerror}") from None


def _members(p):
    return list(p.members)


# --- commands ---------------------------------------------------------------


def cmd_eval(args):
    m = _load(args)
    sf = fm.sort_check(fm.parse_formula(args.formula), m, hint=args.sort)
    report = {"command": "eval", "formula": str(sf.formula), "sort": sf.sort}
    if args.state is not None:
        value = fm.evaluate(sf, args.state)
        report.update(state=args.state, value=value, holds=value)
    else:
        ext = fm.extension(sf)
        valid = len(ext) == sf.size
        report.update(extension=_members(ext), valid=valid, holds=valid)
    return report


_KINDS = {
    "assumption": ("relation", cm.is_assumption_complete),
    "belief": ("relation", cm.is_belief_complete),
    "wps": ("relation", cm.is_wps),
    "vwps": ("relation", cm.is_vwps),
}


def cmd_complete(args):
    m = _load(args)
    r = m.relation(args.relation)
    fam = m.family(args.family)
    result = _KINDS[args.kind][1](r, fam)
    report = {
        "command": "complete",
        "kind": args.kind,
        "relation": args.relation,
        "family": args.family,
        "holds": result.holds,
    }
    report.update(result.to_json())
    return report


def _assumptions_json(check):
    return {"A1": check.a1, "A2": check.a2, "A3": check.a3}


def cmd_fixpoint(args):
    m = _load(args)
    report = {"command": "fixpoint", "ra": args.ra, "rb": args.rb}
    if args.predicate is not None:
        p = m.predicate(args.predicate)
        state = args.state
        if state is None:
            state = fx.find_assuming_state(m, args.ra, args.rb, p)
        report.update(mode="basic_lemma", predicate=_members(p), state=state)
        if state is None:
            report.update(assumptions=None, holds=False)
            return report
        check = fx.check_bk_assumptions(m, args.ra, args.rb, p, state)
        report["assumptions"] = _assumptions_json(check)
        if not check.holds:
            report["holds"] = False
            return report
        lemma = fx.basic_lemma_verify(m, args.ra, args.rb, p, state)
        report.update(p_at_state=lemma.lhs, q_at_state=lemma.rhs, holds=lemma.holds)
        return report

    op = fx.OPERATORS[args.op]
    p = fx.operator_predicate(m, args.ra, args.rb, op)
    state = args.state
    if state is None:
        state = fx.find_assuming_state(m, args.ra, args.rb, p)
    report.update(mode="operator", operator=op.name, predicate=_members(p), state=state)
    if state is None:
        report.update(assumptions=None, holds=False)
        return report
    report["assumptions"] = _assumptions_json(fx.check_bk_assumptions(m, args.ra, args.rb, p, state))
    try:
        result = fx.operator_fixpoint(m, args.ra, args.rb, op, state)
    except PreconditionError:
        report["holds"] = False
        return report
    report.update(value=result.value, holds=True)
    return report


def cmd_cycle(args):
    m = _load(args)
    cycle = m.cycle(args.cycle)
    p = m.predicate(args.predicate)
    check = fx.generalized_assumptions_check(m, cycle, p, args.state)
    report = {
        "command": "cycle",
        "cycle": list(cycle.relations),
        "predicate": _members(p),
        "state": args.state,
        "assumes_chain": check.assumes_chain,
        "seriality": list(check.seriality),
    }
    if not check.holds:
        report.update(failing=check.failing, holds=False)
        return report
    lemma = fx.generalized_basic_lemma_verify(m, cycle, p, args.state)
    report.update(failing=[], composite_at_state=lemma.lhs, p_at_state=lemma.rhs, holds=lemma.holds)
    return report


def cmd_compose(args):
    m = _load(args)
    rep = cp.composition_lemma_check(
        m.relation(args.rab), m.relation(args.rbc), m.family(args.family_b), m.family(args.family_c)
    )
    report = {
        "command": "compose",
        "rab": args.rab,
        "rbc": args.rbc,
        "family_b": args.family_b,
        "family_c": args.family_c,
        "holds": rep.conclusion.holds,
    }
    report.update(rep.to_json())
    return report


def cmd_counterexample(args):
    m = _load(args)
    result = cp.characterize_belief_completeness(m.relation(args.relation), m.family(args.family))
    report = {
        "command": "counterexample",
        "relation": args.relation,
        "family": args.family,
        "holds": result.complete,
    }
    report.update(result.to_json())
    return report


def cmd_certify(args):
    m = _load(args)
    fam = m.family(args.family) if args.family else None
    cert = fx.diagonal_certificate(m, args.ra, args.rb, fam)
    report = {
        "command": "certify",
        "ra": args.ra,
        "rb": args.rb,
        "family": args.family,
        "holds": not cert.witness_found,
    }
    report.update(cert.to_json())
    return report


def _profile(args):
    return co.StrategyProfile(args.sa, args.sb, args.m)


def cmd_coalgebra(args):
    profile = _profile(args)
    if args.action == "export":
        return _coalgebra_export(args, profile)
    report = {"command": "coalgebra", "action": "sequence"}
    try:
        seq = co.terminal_sequence(profile, args.depth, args.cap)
        report.update(seq.to_json(), cap_exceeded=False, holds=True)
    except CapExceeded as exc:
        report.update(exc.sequence.to_json(), cap_exceeded=True, holds=False, message=str(exc))
    return report


def _sidecar_path(out):
    root, ext = os.path.splitext(out)
    return f"{root}.sidecar{ext or '.json'}"


def _coalgebra_export(args, profile):
    if not args.out:
        raise UsageError("coalgebra export needs --out")
    level = args.level
    seq = co.terminal_sequence(profile, max(args.depth, level + 1), args.cap)
    model = co.extract_belief_model(seq, level)
    complete = co.extracted_is_complete(model)
    retraction = co.check_retraction(seq, level)
    closure = co.verify_closure(model)
    sidecar = seq.to_json()
    sidecar.update(
        level=level,
        states=model.state_names,
        assumption_complete=complete,
        retraction={"a": retraction.holds_a, "b": retraction.holds_b},
        closure=closure.to_json()["rows"],
    )
    sidecar_path = args.sidecar or _sidecar_path(args.out)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model.structure))
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    sizes = model.structure.sorts
    return {
        "command": "coalgebra",
        "action": "export",
        "level": level,
        "sizes": {"Ua": sizes["Ua"], "Ub": sizes["Ub"]},
        "families": {"P_Ua": len(model.family_a), "P_Ub": len(model.family_b)},
        "assumption_complete": complete,
        "retraction": retraction.holds,
        "holds": complete and retraction.holds,
    }


# --- output -----------------------------------------------------------------


def _use_color(stream):
    if os.environ.get("BK_COLOR", "") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


_GREEN, _RED, _RESET = "\033[32m", "\033[31m", "\033[0m"


def _fmt(value, color):
    if isinstance(value, bool):
        text = "true" if value else "false"
        if color:
            return f"{_GREEN if value else _RED}{text}{_RESET}"
        return text
    if value is None:
        return "-"
    if isinstance(value, list):
        if all(isinstance(v, (int, str)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(map(str, value)) + "]"
        return json.dumps(value, separators=(",", ":"))
    if isinstance(value, dict):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def render_text(report, color=False):
    """Aligned ``key  value`` table; nested objects are flattened with dots."""
    rows = []

    def walk(prefix, obj):
        for key, value in obj.items():
            name = f"{prefix}{key}"
            if isinstance(value, dict) and value and any(isinstance(v, (dict, list)) for v in value.values()):
                walk(name + ".", value)
            else:
                rows.append((name, _fmt(value, color)))

    walk("", report)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"


def build_parser():
    parser = argparse.ArgumentParser(prog="bk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, model=True):
        p = sub.add_parser(name, help=help)
        if model:
            p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.set_defaults(func=func)
        return p

    p = add("eval", cmd_eval, "evaluate a formula at a state or over a whole sort")
    p.add_argument("--formula", required=True)
    p.add_argument("--state", type=int)
    p.add_argument("--sort", help="sort hint for formulas with no atom or modality")

    p = add("complete", cmd_complete, "check a completeness property against a family")
    p.add_argument("--relation", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--kind", choices=sorted(_KINDS), default="assumption")

    p = add("fixpoint", cmd_fixpoint, "operator fixpoint or basic lemma at a state")
    p.add_argument("--ra", required=True)
    p.add_argument("--rb", required=True)
    p.add_argument("--state", type=int, help="defaults to the least state satisfying the assumptions")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--op", choices=sorted(fx.OPERATORS))
    group.add_argument("--predicate", help="named predicate: check assumptions and p(c) <=> q(c)")

    p = add("cycle", cmd_cycle, "generalized assumptions over a belief cycle")
    p.add_argument("--cycle", required=True)
    p.add_argument("--predicate", required=True)
    p.add_argument("--state", type=int, required=True)

    p = add("compose", cmd_compose, "composition lemma hypotheses and conclusion")
    p.add_argument("--rab", required=True)
    p.add_argument("--rbc", required=True)
    p.add_argument("--family-b", required=True)
    p.add_argument("--family-c", required=True)

    p = add("counterexample", cmd_counterexample, "decide belief-completeness, with a counterexample if not")
    p.add_argument("--relation", required=True)
    p.add_argument("--family", required=True)

    p = add("certify", cmd_certify, "diagonal impossibility certificate")
    p.add_argument("--ra", required=True)
    p.add_argument("--rb", required=True)
    p.add_argument("--family", help="family standing for the definable predicates (default: all)")

    p = add("coalgebra", cmd_coalgebra, "terminal sequence and extracted models", model=False)
    p.add_argument("action", nargs="?", choices=("sequence", "export"), default="sequence")
    p.add_argument("--sa", type=int, default=1)
    p.add_argument("--sb", type=int, default=1)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--cap", type=int, default=co.DEFAULT_CAP)
    p.add_argument("--level", type=int, default=1, help="stage index d used for extraction")
    p.add_argument("--out", help="extracted model path (export)")
    p.add_argument("--sidecar", help="sidecar path (export); default <out>.sidecar.json")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_HOLDS
    try:
        report = args.func(args)
    except (UsageError, BKError, ValueError) as exc:
        print(f"bk {args.command}: error: {exc}", file=stderr)
        return EXIT_ERROR
    if args.json:
        stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        stdout.write(render_text(report, _use_color(stdout)))
    return EXIT_HOLDS if report["holds"] else EXIT_FAILS


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
