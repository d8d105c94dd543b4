import io
import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from bkfix import schemas
from bkfix.cli import run
from bkfix.model import load_model_file

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("BK_UPDATE_GOLDEN") == "1"

# name, argv (the model path is appended as --model), expected exit code
CASES = [
    ("eval_true", ["eval", "--formula", "[Ra][[Rb]] p", "--state", "1"], 0),
    ("eval_false", ["eval", "--formula", "[Ra][[Rb]] p0", "--state", "0"], 1),
    ("eval_extension", ["eval", "--formula", "[[Rb]] p0"], 1),
    ("complete_holds", ["complete", "--relation", "Rb", "--family", "single_a"], 0),
    ("complete_fails", ["complete", "--relation", "Rb", "--family", "full_a"], 1),
    ("complete_belief", ["complete", "--relation", "Ra", "--family", "one_b", "--kind", "belief"], 0),
    ("complete_vwps", ["complete", "--relation", "Id", "--family", "single_b", "--kind", "vwps"], 0),
    ("fixpoint_lemma", ["fixpoint", "--ra", "Ra", "--rb", "Rb", "--predicate", "p", "--state", "1"], 0),
    ("fixpoint_lemma_precondition", ["fixpoint", "--ra", "Ra", "--rb", "Rb", "--predicate", "p0", "--state", "0"], 1),
    ("fixpoint_identity", ["fixpoint", "--ra", "Ra", "--rb", "Rb", "--op", "id"], 1),
    ("fixpoint_negation", ["fixpoint", "--ra", "Ra", "--rb", "Rb", "--op", "not"], 1),
    ("cycle", ["cycle", "--cycle", "bk", "--predicate", "p", "--state", "1"], 0),
    ("cycle_fails", ["cycle", "--cycle", "bk", "--predicate", "p0", "--state", "0"], 1),
    ("compose_holds", ["compose", "--rab", "Id", "--rbc", "Rb", "--family-b", "single_b", "--family-c", "single_a"], 0),
    ("compose_fails", ["compose", "--rab", "Ra", "--rbc", "Rb", "--family-b", "single_b", "--family-c", "single_a"], 1),
    ("counterexample_complete", ["counterexample", "--relation", "Ra", "--family", "one_b"], 0),
    ("counterexample_built", ["counterexample", "--relation", "Ra", "--family", "zero_b"], 1),
    ("certify", ["certify", "--ra", "Ra", "--rb", "Rb"], 0),
    ("certify_family", ["certify", "--ra", "Ra", "--rb", "Rb", "--family", "single_a"], 0),
]

COALGEBRA = [
    ("coalgebra_sequence", ["coalgebra", "--sa", "1", "--sb", "1", "--m", "2", "--depth", "4"], 0),
    ("coalgebra_converges", ["coalgebra", "--m", "1", "--depth", "2"], 0),
    ("coalgebra_cap", ["coalgebra", "--sa", "2", "--sb", "2", "--m", "3", "--depth", "4", "--cap", "100"], 1),
]


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def check_golden(name, text):
    path = GOLDEN / name
    if UPDATE:
        path.write_text(text, encoding="utf-8")
    assert text == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("name, argv, code", CASES + COALGEBRA, ids=[c[0] for c in CASES + COALGEBRA])
@pytest.mark.parametrize("fmt", ["text", "json"])
def test_golden(name, argv, code, fmt, m1_path, monkeypatch):
    monkeypatch.setenv("BK_COLOR", "0")
    if argv[0] != "coalgebra":
        argv = argv + ["--model", str(m1_path)]
    if fmt == "json":
        argv = argv + ["--json"]
    got, out, err = invoke(argv)
    assert (got, err) == (code, "")
    check_golden(f"{name}.{'json' if fmt == 'json' else 'txt'}", out)
    if fmt == "json":
        report = json.loads(out)
        jsonschema.validate(report, schemas.load(argv[0]))
        assert report["holds"] == (code == 0)


def test_reports_are_deterministic(m1_path):
    argv = ["compose", "--model", str(m1_path), "--rab", "Id", "--rbc", "Rb",
            "--family-b", "single_b", "--family-c", "single_a", "--json"]
    assert invoke(argv) == invoke(argv)


def test_export_writes_model_and_sidecar(tmp_path):
    out = tmp_path / "model.json"
    code, stdout, _ = invoke(["coalgebra", "export", "--m", "2", "--out", str(out), "--json"])
    assert code == 0
    report = json.loads(stdout)
    jsonschema.validate(report, schemas.load("coalgebra"))
    model = load_model_file(out)
    assert model.sorts == {"Ua": 3, "Ub": 3}
    assert len(model.family("P_Ub")) == 2
    sidecar = json.loads((tmp_path / "model.sidecar.json").read_text())
    assert [s["x"] for s in sidecar["stages"]] == [1, 2, 3, 4]
    assert sidecar["converged_at"] is None
    assert sidecar["assumption_complete"] is True
    check_golden("coalgebra_export_model.json", out.read_text())
    check_golden("coalgebra_export_sidecar.json", json.dumps(sidecar, indent=2) + "\n")


M1 = "<m1>"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--model", "missing.json", "--formula", "p"],
        ["eval", "--formula", "p"],
        ["frobnicate"],
        [],
        ["complete", "--model", M1, "--relation", "Rb", "--family", "nope"],
        ["eval", "--model", M1, "--formula", "[Ra p"],
        ["eval", "--model", M1, "--formula", "[Ra] p"],
        ["eval", "--model", M1, "--formula", "p", "--state", "9"],
        ["fixpoint", "--model", M1, "--ra", "Ra", "--rb", "Rb"],
        ["fixpoint", "--model", M1, "--ra", "Ra", "--rb", "Ra", "--op", "id"],
        ["complete", "--model", M1, "--relation", "Ra", "--family", "single_a"],
        ["coalgebra", "export", "--m", "2"],
        ["coalgebra", "--sa", "0"],
    ],
)
def test_usage_and_validation_errors_exit_2(argv, m1_path):
    argv = [str(m1_path) if a == M1 else a for a in argv]
    code, out, err = invoke(argv)
    assert code == 2
    assert out == ""
    assert err


def test_bad_model_file_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"sorts": {"A": 1}, "relations": {}, "junk": 0}')
    code, _, err = invoke(["certify", "--model", str(bad), "--ra", "R", "--rb", "R"])
    assert code == 2
    assert "junk" in err


def test_color_only_when_enabled(m1_path, monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    argv = ["certify", "--model", str(m1_path), "--ra", "Ra", "--rb", "Rb"]
    monkeypatch.delenv("BK_COLOR", raising=False)
    out = Tty()
    run(argv, stdout=out, stderr=io.StringIO())
    assert "\033[" in out.getvalue()
    monkeypatch.setenv("BK_COLOR", "0")
    out = Tty()
    run(argv, stdout=out, stderr=io.StringIO())
    assert "\033[" not in out.getvalue()


def test_module_entry_point(m1_path):
    proc = subprocess.run(
        [sys.executable, "-m", "bkfix.cli", "eval", "--model", str(m1_path), "--formula", "[Ra][[Rb]] p", "--state", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "true" in proc.stdout
