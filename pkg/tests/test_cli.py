import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from pcadyn.cli import main, run
from pcadyn.report import REPORT_SCHEMA, dumps

FIXTURES = Path(__file__).parent / "fixtures"


def fx(name):
    return str(FIXTURES / name)


@pytest.mark.parametrize("name, code, verdict", [
    ("power2.map", 0, "PASS"),
    ("power3.map", 0, "PASS"),
    ("cyclic.map", 0, "PASS"),
    ("germs.map", 0, "PASS"),
    ("power2_missing_z.map", 3, "REFUSED"),
    ("parabolic1d.map", 2, "FAIL-DICHOTOMY"),
    ("degenerate.map", 1, "ERROR"),
    ("bad_inhomogeneous.map", 1, "ERROR"),
])
def test_exit_codes_and_schema(name, code, verdict):
    got, text, rep = run(["analyze", fx(name)])
    assert got == code and rep["verdict"] == verdict
    assert text.endswith("\n")
    jsonschema.validate(json.loads(dumps(rep)), REPORT_SCHEMA)


def test_refusal_makes_no_claim():
    _, text, rep = run(["analyze", fx("power2_missing_z.map")])
    assert rep["pca"]["status"] == "refused"
    assert "fixed_points" not in rep
    assert "not covered" in text


def test_degenerate_witness_is_reported():
    _, text, rep = run(["analyze", fx("degenerate.map")])
    assert rep["error"]["type"] == "DegenerateMapError"
    assert rep["error"]["witness"] == ["0", "0", "1"]


def test_parse_error_location():
    _, _, rep = run(["analyze", fx("bad_inhomogeneous.map")])
    assert (rep["error"]["line"], rep["error"]["column"]) == (3, 7)


def test_analyze_text():
    _, text, _ = run(["analyze", fx("power2.map")])
    assert "fixed points: 7" in text
    assert "curve line: [s^2 : t^2], d' = 2, PCF, dichotomy PASS" in text
    assert text.rstrip().endswith("verdict: PASS")


def test_germ_lines():
    _, text, rep = run(["analyze", fx("germs.map")])
    assert "germ cusp: cusp: eigenvalues 4, 8 = λ^2, λ^3 (λ=2) PASS" in text
    assert all(g["passed"] for g in rep["germs"])


def test_check_pca_and_fixed_points():
    code, text, rep = run(["check-pca", fx("cyclic.map")])
    assert code == 0 and "x -> z (periodic 3)" in text
    code, text, rep = run(["fixed-points", fx("power3.map")])
    assert code == 0 and len(rep["fixed_points"]) == 13


def test_puiseux_command():
    code, text, _ = run(["puiseux", "y^2 - x^3"])
    assert code == 0
    assert "branch: m=2, y = t^3 + O(t^17)  (characteristic m=2, n=3)" in text


def test_lift_command():
    code, text, rep = run(["lift", fx("power2.map"), "--curve", "conic"])
    assert code == 0 and text.strip() == "[s^2 : t^2], d' = 2, PCF, dichotomy PASS"
    code, _, rep = run(["lift", fx("power2.map"), "--curve", "nope"])
    assert code == 1


def test_potential_command():
    code, text, rep = run(["potential", fx("power2.map"), "--point", "2,1,1", "--iters", "40"])
    assert code == 0 and text.startswith("H = 0.69314718055994")


def test_json_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["analyze", fx("power2.map"), "--json", str(a)])
    main(["analyze", fx("power2.map"), "--json", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert rep["schema"] == "pcadyn.audit/1"


def test_json_to_stdout(capsys):
    main(["fixed-points", fx("power2.map"), "--json", "-"])
    out = capsys.readouterr().out
    doc = json.loads(out[out.index("{"):])
    jsonschema.validate(doc, REPORT_SCHEMA)


def test_errors_go_to_stderr(capsys):
    assert main(["analyze", fx("degenerate.map")]) == 1
    cap = capsys.readouterr()
    assert cap.out == "" and cap.err.startswith("error: DegenerateMapError")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pcadyn.cli", "analyze", fx("power2_missing_z.map")],
                          capture_output=True, text=True)
    assert proc.returncode == 3


def test_thread_variable_is_validated():
    proc = subprocess.run([sys.executable, "-c", "import pcadyn"], capture_output=True, text=True,
                          env={"PCADYN_THREADS": "zero", "PATH": ""})
    assert proc.returncode != 0 and "PCADYN_THREADS" in proc.stderr
