import json
import subprocess
import sys
from pathlib import Path

import pytest

from vqecompile.cli import EXIT_CERT, EXIT_IO, EXIT_PARSE, EXIT_RANGE, AnsatzError, parse_ansatz, run

ANSATZ = Path(__file__).resolve().parent.parent / "ansatz"
FAST = ["--ga-budget", "40", "--sa-sweeps", "5", "--restarts", "16"]


def cli(tmp_path, *args, name="out"):
    qasm, report = tmp_path / f"{name}.qasm", tmp_path / f"{name}.json"
    code = run([*map(str, args), "--out-circuit", str(qasm), "--out-report", str(report)])
    return code, qasm, report


def test_nine_hybrid_file(tmp_path):
    code, qasm, report = cli(tmp_path, ANSATZ / "nine_hybrids.json", "--certify", "off", *FAST)
    assert code == 0
    rep = json.loads(report.read_text())
    assert sorted(rep["membership"]["color"]) == ["h0", "h5", "h7"]
    assert sorted(rep["membership"]["demoted"]) == ["h1", "h6"]
    cx = sum(line.startswith("cx ") for line in qasm.read_text().splitlines())
    assert cx == rep["cnot_total"] == rep["table_row"]["Adv"]


def test_runs_are_byte_identical(tmp_path):
    a = cli(tmp_path, ANSATZ / "fermionic_double.json", "--seed", "4", *FAST, name="a")
    b = cli(tmp_path, ANSATZ / "fermionic_double.json", "--seed", "4", *FAST, name="b")
    assert a[0] == b[0] == 0
    assert a[1].read_bytes() == b[1].read_bytes()
    assert a[2].read_bytes() == b[2].read_bytes()


def test_empty_terms(tmp_path):
    src = tmp_path / "empty.json"
    src.write_text('{"n_orbitals": 3, "terms": []}')
    code, qasm, report = cli(tmp_path, src)
    assert code == 0
    assert json.loads(report.read_text())["cnot_total"] == 0
    assert "OPENQASM" in qasm.read_text()


def test_stdin_and_stdout():
    text = (ANSATZ / "fermionic_double.json").read_text()
    out = subprocess.run([sys.executable, "-m", "vqecompile", "-", *FAST], input=text,
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("OPENQASM")
    assert "cnots" in out.stderr


def test_flags_reach_the_config(tmp_path):
    code, _, report = cli(tmp_path, ANSATZ / "fermionic_double.json", "--no-gamma", "--no-hybrid", "--seed", "9", *FAST)
    cfg = json.loads(report.read_text())["config"]
    assert code == 0 and cfg["seed"] == 9 and not cfg["enable_gamma"] and not cfg["enable_hybrid"]
    assert cfg["ga_budget"] == 40


@pytest.mark.parametrize("text,line,col", [
    ('{"n_orbitals": 4,\n "terms": [\n  {"create": [1], "annihilate": [0]},\n  {"create": [1] "annihilate": [0]}\n]}', 4, 18),
    ('{"n_orbitals": 4, "terms": [\n {"create": [1, 1], "annihilate": [0, 2]}]}', 2, 2),
    ('{"n_orbitals": "four", "terms": []}', 1, 16),
    ('{"n_orbitals": 4,\n "terms": [{"create": [1], "annihilate": "0"}]}', 2, 12),
    ('[]', 1, 1),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(AnsatzError) as e:
        parse_ansatz(text)
    assert (e.value.line, e.value.col, e.value.code) == (line, col, EXIT_PARSE)


def test_range_error():
    text = '{"n_orbitals": 4, "indexing": "one_based",\n "terms": [{"create": [5], "annihilate": [1]}]}'
    with pytest.raises(AnsatzError) as e:
        parse_ansatz(text)
    assert e.value.code == EXIT_RANGE and e.value.line == 2 and "5" in str(e.value)


def test_one_based_shift():
    a = parse_ansatz('{"n_orbitals": 4, "indexing": "one_based", "terms": [{"create": [4, 3], "annihilate": [2, 1], "param": "x"}]}')
    assert a.terms[0].create == (3, 2) and a.terms[0].annihilate == (1, 0) and a.terms[0].param == "x"


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n_orbitals": 2, "terms": [{"create": [3], "annihilate": [0]}]}')
    assert run([str(bad)]) == EXIT_RANGE
    assert "line 1" in capsys.readouterr().err
    bad.write_text("{")
    assert run([str(bad)]) == EXIT_PARSE
    assert run([str(tmp_path / "missing.json")]) == EXIT_IO
    ok = ANSATZ / "fermionic_double.json"
    assert run([str(ok), *FAST, "--out-circuit", str(tmp_path / "no" / "dir.qasm")]) == EXIT_IO
    assert EXIT_CERT == 5


def test_bad_flag_value_is_usage_error():
    with pytest.raises(SystemExit) as e:
        run(["x.json", "--certify", "sometimes"])
    assert e.value.code == 2


def test_nonpositive_budget(tmp_path):
    assert run([str(ANSATZ / "fermionic_double.json"), "--ga-budget", "0"]) == EXIT_PARSE
