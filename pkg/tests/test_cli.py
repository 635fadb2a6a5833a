import io
import json
import subprocess
import sys

import pytest

from condprob.cli import main

from conftest import EXAMPLE1_TEXT


def run(*argv):
    out = io.StringIO()
    code = main(list(map(str, argv)), out)
    return code, out.getvalue()


@pytest.fixture
def write(tmp_path):
    def _write(text, name="in.txt"):
        path = tmp_path / name
        path.write_text(text)
        return path
    return _write


def test_check_accepts_example(example1_file):
    code, text = run("check", example1_file)
    assert code == 0
    assert text.splitlines()[0] == "g-coherent"


def test_check_rejects(write):
    path = write('atoms A\nassess "TRUE" given "TRUE" in [0, 1/2]\n')
    code, text = run("check", path)
    assert code == 1
    assert text.splitlines() == ["not g-coherent", "failing subfamily: entries 1"]


def test_check_reports_input_entries_after_merging(write):
    path = write('atoms A B\nassess "A" given "TRUE" = 1/4\nassess "~A" given "TRUE" = 1/4\n')
    code, text = run("check", path)
    assert code == 1 and "not g-coherent" in text


@pytest.mark.parametrize("body", [
    'assess "A" given "TRUE" in [1/0, 1]',
    'assess "A" given "TRUE" in [1/2, 1/3]',
    'assess "A &" given "TRUE" = 0',
    'assess "Z" given "TRUE" = 0',
    'assess "A" given "A & ~A" = 0',
    'frobnicate',
])
def test_input_errors(write, body, capsys):
    code, _ = run("check", write("atoms A B\n" + body + "\n"))
    assert code == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file(tmp_path):
    assert run("check", tmp_path / "nope.txt")[0] == 2


def test_world_cap(write):
    path = write('atoms A B C\nassess "A" given "TRUE" = 1/2\n')
    assert run("--world-cap", 2, "check", path)[0] == 2
    assert run("check", write('atoms A B C\noption world_cap 2\nassess "A" given "TRUE" = 1/2\n'))[0] == 2


def test_correct_example(example1_file):
    code, text = run("correct", example1_file)
    assert code == 0
    assert text == (
        "atoms A B C D\n"
        'assess "A & B & C" given "D" in [1/2, 1]  # propagated [1/2, 1]\n'
        'assess "B" given "A & C" in [0, 1/2]  # propagated [0, 1/2]\n'
        'assess "C" given "A & B" in [1/3, 2/3]  # propagated [1/3, 2/3]\n'
    )


def test_correct_output_is_a_valid_input(write):
    code, text = run("correct", write('atoms A B\nassess "A" given "TRUE" in [0, 1/2]\nassess "A & B" given "TRUE" in [0, 1]\n'))
    assert code == 0
    assert 'assess "A & B" given "TRUE" in [0, 1/2]' in text
    assert run("correct", write(text, "again.txt"))[1] == text


def test_bounds(example1_file):
    assert run("bounds", example1_file, "--event", "B", "--given", "A & C") == (0, "[0, 1/2]\n")
    assert run("bounds", example1_file, "--event", "A & B & C", "--given", "D") == (0, "[1/2, 1]\n")


def test_bounds_without_assessment(write):
    path = write("atoms A B\n")
    assert run("bounds", path, "--event", "A") == (0, "[0, 1]\n")
    assert run("bounds", path, "--event", "A | ~A") == (0, "[1, 1]\n")
    assert run("bounds", path, "--event", "A & ~A") == (0, "[0, 0]\n")
    assert run("bounds", path, "--event", "A", "--given", "A & ~A")[0] == 2


def test_bounds_incoherent(write):
    path = write('atoms A\nassess "TRUE" given "TRUE" in [0, 1/2]\n')
    assert run("bounds", path, "--event", "A")[0] == 1


def test_synthesize_and_verify(example1_file, tmp_path):
    precise = tmp_path / "p.txt"
    precise.write_text("1/2 0 1/3\n")
    result = tmp_path / "out.json"
    code, _ = run("synthesize", example1_file, "--precise", precise, "-o", result)
    assert code == 0
    data = json.loads(result.read_text())
    assert data["table"] == ["1/2", "0", "1/3"]
    assert [x["owner"] for x in data["class_X"]] == [0, 0, 1, 1, 1]
    assert data["stages"][0]["solution"]["202"] == "1"
    assert all(r["passed"] for r in data["report"].values())
    code, text = run("verify", result)
    assert code == 0
    assert text.splitlines() == [f"{name}: pass" for name in data["report"]]


def test_synthesize_default_selection(example1_file):
    code, text = run("synthesize", example1_file)
    assert code == 0
    assert json.loads(text)["precise"] == ["3/4", "1/4", "1/2"]


def test_synthesize_precise_in_document(write):
    path = write(EXAMPLE1_TEXT + "precise 1/2 0 1/3\nwitness 1 00=1/3 02=1/3 11=1/3\n")
    code, text = run("synthesize", path)
    data = json.loads(text)
    assert code == 0
    assert data["stages"][1]["solution"] == {"00": "1/3", "02": "1/3", "11": "1/3", "12": "0", "20": "0", "22": "0"}


def test_synthesize_rejects_incoherent_override(example1_file, tmp_path):
    precise = tmp_path / "p.txt"
    precise.write_text("1/4 0 1/3\n")
    code, text = run("synthesize", example1_file, "--precise", precise)
    assert code == 1 and text.startswith("not g-coherent")


def test_synthesize_is_deterministic(example1_file):
    first = run("synthesize", example1_file, "--trace")[1]
    assert first == run("synthesize", example1_file, "--trace")[1]
    trace = json.loads(first)["trace"]
    assert trace and {t["kind"] for t in trace} <= {"feasibility", "min", "max"}


def test_verify_catches_tampering(write, tmp_path):
    data = json.loads(run("synthesize", write(EXAMPLE1_TEXT + "precise 1/2 0 1/3\n"))[1])
    masses = data["stages"][1]["refined_masses"]
    masses["020"], masses["111"] = "0", "2/3"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, text = run("verify", path)
    assert code == 1
    assert "consistent: fail" in text


def test_verify_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{}")
    assert run("verify", path)[0] == 2
    path.write_text("not json")
    assert run("verify", path)[0] == 2


def test_console_entry_point(example1_file):
    proc = subprocess.run([sys.executable, "-m", "condprob", "check", str(example1_file)], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("g-coherent")
