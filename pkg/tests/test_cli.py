import io
import json
import shutil
import subprocess
import sys

import pytest

from gptlab.cli import main
from gptlab.model import square_model
from gptlab.serialize import load_state_space, save_state_space, state_space_to_json


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "square.json"
    save_state_space(square_model(), path)
    return path


def test_generate_classical(tmp_path):
    path = tmp_path / "c.json"
    assert run("generate", "classical", "--d", "3", "--out", str(path))[0] == 0
    s = load_state_space(path)
    assert s.ambient_dim == 3 and len(s.vertices) == 3


def test_generate_polygon_with_scientific_eps(tmp_path):
    path = tmp_path / "p.json"
    assert run("generate", "polygon", "--n", "5", "--eps", "1e-6", "--out", str(path))[0] == 0
    data = json.loads(path.read_text())
    assert data["model"]["eps"] == "1/1000000"
    assert len(data["omega_vertices"]) == 5


def test_generate_random_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run("generate", "random", "--dim", "3", "--vertices", "7", "--seed", "42", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_model_file_round_trip(square_file, tmp_path):
    s = load_state_space(square_file)
    again = tmp_path / "again.json"
    save_state_space(s, again)
    assert again.read_bytes() == square_file.read_bytes()
    assert load_state_space(again).vertices == s.vertices


def test_report_json(square_file):
    code, out, _ = run("report", "--in", str(square_file))
    assert code == 0
    data = json.loads(out)
    assert data["classical"] is False
    assert all(row["verdict"] == "DimensionClash" for row in data["preservation"])
    assert data["discrimination"]["violation"] is not None
    assert len(data["pure_effects"]) == 6 and len(data["pure_measurements"]) == 3
    assert out == json.dumps(data, indent=2) + "\n"


def test_report_single_section_text(square_file):
    code, out, _ = run("report", "--in", str(square_file), "--which", "classical", "--format", "text")
    assert code == 0
    assert "classical: False" in out and "DimensionClash" in out


def test_distinguish_square(square_file):
    code, out, _ = run("distinguish", "--in", str(square_file), "--groups", "2|3")
    assert code == 0
    data = json.loads(out)
    assert data["groups"] == [[2], [3]]
    assert data["verdict"] in ("Distinguishable", "NotDistinguishable")
    code, out, _ = run("distinguish", "--in", str(square_file), "--groups", "2|3|4")
    assert code == 0 and json.loads(out)["verdict"] == "NotDistinguishable"
    assert "certificate" in json.loads(out)


def test_distinguish_classical(tmp_path):
    path = tmp_path / "c.json"
    run("generate", "classical", "--d", "3", "--out", str(path))
    code, out, _ = run("distinguish", "--in", str(path), "--groups", "1|2|3")
    data = json.loads(out)
    assert code == 0 and data["verdict"] == "Distinguishable" and len(data["measurement"]) == 3


@pytest.mark.parametrize("groups", ["0|1", "1|9", "1||2", "a|1"])
def test_distinguish_bad_groups(square_file, groups):
    code, _, err = run("distinguish", "--in", str(square_file), "--groups", groups)
    assert code == 2 and err.startswith("error:")


def test_missing_and_malformed_files(tmp_path):
    assert run("report", "--in", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("report", "--in", str(bad))[0] == 2
    data = state_space_to_json(square_model())
    data["omega_vertices"][0][-1] = "2"
    bad.write_text(json.dumps(data))
    code, _, err = run("report", "--in", str(bad))
    assert code == 2 and "omega_vertices[0]" in err


def test_usage_errors():
    assert run("generate", "classical")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("generate", "random", "--dim", "2", "--vertices", "4", "--seed", "-1", "--out", "x")[0] == 2


def test_input_domain_error(tmp_path):
    code, _, err = run("generate", "classical", "--d", "0", "--out", str(tmp_path / "x.json"))
    assert code == 2 and err


def test_golden_passes_and_is_deterministic():
    first = run("golden")
    second = run("golden")
    assert first[0] == 0 and first == second
    assert "0 failed" in first[1]


def test_golden_reports_tampered_corpus(tmp_path):
    data = state_space_to_json(square_model())
    # Stretch one corner: still a valid quadrilateral model, but no longer the square.
    data["omega_vertices"][0] = ["-2", "0", "1"]
    (tmp_path / "square.json").write_text(json.dumps(data))
    code, out, _ = run("golden", "--corpus", str(tmp_path))
    assert code == 1
    assert any(line.startswith("FAIL ") and ": square:" in line for line in out.splitlines())
    assert "FAIL discrimination-square" in out
    failures = [line for line in out.splitlines() if line.startswith("FAIL ")]
    assert all("square" in line for line in failures)


def test_golden_missing_corpus(tmp_path):
    assert run("golden", "--corpus", str(tmp_path / "missing"))[0] == 2


def test_console_entry_point(square_file):
    exe = shutil.which("gptlab")
    cmd = [exe] if exe else [sys.executable, "-m", "gptlab"]
    proc = subprocess.run(cmd + ["distinguish", "--in", str(square_file), "--groups", "1|9"], capture_output=True)
    assert proc.returncode == 2
