import json
import subprocess
import sys
from importlib import resources

from logdeg.cli import main

FIX = resources.files("logdeg").joinpath("fixtures")


def run(capsys, *argv):
    status = main(["--json", *map(str, argv)])
    return status, json.loads(capsys.readouterr().out)


def test_macmahon(capsys):
    status, rep = run(capsys, "series", "macmahon", "--order", 4)
    assert status == 0 and rep["result"]["coefficients"] == ["1", "1", "3", "6", "13"]
    assert "timing" not in rep and rep["threads"] == 1


def test_text_output(capsys):
    assert main(["series", "macmahon", "--order", "4"]) == 0
    assert capsys.readouterr().out.strip() == "1 + q + 3*q^2 + 6*q^3 + 13*q^4 + O(q^5)"


def test_json_is_deterministic(capsys):
    argv = ["--json", "nak", "diag", "--sizes", "2,1"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_star_of_p2_is_p1(capsys):
    status, rep = run(capsys, "fan", "star", FIX / "p2_fan.json", "--cone", "r1")
    assert status == 0 and rep["result"]["lattice_rank"] == 1
    assert len(rep["inputs"]) == 1
    assert next(iter(rep["inputs"].values())).startswith("sha256:")


def test_rigid_conic(capsys):
    status, rep = run(capsys, "deg", "rigid", "--degree", "2,2,2", "--points",
                      FIX / "p2_points5.json")
    assert status == 0 and rep["result"]["count"] == 1


def test_bad_thread_count(capsys, monkeypatch):
    monkeypatch.setenv("LOGDEG_THREADS", "zero")
    status, rep = run(capsys, "series", "macmahon", "--order", 2)
    assert status == 1 and "LOGDEG_THREADS" in rep["error"]["message"]
    monkeypatch.setenv("LOGDEG_THREADS", "3")
    status, rep = run(capsys, "series", "macmahon", "--order", 2)
    assert status == 0 and rep["threads"] == 3


def test_usage_errors_exit_one(capsys):
    assert main(["frobnicate"]) == 1
    assert main(["series", "macmahon"]) == 1
    assert main([]) == 1
    capsys.readouterr()


def test_missing_file_exits_one(capsys, tmp_path):
    status, rep = run(capsys, "fan", "validate", tmp_path / "nope.json")
    assert status == 1 and rep["error"]["kind"] == "input"


def test_timing_is_opt_in(capsys):
    status = main(["--json", "--timing", "nak", "invcheck", "--sizes", "2"])
    rep = json.loads(capsys.readouterr().out)
    assert status == 0 and rep["timing"]["seconds"] >= 0


def test_consistent_jobs(capsys):
    a, b = (FIX / f"trivalent_{s}_maximal.json" for s in "AB")
    status, rep = run(capsys, "check", "--jobs", a, b)
    assert status == 0 and rep["result"]["equal"]
    a, b = (FIX / f"trivalent_{s}_full.json" for s in "AB")
    status, rep = run(capsys, "check", "--jobs", a, b)
    assert status == 1 and rep["result"]["first_mismatch"]["exponent"] == -2


def test_cut_and_glue_through_files(capsys, tmp_path):
    status, rep = run(capsys, "deg", "fixture", "--name", "triangle", "--seed", 3,
                      "--write", tmp_path)
    assert status == 0
    height = rep["result"]["sample"]["height"]
    files = [tmp_path / n for n in ("degeneration.json", "records.json", "complex.json")]
    status, rep = run(capsys, "deg", "cut", *files, "--height", height)
    assert status == 0
    parts = tmp_path / "parts.json"
    parts.write_text(json.dumps(rep["result"]))
    status, rep = run(capsys, "deg", "glue", *files[:2], parts)
    assert status == 0
    glued = tmp_path / "glued.json"
    glued.write_text(json.dumps(rep["result"]["complex"]))
    status, again = run(capsys, "deg", "cut", *files[:2], glued, "--height",
                        rep["result"]["height"])
    assert status == 0
    assert again["result"]["evaluations"] == json.loads(parts.read_text())["evaluations"]


def test_examples_degree0(capsys):
    status, rep = run(capsys, "examples", "degree0")
    assert status == 0 and rep["result"]["two_vertex_job"] == "F^2"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "logdeg", "series", "macmahon", "--order", "2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("1 + q + 3*q^2")
