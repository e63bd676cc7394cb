import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from zonalbound.cli import dispatch, output_schema
from zonalbound.codes import petersen_gram
from zonalbound.psdcomp import matrix_to_json

SCHEMA = output_schema()


@pytest.fixture
def files(tmp_path):
    pet = tmp_path / "petersen.json"
    pet.write_text(json.dumps(matrix_to_json(petersen_gram())))
    motivating = tmp_path / "motivating.json"
    motivating.write_text(json.dumps({"dim": 3, "entries": [["1", None, "-1"], [None, "2", "1"], ["-1", "1", None]]}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "entries": [["1", "2"], ["2", "1"]]}))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dim": 5, "angles": "-1/3,1/3", "degree": 2}))
    return {"pet": str(pet), "motivating": str(motivating), "bad": str(bad), "cfg": str(cfg)}


def run(*argv):
    code, out, err = dispatch(list(argv))
    doc = json.loads(out) if out and out.lstrip().startswith("{") else None
    if doc is not None:
        jsonschema.validate(doc, SCHEMA)
        assert doc["exit_code"] == code
    return code, doc, out, err


def test_bound_examples():
    code, doc, *_ = run("bound", "--dim", "10", "--angles", "-1,-1/2,1/2", "--stabilize")
    assert code == 0 and doc["result"]["bound_floor"] == 46
    assert doc["config"]["angles"] == ["-1", "-1/2", "1/2"]
    code, doc, *_ = run("bound", "--dim", "2", "--angles", "-1", "--degree", "1")
    assert code == 0 and doc["result"]["bound_floor"] == 2 and doc["result"]["gbar"] == "1/2"


def test_probe_exit_two_on_budget():
    code, doc, *_ = run("probe", "--dim", "10", "--angles", "-1,-1/2,1/2", "--budget", "1000")
    assert code == 2 and doc["status"] == "Inconclusive" and doc["result"]["bound_floor"] == 46


def test_probe_sharp():
    code, doc, *_ = run("probe", "--dim", "5", "--angles", "-1/3,1/3")
    assert code == 0 and doc["status"] == "Sharp" and doc["result"]["witness"]["dim"] == 10


def test_usage_errors():
    assert run("bound", "--dim", "2", "--bogus")[0] == 1
    assert run("bound", "--angles", "-1")[0] == 1
    assert run("nosuch")[0] == 1
    assert run()[0] == 1
    assert run("bound", "--dim", "2", "--angles", "-1", "--degree", "1", "--stabilize")[0] == 1
    assert run("kraw-limit", "--j", "2", "--u", "1/2")[0] == 1


def test_input_errors():
    assert run("bound", "--dim", "2", "--angles", "1")[0] == 1
    assert run("complete", "--matrix", "/nonexistent.json")[0] == 1
    assert run("fuzz", "--coeffs", "0,-1", "--trials", "5")[0] == 1


def test_every_command_validates(files):
    cases = [
        ("interval-bound", "--dim", "3", "--cos-theta", "-1/2", "--degree", "1"),
        ("theta", "--dim", "3", "--t", "0", "--kmax", "50"),
        ("theta", "--dim", "3", "--t", "1/2", "--kmax", "1"),
        ("verify-code", "--dim", "5", "--gram", files["pet"], "--angles", "-1/3,1/3"),
        ("verify-code", "--dim", "4", "--gram", files["pet"]),
        ("complete", "--matrix", files["motivating"]),
        ("complete", "--matrix", files["motivating"], "--apply", "0,0,1"),
        ("complete", "--matrix", files["bad"]),
        ("cube-pd", "--n", "4", "--values", "1,1/4,0,1/4,1"),
        ("kraw-limit", "--j", "2", "--u", "1/2", "--n", "2000"),
        ("kraw-limit", "--j", "3", "--u", "-1/2", "--sweep", "100:400:100"),
        ("cone", "--points", "-1,0,1", "--target", "auto:3", "--gens", "auto:2", "--dim", "3", "--hull"),
        ("cone", "--points", "-1,0,1", "--target", "1,0,1", "--gens", "1,1,1;-1,0,1"),
        ("fit-preserver", "--points", "-1,0,1", "--values", "1,0,1", "--degree", "3"),
        ("fit-preserver", "--points", "-1,0,1", "--values", "1,0,-1", "--degree", "3"),
        ("fuzz", "--coeffs", "0,0,1", "--trials", "20"),
        ("fuzz", "--coeffs", "0,-1", "--trials", "20", "--negative-control"),
    ]
    statuses = []
    for argv in cases:
        code, doc, _out, err = run(*argv)
        assert doc is not None, err
        statuses.append(doc["status"])
    assert statuses == [
        "Certified", "Captured", "Inconclusive", "Realizable", "NotRealizable", "Completable",
        "Completable", "Infeasible", "PositiveDefinite", "Computed", "Computed", "Member",
        "NotMember", "Member", "NotMember", "NoViolation", "Violation",
    ]


def test_no_floats_in_json():
    _c, _d, out, _e = run("theta", "--dim", "3", "--t", "0", "--kmax", "50")

    def walk(x):
        assert not isinstance(x, float)
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)

    walk(json.loads(out))


def test_byte_identical():
    argv = ["fuzz", "--coeffs", "0,0,1", "--trials", "30", "--seed", "3"]
    assert dispatch(argv)[1] == dispatch(argv)[1]
    argv = ["bound", "--dim", "5", "--angles", "-1/3,1/3", "--format", "csv"]
    assert dispatch(argv)[1] == dispatch(argv)[1]


def test_config_file_and_flag_precedence(files):
    code, doc, *_ = run("bound", "--config", files["cfg"])
    assert doc["config"]["dim"] == 5 and doc["result"]["degree_cap"] == 2
    code, doc, *_ = run("bound", "--config", files["cfg"], "--dim", "3")
    assert doc["config"]["dim"] == 3


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dim": 3, "nonsense": 1}))
    assert run("bound", "--config", str(cfg), "--angles", "-1")[0] == 1


def test_budget_env(monkeypatch):
    monkeypatch.setenv("ZONALBOUND_BUDGET", "123")
    code, doc, *_ = run("probe", "--dim", "10", "--angles", "-1,-1/2,1/2")
    assert code == 2 and doc["config"]["budget"] == 123 and doc["result"]["search"]["nodes"] == 123
    code, doc, *_ = run("probe", "--dim", "10", "--angles", "-1,-1/2,1/2", "--budget", "50")
    assert doc["config"]["budget"] == 50


def test_csv_sweep_table():
    _c, _d, out, _e = run("kraw-limit", "--j", "2", "--u", "1/2", "--sweep", "100:300:100", "--format", "csv")
    rows = [r for r in csv.reader(io.StringIO(out)) if not r[0].startswith("#")]
    assert rows[0] == ["n", "d", "scaled", "error", "n_times_error", "within_envelope"]
    assert [r[0] for r in rows[1:]] == ["100", "200", "300"]
    assert rows[1][3] == "1/100"


def test_human_mode_marks_approximations():
    _c, _d, out, _e = run("bound", "--dim", "3", "--angles", "-1/2", "--degree", "1", "--format", "human")
    assert "gbar: 1/3 (≈ 0.3333333333)" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "zonalbound.cli", "bound", "--dim", "2", "--angles", "-1", "--degree", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["bound_floor"] == 2
    proc = subprocess.run([sys.executable, "-m", "zonalbound.cli", "bound", "--oops"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr
