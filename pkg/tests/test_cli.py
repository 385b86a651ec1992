import json
import subprocess
import sys

import pytest

from dsres.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def test_solve_writes_cache_then_hits(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--r", "3", "--index", "1", "--floor", "-25/3", "--cache-dir", str(tmp_path))
    assert code == 0
    assert "residual: OK" in out and "cache: miss" in out
    assert (tmp_path / "airy_A2_a1_kappa1.json").exists()
    code, out, _ = run(capsys, "--cache-dir", str(tmp_path), "solve", "--r", "3", "--index", "1", "--floor", "-25/3")
    assert code == 0 and "cache: hit" in out


def test_cache_files_are_deterministic(tmp_path, capsys):
    blobs = []
    for sub in ("one", "two"):
        d = tmp_path / sub
        assert run(capsys, "solve", "--r", "4", "--index", "2", "--floor", "-9", "--cache-dir", str(d))[0] == 0
        blobs.append((d / "airy_A3_a2_kappa1.json").read_bytes())
    assert blobs[0] == blobs[1]
    data = json.loads(blobs[0])
    assert data["floor"] == "-9" and data["normalization"] == "kappa1"


def test_solve_json_format(capsys):
    code, out, _ = run(capsys, "--format", "json", "solve", "--r", "2", "--index", "1", "--floor", "-7")
    data = json.loads(out)
    assert code == 0 and data["residual"] == "ok"
    assert data["leading"][0] == {"exponent": "1/2", "matrix": [["0", "0"], ["1", "0"]]}


def test_solve_usage_errors(capsys):
    assert run(capsys, "solve", "--r", "3", "--index", "1", "--floor", "0")[0] == 1
    assert run(capsys, "solve", "--r", "3", "--index", "4", "--floor", "-5")[0] == 1
    assert run(capsys, "solve", "--r", "3", "--index", "1", "--floor", "abc")[0] == 1


def test_corrupted_cache_is_an_invariant_failure(tmp_path, capsys):
    assert run(capsys, "solve", "--r", "2", "--index", "1", "--floor", "-5", "--cache-dir", str(tmp_path))[0] == 0
    path = tmp_path / "airy_A1_a1_kappa1.json"
    data = json.loads(path.read_text())
    data["coefficients"][2]["matrix"][1][1] = "7"
    path.write_text(json.dumps(data))
    code, _, err = run(capsys, "solve", "--r", "2", "--index", "1", "--floor", "-5", "--cache-dir", str(tmp_path))
    assert code == 2 and "invariant" in err


@pytest.mark.parametrize("r,ins,want", [("2", "1:4", "1/1152"), ("3", "1:1", "1/12"), ("2", "1:0", "0"),
                                        ("2", "1:0;1:0;1:0", "1")])
def test_correlator_values(capsys, r, ins, want):
    code, out, _ = run(capsys, "correlator", "--r", r, "--insertions", ins)
    assert code == 0 and out == want


def test_correlator_table_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "correlator", "--r", "2", "--table", "--max-k", "1",
                       "--max-N", "2", "--nonzero")
    assert code == 0
    assert out.splitlines() == ["r,N,insertions,genus,value", "2,1,1:1,1,1/24", "2,2,1:1;1:1,1,1/24"]


def test_correlator_usage_errors(capsys):
    assert run(capsys, "correlator", "--r", "2")[0] == 1
    assert run(capsys, "correlator", "--r", "2", "--insertions", "2:0")[0] == 1
    assert run(capsys, "correlator", "--r", "2", "--insertions", "x")[0] == 1
    assert run(capsys, "correlator", "--r", "1", "--insertions", "1:0")[0] == 1


def test_flows(capsys):
    code, out, _ = run(capsys, "flows", "--r", "2", "--a", "1")
    assert code == 0 and out == "dr1/dT^(1,0) = (-1)*r1_1"
    code, out, _ = run(capsys, "--format", "json", "flows", "--r", "3", "--b", "2")
    assert code == 0 and [f["a"] for f in json.loads(out)] == [1, 2]
    assert run(capsys, "flows", "--r", "6")[0] == 1
    assert run(capsys, "flows", "--r", "3", "--depth-guard", "1")[0] == 1
    assert run(capsys, "flows", "--r", "3", "--depth-guard", "2", "--a", "1")[0] == 0


def test_verify_pass_and_bad_suite(capsys):
    code, out, _ = run(capsys, "verify", "oracle-equality", "--r", "3")
    assert code == 0 and out.endswith("oracle-equality: PASS (2/2)")
    assert run(capsys, "verify", "no-such-suite")[0] == 1
    assert run(capsys, "verify", "flows", "--r", "3")[0] == 1


def test_verify_failure_exit_code(capsys, monkeypatch):
    from dsres import verify

    monkeypatch.setitem(verify.SUITES, "flows", lambda: [verify.Check("forced", False)])
    assert run(capsys, "verify", "flows")[0] == 3


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"format": "json"}))
    code, out, _ = run(capsys, "--config", str(cfg), "correlator", "--r", "2", "--insertions", "1:1")
    assert code == 0 and json.loads(out)["value"] == "1/24"
    code, out, _ = run(capsys, "--config", str(cfg), "--format", "text", "correlator", "--r", "2", "--insertions", "1:1")
    assert out == "1/24"
    cfg.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "--config", str(cfg), "correlator", "--r", "2", "--insertions", "1:1")[0] == 1


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "dsres.cli", "correlator", "--r", "2", "--insertions", "1:1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "1/24"
    bad = subprocess.run([sys.executable, "-m", "dsres.cli", "frobnicate"], capture_output=True, text=True)
    assert bad.returncode == 1
