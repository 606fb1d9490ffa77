from __future__ import annotations

import json
import math
import os
import subprocess
import sys

import pytest

from opstruct.cli import main
from opstruct.model.opspec import dump, load
from opstruct.model import identity


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_shipped_example(capsys):
    code, out, _ = run(["analyze", "odd_even_example.json", "--dims", "64,128,256"], capsys)
    assert code == 0
    report = json.loads(out)
    flags = report["flags"]
    assert flags["hyponormal.numeric"]["holds"] is True and flags["hyponormal.numeric"]["mode"] == "interior"
    assert flags["closure_an"]["holds"] is True
    assert flags["quasinormal.numeric"]["holds"] is False
    assert report["essential_estimate"] == [1.0]


def test_decompose_hyponormal_reports_single_entry(capsys):
    code, out, _ = run(["decompose", "odd_even_example.json", "--form", "hyponormal", "--dims", "64"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["A_nonzero"] == [[0, 0, math.sqrt(0.5), 0.0]]
    assert data["A_nonzero"][0][2] == 0.7071067811865476
    assert data["normality"]["normal"] is False


def test_decompose_writes_matrix_csv(tmp_path, capsys):
    code, _, _ = run(["decompose", "identity.json", "--form", "positive", "--dims", "16,32,64",
                      "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "decomposition.json").exists()
    assert (tmp_path / "K1.csv").read_text().splitlines()[0] == "row,col,re,im"


def test_verify_exit_codes(capsys):
    assert run(["verify", "shift.json", "--dims", "16,32,64"], capsys)[0] == 1
    code, out, _ = run(["verify", "identity.json", "--dims", "16,32,64"], capsys)
    assert code == 0 and json.loads(out)["ok"] is True


def test_input_errors_exit_two(tmp_path, capsys):
    assert run(["analyze", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "Nope"}')
    code, _, err = run(["analyze", str(bad)], capsys)
    assert code == 2 and "$.kind" in err
    with pytest.raises(SystemExit) as info:
        main(["analyze", "identity.json", "--dims", "64,32"])
    assert info.value.code == 2


def test_verification_failure_exits_one(capsys):
    code, _, err = run(["decompose", "shift.json", "--form", "positive", "--dims", "16"], capsys)
    assert code == 1 and "NotPositive" in err


def test_study_csv(capsys):
    code, out, _ = run(["study", "odd_even_example.json", "--dims", "32,64"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,metric,value"


def test_generate_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["generate", "--class", "quasinormal-AM", "--count", "3", "--seed", "7", "--out", str(d)],
                   capsys)[0] == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == ["quasinormal-AM-0000.json", "quasinormal-AM-0001.json", "quasinormal-AM-0002.json"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
        load(a / name)
    code, out, _ = run(["generate", "--class", "positive-closureAN", "--alpha", "1.5"], capsys)
    assert code == 0 and json.loads(out)["profile"]["essential_points"] == [1.5]


def test_generate_rejects_infeasible_recipe(capsys):
    assert run(["generate", "--class", "quasinormal-AN", "--alpha", "1", "--upper", "0.5"], capsys)[0] == 2


def test_outputs_are_byte_identical(tmp_path, capsys):
    spec = tmp_path / "id.json"
    dump(identity(3.0), spec)
    outs = []
    for d in ("x", "y"):
        assert run(["analyze", str(spec), "--dims", "16,32,64", "--out", str(tmp_path / d)], capsys)[0] == 0
        outs.append((tmp_path / d / "report.json").read_bytes() + (tmp_path / d / "summary.txt").read_bytes())
    assert outs[0] == outs[1]


def test_log_level_from_environment(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "opstruct.cli", "study", "identity.json", "--dims", "8,16",
                           "--out", str(tmp_path)], capture_output=True, text=True,
                          env={**os.environ, "OPSPEC_LOG": "INFO"})
    assert proc.returncode == 0
    assert "INFO opstruct: wrote" in proc.stderr


def test_contract_filename_alias_matches():
    from opstruct.cli import _resolve_spec
    assert load(_resolve_spec("paper_example.json")) == load(_resolve_spec("odd_even_example.json"))
