from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hopfological import cli, workspace as wsp


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_builtins(capsys):
    for ref in ("builtin:truncated_poly(p=2)", "builtin:sweedler(5)", "builtin:trivial(2)"):
        code, out, _ = run(["verify", ref], capsys)
        assert code == 0, out


def test_verify_corpus_and_single_object(capsys):
    code, _, _ = run(["verify", "corpus:smash_x2_trunc2"], capsys)
    assert code == 0
    code, _, _ = run(["verify", "corpus:trunc2", "k"], capsys)
    assert code == 0
    code, _, err = run(["verify", "corpus:trunc2", "nothing"], capsys)
    assert code == 2 and "nothing" in err


def test_verify_failure_names_checks(tmp_path, capsys):
    doc = json.loads(wsp.fixture_text("trunc2"))
    doc["hopf"]["H"]["counit"] = [0, 1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["verify", str(path)], capsys)
    assert code == 1
    assert "FAIL" in out and "counit" in out


def test_parse_error_exit_two(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"characteristic": 2,\n,}')
    code, _, err = run(["verify", str(path)], capsys)
    assert code == 2
    assert f"{path}:2:1" in err


def test_stable_commands(capsys):
    code, out, _ = run(["stable", "hom", "k", "k"], capsys)
    assert code == 0 and "dim: 1" in out
    code, out, _ = run(["stable", "zero", "free"], capsys)
    assert code == 0 and "stably_zero: True" in out
    code, out, _ = run(["stable", "zero", "k"], capsys)
    assert code == 1
    code, out, _ = run(["stable", "shift", "k", "-1"], capsys)
    assert code == 0 and "dim: 1" in out
    code, out, _ = run(["stable", "shift", "k", "+2"], capsys)
    assert code == 0
    code, _, _ = run(["stable", "cone", "lambda:k"], capsys)
    assert code == 0
    code, _, _ = run(["stable", "triangle", "rho:k", "--test", "k", "--window", "3"], capsys)
    assert code == 0


def test_derived_commands(capsys):
    code, out, _ = run(["derived", "ext", "k", "k", "--i", "1..3"], capsys)
    assert code == 0 and out.count("ext^") == 3
    code, out, _ = run(["derived", "hom", "k", "H"], capsys)
    assert code == 0 and "homotopy_hom_dim: 1" in out
    code, out, _ = run(["derived", "perfect", "free"], capsys)
    assert code == 0
    code, _, _ = run(["derived", "perfect", "k"], capsys)
    assert code == 1
    code, _, _ = run(["derived", "resolve", "k", "--length", "2"], capsys)
    assert code == 0


def test_usage_errors(capsys):
    code, _, err = run(["stable", "hom", "k", "nope"], capsys)
    assert code == 2 and "nope" in err
    code, _, err = run(["stable", "hom", "k", "k", "--base", "smash_x2_trunc2"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["stable", "hom", "k"])
    assert info.value.code == 2


def test_base_selection(capsys):
    code, out, _ = run(["stable", "hom", "free", "free", "--base", "smash_x2_trunc2"], capsys)
    assert code == 0 and "dim: 0" in out
    code, out, _ = run(["stable", "hom", "k", "k", "--base", "builtin:truncated_poly(p=3)"], capsys)
    assert code == 0 and "dim: 1" in out


def test_workspace_objects(tmp_path, capsys):
    doc = json.loads(wsp.fixture_text("trunc2"))
    doc["morphisms"] = {"f": {"source": "k", "target": "free", "matrix": [[0], [1]]}}
    path = tmp_path / "w.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(["stable", "cone", "f", "-w", str(path)], capsys)
    # pushout of M -> M (x) H along f: dim N + dim M (x) H - dim M
    assert code == 0 and "dim: 3" in out


def test_report_is_deterministic(tmp_path, capsys):
    docs = []
    for j in range(2):
        path = tmp_path / f"r{j}.json"
        code, _, _ = run(["check", "frobenius", "--count", "1", "--seed", "3", "--report", str(path)], capsys)
        assert code == 0
        doc = json.loads(path.read_text())
        assert doc["exit_status"] == 0 and doc["passed"]
        doc.pop("seconds")
        doc.pop("command")
        for sec in doc["sections"]:
            for c in sec["checks"]:
                c.pop("seconds", None)
        docs.append(doc)
    assert docs[0] == docs[1]


def test_examples(tmp_path, capsys, monkeypatch):
    code, out, _ = run(["examples", "list"], capsys)
    assert code == 0 and "sweedler_gf5" in out
    code, _, _ = run(["examples", "emit", "all", "--out", str(tmp_path / "a")], capsys)
    assert code == 0
    assert (tmp_path / "a" / "trunc3.json").read_text() == wsp.fixture_text("trunc3")
    monkeypatch.setenv(wsp.WORKSPACE_ENV, str(tmp_path / "b"))
    code, _, _ = run(["examples", "emit", "trunc2"], capsys)
    assert code == 0 and (tmp_path / "b" / "trunc2.json").exists()
    code, _, _ = run(["examples", "emit", "nope"], capsys)
    assert code == 2


def test_env_workspace_default(tmp_path, capsys, monkeypatch):
    doc = json.loads(wsp.fixture_text("trunc3"))
    (tmp_path / "workspace.json").write_text(json.dumps(doc))
    monkeypatch.setenv(wsp.WORKSPACE_ENV, str(tmp_path))
    code, out, _ = run(["stable", "hom", "k", "k"], capsys)
    assert code == 0 and "base: B" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hopfological.cli", "verify", "builtin:trivial(2)"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
