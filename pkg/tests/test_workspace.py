from __future__ import annotations

import json

import pytest

from hopfological import workspace as wsp


def test_fixtures_match_builtins(entry):
    text = (wsp.fixture_dir() / f"{entry.name}.json").read_text()
    assert text == wsp.fixture_text(entry.name)
    ws = wsp.load_fixture(entry.name)
    assert wsp.dumps(ws) == text
    assert all(r.passed for r in ws.verify())


def test_round_trip_through_file(tmp_path):
    ws = wsp.corpus_workspace("smash_x2_trunc2")
    path = tmp_path / "w.json"
    wsp.save(ws, path)
    back = wsp.load(path)
    assert wsp.equivalent(ws, back)
    assert (back.modules["free"].action == ws.modules["free"].action).all()


def test_builtin_references():
    assert wsp.parse_builtin("builtin:truncated_poly(p=3)") == ("truncated_poly", {"p": 3})
    assert wsp.parse_builtin("sweedler(5)") == ("sweedler", {"p": 5})
    with pytest.raises(wsp.WorkspaceError):
        wsp.parse_builtin("sweedler(p=x)")
    text = json.dumps({
        "characteristic": 2,
        "hopf": {"H": {"builtin": "truncated_poly"}},
        "module_algebras": {"A": {"hopf": "H", "builtin": "truncated"}},
        "comodule_algebras": {"B": {"smash": "A"}},
        "modules": {"F": {"base": "B", "builtin": "free", "rank": 2}},
    })
    ws = wsp.loads(text)
    assert ws.modules["F"].dim == 8
    with pytest.raises(wsp.WorkspaceError, match="characteristic"):
        wsp.loads(json.dumps({"characteristic": 2, "hopf": {"H": {"builtin": "truncated_poly", "p": 3}}}))


def test_syntax_error_position():
    with pytest.raises(wsp.WorkspaceError) as info:
        wsp.loads('{"characteristic": 2,\n  "hopf": {,}}', source="w.json")
    assert info.value.where == "w.json:2:12"


def test_unresolved_names_and_bad_shapes():
    base = {"characteristic": 2, "hopf": {"H": {"builtin": "truncated_poly"}},
            "comodule_algebras": {"B": {"regular": "H"}}}
    doc = dict(base, modules={"M": {"base": "C", "action": [[[1]], [[0]]]}})
    with pytest.raises(wsp.WorkspaceError) as info:
        wsp.from_dict(doc)
    assert info.value.where == "modules.M.base"
    doc = dict(base, modules={"M": {"base": "B", "action": [[[1]], [[0]]]}},
               morphisms={"f": {"source": "M", "target": "M", "matrix": [[1, 0]]}})
    with pytest.raises(wsp.WorkspaceError) as info:
        wsp.from_dict(doc)
    assert info.value.where == "morphisms.f.matrix"
    with pytest.raises(wsp.WorkspaceError):
        wsp.from_dict({"characteristic": 2, "extra": {}})
    with pytest.raises(wsp.WorkspaceError):
        wsp.from_dict({"hopf": {}})


def test_failed_verification_is_reported():
    doc = json.loads(wsp.fixture_text("trunc2"))
    doc["hopf"]["H"]["counit"] = [0, 1]
    _, reports = wsp.from_dict(doc)
    bad = [r for r in reports if not r.passed]
    assert bad and bad[0].subject == "hopf.H"
    with pytest.raises(wsp.WorkspaceError, match="hopf.H"):
        wsp.loads(json.dumps(doc))
    doc = json.loads(wsp.fixture_text("trunc2"))
    doc["modules"]["k"]["action"] = [[[1]], [[1]]]
    _, reports = wsp.from_dict(doc)
    assert [r.subject for r in reports if not r.passed] == ["modules.k"]


def test_env_var_resolution(tmp_path, monkeypatch):
    (tmp_path / "w.json").write_text(wsp.fixture_text("trivial"))
    monkeypatch.setenv(wsp.WORKSPACE_ENV, str(tmp_path))
    assert wsp.resolve_path("w.json") == tmp_path / "w.json"
    assert wsp.load("w.json").field.p == 2
    with pytest.raises(wsp.WorkspaceError):
        wsp.load("missing.json")


def test_lookup():
    ws = wsp.corpus_workspace("trunc2")
    assert ws.lookup("k")[0] == "modules"
    with pytest.raises(wsp.WorkspaceError):
        ws.lookup("nothing")
