"""Workspace files: named algebras, modules and morphisms in JSON.

Layout (every section except ``characteristic`` is optional)::

    {
      "characteristic": 2,
      "hopf": {"H": {"builtin": "truncated_poly"}},
      "module_algebras": {"A": {"builtin": "truncated", "hopf": "H"}},
      "comodule_algebras": {"B": {"regular": "H"}, "S": {"smash": "A"}},
      "modules": {"k": {"base": "B", "action": [[[1]], [[0]]]}},
      "morphisms": {"f": {"source": "k", "target": "k", "matrix": [[1]]}}
    }

Explicit data uses the same matrices as the Python objects, written as
row-major nested lists: a Hopf algebra is ``mult``, ``unit``, ``comult``,
``counit``, ``antipode``; a module algebra is ``hopf``, ``mult``, ``unit``,
``action``; a comodule algebra is ``hopf``, ``mult``, ``unit``, ``coaction``;
a module is ``base`` plus one action matrix per basis element of ``B``.
Builtin references are accepted for Hopf algebras (``builtin`` plus its
integer parameters), module algebras (``trivial``, ``truncated``) and modules
(``trivial`` with ``dim``, ``free`` with ``rank``).

Every object is verified on load.  :func:`load` raises on the first failing
object; :func:`load_unchecked` returns the workspace together with the
verification reports so that ``hopfo verify`` can print them.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import bmod, comod, corpus, hopf
from .bmod import BModule, ModuleMorphism
from .comod import ComoduleAlgebra, ModuleAlgebra
from .errors import HopfologicalError, Report
from .exactlin import GF, Field
from .hopf import Algebra, HopfAlgebra

WORKSPACE_ENV = "HOPFO_WORKSPACE_DIR"
SECTIONS = ("hopf", "module_algebras", "comodule_algebras", "modules", "morphisms")


class WorkspaceError(HopfologicalError, ValueError):
    """A workspace file does not parse, or names something that does not resolve.

    ``where`` is either ``line:column`` (syntax errors) or a dotted path to the
    offending entry such as ``modules.k.action``.
    """

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


@dataclass
class Workspace:
    field: Field
    hopf: dict = field(default_factory=dict)
    module_algebras: dict = field(default_factory=dict)
    comodule_algebras: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return getattr(self, name)

    def lookup(self, name: str):
        """``(section, object)`` for a name, searching every section."""
        for sec in SECTIONS:
            if name in self.section(sec):
                return sec, self.section(sec)[name]
        raise WorkspaceError("", f"no object named {name!r} in the workspace")

    def name_of(self, obj, section: str) -> str:
        for k, v in self.section(section).items():
            if v is obj:
                return k
        raise WorkspaceError(section, f"object {obj!r} is not registered in the workspace")

    def verify(self) -> list[Report]:
        return [verify_object(obj, f"{sec}.{name}") for sec in SECTIONS
                for name, obj in self.section(sec).items()]


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

def verify_object(obj, label: str = "") -> Report:
    """Run the verifier that matches ``obj``'s type."""
    if isinstance(obj, HopfAlgebra):
        r = hopf.verify_hopf(obj)
    elif isinstance(obj, ModuleAlgebra):
        r = comod.verify_module_algebra(obj)
    elif isinstance(obj, ComoduleAlgebra):
        r = comod.verify_comodule_algebra(obj)
    elif isinstance(obj, BModule):
        r = bmod.verify_module(obj)
    elif isinstance(obj, ModuleMorphism):
        r = Report()
        d = obj.defect() % obj.field.p
        bad = np.argwhere(d)
        r.add("intertwines_action", not len(bad), None if not len(bad) else tuple(int(i) for i in bad[0]))
    else:
        raise TypeError(f"cannot verify {type(obj).__name__}")
    if label:
        r.subject = label
    return r


# ---------------------------------------------------------------------------
# Builtin references
# ---------------------------------------------------------------------------

_REF = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def parse_builtin(ref: str) -> tuple[str, dict]:
    """``"truncated_poly(p=2)"`` -> ``("truncated_poly", {"p": 2})``.

    A bare positional integer is the characteristic ``p``.
    """
    if ref.startswith("builtin:"):
        ref = ref[len("builtin:"):]
    m = _REF.match(ref)
    if not m:
        raise WorkspaceError("", f"cannot parse builtin reference {ref!r}")
    name, args = m.group(1), (m.group(2) or "").strip()
    params: dict[str, int] = {}
    for i, part in enumerate(a.strip() for a in args.split(",") if a.strip()):
        key, sep, val = part.partition("=")
        if not sep:
            key, val = "p", key
        try:
            params[key.strip()] = int(val)
        except ValueError:
            raise WorkspaceError("", f"parameter {part!r} of {name!r} is not an integer") from None
    return name, params


def builtin_hopf(ref: str | dict, characteristic: int | None = None) -> HopfAlgebra:
    """Build a builtin Hopf algebra from ``"name(k=v, ...)"`` or ``{"builtin": name, ...}``."""
    if isinstance(ref, str):
        name, params = parse_builtin(ref)
    else:
        params = {k: v for k, v in ref.items() if k != "builtin"}
        name = ref["builtin"]
    params = dict(params)
    p = params.pop("p", characteristic)
    if characteristic is not None and p != characteristic:
        raise WorkspaceError("", f"builtin {name!r} asks for characteristic {p}, workspace has {characteristic}")
    if name == "truncated_poly":
        return hopf.builtin(name, p=p, **params)
    return hopf.builtin(name, p, **params)


def builtin_workspace(ref: str) -> Workspace:
    """A one-object workspace ``{"H": builtin}`` for ``verify builtin:...``."""
    h = builtin_hopf(ref)
    ws = Workspace(h.field)
    ws.hopf["H"] = h
    return ws


def corpus_workspace(name: str) -> Workspace:
    """The corpus entry ``name`` with its standard modules."""
    e = corpus.entry(name)
    ws = Workspace(e.field)
    ws.hopf["H"] = e.hopf
    base = e.base
    if base.smash_of is not None:
        ws.module_algebras["A"] = base.smash_of
    ws.comodule_algebras["B"] = base
    ws.modules.update(standard_modules(base))
    return ws


def standard_modules(base: ComoduleAlgebra) -> dict[str, BModule]:
    """Modules every base provides by name: ``0``, ``free``, and for B = H also ``k``."""
    out = {"0": bmod.zero_module(base), "free": bmod.free_module(base, 1)}
    if base.is_regular:
        out["k"] = bmod.trivial_module(base.hopf, 1)
    return out


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def resolve_path(path: str | os.PathLike) -> Path:
    """``path`` itself if it exists, else relative to ``$HOPFO_WORKSPACE_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    root = os.environ.get(WORKSPACE_ENV)
    if root and (Path(root) / p).exists():
        return Path(root) / p
    return p


def load_unchecked(path: str | os.PathLike) -> tuple[Workspace, list[Report]]:
    p = resolve_path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise WorkspaceError(str(p), f"cannot read: {exc.strerror}") from None
    return loads_unchecked(text, source=str(p))


def load(path: str | os.PathLike) -> Workspace:
    ws, reports = load_unchecked(path)
    _raise_on_failure(reports)
    return ws


def loads(text: str, source: str = "<string>") -> Workspace:
    ws, reports = loads_unchecked(text, source)
    _raise_on_failure(reports)
    return ws


def _raise_on_failure(reports: list[Report]) -> None:
    for r in reports:
        if not r.passed:
            raise WorkspaceError(r.subject, f"failed verification: {', '.join(c.name for c in r.failures())}")


def loads_unchecked(text: str, source: str = "<string>") -> tuple[Workspace, list[Report]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return from_dict(doc)


def from_dict(doc: dict) -> tuple[Workspace, list[Report]]:
    """Build a workspace, verifying objects in dependency order.

    Objects that fail verification are still registered (so later entries
    can be checked against them); their reports record the failure.
    """
    if not isinstance(doc, dict):
        raise WorkspaceError("", "top level must be an object")
    unknown = set(doc) - set(SECTIONS) - {"characteristic"}
    if unknown:
        raise WorkspaceError("", f"unknown sections {sorted(unknown)}")
    if "characteristic" not in doc:
        raise WorkspaceError("characteristic", "missing")
    try:
        F = GF(_int(doc["characteristic"], "characteristic"))
    except HopfologicalError as exc:
        raise WorkspaceError("characteristic", str(exc)) from None
    ws = Workspace(F)
    reports: list[Report] = []
    builders = {
        "hopf": _load_hopf,
        "module_algebras": _load_module_algebra,
        "comodule_algebras": _load_comodule_algebra,
        "modules": _load_module,
        "morphisms": _load_morphism,
    }
    for sec in SECTIONS:
        entries = doc.get(sec, {})
        if not isinstance(entries, dict):
            raise WorkspaceError(sec, "must be an object mapping names to entries")
        for name, entry in entries.items():
            where = f"{sec}.{name}"
            if not isinstance(entry, dict):
                raise WorkspaceError(where, "entry must be an object")
            try:
                obj = builders[sec](ws, entry, where)
            except WorkspaceError:
                raise
            except HopfologicalError as exc:
                raise WorkspaceError(where, str(exc)) from None
            ws.section(sec)[name] = obj
            reports.append(verify_object(obj, where))
    return ws, reports


def _int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise WorkspaceError(where, f"expected an integer, got {v!r}")
    return v


def _matrix(entry: dict, key: str, where: str, ndim: int) -> np.ndarray:
    if key not in entry:
        raise WorkspaceError(f"{where}.{key}", "missing")
    try:
        arr = np.array(entry[key], dtype=np.int64)
    except (ValueError, TypeError, OverflowError):
        raise WorkspaceError(f"{where}.{key}", "not a rectangular integer array") from None
    if arr.ndim != ndim and not (arr.size == 0 and ndim > 1):
        raise WorkspaceError(f"{where}.{key}", f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    return arr


def _ref(ws: Workspace, entry: dict, key: str, section: str, where: str):
    if key not in entry:
        raise WorkspaceError(f"{where}.{key}", "missing")
    name = entry[key]
    if name not in ws.section(section):
        raise WorkspaceError(f"{where}.{key}", f"unresolved name {name!r} (not in {section})")
    return ws.section(section)[name]


def _load_hopf(ws: Workspace, e: dict, where: str) -> HopfAlgebra:
    if "builtin" in e:
        return builtin_hopf(e, ws.field.p)
    F = ws.field
    alg = Algebra(F, _matrix(e, "mult", where, 2), _matrix(e, "unit", where, 1), name=e.get("algebra_name", ""))
    return HopfAlgebra.create(alg, _matrix(e, "comult", where, 2), _matrix(e, "counit", where, 1),
                              _matrix(e, "antipode", where, 2), name=e.get("name", where.split(".", 1)[1]))


def _load_module_algebra(ws: Workspace, e: dict, where: str) -> ModuleAlgebra:
    h = _ref(ws, e, "hopf", "hopf", where)
    if "builtin" in e:
        kind = e["builtin"]
        if kind == "trivial":
            return comod.trivial_module_algebra(h)
        if kind == "truncated":
            return comod.truncated_module_algebra(h)
        raise WorkspaceError(f"{where}.builtin", f"unknown module algebra {kind!r}; known: trivial, truncated")
    alg = Algebra(ws.field, _matrix(e, "mult", where, 2), _matrix(e, "unit", where, 1),
                  name=e.get("name", where.split(".", 1)[1]))
    return ModuleAlgebra(alg, h, _matrix(e, "action", where, 2), name=alg.name)


def _load_comodule_algebra(ws: Workspace, e: dict, where: str) -> ComoduleAlgebra:
    if "regular" in e:
        return comod.regular_comodule(_ref(ws, e, "regular", "hopf", where))
    if "smash" in e:
        return comod.smash_product(_ref(ws, e, "smash", "module_algebras", where), check=False)
    h = _ref(ws, e, "hopf", "hopf", where)
    name = e.get("name", where.split(".", 1)[1])
    alg = Algebra(ws.field, _matrix(e, "mult", where, 2), _matrix(e, "unit", where, 1), name=name)
    return ComoduleAlgebra(alg, _matrix(e, "coaction", where, 2), h, name=name)


def _load_module(ws: Workspace, e: dict, where: str) -> BModule:
    base = _ref(ws, e, "base", "comodule_algebras", where)
    name = where.split(".", 1)[1]
    if "builtin" in e:
        kind = e["builtin"]
        if kind == "free":
            m = bmod.free_module(base, _int(e.get("rank", 1), f"{where}.rank"))
        elif kind == "trivial":
            if not base.is_regular:
                raise WorkspaceError(f"{where}.builtin", "the trivial module needs a regular base (B = H)")
            m = bmod.trivial_module(base.hopf, _int(e.get("dim", 1), f"{where}.dim"))
        else:
            raise WorkspaceError(f"{where}.builtin", f"unknown module {kind!r}; known: free, trivial")
        return BModule(base, m.action, name=name)
    act = _matrix(e, "action", where, 3)
    if act.size == 0:
        act = act.reshape(base.dim, 0, 0)
    return BModule(base, act, name=name)


def _load_morphism(ws: Workspace, e: dict, where: str) -> ModuleMorphism:
    src = _ref(ws, e, "source", "modules", where)
    tgt = _ref(ws, e, "target", "modules", where)
    mat = _matrix(e, "matrix", where, 2)
    if mat.size == 0:
        mat = mat.reshape(tgt.dim, src.dim)
    if mat.shape != (tgt.dim, src.dim):
        raise WorkspaceError(f"{where}.matrix", f"expected shape {(tgt.dim, src.dim)}, got {mat.shape}")
    return ModuleMorphism(src, tgt, mat)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _list(a: np.ndarray) -> Any:
    return np.asarray(a).tolist()


def to_dict(ws: Workspace) -> dict:
    """Explicit structure constants for every object; names kept, keys sorted.

    Regular comodule algebras and smash products are written as references,
    since their constants are determined by the Hopf or module algebra.
    """
    doc: dict[str, Any] = {"characteristic": ws.field.p}
    out = {sec: {} for sec in SECTIONS}
    for name, h in sorted(ws.hopf.items()):
        out["hopf"][name] = {
            "name": h.name, "algebra_name": h.algebra.name,
            "mult": _list(h.algebra.mult), "unit": _list(h.algebra.unit),
            "comult": _list(h.comult), "counit": _list(h.counit.reshape(-1)), "antipode": _list(h.antipode),
        }
    for name, a in sorted(ws.module_algebras.items()):
        out["module_algebras"][name] = {
            "hopf": ws.name_of(a.hopf, "hopf"), "name": a.name,
            "mult": _list(a.algebra.mult), "unit": _list(a.algebra.unit), "action": _list(a.action),
        }
    for name, b in sorted(ws.comodule_algebras.items()):
        if b.is_regular:
            out["comodule_algebras"][name] = {"regular": ws.name_of(b.hopf, "hopf")}
        elif b.smash_of is not None and any(v is b.smash_of for v in ws.module_algebras.values()):
            out["comodule_algebras"][name] = {"smash": ws.name_of(b.smash_of, "module_algebras")}
        else:
            out["comodule_algebras"][name] = {
                "hopf": ws.name_of(b.hopf, "hopf"), "name": b.name,
                "mult": _list(b.algebra.mult), "unit": _list(b.algebra.unit), "coaction": _list(b.coaction),
            }
    for name, m in sorted(ws.modules.items()):
        out["modules"][name] = {"base": _base_name(ws, m.base), "action": _list(m.action)}
    for name, f in sorted(ws.morphisms.items()):
        out["morphisms"][name] = {
            "source": ws.name_of(f.source, "modules"), "target": ws.name_of(f.target, "modules"),
            "matrix": _list(f.matrix),
        }
    doc.update({k: v for k, v in out.items() if v})
    return doc


def _base_name(ws: Workspace, base: ComoduleAlgebra) -> str:
    for k, v in ws.comodule_algebras.items():
        if v is base:
            return k
    # a smash product loaded twice is a different object with identical constants
    for k, v in ws.comodule_algebras.items():
        if v.smash_of is not None and v.smash_of is base.smash_of:
            return k
    raise WorkspaceError("modules", f"base {base.name!r} is not registered in the workspace")


def dumps(ws: Workspace) -> str:
    """Compact JSON: one entry per line, matrices on a single line."""
    doc = to_dict(ws)
    lines = ["{", f'  "characteristic": {doc["characteristic"]}']
    for sec in SECTIONS:
        if sec not in doc:
            continue
        lines[-1] += ","
        lines.append(f'  "{sec}": {{')
        items = list(doc[sec].items())
        for i, (name, entry) in enumerate(items):
            comma = "," if i < len(items) - 1 else ""
            lines.append(f"    {json.dumps(name)}: {json.dumps(entry, separators=(', ', ': '))}{comma}")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(ws: Workspace, path: str | os.PathLike) -> None:
    Path(path).write_text(dumps(ws))


def equivalent(a: Workspace, b: Workspace) -> bool:
    """Same names and the same structure constants in every section."""
    return to_dict(a) == to_dict(b)


# ---------------------------------------------------------------------------
# Corpus fixtures
# ---------------------------------------------------------------------------

def fixture_dir() -> Path:
    return Path(__file__).parent / "data" / "corpus"


def fixture_text(name: str) -> str:
    """The fixture file contents for corpus entry ``name``, regenerated from builtins."""
    return dumps(corpus_workspace(name))


def load_fixture(name: str) -> Workspace:
    path = fixture_dir() / f"{name}.json"
    if not path.exists():
        raise WorkspaceError(str(path), f"no fixture for corpus entry {name!r}")
    return load(path)
