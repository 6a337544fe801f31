"""The ``hopfo`` command line.

Commands::

    hopfo verify TARGET [NAME]             TARGET: workspace file, builtin:..., corpus:NAME
    hopfo stable hom M N                   dim of the stable hom space
    hopfo stable zero M                    is M zero in the stable category
    hopfo stable shift M +i|-i             the module M[i]
    hopfo stable cone F                    the cone of a morphism
    hopfo stable triangle F                triangle axioms and long exact sequences
    hopfo derived hom M N [--i 1..3]       homotopy hom and derived-quotient hom
    hopfo derived ext M N --i 1..3         Ext groups
    hopfo derived perfect M                is M (in degree 0) a perfect complex
    hopfo derived resolve M [--length n]   an E-projective resolution
    hopfo check SUITE                      exact-structure | frobenius | rickard | triangulated | all
    hopfo examples list | emit NAME|all

Modules are names from the workspace or the standard names ``k``, ``k^n``
(for B = H), ``free``, ``free^n``, ``0`` and ``H`` (the regular H-module).
Morphisms are workspace names or ``id:M``, ``zero:M:N``, ``lambda:M``,
``rho:M``.  The base is chosen with ``--base`` (a workspace comodule
algebra, a corpus name, or ``builtin:...`` for B = H); without it the
workspace's only comodule algebra is used, else the corpus entry ``trunc2``.

Relative workspace paths are also looked up in ``$HOPFO_WORKSPACE_DIR``; if
that directory holds ``workspace.json`` it is loaded when ``--workspace`` is
not given.  The exit status is 0 iff every check passed; usage, parse and
resolution errors exit with 2.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path

import numpy as np

from . import bmod, corpus, derived, stable, suites
from . import workspace as wsp
from .bmod import BModule, ModuleMorphism
from .errors import HopfologicalError, Report

EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
DEFAULT_BASE = "trunc2"


class UsageError(HopfologicalError):
    pass


# ---------------------------------------------------------------------------
# Context: workspace, base, object lookup
# ---------------------------------------------------------------------------

class Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.ws = self._load_workspace(getattr(args, "workspace", None))
        self.base_label, self.base = self._choose_base(getattr(args, "base", None))
        self._std = wsp.standard_modules(self.base)

    @staticmethod
    def _load_workspace(path):
        if path is None:
            root = os.environ.get(wsp.WORKSPACE_ENV)
            if root and (Path(root) / "workspace.json").exists():
                path = Path(root) / "workspace.json"
        return wsp.load(path) if path is not None else None

    def _choose_base(self, ref):
        ws = self.ws
        if ref is None:
            if ws is not None and len(ws.comodule_algebras) == 1:
                name, b = next(iter(ws.comodule_algebras.items()))
                return name, b
            return DEFAULT_BASE, corpus.entry(DEFAULT_BASE).base
        if ws is not None and ref in ws.comodule_algebras:
            return ref, ws.comodule_algebras[ref]
        if ref.startswith("builtin:"):
            from .comod import regular_comodule
            return ref, regular_comodule(wsp.builtin_hopf(ref))
        name = ref[len("corpus:"):] if ref.startswith("corpus:") else ref
        if name in corpus.CORPUS_NAMES:
            return name, corpus.entry(name).base
        raise UsageError(f"unknown base {ref!r}: not a workspace comodule algebra, corpus entry or builtin")

    def module(self, name: str) -> BModule:
        if self.ws is not None and name in self.ws.modules:
            m = self.ws.modules[name]
            if m.base is not self.base:
                raise UsageError(f"module {name!r} lives over {m.base.name!r}, not over the chosen base "
                                 f"{self.base.name!r}; pass --base")
            return m
        if name in self._std:
            return self._std[name]
        if name == "H":
            if not self.base.is_regular:
                raise UsageError("H is a module only when B = H")
            return bmod.regular_hmodule(self.base.hopf)
        m = re.fullmatch(r"(k|free)\^(\d+)", name)
        if m:
            r = int(m.group(2))
            if m.group(1) == "free":
                return bmod.free_module(self.base, r)
            if not self.base.is_regular:
                raise UsageError("the trivial module needs B = H")
            return bmod.trivial_module(self.base.hopf, r)
        if name == "k":
            raise UsageError("the trivial module k needs B = H")
        raise UsageError(f"unknown module {name!r}")

    def morphism(self, name: str) -> ModuleMorphism:
        if self.ws is not None and name in self.ws.morphisms:
            return self.ws.morphisms[name]
        kind, _, rest = name.partition(":")
        parts = rest.split(":") if rest else []
        if kind == "id" and len(parts) == 1:
            return bmod.identity(self.module(parts[0]))
        if kind == "zero" and len(parts) == 2:
            return bmod.zero_map(self.module(parts[0]), self.module(parts[1]))
        if kind == "lambda" and len(parts) == 1:
            return bmod.lambda_map(self.module(parts[0]))
        if kind == "rho" and len(parts) == 1:
            return bmod.rho_map(self.module(parts[0]))
        raise UsageError(f"unknown morphism {name!r}")


def parse_degrees(text: str) -> tuple[int, ...]:
    """``"1..3"`` -> (1, 2, 3); ``"2"`` -> (2,); ``"1,3"`` -> (1, 3)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        try:
            if m:
                lo, hi = int(m.group(1)), int(m.group(2))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise UsageError(f"cannot parse degrees {text!r}") from None
    if not out:
        raise UsageError(f"no degrees in {text!r}")
    return tuple(out)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return repr(x)


class Output:
    """Collects reports and free-form data for the human table and the report file."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.sections: list[dict] = []
        self.data: dict = {}
        self.start = time.perf_counter()

    def report(self, rep: Report, data: dict | None = None, seconds: float | None = None) -> None:
        print(rep.table())
        entry = {
            "subject": rep.subject,
            "passed": rep.passed,
            "checks": [{"name": c.name, "status": "pass" if c.passed else "fail",
                        **({"witness": jsonable(c.witness)} if c.witness is not None else {})} for c in rep],
        }
        if data:
            entry["data"] = jsonable(data)
        if seconds is not None:
            entry["seconds"] = round(seconds, 3)
        self.sections.append(entry)

    def line(self, key: str, value) -> None:
        print(f"{key}: {value}")
        self.data[key] = jsonable(value)

    def witness(self, key: str, value) -> None:
        if self.args.witness:
            print(f"{key}:")
            print(np.array2string(np.asarray(value), max_line_width=120, threshold=10 ** 6))
            self.data[key] = jsonable(value)

    @property
    def passed(self) -> bool:
        return all(s["passed"] for s in self.sections)

    def finish(self) -> int:
        code = EXIT_PASS if self.passed else EXIT_FAIL
        path = getattr(self.args, "report", None)
        if path:
            doc = {
                "command": ["hopfo"] + self.argv,
                "passed": self.passed,
                "exit_status": code,
                "sections": self.sections,
                "data": self.data,
                "seconds": round(time.perf_counter() - self.start, 3),
            }
            Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return code


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_verify(args, out: Output) -> None:
    target = args.target
    if target.startswith("builtin:"):
        ws = wsp.builtin_workspace(target)
        reports = ws.verify()
    elif target.startswith("corpus:"):
        reports = wsp.corpus_workspace(target[len("corpus:"):]).verify()
    else:
        _, reports = wsp.load_unchecked(target)
    if args.name:
        reports = [r for r in reports if r.subject.split(".", 1)[1] == args.name]
        if not reports:
            raise UsageError(f"no object named {args.name!r} in {target}")
    for r in reports:
        out.report(r)


def cmd_stable(args, out: Output) -> None:
    ctx = Context(args)
    out.line("base", ctx.base_label)
    sub = args.sub
    if sub == "hom":
        m, n = ctx.module(args.args[0]), ctx.module(args.args[1])
        s = stable.stable_hom(m, n)
        out.line("dim", s.dim)
        out.line("hom_dim", s.ambient_dim)
        out.line("null_homotopic_dim", s.null_dim)
        out.witness("representatives", s.representatives)
        rep = Report(f"stable hom {args.args[0]} {args.args[1]}")
        rep.add("dimension_count", s.dim == s.ambient_dim - s.null_dim)
        out.report(rep, {"dim": s.dim})
    elif sub == "zero":
        m = ctx.module(args.args[0])
        w = stable.stable_zero_witness(m)
        out.line("stably_zero", w is not None)
        if w is not None:
            out.witness("retraction_of_lambda", w)
        rep = Report(f"stable zero {args.args[0]}")
        rep.add("stably_zero", w is not None)
        out.report(rep)
    elif sub == "shift":
        m = ctx.module(args.args[0])
        i = int(args.args[1])
        s = stable.shift_plus_times(m, i)
        out.line("dim", s.dim)
        out.witness("action", s.action)
        rep = Report(f"stable shift {args.args[0]} {args.args[1]}")
        rep.add("module_axioms", bmod.verify_module(s).passed)
        out.report(rep, {"dim": s.dim})
    elif sub == "cone":
        f = ctx.morphism(args.args[0])
        c = stable.cone(f)
        out.line("dim", c.module.dim)
        out.witness("action", c.module.action)
        rep = stable.triangle_report(stable.cone_triangle(f))
        rep.subject = f"cone triangle of {args.args[0]}"
        out.report(rep, {"dim": c.module.dim})
    elif sub == "triangle":
        f = ctx.morphism(args.args[0])
        t = stable.cone_triangle(f)
        rep = stable.triangle_report(t)
        rep.subject = f"triangle of {args.args[0]}"
        out.report(rep, {"dims": [o.dim for o in t.objects]})
        tests = [ctx.module(x) for x in (args.test or [])]
        if not tests:
            rng = np.random.default_rng(args.seed)
            tests = [corpus.random_module(ctx.base, rng, args.max_dim) for _ in range(3)]
        for j, x in enumerate(tests):
            start = time.perf_counter()
            les = stable.long_exact_check(t, x, args.window)
            les.subject = f"long exact sequence for test object {j} (dim {x.dim}), window {args.window}"
            out.report(les, les.data, time.perf_counter() - start)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(sub)


def cmd_derived(args, out: Output) -> None:
    ctx = Context(args)
    out.line("base", ctx.base_label)
    sub = args.sub
    if sub in ("hom", "ext"):
        m, n = ctx.module(args.args[0]), ctx.module(args.args[1])
        degrees = parse_degrees(args.i) if args.i else ((0,) if sub == "hom" else (1, 2, 3))
        if sub == "hom":
            h = derived.homotopy_hom(derived.one_term(m), derived.one_term(n))
            out.line("homotopy_hom_dim", h.dim)
        rep = Report(f"derived {sub} {args.args[0]} {args.args[1]}")
        rows = {}
        for i in degrees:
            if i < 0:
                raise UsageError("degrees must be >= 0")
            e = derived.ext(m, n, i)
            row = {"ext": e.dim}
            if i >= 1:
                row["stable_hom_shift"] = stable.stable_hom(m, stable.shift_plus_times(n, i)).dim
                rep.add(f"degree_{i}_dimensions_agree", row["ext"] == row["stable_hom_shift"], row)
            rows[i] = row
            out.line(f"ext^{i}", e.dim)
            if "stable_hom_shift" in row:
                out.line(f"stable_hom(M, N[{i}])", row["stable_hom_shift"])
            out.witness(f"ext^{i} representatives", e.representatives)
        out.report(rep, {"degrees": rows})
    elif sub == "perfect":
        m = ctx.module(args.args[0])
        c = derived.one_term(m)
        ok = derived.is_perfect(c)
        out.line("perfect", ok)
        rep = Report(f"derived perfect {args.args[0]}")
        rep.add("perfect", ok)
        out.report(rep)
    elif sub == "resolve":
        m = ctx.module(args.args[0])
        res = derived.e_projective_resolution(m, args.length)
        out.line("projective_dims", [p.dim for p in res.projectives])
        out.line("syzygy_dims", [k.dim for k in res.syzygies])
        for i in range(1, res.length + 1):
            out.witness(f"differential P^{-i} -> P^{-(i - 1)}", res.differential(i).matrix)
        rep = derived.is_strictly_E_acyclic(res.complex(augmented=True))
        rep.subject = f"resolution of {args.args[0]}, length {res.length}, augmented"
        rep.add("terms_E_projective", all(stable.is_E_projective(p) for p in res.projectives))
        out.report(rep)
    else:  # pragma: no cover
        raise UsageError(sub)


def cmd_check(args, out: Output) -> None:
    params = suites.SuiteParams(seed=args.seed, max_dim=args.max_dim, count=args.count,
                                degrees=parse_degrees(args.i) if args.i else (1, 2, 3), window=args.window)
    bases = suites.corpus_bases()
    ws = Context._load_workspace(args.workspace)
    if ws is not None:
        bases += [(f"workspace:{k}", b) for k, b in ws.comodule_algebras.items()]
    rep = suites.run_suite(args.suite, params, bases)
    rows = rep.data["properties"]
    print(f"{'property':<30} {'base':<26} {'cases':>5} {'skip':>4} {'status':>6}")
    for r in rows:
        print(f"{r['property']:<30} {r['base']:<26} {r['cases']:>5} {r['skipped']:>4} {_status(r):>6}")
    failing = [r for r in rows if not r["passed"]]
    for r in failing:
        ce = r["counterexample"]
        print(f"counterexample for {r['property']}[{r['base']}]: case {ce['case']}, seed {ce['seed']}, "
              f"max-dim {ce['max_dim']}: {ce['reason']}")
    print("PASS" if not failing else f"FAIL ({len(failing)} failing)")
    entry = {
        "subject": rep.subject,
        "passed": rep.passed,
        "checks": [{"name": f"{r['property']}[{r['base']}]", "suite": r["suite"],
                    "status": _status(r).lower(), "cases": r["cases"], "skipped": r["skipped"],
                    "seconds": r["seconds"],
                    **({"counterexample": jsonable(r["counterexample"])} if r["counterexample"] else {})}
                   for r in rows],
    }
    out.sections.append(entry)
    out.data["params"] = {"seed": args.seed, "max_dim": args.max_dim, "count": args.count,
                          "degrees": list(params.degrees), "window": args.window}


def _status(row: dict) -> str:
    if not row["passed"]:
        return "FAIL"
    return "pass" if row["cases"] else "skip"


def cmd_examples(args, out: Output) -> None:
    if args.sub == "list":
        for name in corpus.CORPUS_NAMES:
            e = corpus.entry(name)
            print(f"{name:<18} {e.description}")
        out.data["examples"] = list(corpus.CORPUS_NAMES)
        return
    names = corpus.CORPUS_NAMES if args.name == "all" else (args.name,)
    for n in names:
        if n not in corpus.CORPUS_NAMES:
            raise UsageError(f"unknown example {n!r}; see 'hopfo examples list'")
    dest = Path(args.out or os.environ.get(wsp.WORKSPACE_ENV) or ".")
    dest.mkdir(parents=True, exist_ok=True)
    for n in names:
        src = wsp.fixture_dir() / f"{n}.json"
        text = src.read_text() if src.exists() else wsp.fixture_text(n)
        (dest / f"{n}.json").write_text(text)
        print(dest / f"{n}.json")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--workspace", "-w", help="workspace file (default: $HOPFO_WORKSPACE_DIR/workspace.json)")
    p.add_argument("--base", help="comodule algebra: workspace name, corpus name or builtin:...")
    p.add_argument("--seed", type=int, default=0, help="seed for random test objects")
    p.add_argument("--max-dim", type=int, default=4, help="dimension bound for random modules")
    p.add_argument("--window", type=int, default=5, help="window of the long exact sequence check")
    p.add_argument("--witness", action="store_true", help="print witnesses (matrices)")
    p.add_argument("--report", help="write a JSON report to this path")
    p.add_argument("--i", help="degrees, e.g. 1..3 or 2 or 1,3")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hopfo", description="Exact computations in hopfological algebra.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="verify the objects of a workspace or a builtin")
    v.add_argument("target", help="workspace path, builtin:NAME(k=v,...) or corpus:NAME")
    v.add_argument("name", nargs="?", help="verify only this object")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stable", parents=[common], help="stable category computations")
    s.add_argument("sub", choices=["hom", "zero", "shift", "cone", "triangle"])
    s.add_argument("args", nargs="+")
    s.add_argument("--test", action="append", help="test object for the triangle check (repeatable)")
    s.set_defaults(func=cmd_stable)

    d = sub.add_parser("derived", parents=[common], help="complexes, resolutions and Ext")
    d.add_argument("sub", choices=["hom", "ext", "perfect", "resolve"])
    d.add_argument("args", nargs="+")
    d.add_argument("--length", type=int, default=3, help="resolution length")
    d.set_defaults(func=cmd_derived)

    c = sub.add_parser("check", parents=[common], help="run a property suite over the corpus")
    c.add_argument("suite", choices=list(suites.SUITE_NAMES))
    c.add_argument("--count", type=int, default=3, help="cases per property and base")
    c.set_defaults(func=cmd_check)

    e = sub.add_parser("examples", parents=[common], help="list or write the example corpus")
    e.add_argument("sub", choices=["list", "emit"])
    e.add_argument("name", nargs="?", default="all")
    e.add_argument("--out", help="directory (default: $HOPFO_WORKSPACE_DIR or .)")
    e.set_defaults(func=cmd_examples)
    return parser


_ARITY = {("stable", "hom"): 2, ("stable", "zero"): 1, ("stable", "shift"): 2, ("stable", "cone"): 1,
          ("stable", "triangle"): 1, ("derived", "hom"): 2, ("derived", "ext"): 2, ("derived", "perfect"): 1,
          ("derived", "resolve"): 1}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # allow "stable shift k -1": a bare signed integer is an argument, not an option
    args = parser.parse_args(_protect_negative(argv))
    if hasattr(args, "args"):
        args.args = [a[1:] if a.startswith("\0") else a for a in args.args]
        want = _ARITY[(args.command, args.sub)]
        if len(args.args) != want:
            parser.error(f"{args.command} {args.sub} takes {want} argument(s), got {len(args.args)}")
    out = Output(args, argv)
    try:
        args.func(args, out)
    except (HopfologicalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return out.finish()


def _protect_negative(argv: list[str]) -> list[str]:
    out = []
    for j, a in enumerate(argv):
        prev = argv[j - 1] if j else ""
        negative = re.fullmatch(r"-\d+", a) and not prev.startswith("-")
        out.append("\0" + a if negative else a)
    return out


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
