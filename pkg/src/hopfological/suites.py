"""Seeded property suites over the corpus (and any user bases).

A property is a function ``prop(base, rng, max_dim, params) -> str | None``
that draws its own random inputs and returns ``None`` on success or a short
description of what went wrong.  The runner executes ``count`` cases per
property and base, each with its own seed derived from ``(seed, base, property,
case)``, so results do not depend on execution order.  A failing case is
minimized by re-running it with smaller dimension bounds; the smallest bound
that still fails is reported as the counterexample.  A case whose inputs cannot
be drawn at the given bound (a ``ParameterError``) is counted as skipped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bmod, derived, stable
from .bmod import ModuleMorphism
from .comod import ComoduleAlgebra
from .corpus import CORPUS_NAMES, entry, random_conflation, random_hmodule, random_module, random_morphism
from .errors import HopfologicalError, ParameterError, Report

Property = Callable[[ComoduleAlgebra, np.random.Generator, int, dict], "str | None"]


@dataclass
class SuiteParams:
    seed: int = 0
    max_dim: int = 4
    count: int = 3
    degrees: tuple[int, ...] = (1, 2, 3)
    window: int = 5
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _fail_report(rep: Report) -> str | None:
    return None if rep.passed else f"failed checks {[c.name for c in rep.failures()]}"


def _x_tensor_h(base, rng, max_dim):
    """``X (x) H`` for a random ``X``; bounded by ``max_dim`` on ``X``."""
    return random_module(base, rng, max_dim).tensor_h


def _small_dim(base, max_dim: int) -> int:
    """A bound for modules that get tensored with ``H`` inside a property."""
    return max(1, min(max_dim, 2 if base.hopf.dim > 2 else max_dim))


def _conflation_into(l, rng) -> stable.Conflation:
    """A conflation whose middle term is ``l`` (a cyclic-submodule sequence, else ``0 -> 0 -> L -> L``)."""
    from .corpus import cyclic_submodule
    F = l.field
    for _ in range(10):
        v = F.random(rng, l.dim)
        if not v.any():
            continue
        sub, inc = cyclic_submodule(l, v)
        if sub.dim == l.dim:
            continue
        q, proj = bmod.quotient(l, inc.matrix)
        c = stable.is_conflation(ModuleMorphism(sub, l, inc.matrix), ModuleMorphism(l, q, proj.matrix))
        if c is not None:
            return c
    zero = bmod.zero_module(l.base)
    c = stable.is_conflation(bmod.zero_map(zero, l), bmod.identity(l))
    assert c is not None
    return c


# ---------------------------------------------------------------------------
# exact-structure
# ---------------------------------------------------------------------------

def prop_conflation_verifies(base, rng, max_dim, params):
    return _fail_report(random_conflation(base, rng, max_dim).check())


def prop_pullback_of_deflation(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    y = random_module(base, rng, max_dim)
    phi = random_morphism(y, c.right, rng)
    solved, explicit = stable.pullback_conflation(c, phi)
    bad = _fail_report(solved.check())
    if bad:
        return bad
    F = base.field
    rep = Report()
    r = ModuleMorphism(solved.middle.tensor_h, solved.left.tensor_h, explicit)
    rep.add("explicit_witness_linear", r.is_linear())
    fH = F.kron(solved.f.matrix, F.eye(base.hopf.dim))
    rep.add("explicit_witness_splits", (F.matmul(explicit, fH) == F.eye(fH.shape[1])).all())
    return _fail_report(rep)


def prop_pushout_of_inflation(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    y = random_module(base, rng, max_dim)
    return _fail_report(stable.pushout_conflation(c, random_morphism(c.left, y, rng)).check())


def prop_composite_of_deflations(base, rng, max_dim, params):
    c1 = random_conflation(base, rng, max_dim)
    c2 = _conflation_into(c1.right, rng)
    comp = stable.compose_deflations(c1, c2)
    if comp is None:
        return "composite deflation is not a deflation"
    return _fail_report(comp.check())


def prop_composite_of_inflations(base, rng, max_dim, params):
    c1 = random_conflation(base, rng, max_dim)
    c2 = stable.canonical_conflation_lambda(c1.middle) if rng.integers(2) else _conflation_into(c1.middle, rng)
    if c2.left.dim != c1.middle.dim:
        c2 = stable.canonical_conflation_lambda(c1.middle)
    comp = stable.compose_inflations(c1, c2)
    if comp is None:
        return "composite inflation is not an inflation"
    return _fail_report(comp.check())


def prop_tensor_stability(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    for _ in range(params.get("hmodules", 1)):
        u = random_hmodule(base.hopf, rng, max(1, max_dim // 2))
        t = stable.tensor_conflation(c, u)
        if t is None:
            return f"tensor with an H-module of dim {u.dim} is not a conflation"
        bad = _fail_report(t.check())
        if bad:
            return bad
    return None


# ---------------------------------------------------------------------------
# frobenius
# ---------------------------------------------------------------------------

def prop_projectives_stably_zero(base, rng, max_dim, params):
    p = _x_tensor_h(base, rng, _small_dim(base, max_dim))
    if not stable.is_stably_zero(p):
        return f"X (x) H of dim {p.dim} is not stably zero"
    if not stable.is_stably_zero(bmod.free_module(base, 1)):
        return "free module is not stably zero"
    return None


def prop_extension_along_inflation(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    p = _x_tensor_h(base, rng, _small_dim(base, max_dim))
    phi = random_morphism(c.left, p, rng)
    psi = stable.extend_along_inflation(c, phi)
    if not psi.is_linear():
        return "extension is not B-linear"
    if ((psi @ c.f).matrix != phi.matrix).any():
        return "extension does not restrict to phi"
    return None


def prop_lift_along_deflation(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    p = _x_tensor_h(base, rng, _small_dim(base, max_dim))
    phi = random_morphism(p, c.right, rng)
    psi = stable.lift_along_deflation(c, phi)
    if not psi.is_linear():
        return "lift is not B-linear"
    if ((c.g @ psi).matrix != phi.matrix).any():
        return "lift does not compose to phi"
    return None


def prop_canonical_conflations(base, rng, max_dim, params):
    m = random_module(base, rng, max_dim)
    for c in (stable.canonical_conflation_lambda(m), stable.canonical_conflation_rho(m)):
        bad = _fail_report(c.check())
        if bad:
            return bad
    return None


# ---------------------------------------------------------------------------
# rickard
# ---------------------------------------------------------------------------

def prop_ext_equals_stable_hom(base, rng, max_dim, params):
    m = random_module(base, rng, max_dim)
    n = random_module(base, rng, max_dim)
    for i in params.get("degrees", (1, 2, 3)):
        rep = derived.rickard_consistency(m, n, i)
        if not rep.passed:
            return f"degree {i}: dim ext = {rep.data['ext']}, dim stable hom = {rep.data['stable_hom']}"
    return None


def prop_ext_vanishes_on_projectives(base, rng, max_dim, params):
    m = random_module(base, rng, max_dim)
    p = _x_tensor_h(base, rng, _small_dim(base, max_dim))
    for i in params.get("degrees", (1, 2, 3)):
        d = derived.ext(m, p, i).dim
        if d:
            return f"ext^{i}(M, X (x) H) has dim {d}"
    return None


# ---------------------------------------------------------------------------
# triangulated
# ---------------------------------------------------------------------------

def prop_conflation_triangle(base, rng, max_dim, params):
    c = random_conflation(base, rng, max_dim)
    t = stable.conflation_to_triangle(c)
    bad = _fail_report(stable.triangle_report(t))
    if bad:
        return bad
    x = random_module(base, rng, max_dim)
    return _fail_report(stable.long_exact_check(t, x, params.get("window", 5)))


def prop_shift_comparisons(base, rng, max_dim, params):
    m = random_module(base, rng, max_dim)
    if not stable.stable_iso_test(stable.comparison_to_shift_minus_plus(m)):
        return "M -> M[-1][1] is not a stable isomorphism"
    if not stable.stable_iso_test(stable.comparison_from_shift_plus_minus(m)):
        return "M[1][-1] -> M is not a stable isomorphism"
    return None


SUITES: dict[str, dict[str, Property]] = {
    "exact-structure": {
        "conflation_verifies": prop_conflation_verifies,
        "pullback_of_deflation": prop_pullback_of_deflation,
        "pushout_of_inflation": prop_pushout_of_inflation,
        "composite_of_deflations": prop_composite_of_deflations,
        "composite_of_inflations": prop_composite_of_inflations,
        "tensor_stability": prop_tensor_stability,
    },
    "frobenius": {
        "projectives_stably_zero": prop_projectives_stably_zero,
        "extension_along_inflation": prop_extension_along_inflation,
        "lift_along_deflation": prop_lift_along_deflation,
        "canonical_conflations": prop_canonical_conflations,
    },
    "rickard": {
        "ext_equals_stable_hom": prop_ext_equals_stable_hom,
        "ext_vanishes_on_projectives": prop_ext_vanishes_on_projectives,
    },
    "triangulated": {
        "conflation_triangle": prop_conflation_triangle,
        "shift_comparisons": prop_shift_comparisons,
    },
}
SUITE_NAMES = tuple(SUITES) + ("all",)


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

def corpus_bases() -> list[tuple[str, ComoduleAlgebra]]:
    return [(n, entry(n).base) for n in CORPUS_NAMES]


def case_rng(seed: int, base_index: int, prop: str, case: int) -> np.random.Generator:
    key = [int.from_bytes(prop.encode(), "little") % (2 ** 32)]
    return np.random.default_rng(np.random.SeedSequence([seed, base_index, case] + key))


_SKIP = object()


def _run_case(prop: Property, base, seed_parts, max_dim: int, params: dict):
    """``None`` on success, a message on failure, ``_SKIP`` if no inputs exist at this bound."""
    try:
        return prop(base, case_rng(*seed_parts), max_dim, params)
    except ParameterError:
        # e.g. a matrix algebra has no module of odd dimension: nothing to test
        return _SKIP
    except HopfologicalError as exc:
        return f"{type(exc).__name__}: {exc}"


def run_property(name: str, prop: Property, label: str, base, base_index: int,
                 params: SuiteParams) -> dict:
    """Run ``params.count`` cases; on failure minimize ``max_dim``."""
    opts = {"degrees": params.degrees, "window": params.window, **params.extra}
    start = time.perf_counter()
    failure = None
    skipped = 0
    for case in range(params.count):
        parts = (params.seed, base_index, name, case)
        msg = _run_case(prop, base, parts, params.max_dim, opts)
        if msg is None:
            continue
        if msg is _SKIP:
            skipped += 1
            continue
        bound, why = params.max_dim, msg
        for d in range(1, params.max_dim):
            smaller = _run_case(prop, base, parts, d, opts)
            if smaller is not None and smaller is not _SKIP:
                bound, why = d, smaller
                break
        failure = {"case": case, "seed": params.seed, "max_dim": bound, "reason": why}
        break
    return {
        "property": name,
        "base": label,
        "passed": failure is None,
        "cases": (params.count if failure is None else failure["case"] + 1) - skipped,
        "skipped": skipped,
        "counterexample": failure,
        "seconds": round(time.perf_counter() - start, 3),
    }


def run_suite(suite: str, params: SuiteParams | None = None,
              bases: list[tuple[str, ComoduleAlgebra]] | None = None) -> Report:
    """Run a suite (or ``"all"``) over ``bases`` (default: the corpus)."""
    params = params or SuiteParams()
    if suite not in SUITE_NAMES:
        raise ValueError(f"unknown suite {suite!r}; known: {', '.join(SUITE_NAMES)}")
    bases = corpus_bases() if bases is None else bases
    chosen = list(SUITES) if suite == "all" else [suite]
    rep = Report(f"check {suite}")
    rows = []
    for sname in chosen:
        for pname, prop in SUITES[sname].items():
            for bi, (label, base) in enumerate(bases):
                row = run_property(pname, prop, label, base, bi, params)
                row["suite"] = sname
                rows.append(row)
                rep.add(f"{pname}[{label}]", row["passed"], row["counterexample"])
    rep.data["properties"] = rows
    return rep
