"""The example corpus of pairs ``(B, H)`` and seeded random generators over it."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import bmod, comod, hopf, stable
from .bmod import BModule, ModuleMorphism
from .comod import ComoduleAlgebra
from .errors import ParameterError
from .hopf import HopfAlgebra


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    name: str
    description: str
    hopf: HopfAlgebra
    base: ComoduleAlgebra

    @property
    def field(self):
        return self.hopf.field

    @property
    def is_hmodule_category(self) -> bool:
        return self.base.is_regular


_SPECS = {
    "trivial": ("H = k over GF(2)", lambda: hopf.trivial(2), None),
    "trunc2": ("H = GF(2)[d]/(d^2), d primitive", lambda: hopf.truncated_poly(2), None),
    "trunc3": ("H = GF(3)[d]/(d^3), d primitive", lambda: hopf.truncated_poly(3), None),
    "z2_gf2": ("H = GF(2)[Z/2]", lambda: hopf.cyclic_group(2, 2), None),
    "z2_gf3": ("H = GF(3)[Z/2] (semisimple)", lambda: hopf.cyclic_group(3, 2), None),
    "sweedler_gf5": ("Sweedler's H4 over GF(5)", lambda: hopf.sweedler(5), None),
    "smash_x2_trunc2": ("B = GF(2)[x]/(x^2) # GF(2)[d]/(d^2) with d.x = 1",
                        lambda: hopf.truncated_poly(2), comod.truncated_module_algebra),
}

CORPUS_NAMES = tuple(_SPECS)


@lru_cache(maxsize=None)
def entry(name: str) -> CorpusEntry:
    """The corpus entry ``name`` (cached, so repeated calls share one base)."""
    if name not in _SPECS:
        raise ParameterError(f"unknown corpus entry {name!r}; known: {', '.join(CORPUS_NAMES)}")
    desc, make_h, make_a = _SPECS[name]
    h = make_h()
    base = comod.regular_comodule(h) if make_a is None else comod.smash_product(make_a(h))
    return CorpusEntry(name, desc, h, base)


def corpus() -> list[CorpusEntry]:
    return [entry(n) for n in CORPUS_NAMES]


# ---------------------------------------------------------------------------
# Random objects
# ---------------------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def cyclic_submodule(m: BModule, v: np.ndarray) -> tuple[BModule, ModuleMorphism]:
    """``B v`` inside ``m`` with its inclusion."""
    cols = m.field.contract("bxy,y->xb", m.action, v)
    return bmod.submodule(m, cols, name="Bv")


def random_module(base: ComoduleAlgebra, seed=None, max_dim: int = 4, min_dim: int = 1,
                  _depth: int = 0) -> BModule:
    """A random module of dimension in ``[min_dim, max_dim]``.

    Draws cyclic submodules and quotients of ``B`` and ``B^2``, trivial modules
    (for ``B = H``), direct sums, and tensor products with H-modules.
    """
    rng = _rng(seed)
    if max_dim < min_dim or min_dim < 0:
        raise ParameterError("need 0 <= min_dim <= max_dim")
    if max_dim == 0:
        return bmod.zero_module(base)
    if not _feasible(base, min_dim, max_dim):
        raise ParameterError(f"no module of dimension in [{min_dim}, {max_dim}] found over {base.name}")
    return _sample(base, rng, max_dim, min_dim, _depth)


def _sample(base, rng, max_dim: int, min_dim: int, depth: int) -> BModule:
    for _ in range(200):
        m = _draw(base, rng, max_dim, depth)
        if m is not None and min_dim <= m.dim <= max_dim:
            return m
    raise ParameterError(f"could not draw a module of dimension in [{min_dim}, {max_dim}] over {base.name}")


def _feasible(base: ComoduleAlgebra, min_dim: int, max_dim: int) -> bool:
    """Whether a module with dimension in range was found by a fixed-seed probe.

    The probe uses its own generator so the caller's random stream, and hence
    seeded output, does not depend on what was probed earlier.
    """
    cache = base.__dict__.setdefault("_feasible_dims", {})
    key = (min_dim, max_dim)
    if key not in cache:
        try:
            _sample(base, np.random.default_rng(0), max_dim, min_dim, 0)
            cache[key] = True
        except ParameterError:
            cache[key] = False
    return cache[key]


def _draw(base: ComoduleAlgebra, rng: np.random.Generator, max_dim: int, depth: int) -> BModule | None:
    F = base.field
    kinds = ["cyclic", "quotient"]
    if depth < 2 and max_dim >= 2:
        kinds += ["sum", "tensor"]
    if base.is_regular:
        kinds.append("trivial")
    kind = kinds[rng.integers(len(kinds))]
    if kind in ("cyclic", "quotient"):
        r = 1 if base.dim * 2 > 2 * max_dim + 4 else int(rng.integers(1, 3))
        free = bmod.free_module(base, r)
        v = F.random(rng, free.dim)
        if not v.any():
            return None
        sub, inc = cyclic_submodule(free, v)
        if kind == "cyclic":
            return BModule(base, sub.action, name="Bv")
        q, _ = bmod.quotient(free, inc.matrix, name="B/Bv")
        return BModule(base, q.action, name="B/Bv")
    if kind == "trivial":
        return bmod.trivial_module(base.hopf, int(rng.integers(1, max_dim + 1)))
    try:
        if kind == "sum":
            a = random_module(base, rng, max_dim - 1, _depth=depth + 1)
            b = random_module(base, rng, max_dim - a.dim, _depth=depth + 1)
            return bmod.direct_sum(a, b)[0]
        # tensor with an H-module
        x = random_module(base, rng, max_dim // 2, _depth=depth + 1)
        u = random_module(comod.regular_comodule(base.hopf), rng, max_dim // x.dim, _depth=depth + 1)
        return bmod.tensor_with_hmodule(x, u)
    except ParameterError:
        # some dimensions admit no module (e.g. a matrix algebra has none of odd dimension)
        return None


def random_hmodule(h: HopfAlgebra, seed=None, max_dim: int = 4) -> BModule:
    return random_module(comod.regular_comodule(h), seed, max_dim)


def random_morphism(m: BModule, n: BModule, seed=None) -> ModuleMorphism:
    """A uniformly random element of ``Hom_B(M, N)``."""
    rng = _rng(seed)
    basis = bmod.hom_basis(m, n)
    if not len(basis):
        return bmod.zero_map(m, n)
    coeff = m.field.random(rng, len(basis))
    return ModuleMorphism(m, n, m.field.contract("k,kxy->xy", coeff, basis))


def random_conflation(base: ComoduleAlgebra, seed=None, max_dim: int = 4) -> stable.Conflation:
    """A random conflation ``0 -> M -> N -> L -> 0`` with ``dim N <= max_dim``.

    Mostly ``0 -> Bv -> N -> N/Bv -> 0`` for a random vector (kept when it is
    a conflation), sometimes a split sequence or a canonical ``lambda`` one.
    """
    rng = _rng(seed)
    for _ in range(200):
        try:
            c = _draw_conflation(base, rng, max_dim, int(rng.integers(4)))
        except ParameterError:
            c = None
        if c is not None:
            return c
    raise ParameterError(f"could not draw a conflation over {base.name}")


def _draw_conflation(base, rng, max_dim: int, kind: int) -> stable.Conflation | None:
    if kind == 0 and max_dim >= 2:
        a = random_module(base, rng, max_dim - 1)
        b = random_module(base, rng, max_dim - a.dim)
        s, (ia, ib), (pa, pb) = bmod.direct_sum(a, b)
        return stable.is_conflation(ia, pb)
    if kind == 1 and max_dim >= base.hopf.dim:
        x = random_module(base, rng, max_dim // base.hopf.dim)
        return stable.canonical_conflation_lambda(x)
    n = random_module(base, rng, max_dim, min_dim=min(2, max_dim))
    v = n.field.random(rng, n.dim)
    if not v.any():
        return None
    sub, inc = cyclic_submodule(n, v)
    if sub.dim == n.dim:
        return None
    q, proj = bmod.quotient(n, inc.matrix)
    return stable.is_conflation(ModuleMorphism(sub, n, inc.matrix), ModuleMorphism(n, q, proj.matrix))
