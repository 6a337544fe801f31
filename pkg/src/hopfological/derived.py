"""Bounded complexes, the homotopy category, E-projective resolutions and Ext.

Complexes are cohomological: ``d_k: M^k -> M^{k+1}``.  Resolutions are built
from the canonical deflations ``rho: K (x) H -> K`` so that every term is of
the form ``K^i (x) H`` and every syzygy is ``K^{i+1} = K^i[-1]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import bmod, stable
from .bmod import BModule, ModuleMorphism, hom_basis
from .comod import ComoduleAlgebra
from .errors import ContractError, Report, StructuralError
from .exactlin import Field


# ---------------------------------------------------------------------------
# Complexes and chain maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundedComplex:
    """Finitely supported complex; ``terms[k]`` sits in degree ``k``.

    Degrees with zero modules are dropped; ``differentials[k]`` is
    ``d_k: M^k -> M^{k+1}`` and is stored only between nonzero terms.
    """

    base: ComoduleAlgebra
    terms: dict = field(default_factory=dict)
    differentials: dict = field(default_factory=dict)

    @property
    def field(self) -> Field:
        return self.base.field

    @property
    def support(self) -> list[int]:
        return sorted(self.terms)

    def term(self, k: int) -> BModule:
        m = self.terms.get(k)
        return m if m is not None else bmod.zero_module(self.base)

    def differential(self, k: int) -> ModuleMorphism:
        d = self.differentials.get(k)
        if d is not None:
            return d
        return bmod.zero_map(self.term(k), self.term(k + 1))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {self.terms[k].dim}" for k in self.support)
        return f"BoundedComplex({{{body}}})"


def bounded_complex(base: ComoduleAlgebra, terms: dict, differentials: dict | None = None,
                    check: bool = True) -> BoundedComplex:
    """Build a complex from ``{degree: module}`` and ``{degree: d_k}`` (matrices or morphisms).

    Checks that every differential is B-linear and that ``d_{k+1} d_k = 0``.
    """
    differentials = differentials or {}
    kept = {}
    for k, m in terms.items():
        if m.base is not base:
            raise ContractError(f"term in degree {k} lives over a different base")
        if m.dim:
            kept[int(k)] = m
    zero = bmod.zero_module(base)
    diffs = {}
    for k, d in differentials.items():
        k = int(k)
        src, tgt = kept.get(k, zero), kept.get(k + 1, zero)
        mat = d.matrix if isinstance(d, ModuleMorphism) else d
        mat = base.field(np.asarray(mat, dtype=np.int64)).reshape(tgt.dim, src.dim)
        if src.dim and tgt.dim:
            diffs[k] = ModuleMorphism(src, tgt, mat)
    c = BoundedComplex(base, kept, diffs)
    if check:
        F = base.field
        for k, d in diffs.items():
            if not d.is_linear():
                raise StructuralError(f"differential d_{k} is not B-linear")
            nxt = diffs.get(k + 1)
            if nxt is not None and F.matmul(nxt.matrix, d.matrix).any():
                raise StructuralError(f"d_{k + 1} o d_{k} is not zero")
    return c


def one_term(m: BModule, degree: int = 0) -> BoundedComplex:
    return bounded_complex(m.base, {degree: m})


def two_term(f: ModuleMorphism, degree: int = 0) -> BoundedComplex:
    """``M -f-> N`` with ``M`` in ``degree``."""
    return bounded_complex(f.source.base, {degree: f.source, degree + 1: f.target}, {degree: f})


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: BoundedComplex
    target: BoundedComplex
    components: dict  # degree -> matrix (dim target^k x dim source^k)

    def component(self, k: int) -> ModuleMorphism:
        src, tgt = self.source.term(k), self.target.term(k)
        mat = self.components.get(k)
        if mat is None:
            return bmod.zero_map(src, tgt)
        return ModuleMorphism(src, tgt, mat)

    def check(self) -> Report:
        rep = Report("chain map")
        F = self.source.field
        degrees = sorted(set(self.source.support) | set(self.target.support))
        for k in degrees:
            rep.add(f"linear_{k}", self.component(k).is_linear())
        for k in degrees:
            lhs = F.matmul(self.target.differential(k).matrix, self.component(k).matrix)
            rhs = F.matmul(self.component(k + 1).matrix, self.source.differential(k).matrix)
            rep.add(f"commutes_{k}", (lhs == rhs).all())
        return rep


def _common_degrees(c: BoundedComplex, d: BoundedComplex, shift: int = 0) -> list[int]:
    """Degrees ``k`` where both ``C^k`` and ``D^{k+shift}`` are nonzero."""
    return [k for k in c.support if k + shift in d.terms]


def _same_base(c: BoundedComplex, d: BoundedComplex) -> None:
    if c.base is not d.base:
        raise ContractError("complexes over different bases")


class _Layout:
    """Flattening of degreewise maps ``C^k -> D^{k+shift}`` into one coordinate vector."""

    def __init__(self, c: BoundedComplex, d: BoundedComplex, shift: int = 0):
        self.degrees = _common_degrees(c, d, shift)
        self.shapes = [(d.terms[k + shift].dim, c.terms[k].dim) for k in self.degrees]
        sizes = [a * b for a, b in self.shapes]
        self.offsets = dict(zip(self.degrees, np.cumsum([0] + sizes[:-1]).tolist()))
        self.size = int(sum(sizes))

    def split(self, vec: np.ndarray) -> dict:
        out = {}
        for k, shp in zip(self.degrees, self.shapes):
            o = self.offsets[k]
            out[k] = vec[o:o + shp[0] * shp[1]].reshape(shp)
        return out


def _degreewise_homs(c: BoundedComplex, d: BoundedComplex, shift: int = 0):
    """Layout and a basis (rows) of tuples of B-maps ``C^k -> D^{k+shift}``."""
    lay = _Layout(c, d, shift)
    rows = []
    for k in lay.degrees:
        hb = hom_basis(c.terms[k], d.terms[k + shift])
        o = lay.offsets[k]
        for g in hb:
            v = np.zeros(lay.size, dtype=np.int64)
            v[o:o + g.size] = g.reshape(-1)
            rows.append(v)
    basis = np.array(rows, dtype=np.int64).reshape(len(rows), lay.size)
    return lay, basis


def chain_map_space(c: BoundedComplex, d: BoundedComplex) -> list[ChainMap]:
    """Basis of all chain maps ``C -> D``."""
    _same_base(c, d)
    F = c.field
    lay, basis = _degreewise_homs(c, d)
    if not len(basis):
        return []
    sols = _chain_solutions(c, d, lay, basis)
    return [ChainMap(c, d, lay.split(v)) for v in sols]


def _chain_solutions(c, d, lay, basis) -> np.ndarray:
    """Rows spanning the chain maps, inside the span of ``basis``."""
    F = c.field
    # commutation defect, linear in the flattened components
    cols = []
    for v in basis:
        comps = lay.split(v)
        parts = []
        for k in sorted(set(c.support) | set(d.support) | {k - 1 for k in c.support}):
            dk = d.differential(k).matrix
            ck = c.differential(k).matrix
            fk = comps.get(k, np.zeros((d.term(k).dim, c.term(k).dim), dtype=np.int64))
            fk1 = comps.get(k + 1, np.zeros((d.term(k + 1).dim, c.term(k + 1).dim), dtype=np.int64))
            parts.append((F.matmul(dk, fk) - F.matmul(fk1, ck)).reshape(-1))
        cols.append(np.mod(np.concatenate(parts), F.p) if parts else np.zeros(0, dtype=np.int64))
    defect = np.stack(cols, axis=1)
    null = F.nullspace(defect) if defect.size else F.eye(len(basis))
    return F.matmul(null.T, basis) if null.size else np.zeros((0, lay.size), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class HomotopyHomSpace:
    """Chain maps ``C -> D`` modulo null-homotopic ones."""

    source: BoundedComplex
    target: BoundedComplex
    chain_dim: int
    null_dim: int
    representatives: list

    @property
    def dim(self) -> int:
        return len(self.representatives)


def homotopy_hom(c: BoundedComplex, d: BoundedComplex) -> HomotopyHomSpace:
    """``Hom_K(C, D)``: chain maps modulo ``f^k = d h^k + h^{k+1} d`` with B-maps ``h^k: C^k -> D^{k-1}``."""
    _same_base(c, d)
    F = c.field
    lay, basis = _degreewise_homs(c, d)
    if not len(basis):
        return HomotopyHomSpace(c, d, 0, 0, [])
    chains = _chain_solutions(c, d, lay, basis)
    hlay, hbasis = _degreewise_homs(c, d, shift=-1)
    null = []
    for v in hbasis:
        h = hlay.split(v)
        img = np.zeros(lay.size, dtype=np.int64)
        for k in lay.degrees:
            o = lay.offsets[k]
            tgt_dim, src_dim = lay.shapes[lay.degrees.index(k)]
            acc = np.zeros((tgt_dim, src_dim), dtype=np.int64)
            if k in h:  # d_{k-1}^D h^k
                acc = acc + F.matmul(d.differential(k - 1).matrix, h[k])
            if k + 1 in h:  # h^{k+1} d_k^C
                acc = acc + F.matmul(h[k + 1], c.differential(k).matrix)
            img[o:o + acc.size] = np.mod(acc, F.p).reshape(-1)
        null.append(img)
    null = np.array(null, dtype=np.int64).reshape(len(null), lay.size)
    chain_rank = F.rank(chains) if len(chains) else 0
    if chain_rank == 0:
        return HomotopyHomSpace(c, d, 0, 0, [])
    s_r, s_piv, reps = F.quotient_representatives(chains, null)
    return HomotopyHomSpace(c, d, chain_rank, len(s_piv), [ChainMap(c, d, lay.split(v)) for v in reps])


# ---------------------------------------------------------------------------
# Acyclicity and perfection
# ---------------------------------------------------------------------------

def is_strictly_E_acyclic(c: BoundedComplex) -> Report:
    """Exactness plus a conflation ``0 -> Z^k -> M^k -> Z^{k+1} -> 0`` in every degree.

    The report's ``data["conflations"]`` maps each degree to its witness.
    """
    F = c.field
    rep = Report("strict E-acyclicity")
    rep.data["conflations"] = {}
    if c.is_zero():
        return rep
    lo, hi = c.support[0], c.support[-1]
    for k in range(lo, hi + 1):
        m = c.term(k)
        dk = c.differential(k)
        zk_dim = m.dim - (F.rank(dk.matrix) if dk.matrix.size else 0)
        dprev = c.differential(k - 1)
        img_dim = F.rank(dprev.matrix) if dprev.matrix.size else 0
        rep.add(f"exact_at_{k}", img_dim == zk_dim, {"ker": zk_dim, "im": img_dim})
    if not rep.passed:
        return rep
    for k in range(lo, hi + 1):
        m = c.term(k)
        if m.dim == 0:
            continue
        dk = c.differential(k)
        zk, inc = bmod.kernel(dk)
        nxt = c.term(k + 1)
        if dk.matrix.size and F.rank(dk.matrix):
            zk1, inc1 = bmod.image(dk)
            g = bmod.corestrict(dk, inc1)
        else:
            zk1 = bmod.zero_module(c.base)
            g = bmod.zero_map(m, zk1)
        conf = stable.is_conflation(ModuleMorphism(zk, m, inc.matrix), ModuleMorphism(m, g.target, g.matrix))
        rep.add(f"conflation_at_{k}", conf is not None)
        if conf is not None:
            rep.data["conflations"][k] = conf
    return rep


def is_perfect(c: BoundedComplex) -> bool:
    """Every term of this representative is E-projective."""
    return all(stable.is_E_projective(m) for m in c.terms.values())


def truncate(c: BoundedComplex, mode: str, k: int) -> BoundedComplex:
    """Stupid truncation: keep degrees ``<= k`` (``"at-most"``) or ``>= k`` (``"at-least"``)."""
    if mode == "at-most":
        keep = lambda j: j <= k  # noqa: E731
    elif mode == "at-least":
        keep = lambda j: j >= k  # noqa: E731
    else:
        raise ContractError(f"unknown truncation mode {mode!r}")
    terms = {j: m for j, m in c.terms.items() if keep(j)}
    diffs = {j: d for j, d in c.differentials.items() if keep(j) and keep(j + 1)}
    return BoundedComplex(c.base, terms, diffs)


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Resolution:
    """``... -> P^{-1} -> P^0 -> M`` with ``P^{-i} = K^i (x) H``.

    ``syzygies[i] = K^i`` (``K^0 = M``), ``deflations[i]: P^{-i} -> K^i`` is
    ``rho``, ``inclusions[i]: K^{i+1} -> P^{-i}`` and ``conflations[i]`` is the
    witnessed step ``0 -> K^{i+1} -> P^{-i} -> K^i -> 0``.
    """

    module: BModule
    syzygies: list
    inclusions: list
    conflations: list

    @property
    def length(self) -> int:
        return len(self.conflations) - 1

    @property
    def projectives(self) -> list[BModule]:
        return [k.tensor_h for k in self.syzygies[:-1]]

    @property
    def deflations(self) -> list[ModuleMorphism]:
        return [c.g for c in self.conflations]

    @property
    def augmentation(self) -> ModuleMorphism:
        return self.conflations[0].g

    def differential(self, i: int) -> ModuleMorphism:
        """``P^{-i} -> P^{-(i-1)}`` for ``i >= 1``."""
        return self.inclusions[i - 1] @ self.deflations[i]

    def complex(self, augmented: bool = False) -> BoundedComplex:
        """``P^{-n} -> ... -> P^0``.

        With ``augmented`` the window is closed up to an exact complex
        ``0 -> K^{n+1} -> P^{-n} -> ... -> P^0 -> M -> 0`` (``M`` in degree 1).
        """
        base = self.module.base
        n = self.length
        terms = {-i: p for i, p in enumerate(self.projectives)}
        diffs = {-i: self.differential(i).matrix for i in range(1, n + 1)}
        if augmented:
            terms[1] = self.module
            diffs[0] = self.augmentation.matrix
            terms[-n - 1] = self.syzygies[n + 1]
            diffs[-n - 1] = self.inclusions[n].matrix
        return bounded_complex(base, terms, diffs, check=False)


def e_projective_resolution(m: BModule, length: int) -> Resolution:
    """Resolution ``P^0, ..., P^{-length}`` by the canonical deflations ``rho_{K^i}``."""
    if length < 0:
        raise ContractError("length must be nonnegative")
    syz = [m]
    incs, confs = [], []
    for _ in range(length + 1):
        k = syz[-1]
        conf = stable.canonical_conflation_rho(k)
        nxt, inc = stable.shift_minus(k)
        syz.append(nxt)
        incs.append(inc)
        confs.append(conf)
    return Resolution(m, syz, incs, confs)


def syzygy(m: BModule, i: int) -> BModule:
    return e_projective_resolution(m, i - 1).syzygies[i] if i > 0 else m


# ---------------------------------------------------------------------------
# Ext and the Rickard check
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExtSpace:
    """``Ext^i(M, N)`` with cocycle representatives ``P^{-i} -> N``."""

    source: BModule
    target: BModule
    degree: int
    representatives: np.ndarray  # (dim, dim N, dim P^{-i}); for i = 0 a basis of Hom(M, N)

    @property
    def dim(self) -> int:
        return len(self.representatives)


def ext(m: BModule, n: BModule, i: int, method: str = "syzygy") -> ExtSpace:
    """``Ext^i(M, N)`` as degree-``i`` cohomology of ``Hom_B(P^., N)``.

    ``method="syzygy"`` (default) uses that this cohomology equals
    ``Hom_B(K^i, N)`` modulo the maps extending along ``K^i -> P^{-(i-1)}``;
    ``method="cohomology"`` forms the three hom spaces around degree ``i``
    directly and is meant for cross-checks on small inputs.
    """
    if i < 0:
        raise ContractError("Ext degree must be nonnegative")
    bmod._same_base(m, n)
    F = m.field
    if i == 0:
        return ExtSpace(m, n, 0, hom_basis(m, n))
    if method == "syzygy":
        return _ext_syzygy(m, n, i)
    if method == "cohomology":
        return _ext_cohomology(m, n, i)
    raise ContractError(f"unknown method {method!r}")


def _ext_syzygy(m: BModule, n: BModule, i: int) -> ExtSpace:
    F = m.field
    res = e_projective_resolution(m, i - 1)
    k, prev = res.syzygies[i], res.syzygies[i - 1]
    j = res.inclusions[i - 1]  # K^i -> K^{i-1} (x) H
    p_i = k.tensor_h
    empty = np.zeros((0, n.dim, p_i.dim), dtype=np.int64)
    homs = hom_basis(k, n)
    if not len(homs):
        return ExtSpace(m, n, i, empty)
    ext_maps = stable.hom_from_tensor_h(prev, n)
    if len(ext_maps):
        imgs = F.contract("kxy,yz->kxz", ext_maps, j.matrix)
        keep = stable._independent_maps(imgs, k, n)
        sub = imgs[keep].reshape(len(keep), n.dim * k.dim)
    else:
        sub = np.zeros((0, n.dim * k.dim), dtype=np.int64)
    _, _, reps = F.quotient_representatives(homs.reshape(len(homs), -1), sub)
    # cocycles on P^{-i}: compose with rho: P^{-i} -> K^i
    rho = bmod.rho_map(k).matrix
    cocycles = F.contract("kxy,yz->kxz", reps.reshape(len(reps), n.dim, k.dim), rho) if len(reps) else empty
    return ExtSpace(m, n, i, cocycles)


def _ext_cohomology(m: BModule, n: BModule, i: int) -> ExtSpace:
    F = m.field
    res = e_projective_resolution(m, i + 1)
    p_prev, p_i, p_next = res.projectives[i - 1], res.projectives[i], res.projectives[i + 1]
    d_in = res.differential(i).matrix  # P^{-i} -> P^{-(i-1)}
    d_out = res.differential(i + 1).matrix  # P^{-(i+1)} -> P^{-i}
    h_i = hom_basis(p_i, n)
    empty = np.zeros((0, n.dim, p_i.dim), dtype=np.int64)
    if not len(h_i):
        return ExtSpace(m, n, i, empty)
    # cocycles: phi o d_out = 0
    delta = F.contract("kxy,yz->kxz", h_i, d_out).reshape(len(h_i), -1)
    z = F.nullspace(delta.T)
    cocycles = F.matmul(z.T, h_i.reshape(len(h_i), -1)) if z.size else np.zeros((0, n.dim * p_i.dim), dtype=np.int64)
    if not len(cocycles):
        return ExtSpace(m, n, i, empty)
    h_prev = hom_basis(p_prev, n)
    bounds = F.contract("kxy,yz->kxz", h_prev, d_in).reshape(len(h_prev), -1) if len(h_prev) else \
        np.zeros((0, n.dim * p_i.dim), dtype=np.int64)
    _, _, reps = F.quotient_representatives(cocycles, bounds)
    return ExtSpace(m, n, i, reps.reshape(len(reps), n.dim, p_i.dim))


def rickard_consistency(m: BModule, n: BModule, i: int) -> Report:
    """Compare ``dim Ext^i(M, N)`` with ``dim stable_hom(M, N[i])``."""
    if i < 1:
        raise ContractError("the Rickard comparison is stated for i >= 1")
    e = ext(m, n, i).dim
    s = stable.stable_hom(m, stable.shift_plus_times(n, i)).dim
    rep = Report(f"Rickard consistency, i = {i}")
    rep.data = {"ext": e, "stable_hom": s}
    rep.add("dimensions_agree", e == s, {"ext": e, "stable_hom": s})
    return rep
