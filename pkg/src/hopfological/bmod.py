"""Finite-dimensional B-modules and their morphisms.

A module is stored as one action matrix per basis element of ``B``:
``action[i]`` is the matrix of ``x -> e_i x``.  H-modules are simply
modules over :func:`~hopfological.comod.regular_comodule` ``(H)``.

Morphism spaces are computed from a presentation: pick generators ``G`` of
``M``, so that ``pi: B^r -> M`` is onto; a map ``M -> N`` is then a tuple of
images of the generators that kills the relations ``ker pi``.  This keeps the
linear systems at ``r * dim N`` unknowns instead of ``dim M * dim N``.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .comod import ComoduleAlgebra, regular_comodule
from .errors import ContractError, InternalError, Report, StructuralError
from .exactlin import Field
from .hopf import HopfAlgebra, _frozen, _record


@dataclass(frozen=True, eq=False)
class BModule:
    """Left module over a comodule algebra ``base``; ``action`` has shape ``(dim B, d, d)``."""

    base: ComoduleAlgebra
    action: np.ndarray
    name: str = ""

    def __post_init__(self):
        act = self.field(self.action)
        nb = self.base.dim
        if act.ndim != 3 or act.shape[0] != nb or act.shape[1] != act.shape[2]:
            raise ContractError(f"action must have shape ({nb}, d, d), got {act.shape}")
        object.__setattr__(self, "action", _frozen(act))

    def __repr__(self) -> str:
        return f"BModule({self.name or '?'}, dim={self.dim}, over {self.base.name})"

    @property
    def field(self) -> Field:
        return self.base.field

    @property
    def hopf(self) -> HopfAlgebra:
        return self.base.hopf

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    def act(self, b: np.ndarray) -> np.ndarray:
        """Matrix of the element ``b`` (a coordinate vector in ``B``)."""
        return self.field.contract("i,ixy->xy", self.field(b), self.action)

    @cached_property
    def tensor_h(self) -> BModule:
        """``M (x) H`` with ``H`` the regular H-module (cached)."""
        return tensor_with_hmodule(self, regular_hmodule(self.hopf))

    @cached_property
    def flat_action(self) -> np.ndarray:
        """All action matrices stacked vertically, ``(dim B * d) x d``."""
        return self.action.reshape(self.base.dim * self.dim, self.dim)


def verify_module(m: BModule) -> Report:
    F = m.field
    report = Report(f"module {m.name}".strip())
    st = m.base.algebra.structure
    lhs = F.contract("ixy,jyz->ijxz", m.action, m.action)
    rhs = F.contract("kij,kxz->ijxz", st, m.action)
    _record(report, "action_associative", lhs, rhs)
    _record(report, "action_unital", m.act(m.base.algebra.unit), F.eye(m.dim))
    return report


def module(base: ComoduleAlgebra, action, name: str = "") -> BModule:
    """Build a module and raise :class:`StructuralError` if the axioms fail."""
    m = BModule(base, action, name)
    report = verify_module(m)
    if not report.passed:
        raise StructuralError(f"not a {base.name}-module: {[c.name for c in report.failures()]}")
    return m


def _same_base(*mods: BModule) -> None:
    b = mods[0].base
    for m in mods[1:]:
        if m.base is not b:
            raise ContractError(f"modules over different bases: {b.name!r} vs {m.base.name!r}")


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """``matrix`` is ``dim target x dim source``."""

    source: BModule
    target: BModule
    matrix: np.ndarray

    def __post_init__(self):
        _same_base(self.source, self.target)
        mat = self.field(self.matrix).reshape(self.target.dim, self.source.dim)
        object.__setattr__(self, "matrix", _frozen(mat))

    def __repr__(self) -> str:
        return f"ModuleMorphism({self.source.name or self.source.dim} -> {self.target.name or self.target.dim})"

    @property
    def field(self) -> Field:
        return self.source.field

    def defect(self) -> np.ndarray:
        """``f rho_M(b) - rho_N(b) f`` stacked over the basis of ``B``."""
        F = self.field
        return F.contract("xy,byz->bxz", self.matrix, self.source.action) - \
            F.contract("bxy,yz->bxz", self.target.action, self.matrix)

    def is_linear(self) -> bool:
        return not np.mod(self.defect(), self.field.p).any()

    def check(self) -> ModuleMorphism:
        if not self.is_linear():
            raise StructuralError("matrix does not intertwine the actions")
        return self

    def __matmul__(self, other: ModuleMorphism) -> ModuleMorphism:
        """Composition ``self o other``."""
        if other.target is not self.source and other.target.dim != self.source.dim:
            raise ContractError("morphisms are not composable")
        return ModuleMorphism(other.source, self.target, self.field.matmul(self.matrix, other.matrix))

    def __add__(self, other: ModuleMorphism) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: ModuleMorphism) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, -self.matrix)

    def scale(self, c: int) -> ModuleMorphism:
        return ModuleMorphism(self.source, self.target, int(c) * self.matrix)

    def is_zero(self) -> bool:
        return not self.matrix.any()


def morphism(source: BModule, target: BModule, matrix) -> ModuleMorphism:
    """A checked morphism."""
    return ModuleMorphism(source, target, matrix).check()


def identity(m: BModule) -> ModuleMorphism:
    return ModuleMorphism(m, m, m.field.eye(m.dim))


def zero_map(m: BModule, n: BModule) -> ModuleMorphism:
    return ModuleMorphism(m, n, np.zeros((n.dim, m.dim), dtype=np.int64))


# ---------------------------------------------------------------------------
# Basic modules
# ---------------------------------------------------------------------------

def zero_module(base: ComoduleAlgebra) -> BModule:
    return BModule(base, np.zeros((base.dim, 0, 0), dtype=np.int64), name="0")


def free_module(base: ComoduleAlgebra, rank: int = 1) -> BModule:
    """``B^rank`` with the left regular action on each copy."""
    L = base.algebra.left_regular
    act = np.stack([np.kron(np.eye(rank, dtype=np.int64), L[i]) for i in range(base.dim)])
    return BModule(base, act, name="B" if rank == 1 else f"B^{rank}")


_REGULAR_MODULE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def regular_hmodule(h: HopfAlgebra) -> BModule:
    """``H`` as a left module over itself (cached per ``h``)."""
    hit = _REGULAR_MODULE.get(h)
    if hit is None:
        hit = BModule(regular_comodule(h), h.algebra.left_regular, name="H")
        _REGULAR_MODULE[h] = hit
    return hit


def trivial_module(h: HopfAlgebra, dim: int = 1) -> BModule:
    """``k^dim`` with ``h`` acting by ``eps(h)``."""
    act = np.einsum("i,xy->ixy", h.epsilon, np.eye(dim, dtype=np.int64))
    return BModule(regular_comodule(h), act, name="k" if dim == 1 else f"k^{dim}")


def trivialized(m: BModule) -> BModule:
    """``M_0``: the space of an H-module ``M`` with the trivial action."""
    _require_hmodule(m)
    out = trivial_module(m.hopf, m.dim)
    return BModule(out.base, out.action, name=f"{m.name or 'M'}_0")


def _require_hmodule(*mods: BModule) -> None:
    for m in mods:
        if not m.base.is_regular:
            raise ContractError(f"{m!r} is not an H-module (base is not the regular comodule algebra)")


def direct_sum(*mods: BModule) -> tuple[BModule, list[ModuleMorphism], list[ModuleMorphism]]:
    """``(M_1 + ... + M_r, inclusions, projections)``."""
    if not mods:
        raise ContractError("direct sum of no modules; use zero_module")
    _same_base(*mods)
    base = mods[0].base
    dims = [m.dim for m in mods]
    total = sum(dims)
    act = np.zeros((base.dim, total, total), dtype=np.int64)
    offs = np.cumsum([0] + dims)
    for m, o in zip(mods, offs):
        act[:, o:o + m.dim, o:o + m.dim] = m.action
    s = BModule(base, act, name=" + ".join(m.name or "?" for m in mods))
    incs, projs = [], []
    for m, o in zip(mods, offs):
        e = np.zeros((total, m.dim), dtype=np.int64)
        e[o:o + m.dim] = np.eye(m.dim, dtype=np.int64)
        incs.append(ModuleMorphism(m, s, e))
        projs.append(ModuleMorphism(s, m, e.T))
    return s, incs, projs


def _columns(F: Field, cols, rows: int) -> np.ndarray:
    """``cols`` as a ``rows x k`` matrix (a single vector is one column)."""
    a = F(cols)
    if rows == 0:
        return np.zeros((0, 0), dtype=np.int64)
    return a.reshape(rows, a.size // rows)


def submodule(m: BModule, cols: np.ndarray, name: str = "") -> tuple[BModule, ModuleMorphism]:
    """Submodule spanned by the columns of ``cols`` (made independent) and its inclusion."""
    F = m.field
    basis = F.column_space(_columns(F, cols, m.dim))
    k = basis.shape[1]
    if k == 0:
        z = zero_module(m.base)
        return z, ModuleMorphism(z, m, np.zeros((m.dim, 0), dtype=np.int64))
    rhs = np.hstack(list(F.contract("bxy,yk->bxk", m.action, basis)))
    x = F.solve(basis, rhs)
    if x is None:
        raise StructuralError("span is not closed under the action")
    act = x.reshape(k, m.base.dim, k).transpose(1, 0, 2)
    s = BModule(m.base, act, name=name)
    return s, ModuleMorphism(s, m, basis)


def quotient(m: BModule, cols: np.ndarray, name: str = "") -> tuple[BModule, ModuleMorphism]:
    """``M / span(cols)`` with its projection; the span must be a submodule."""
    F = m.field
    cols = _columns(F, cols, m.dim)
    q, d = F.cokernel(cols)
    if d == 0:
        z = zero_module(m.base)
        return z, ModuleMorphism(m, z, np.zeros((0, m.dim), dtype=np.int64))
    qa = F.contract("xy,byz->bxz", q, m.action)
    if F.contract("bxz,zk->bxk", qa, cols).any():
        raise StructuralError("quotienting by a subspace that is not a submodule")
    r = F.right_inverse(q)
    act = F.contract("bxz,zy->bxy", qa, r)
    out = BModule(m.base, act, name=name)
    return out, ModuleMorphism(m, out, q)


def kernel(f: ModuleMorphism) -> tuple[BModule, ModuleMorphism]:
    return submodule(f.source, f.field.nullspace(f.matrix), name="ker")


def cokernel(f: ModuleMorphism) -> tuple[BModule, ModuleMorphism]:
    return quotient(f.target, f.matrix, name="coker")


def image(f: ModuleMorphism) -> tuple[BModule, ModuleMorphism]:
    return submodule(f.target, f.matrix, name="im")


def corestrict(f: ModuleMorphism, inclusion: ModuleMorphism) -> ModuleMorphism:
    """Factor ``f`` through an injective ``inclusion``: the ``g`` with ``inclusion o g = f``."""
    x = f.field.solve(inclusion.matrix, f.matrix)
    if x is None:
        raise ContractError("morphism does not land in the given submodule")
    return ModuleMorphism(f.source, inclusion.source, x)


def induced_on_quotient(f: ModuleMorphism, projection: ModuleMorphism) -> ModuleMorphism:
    """For ``f`` vanishing on ``ker(projection)``, the ``g`` with ``g o projection = f``."""
    F = f.field
    r = F.right_inverse(projection.matrix)
    g = F.matmul(f.matrix, r)
    if (F.matmul(g, projection.matrix) != f.matrix).any():
        raise ContractError("morphism does not factor through the projection")
    return ModuleMorphism(projection.target, f.target, g)


# ---------------------------------------------------------------------------
# Tensoring with H-modules
# ---------------------------------------------------------------------------

def tensor_with_hmodule(m: BModule, u: BModule) -> BModule:
    """``M (x) U`` with ``b (x (x) u) = sum b_1 x (x) b_2 u``."""
    _require_hmodule(u)
    if u.hopf is not m.hopf:
        raise ContractError("H-module over a different Hopf algebra")
    F = m.field
    co = m.base.costructure  # [b', h, b]
    t = F.contract("phb,pxy,huv->bxuyv", co, m.action, u.action)
    d = m.dim * u.dim
    name = f"{m.name or 'M'}(x){u.name or 'U'}"
    out = BModule(m.base, t.reshape(m.base.dim, d, d), name=name)
    if u is regular_hmodule(m.hopf):
        # remembered so that explicit splittings of X (x) H can be used
        out.__dict__["_tensor_of"] = m
    return out


def tensor_h(m: BModule) -> BModule:
    return m.tensor_h


def tensor_morphisms(f: ModuleMorphism, g: ModuleMorphism,
                     source: BModule | None = None, target: BModule | None = None) -> ModuleMorphism:
    """``f (x) g`` for ``f`` a B-map and ``g`` an H-map."""
    src = source if source is not None else tensor_with_hmodule(f.source, g.source)
    tgt = target if target is not None else tensor_with_hmodule(f.target, g.target)
    return ModuleMorphism(src, tgt, f.field.kron(f.matrix, g.matrix))


def tensor_id_h(f: ModuleMorphism) -> ModuleMorphism:
    """``f (x) id_H : M (x) H -> N (x) H``."""
    n = f.source.hopf.dim
    return ModuleMorphism(f.source.tensor_h, f.target.tensor_h, f.field.kron(f.matrix, f.field.eye(n)))


def lambda_map(m: BModule) -> ModuleMorphism:
    """``x -> x (x) Lambda``."""
    lam = m.hopf.integral.reshape(-1, 1)
    return ModuleMorphism(m, m.tensor_h, np.kron(np.eye(m.dim, dtype=np.int64), lam))


def rho_map(m: BModule) -> ModuleMorphism:
    """``x (x) h -> eps(h) x``."""
    eps = m.hopf.epsilon.reshape(1, -1)
    return ModuleMorphism(m.tensor_h, m, np.kron(np.eye(m.dim, dtype=np.int64), eps))


# ---------------------------------------------------------------------------
# Explicit isomorphisms
# ---------------------------------------------------------------------------

def _elements_acting(u: BModule, elems: np.ndarray) -> np.ndarray:
    """``out[a, x, y]`` = matrix of the element ``elems[:, a]`` on ``u``."""
    return u.field.contract("ka,kxy->axy", elems, u.action)


def untwist_right(m: BModule) -> tuple[ModuleMorphism, ModuleMorphism]:
    """``phi: M (x) H -> M_0 (x) H``, ``m (x) h -> sum S^-1(h_1) m (x) h_2``, and its inverse."""
    _require_hmodule(m)
    F, H = m.field, m.hopf
    n, d = H.dim, m.dim
    c = H.costructure
    sinv = _elements_acting(m, H.antipode_inverse)  # [a, x, y] : S^-1(e_a)
    phi = F.contract("abh,axy->xbyh", c, sinv).reshape(d * n, d * n)
    psi = F.contract("abh,axy->xbyh", c, m.action).reshape(d * n, d * n)
    src, tgt = m.tensor_h, trivialized(m).tensor_h
    return ModuleMorphism(src, tgt, phi), ModuleMorphism(tgt, src, psi)


def untwist_left(m: BModule) -> tuple[ModuleMorphism, ModuleMorphism]:
    """``phi': H (x) M -> H (x) M_0``, ``h (x) m -> sum h_1 (x) S(h_2) m``, and its inverse."""
    _require_hmodule(m)
    F, H = m.field, m.hopf
    n, d = H.dim, m.dim
    c = H.costructure
    s = _elements_acting(m, H.antipode)
    reg = regular_hmodule(H)
    phi = F.contract("abh,bxy->axhy", c, s).reshape(n * d, n * d)
    # inverse h (x) m -> sum h_1 (x) h_2 m, because sum h_1 (x) h_2 S(h_3) = h (x) 1
    psi = F.contract("abh,bxy->axhy", c, m.action).reshape(n * d, n * d)
    src = tensor_with_hmodule(reg, m)
    tgt = tensor_with_hmodule(reg, trivialized(m))
    return ModuleMorphism(src, tgt, phi), ModuleMorphism(tgt, src, psi)



def swap_iso(u: BModule) -> tuple[ModuleMorphism, ModuleMorphism]:
    """``H (x) U -> U (x) H``, ``h (x) u -> sum h_1 S(h_3) u (x) h_2``, and its inverse
    ``u (x) h -> sum h_2 (x) h_3 S^-1(h_1) u``."""
    _require_hmodule(u)
    F, H = u.field, u.hopf
    n, d = H.dim, u.dim
    c3, mH = H.costructure3, H.algebra.structure
    x = F.contract("kaj,je,kxy->aexy", mH, H.antipode, u.action)  # e_a S(e_e)
    fwd = F.contract("abeh,aexy->xbhy", c3, x).reshape(d * n, n * d)
    y = F.contract("kej,ja,kxy->eaxy", mH, H.antipode_inverse, u.action)  # e_e S^-1(e_a)
    bwd = F.contract("abeh,eaxy->bxyh", c3, y).reshape(n * d, d * n)
    reg = regular_hmodule(H)
    hu, uh = tensor_with_hmodule(reg, u), tensor_with_hmodule(u, reg)
    return ModuleMorphism(hu, uh, fwd), ModuleMorphism(uh, hu, bwd)


# ---------------------------------------------------------------------------
# Morphism spaces
# ---------------------------------------------------------------------------

def module_generators(m: BModule, candidates: int = 8) -> np.ndarray:
    """Columns generating ``M`` as a B-module, picked from the standard basis.

    The span is kept in reduced echelon form; at each step the first
    ``candidates`` basis vectors outside it are scored by how much their orbit
    adds, and the best one is taken.  Deterministic.
    """
    F, d = m.field, m.dim
    if d == 0:
        return np.zeros((0, 0), dtype=np.int64)
    orbits = np.ascontiguousarray(m.action.transpose(2, 0, 1))  # orbits[j][k] = b_k e_j
    span = np.zeros((0, d), dtype=np.int64)
    piv: list[int] = []
    gens: list[int] = []
    while len(piv) < d:
        best = None
        tried = 0
        for j in range(d):
            if j in gens:
                continue
            red = F.reduce_rows(orbits[j], span, piv)
            if not red.any():
                continue
            r, rp, rank = F.rref(red)
            if best is None or rank > best[1]:
                best = (j, rank, r[:rank], rp)
            tried += 1
            if tried >= candidates or len(piv) + rank == d:
                break
        if best is None:
            raise InternalError("module generators: span stalled below full dimension")
        j, rank, new, newpiv = best
        gens.append(j)
        if piv:
            span = F.reduce_rows(span, new, newpiv)
        rows = np.vstack([span, new])
        allpiv = piv + newpiv
        order = np.argsort(allpiv)
        span = rows[order]
        piv = [allpiv[i] for i in order]
    out = np.zeros((d, len(gens)), dtype=np.int64)
    out[gens, np.arange(len(gens))] = 1
    return out


def generator_indices(m: BModule) -> np.ndarray:
    """Indices of the basis vectors chosen by :func:`module_generators` (cached)."""
    cached = m.__dict__.get("_generators")
    if cached is None:
        cached = np.flatnonzero(module_generators(m).any(axis=1)) if m.dim else np.zeros(0, dtype=np.int64)
        m.__dict__["_generators"] = cached
    return cached


def _presentation(m: BModule):
    cached = m.__dict__.get("_presentation")
    if cached is None:
        F = m.field
        gens = generator_indices(m)
        G = np.zeros((m.dim, len(gens)), dtype=np.int64)
        G[gens, np.arange(len(gens))] = 1
        r = G.shape[1]
        # pi[:, i*nB + k] = rho(b_k) G_i
        pi = F.contract("kxy,yi->xik", m.action, G).reshape(m.dim, r * m.base.dim)
        cached = (r, pi, F.nullspace(pi), F.right_inverse(pi))
        m.__dict__["_presentation"] = cached
    return cached


def hom_basis(m: BModule, n: BModule) -> np.ndarray:
    """Basis of ``Hom_B(M, N)`` as an array of shape ``(k, dim N, dim M)``."""
    _same_base(m, n)
    F = m.field
    if m.dim == 0 or n.dim == 0:
        return np.zeros((0, n.dim, m.dim), dtype=np.int64)
    nb, dn = m.base.dim, n.dim
    r, pi, R, C = _presentation(m)
    s = R.shape[1]
    # unknowns: generator images n_0..n_{r-1}, index i*dN + c
    E = F.contract("iks,kac->saic", R.reshape(r, nb, s), n.action).reshape(s * dn, r * dn)
    sol = F.nullspace(E)  # (r*dN, k)
    k = sol.shape[1]
    if k == 0:
        return np.zeros((0, dn, m.dim), dtype=np.int64)
    big = F.contract("bac,ics->saib", n.action, sol.reshape(r, dn, k))  # images of B^r generators
    big = big.reshape(k * dn, r * nb)
    return F.matmul(big, C).reshape(k, dn, m.dim)


def hom_space(m: BModule, n: BModule) -> list[ModuleMorphism]:
    return [ModuleMorphism(m, n, f) for f in hom_basis(m, n)]


def intertwiner_space(src_mats: np.ndarray, tgt_mats: np.ndarray, field: Field) -> np.ndarray:
    """All ``X`` with ``X S_b = T_b X`` for every pair, solved directly.

    ``src_mats`` is ``(r, s, s)``, ``tgt_mats`` is ``(r, t, t)``; returns ``(k, t, s)``.
    Used for maps linear over a subalgebra and as a cross-check of :func:`hom_basis`.
    """
    F = field
    S, T = F(src_mats), F(tgt_mats)
    s, t = S.shape[1], T.shape[1]
    if s == 0 or t == 0:
        return np.zeros((0, t, s), dtype=np.int64)
    # row-major vec: vec(X S) = (I (x) S^T) vec X, vec(T X) = (T (x) I) vec X
    eqs = [np.kron(np.eye(t, dtype=np.int64), S[b].T) - np.kron(T[b], np.eye(s, dtype=np.int64))
           for b in range(S.shape[0])]
    null = F.nullspace(np.mod(np.vstack(eqs), F.p))
    return null.T.reshape(-1, t, s).copy()


def hom_basis_naive(m: BModule, n: BModule) -> np.ndarray:
    _same_base(m, n)
    return intertwiner_space(m.action, n.action, m.field)
