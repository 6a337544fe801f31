"""Right H-comodule algebras, left H-module algebras, and smash products."""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractError, Report, StructuralError
from .exactlin import Field
from .hopf import Algebra, HopfAlgebra, _frozen, _record


@dataclass(frozen=True, eq=False)
class ComoduleAlgebra:
    """Algebra ``B`` with coaction ``B -> B (x) H``.

    ``coaction`` is ``(dim B * dim H) x dim B``; column ``b`` holds the
    coaction of ``e_b`` in the left-major basis of ``B (x) H``.
    """

    algebra: Algebra
    coaction: np.ndarray
    hopf: HopfAlgebra
    name: str = ""
    is_regular: bool = False
    smash_of: ModuleAlgebra | None = None

    def __post_init__(self):
        if self.algebra.field != self.hopf.field:
            raise ContractError(f"algebra over {self.algebra.field} but Hopf algebra over {self.hopf.field}")
        nb, nh = self.algebra.dim, self.hopf.dim
        co = self.field(self.coaction)
        if co.shape != (nb * nh, nb):
            raise ContractError(f"coaction must be {(nb * nh, nb)}, got {co.shape}")
        object.__setattr__(self, "coaction", _frozen(co))

    def __repr__(self) -> str:
        return f"ComoduleAlgebra({self.name or '?'}, dim={self.dim}, over {self.hopf.name})"

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @cached_property
    def costructure(self) -> np.ndarray:
        """``[b', h, b]`` = coefficient of ``e_b' (x) e_h`` in the coaction of ``e_b``."""
        return self.coaction.reshape(self.dim, self.hopf.dim, self.dim)

    def hopf_element(self, h: np.ndarray) -> np.ndarray:
        """Image of ``h`` in ``B`` for a smash product (``1_A (x) h``) or ``B = H``."""
        if self.is_regular:
            return self.field(h)
        if self.smash_of is None:
            raise ContractError("H embeds into B only for regular or smash-product comodule algebras")
        return np.kron(self.smash_of.algebra.unit, self.field(h)) % self.field.p

    def coefficient_element(self, a: np.ndarray) -> np.ndarray:
        """Image ``a (x) 1_H`` of an element of ``A`` inside ``A # H``."""
        if self.smash_of is None:
            raise ContractError("not a smash product")
        return np.kron(self.field(a), self.hopf.unit) % self.field.p


@dataclass(frozen=True, eq=False)
class ModuleAlgebra:
    """Algebra ``A`` with a left ``H``-action ``H (x) A -> A``.

    ``action`` is ``dim A x (dim H * dim A)``; column ``h*dim A + x`` holds ``e_h . e_x``.
    """

    algebra: Algebra
    hopf: HopfAlgebra
    action: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.algebra.field != self.hopf.field:
            raise ContractError("module algebra and Hopf algebra over different fields")
        na, nh = self.algebra.dim, self.hopf.dim
        act = self.field(self.action)
        if act.shape != (na, nh * na):
            raise ContractError(f"action must be {(na, nh * na)}, got {act.shape}")
        object.__setattr__(self, "action", _frozen(act))

    @property
    def field(self) -> Field:
        return self.algebra.field

    @cached_property
    def action_tensor(self) -> np.ndarray:
        """``[y, h, x]`` = coefficient of ``e_y`` in ``e_h . e_x``."""
        na = self.algebra.dim
        return self.action.reshape(na, self.hopf.dim, na)


def verify_comodule_algebra(b: ComoduleAlgebra) -> Report:
    F, H = b.field, b.hopf
    report = Report(f"comodule algebra {b.name}".strip())
    b.algebra.check_into(report)
    co, c = b.costructure, H.costructure
    mB, mH = b.algebra.structure, H.algebra.structure

    _record(report, "coaction_counit", F.contract("xhb,h->xb", co, H.epsilon), F.eye(b.dim))
    lhs = F.contract("xtb,hkt->xhkb", co, c)
    rhs = F.contract("xhy,ykb->xhkb", co, co)
    _record(report, "coaction_coassociative", lhs, rhs)
    _record(report, "coaction_unital",
            F.contract("xhb,b->xh", co, b.algebra.unit), np.outer(b.algebra.unit, H.unit) % F.p)
    lhs = F.contract("xhz,zij->xhij", co, mB)
    rhs = F.contract("usi,vtj,xuv,hst->xhij", co, co, mB, mH)
    _record(report, "coaction_multiplicative", lhs, rhs)
    return report


def verify_module_algebra(a: ModuleAlgebra) -> Report:
    F, H = a.field, a.hopf
    report = Report(f"module algebra {a.name}".strip())
    a.algebra.check_into(report)
    act, c = a.action_tensor, H.costructure
    mA, mH = a.algebra.structure, H.algebra.structure
    na = a.algebra.dim

    _record(report, "action_unital", F.contract("yhx,h->yx", act, H.unit), F.eye(na))
    lhs = F.contract("thk,ytx->yhkx", mH, act)
    rhs = F.contract("yhz,zkx->yhkx", act, act)
    _record(report, "action_associative", lhs, rhs)
    lhs = F.contract("khz,zxy->khxy", act, mA)
    rhs = F.contract("sth,usx,vty,kuv->khxy", c, act, act, mA)
    _record(report, "leibniz", lhs, rhs)
    _record(report, "unit_invariant",
            F.contract("yhx,x->yh", act, a.algebra.unit), np.outer(a.algebra.unit, H.epsilon) % F.p)
    return report


_REGULAR: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def regular_comodule(h: HopfAlgebra) -> ComoduleAlgebra:
    """``B = H`` coacting on itself by the comultiplication (cached per ``h``)."""
    cached = _REGULAR.get(h)
    if cached is None:
        cached = ComoduleAlgebra(h.algebra, h.comult, h, name=h.name, is_regular=True)
        _REGULAR[h] = cached
    return cached


def smash_product(a: ModuleAlgebra, check: bool = True) -> ComoduleAlgebra:
    """``A # H`` on ``A (x) H`` (basis ``a_i (x) h_j`` at index ``i*dim H + j``).

    ``(x (x) h)(y (x) k) = sum x (h_1 . y) (x) h_2 k``; coaction ``id_A (x) Delta``.
    """
    if check:
        report = verify_module_algebra(a)
        if not report.passed:
            raise StructuralError(f"not a left H-module algebra: {[c.name for c in report.failures()]}")
    F, H = a.field, a.hopf
    na, nh = a.algebra.dim, H.dim
    n = na * nh
    t = F.contract("sth,usy,axu,gtk->agxhyk", H.costructure, a.action_tensor, a.algebra.structure,
                   H.algebra.structure)
    mult = t.reshape(n, n * n)
    unit = np.kron(a.algebra.unit, H.unit) % F.p
    name = f"{a.algebra.name or 'A'} # {H.name}"
    alg = Algebra(F, mult, unit, name=name)
    coaction = F.kron(F.eye(na), H.comult)
    return ComoduleAlgebra(alg, coaction, H, name=name, smash_of=a)


def trivial_module_algebra(h: HopfAlgebra) -> ModuleAlgebra:
    """``A = k`` with ``h . 1 = eps(h) 1``."""
    k = Algebra(h.field, [[1]], [1], name="k")
    return ModuleAlgebra(k, h, h.counit.reshape(1, -1), name="k")


def truncated_module_algebra(h: HopfAlgebra) -> ModuleAlgebra:
    """``A = k[x]/(x^2)`` with ``d . x = 1``, ``d . 1 = 0`` over ``k[d]/(d^2)`` in characteristic 2."""
    F = h.field
    if F.p != 2 or h.dim != 2:
        raise ContractError("defined for GF(2)[d]/(d^2) only")
    mult = np.zeros((2, 4), dtype=np.int64)
    mult[0, 0] = 1  # 1*1
    mult[1, 1] = 1  # 1*x
    mult[1, 2] = 1  # x*1
    A = Algebra(F, mult, [1, 0], name="GF(2)[x]/(x^2)")
    action = np.zeros((2, 4), dtype=np.int64)
    action[:, 0 * 2 + 0] = [1, 0]  # 1 . 1
    action[:, 0 * 2 + 1] = [0, 1]  # 1 . x
    action[:, 1 * 2 + 0] = [0, 0]  # d . 1
    action[:, 1 * 2 + 1] = [1, 0]  # d . x
    return ModuleAlgebra(A, h, action, name="GF(2)[x]/(x^2)")
