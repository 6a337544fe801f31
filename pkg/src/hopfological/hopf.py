"""Finite-dimensional Hopf algebras given by structure constants.

Storage conventions (``n`` = dimension, basis ``e_0 .. e_{n-1}``):

* ``mult``   is ``n x n**2``; column ``i*n + j`` holds ``e_i e_j``.
* ``unit``   is a length-``n`` vector.
* ``comult`` is ``n**2 x n``; column ``k`` holds ``Delta(e_k)`` in the
  left-major basis of ``H (x) H``.
* ``counit`` is ``1 x n``; ``antipode`` and ``antipode_inverse`` are ``n x n``.

Sweedler sums are evaluated by contracting these tensors.  Triple
coproducts ``h_1 (x) h_2 (x) h_3`` always use ``(Delta (x) id) Delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from math import comb

import numpy as np

from .errors import ContractError, ParameterError, Report, StructuralError
from .exactlin import GF, Field


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.int64)
    arr.flags.writeable = False
    return arr


def _first_mismatch(a: np.ndarray, b: np.ndarray):
    bad = np.argwhere(np.asarray(a) != np.asarray(b))
    return tuple(int(v) for v in bad[0]) if len(bad) else None


def _record(report: Report, name: str, lhs: np.ndarray, rhs: np.ndarray) -> None:
    witness = _first_mismatch(lhs, rhs)
    report.add(name, witness is None, witness)


@dataclass(frozen=True, eq=False)
class Algebra:
    """Unital associative algebra ``(A, m, eta)`` over a prime field."""

    field: Field
    mult: np.ndarray
    unit: np.ndarray
    name: str = ""

    def __post_init__(self):
        F = self.field
        mult = F(self.mult)
        unit = F(self.unit).reshape(-1)
        n = unit.shape[0]
        if mult.shape != (n, n * n):
            raise ContractError(f"multiplication must be {n}x{n * n}, got {mult.shape}")
        object.__setattr__(self, "mult", _frozen(mult))
        object.__setattr__(self, "unit", _frozen(unit))

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    @cached_property
    def structure(self) -> np.ndarray:
        """``structure[k, i, j]`` = coefficient of ``e_k`` in ``e_i e_j``."""
        n = self.dim
        return self.mult.reshape(n, n, n)

    @cached_property
    def left_regular(self) -> np.ndarray:
        """``left_regular[i]`` is the matrix of ``x -> e_i x``."""
        return np.ascontiguousarray(self.structure.transpose(1, 0, 2))

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.field.contract("kij,i,j->k", self.structure, x, y)

    def basis_vector(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    def check_into(self, report: Report) -> None:
        F, n = self.field, self.dim
        I = F.eye(n)
        _record(report, "associativity",
                F.matmul(self.mult, F.kron(self.mult, I)), F.matmul(self.mult, F.kron(I, self.mult)))
        u = self.unit.reshape(n, 1)
        _record(report, "unit_left", F.matmul(self.mult, F.kron(u, I)), I)
        _record(report, "unit_right", F.matmul(self.mult, F.kron(I, u)), I)

    def verify(self) -> Report:
        report = Report(f"algebra {self.name}".strip())
        self.check_into(report)
        return report


@dataclass(frozen=True, eq=False)
class HopfAlgebra:
    """Algebra plus comultiplication, counit, antipode and its inverse.

    Construction only checks shapes; use :func:`verify_hopf` for the axioms
    and :meth:`create` to have the antipode inverse computed.
    """

    algebra: Algebra
    comult: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    antipode_inverse: np.ndarray
    name: str = ""

    def __post_init__(self):
        F, n = self.algebra.field, self.algebra.dim
        shapes = {
            "comult": (n * n, n),
            "counit": (1, n),
            "antipode": (n, n),
            "antipode_inverse": (n, n),
        }
        for attr, shape in shapes.items():
            arr = F(getattr(self, attr))
            if attr == "counit":
                arr = arr.reshape(1, -1)
            if arr.shape != shape:
                raise ContractError(f"{attr} must have shape {shape}, got {arr.shape}")
            object.__setattr__(self, attr, _frozen(arr))

    @classmethod
    def create(cls, algebra: Algebra, comult, counit, antipode, name: str = "") -> HopfAlgebra:
        S = algebra.field.matrix(antipode)
        return cls(algebra, comult, counit, S, antipode_inverse(S, algebra.field), name or algebra.name)

    def __repr__(self) -> str:
        return f"HopfAlgebra({self.name or '?'}, dim={self.dim}, {self.field})"

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def unit(self) -> np.ndarray:
        return self.algebra.unit

    @property
    def epsilon(self) -> np.ndarray:
        return self.counit[0]

    @cached_property
    def costructure(self) -> np.ndarray:
        """``costructure[a, b, k]`` = coefficient of ``e_a (x) e_b`` in ``Delta(e_k)``."""
        n = self.dim
        return self.comult.reshape(n, n, n)

    @cached_property
    def costructure3(self) -> np.ndarray:
        """``[a, b, c, k]``: coefficient of ``e_a (x) e_b (x) e_c`` in ``(Delta (x) id) Delta(e_k)``."""
        return self.field.contract("abt,tck->abck", self.costructure, self.costructure)

    @cached_property
    def integral(self) -> np.ndarray:
        return left_integral(self)

    def with_(self, **changes) -> HopfAlgebra:
        return replace(self, **changes)


def antipode_inverse(antipode: np.ndarray, field: Field) -> np.ndarray:
    """Inverse of the antipode matrix; a singular antipode is not a Hopf algebra."""
    S = field.matrix(antipode)
    if S.shape[0] != S.shape[1]:
        raise ContractError(f"antipode must be square, got {S.shape}")
    try:
        return field.inverse(S)
    except StructuralError:
        raise StructuralError("antipode is singular; not a finite-dimensional Hopf algebra") from None


def verify_hopf(h: HopfAlgebra) -> Report:
    F, n = h.field, h.dim
    report = Report(f"hopf {h.name}".strip())
    h.algebra.check_into(report)
    I = F.eye(n)
    D, eps, S, Sinv = h.comult, h.counit, h.antipode, h.antipode_inverse
    m, c = h.algebra.structure, h.costructure

    _record(report, "coassociativity", F.matmul(F.kron(D, I), D), F.matmul(F.kron(I, D), D))
    _record(report, "counit_left", F.matmul(F.kron(eps, I), D), I)
    _record(report, "counit_right", F.matmul(F.kron(I, eps), D), I)

    lhs = F.contract("abk,kij->abij", c, m)
    rhs = F.contract("xyi,zwj,axz,byw->abij", c, c, m, m)
    _record(report, "comult_multiplicative", lhs, rhs)
    _record(report, "comult_unital", F.matmul(D, h.unit), np.kron(h.unit, h.unit) % F.p)
    _record(report, "counit_multiplicative",
            F.contract("k,kij->ij", h.epsilon, m), np.outer(h.epsilon, h.epsilon) % F.p)
    _record(report, "counit_unital", np.array([int(h.epsilon @ h.unit) % F.p]), np.array([1]))

    eta_eps = np.outer(h.unit, h.epsilon) % F.p
    _record(report, "antipode_left", F.mul(h.algebra.mult, F.kron(S, I), D), eta_eps)
    _record(report, "antipode_right", F.mul(h.algebra.mult, F.kron(I, S), D), eta_eps)
    _record(report, "antipode_inverse", np.vstack([F.matmul(Sinv, S), F.matmul(S, Sinv)]), np.vstack([I, I]))
    return report


def left_integral(h: HopfAlgebra) -> np.ndarray:
    """The left integral, normalized so its first nonzero coordinate is 1."""
    F, n = h.field, h.dim
    L = h.algebra.left_regular
    system = np.vstack([np.mod(L[i] - h.epsilon[i] * F.eye(n), F.p) for i in range(n)])
    null = F.nullspace(system)
    if null.shape[1] != 1:
        raise StructuralError(f"space of left integrals has dimension {null.shape[1]}, expected 1")
    lam = null[:, 0]
    lead = lam[np.flatnonzero(lam)[0]]
    return _frozen(lam * F.inv(lead) % F.p)


def is_semisimple_integral(h: HopfAlgebra) -> bool:
    """Larson-Sweedler: ``H`` is semisimple iff the counit does not kill the integral."""
    return int(h.epsilon @ h.integral) % h.field.p != 0


# ---------------------------------------------------------------------------
# Builtin corpus
# ---------------------------------------------------------------------------

def _tensor_square_product(m: np.ndarray, u: np.ndarray, v: np.ndarray, F: Field) -> np.ndarray:
    n = m.shape[0]
    out = F.contract("kac,lbd,ab,cd->kl", m, m, u.reshape(n, n), v.reshape(n, n))
    return out.reshape(-1)


def trivial(field: Field | int = 2) -> HopfAlgebra:
    F = field if isinstance(field, Field) else GF(field)
    alg = Algebra(F, [[1]], [1], name="k")
    return HopfAlgebra.create(alg, [[1]], [[1]], [[1]], name="trivial")


def truncated_poly(field: Field | int | None = None, p: int | None = None) -> HopfAlgebra:
    """``k[d]/(d^p)`` with ``d`` primitive, over a field of characteristic ``p``."""
    if field is None and p is None:
        raise ParameterError("truncated_poly needs a field or p")
    F = field if isinstance(field, Field) else GF(field if field is not None else p)
    p = F.p if p is None else p
    if p != F.p:
        raise ParameterError(f"k[d]/(d^{p}) with primitive d needs characteristic {p}, field is {F}")
    n = p
    mult = np.zeros((n, n * n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i + j < n:
                mult[i + j, i * n + j] = 1
    comult = np.zeros((n * n, n), dtype=np.int64)
    for k in range(n):
        for a in range(k + 1):
            comult[a * n + (k - a), k] = comb(k, a) % p
    counit = np.zeros((1, n), dtype=np.int64)
    counit[0, 0] = 1
    antipode = np.diag([(-1) ** k % p for k in range(n)])
    alg = Algebra(F, mult, np.eye(n, dtype=np.int64)[0], name=f"GF({p})[d]/(d^{p})")
    return HopfAlgebra.create(alg, comult, counit, antipode, name=f"truncated_poly(p={p})")


def _check_group_table(table: np.ndarray) -> int:
    n = table.shape[0]
    if table.shape != (n, n) or n == 0:
        raise ParameterError("Cayley table must be a non-empty square array")
    if table.min() < 0 or table.max() >= n:
        raise ParameterError("Cayley table entries must index group elements")
    ids = [e for e in range(n) if (table[e] == np.arange(n)).all() and (table[:, e] == np.arange(n)).all()]
    if not ids:
        raise ParameterError("Cayley table has no identity element")
    for g in range(n):
        if sorted(table[g]) != list(range(n)) or sorted(table[:, g]) != list(range(n)):
            raise ParameterError("Cayley table is not a Latin square; inverses missing")
    assoc = table[table, :]  # assoc[a, b, c] = (ab)c
    if not (assoc == table[:, table]).all():  # a(bc)
        raise ParameterError("Cayley table is not associative")
    return ids[0]


def group_algebra(field: Field | int, table, name: str = "") -> HopfAlgebra:
    """``k[G]`` for ``G`` given by its Cayley table ``table[a][b] = index of ab``."""
    F = field if isinstance(field, Field) else GF(field)
    table = np.asarray(table, dtype=np.int64)
    e = _check_group_table(table)
    n = table.shape[0]
    mult = np.zeros((n, n * n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            mult[table[a, b], a * n + b] = 1
    comult = np.zeros((n * n, n), dtype=np.int64)
    for g in range(n):
        comult[g * n + g, g] = 1
    antipode = np.zeros((n, n), dtype=np.int64)
    for g in range(n):
        antipode[int(np.flatnonzero(table[g] == e)[0]), g] = 1
    unit = np.zeros(n, dtype=np.int64)
    unit[e] = 1
    label = name or f"group(order={n})"
    alg = Algebra(F, mult, unit, name=f"{F}[{label}]")
    return HopfAlgebra.create(alg, comult, np.ones((1, n), dtype=np.int64), antipode, name=label)


def cyclic_group(field: Field | int, n: int) -> HopfAlgebra:
    if n < 1:
        raise ParameterError("cyclic group order must be positive")
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return group_algebra(field, table, name=f"Z/{n}")


def sweedler(field: Field | int = 5) -> HopfAlgebra:
    """Sweedler's four-dimensional algebra, basis ``1, g, x, gx``.

    ``g^2 = 1, x^2 = 0, xg = -gx``; ``g`` grouplike, ``Delta x = x (x) 1 + g (x) x``.
    """
    F = field if isinstance(field, Field) else GF(field)
    if F.p == 2:
        raise ParameterError("Sweedler's algebra needs characteristic different from 2")
    p = F.p
    idx = lambda a, b: a + 2 * b  # noqa: E731  g^a x^b
    n = 4
    mult = np.zeros((n, n * n), dtype=np.int64)
    for a in range(2):
        for b in range(2):
            for c in range(2):
                for d in range(2):
                    if b + d < 2:
                        sign = -1 if b * c else 1
                        mult[idx((a + c) % 2, b + d), idx(a, b) * n + idx(c, d)] = sign % p
    alg = Algebra(F, mult, [1, 0, 0, 0], name=f"H4 over {F}")
    m = alg.structure

    def e(i):
        v = np.zeros(n, dtype=np.int64)
        v[i] = 1
        return v

    d_g = np.kron(e(idx(1, 0)), e(idx(1, 0)))
    d_x = (np.kron(e(idx(0, 1)), e(0)) + np.kron(e(idx(1, 0)), e(idx(0, 1)))) % p
    comult = np.zeros((n * n, n), dtype=np.int64)
    for a in range(2):
        for b in range(2):
            v = np.kron(e(0), e(0))
            for _ in range(a):
                v = _tensor_square_product(m, v, d_g, F)
            for _ in range(b):
                v = _tensor_square_product(m, v, d_x, F)
            comult[:, idx(a, b)] = v
    counit = np.array([[1, 1, 0, 0]])
    antipode = np.zeros((n, n), dtype=np.int64)
    antipode[0, 0] = 1
    antipode[idx(1, 0), idx(1, 0)] = 1
    antipode[idx(1, 1), idx(0, 1)] = p - 1  # S(x) = -gx
    antipode[idx(0, 1), idx(1, 1)] = 1  # S(gx) = x
    return HopfAlgebra.create(alg, comult, counit, antipode, name=f"sweedler(p={p})")


BUILTINS = ("trivial", "truncated_poly", "group", "cyclic", "sweedler")


def builtin(name: str, field: Field | int | None = None, **params) -> HopfAlgebra:
    """Dispatch to a builtin family by name.

    ``builtin("truncated_poly", p=2)``, ``builtin("cyclic", 3, n=2)``,
    ``builtin("group", 2, table=[[0, 1], [1, 0]])``, ``builtin("sweedler", 5)``,
    ``builtin("trivial")``.
    """
    if name == "trivial":
        _no_extra(name, params)
        return trivial(2 if field is None else field)
    if name == "truncated_poly":
        p = params.pop("p", None)
        _no_extra(name, params)
        return truncated_poly(field, p)
    if field is None:
        raise ParameterError(f"builtin {name!r} needs a field")
    if name == "group":
        table = params.pop("table", None)
        label = params.pop("label", "")
        _no_extra(name, params)
        if table is None:
            raise ParameterError("group builtin needs a Cayley table")
        return group_algebra(field, table, name=label)
    if name == "cyclic":
        n = params.pop("n", None)
        _no_extra(name, params)
        if n is None:
            raise ParameterError("cyclic builtin needs n")
        return cyclic_group(field, int(n))
    if name == "sweedler":
        _no_extra(name, params)
        return sweedler(field)
    raise ParameterError(f"unknown builtin {name!r}; known: {', '.join(BUILTINS)}")


def _no_extra(name: str, params: dict) -> None:
    if params:
        raise ParameterError(f"unexpected parameters for {name}: {sorted(params)}")


MUTABLE_PARTS = ("mult", "unit", "comult", "counit", "antipode", "antipode_inverse")


def single_entry_mutations(h: HopfAlgebra):
    """Yield ``(part, index, value, mutant)`` for every single-entry change of the structure constants.

    Each entry of ``mult``, ``unit``, ``comult``, ``counit``, ``antipode`` and
    ``antipode_inverse`` is replaced by every other field element in turn.
    """
    F = h.field
    for part in MUTABLE_PARTS:
        src = h.algebra if part in ("mult", "unit") else h
        arr = getattr(src, part)
        for index in np.ndindex(arr.shape):
            for value in range(F.p):
                if value == arr[index]:
                    continue
                new = arr.copy()
                new[index] = value
                if part in ("mult", "unit"):
                    alg = Algebra(F, new if part == "mult" else h.algebra.mult,
                                  new if part == "unit" else h.algebra.unit, name=h.algebra.name)
                    mutant = HopfAlgebra(alg, h.comult, h.counit, h.antipode, h.antipode_inverse, h.name)
                else:
                    mutant = h.with_(**{part: new})
                yield part, index, value, mutant
