from __future__ import annotations

import itertools

import numpy as np
import pytest

from hopfological import hopf
from hopfological.errors import ContractError, ParameterError, StructuralError
from hopfological.hopf import Algebra, HopfAlgebra

BUILTINS = {
    "trivial": lambda: hopf.trivial(2),
    "trunc2": lambda: hopf.truncated_poly(2),
    "trunc3": lambda: hopf.truncated_poly(3),
    "z2_gf2": lambda: hopf.cyclic_group(2, 2),
    "z2_gf3": lambda: hopf.cyclic_group(3, 2),
    "sweedler_gf5": lambda: hopf.sweedler(5),
}


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_verify(name):
    rep = hopf.verify_hopf(BUILTINS[name]())
    assert rep.passed, rep.table()


def test_builtin_dispatch():
    assert hopf.builtin("truncated_poly", p=2).dim == 2
    assert hopf.builtin("cyclic", 3, n=2).dim == 2
    assert hopf.builtin("sweedler", 7).dim == 4
    assert hopf.builtin("group", 2, table=[[0, 1], [1, 0]]).dim == 2
    assert hopf.builtin("trivial").dim == 1
    with pytest.raises(ParameterError):
        hopf.builtin("nope", 2)
    with pytest.raises(ParameterError):
        hopf.builtin("cyclic", 2)
    with pytest.raises(ParameterError):
        hopf.sweedler(2)
    with pytest.raises(ParameterError):
        hopf.truncated_poly(3, p=2)


def test_shape_checks():
    with pytest.raises(ContractError):
        Algebra(hopf.GF(2), np.zeros((2, 3), dtype=np.int64), [1, 0])
    h = hopf.truncated_poly(2)
    with pytest.raises(ContractError):
        h.with_(comult=np.zeros((3, 2), dtype=np.int64))


def test_singular_antipode_rejected():
    h = hopf.truncated_poly(2)
    with pytest.raises(StructuralError):
        HopfAlgebra.create(h.algebra, h.comult, h.counit, np.zeros((2, 2), dtype=np.int64))


@pytest.mark.parametrize("name", ["z2_gf2", "z2_gf3", "sweedler_gf5"])
def test_every_mutation_fails_a_named_check(name):
    h = BUILTINS[name]()
    count = 0
    for part, index, value, mutant in hopf.single_entry_mutations(h):
        rep = hopf.verify_hopf(mutant)
        assert not rep.passed, (part, index, value)
        assert rep.failures()[0].name
        count += 1
    # every entry of every structure map, changed to every other value
    entries = sum(getattr(h.algebra if p in ("mult", "unit") else h, p).size for p in hopf.MUTABLE_PARTS)
    assert count == entries * (h.field.p - 1)


def _is_hopf_isomorphism(phi: np.ndarray, a: HopfAlgebra, b: HopfAlgebra) -> bool:
    """``phi: a -> b`` invertible and compatible with every structure map."""
    F = a.field
    if F.rank(phi) != a.dim:
        return False
    checks = [
        (F.matmul(phi, a.algebra.mult), F.mul(b.algebra.mult, F.kron(phi, phi))),
        (F.matmul(phi, a.algebra.unit), b.algebra.unit),
        (F.matmul(F.kron(phi, phi), a.comult), F.matmul(b.comult, phi)),
        (a.counit, F.matmul(b.counit, phi)),
        (F.matmul(phi, a.antipode), F.matmul(b.antipode, phi)),
    ]
    return all((x % F.p == y % F.p).all() for x, y in checks)


def _dual(h: HopfAlgebra, name: str) -> HopfAlgebra:
    """The dual Hopf algebra: transpose every structure map."""
    alg = Algebra(h.field, h.comult.T, h.counit.reshape(-1), name=name)
    return HopfAlgebra.create(alg, h.algebra.mult.T, h.algebra.unit.reshape(1, -1), h.antipode.T, name=name)


def test_surviving_trunc2_mutants_are_hopf_algebras():
    """Two single-entry changes of GF(2)[d]/(d^2) land on genuine Hopf algebras.

    ``d^2 = d`` with ``d`` primitive is the function algebra on Z/2, and
    ``Delta d = d(x)1 + 1(x)d + d(x)d`` makes ``1 + d`` grouplike, giving
    GF(2)[Z/2].  Explicit isomorphisms certify both independently of
    ``verify_hopf``.
    """
    h = hopf.truncated_poly(2)
    survivors = {(part, index, value): m for part, index, value, m in hopf.single_entry_mutations(h)
                 if hopf.verify_hopf(m).passed}
    assert set(survivors) == {("mult", (1, 3), 1), ("comult", (3, 1), 1)}

    group = hopf.cyclic_group(2, 2)  # basis e, g
    functions = _dual(group, "GF(2)^(Z/2)")  # basis delta_e, delta_g
    # d^2 = d: 1 -> delta_e + delta_g, d -> delta_g
    phi1 = np.array([[1, 0], [1, 1]])
    assert _is_hopf_isomorphism(phi1, survivors[("mult", (1, 3), 1)], functions)
    # grouplike 1 + d: 1 -> e, d -> e + g
    phi2 = np.array([[1, 1], [0, 1]])
    assert _is_hopf_isomorphism(phi2, survivors[("comult", (3, 1), 1)], group)


def _brute_integrals(h: HopfAlgebra) -> list[np.ndarray]:
    F, n = h.field, h.dim
    out = []
    for v in itertools.product(range(F.p), repeat=n):
        lam = np.array(v, dtype=np.int64)
        if not lam.any():
            continue
        if all((h.algebra.product(h.algebra.basis_vector(i), lam) == h.epsilon[i] * lam % F.p).all()
               for i in range(n)):
            out.append(lam)
    return out


@pytest.mark.parametrize("name, expected", [
    ("trunc2", [0, 1]),  # d
    ("z2_gf3", [1, 1]),  # 1 + g
    ("sweedler_gf5", [0, 0, 1, 1]),  # x + gx
    ("trivial", [1]),
    ("trunc3", [0, 0, 1]),
])
def test_left_integrals(name, expected):
    h = BUILTINS[name]()
    lam = hopf.left_integral(h)
    assert lam.tolist() == expected
    brute = _brute_integrals(h)
    # one-dimensional: every nonzero integral is a multiple of lam
    assert len(brute) == h.field.p - 1
    assert any((b == lam).all() for b in brute)


def test_semisimplicity_via_integral():
    assert hopf.is_semisimple_integral(hopf.cyclic_group(3, 2))
    assert hopf.is_semisimple_integral(hopf.trivial(2))
    assert not hopf.is_semisimple_integral(hopf.cyclic_group(2, 2))
    assert not hopf.is_semisimple_integral(hopf.sweedler(5))
    assert not hopf.is_semisimple_integral(hopf.truncated_poly(3))


def test_group_algebra_from_table():
    s3 = [[0, 1, 2, 3, 4, 5], [1, 2, 0, 5, 3, 4], [2, 0, 1, 4, 5, 3],
          [3, 4, 5, 0, 1, 2], [4, 5, 3, 2, 0, 1], [5, 3, 4, 1, 2, 0]]
    h = hopf.group_algebra(5, s3, name="S3")
    assert hopf.verify_hopf(h).passed
    with pytest.raises(ParameterError):
        hopf.group_algebra(5, [[0, 0], [1, 1]])
