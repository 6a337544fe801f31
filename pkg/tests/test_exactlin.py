from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfological import exactlin
from hopfological.errors import ContractError, ParameterError, StructuralError
from hopfological.exactlin import GF

PRIMES = [2, 3, 5, 7, 65521]


@st.composite
def matrices(draw, max_rows=6, max_cols=6, primes=(2, 3, 5, 7)):
    p = draw(st.sampled_from(primes))
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    m = rng.integers(0, p, size=(r, c))
    # sometimes force low rank
    if r and c and draw(st.booleans()):
        k = draw(st.integers(0, min(r, c)))
        m = (rng.integers(0, p, size=(r, k)) @ rng.integers(0, p, size=(k, c))) % p
    return GF(p), m.astype(np.int64)


def brute_kernel_size(m: np.ndarray, p: int) -> int:
    cols = m.shape[1]
    count = 0
    for v in itertools.product(range(p), repeat=cols):
        if not (m @ np.array(v, dtype=np.int64) % p).any():
            count += 1
    return count


def test_field_rejects_composite_and_large():
    with pytest.raises(ParameterError):
        GF(4)
    with pytest.raises(ParameterError):
        GF(1)
    with pytest.raises(ParameterError):
        GF(65537)  # prime, but beyond the int64-safe bound


def test_inverse_of_scalars():
    F = GF(7)
    assert all(a * F.inv(a) % 7 == 1 for a in range(1, 7))
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


@given(matrices(max_rows=4, max_cols=4, primes=(2, 3)))
def test_rank_matches_enumeration(fm):
    F, m = fm
    size = brute_kernel_size(m, F.p) if m.shape[1] else 1
    assert F.p ** (m.shape[1] - F.rank(m)) == size


@given(matrices())
def test_rref_is_reduced_and_row_equivalent(fm):
    F, m = fm
    r, piv, rank = F.rref(m)
    assert rank == len(piv)
    assert not r[rank:].any()
    for i, c in enumerate(piv):
        assert r[i, c] == 1
        col = r[:rank, c].copy()
        col[i] = 0
        assert not col.any()
        assert not r[i, :c].any()
    # same row space: each side solves in terms of the other
    if m.size:
        assert F.solve(r[:rank].T, m.T) is not None or rank == 0
        assert F.rank(np.vstack([m, r[:rank]])) == rank


@given(matrices())
def test_nullspace_basis(fm):
    F, m = fm
    ns = F.nullspace(m)
    assert ns.shape == (m.shape[1], m.shape[1] - F.rank(m))
    assert not F.matmul(m, ns).any()
    assert F.rank(ns) == ns.shape[1]


@given(matrices(), st.integers(0, 2 ** 32 - 1))
def test_solve_consistent_and_inconsistent(fm, seed):
    F, m = fm
    rng = np.random.default_rng(seed)
    x0 = F.random(rng, m.shape[1])
    b = F.matmul(m, x0)
    x = F.solve(m, b)
    assert x is not None and (F.matmul(m, x) == b).all()
    b2 = F.random(rng, m.shape[0])
    x2 = F.solve(m, b2)
    consistent = F.rank(np.hstack([m, b2.reshape(-1, 1)])) == F.rank(m)
    assert (x2 is not None) == consistent
    if x2 is not None:
        assert (F.matmul(m, x2) == b2).all()


@given(matrices())
def test_cokernel(fm):
    F, m = fm
    q, d = F.cokernel(m)
    assert d == m.shape[0] - F.rank(m)
    assert not F.matmul(q, m).any()
    assert F.rank(q) == d


@given(matrices())
def test_quotient_representatives(fm):
    F, m = fm
    sub = m[: m.shape[0] // 2]
    s_r, s_piv, reps = F.quotient_representatives(m, sub)
    assert len(reps) == F.rank(m) - F.rank(sub)
    # representatives are independent modulo the subspace
    assert F.rank(np.vstack([sub, reps])) == F.rank(m)
    assert not reps[:, s_piv].any()


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from(PRIMES))
def test_one_sided_inverses(seed, p):
    F = GF(p)
    rng = np.random.default_rng(seed)
    n, k = 5, 3
    while True:
        m = F.random(rng, (n, k))
        if F.rank(m) == k:
            break
    assert (F.matmul(F.left_inverse(m), m) == F.eye(k)).all()
    assert (F.matmul(m.T, F.right_inverse(m.T)) == F.eye(k)).all()


def test_selection_inverses_for_unit_rows():
    F = GF(5)
    m = np.array([[3, 1], [1, 0], [0, 1], [2, 2]])
    left = F.left_inverse(m)
    assert (F.matmul(left, m) == F.eye(2)).all()
    # the unit rows 1 and 2 are picked out directly
    assert (left == np.array([[0, 1, 0, 0], [0, 0, 1, 0]])).all()
    right = F.right_inverse(m.T)
    assert (F.matmul(m.T, right) == F.eye(2)).all()


def test_singular_inverse_raises():
    F = GF(3)
    with pytest.raises(StructuralError):
        F.inverse(np.array([[1, 2], [2, 1]]))  # determinant 1 - 4 = 0 mod 3
    with pytest.raises(StructuralError):
        F.left_inverse(np.array([[1, 1], [1, 1]]))
    with pytest.raises(ContractError):
        F.matmul(np.eye(2, dtype=np.int64), np.eye(3, dtype=np.int64))


@pytest.mark.parametrize("p", [2, 5, 65521])
def test_flint_path_matches_reference(p):
    rng = np.random.default_rng(p)
    F = GF(p)
    for shape, k in [((60, 90), 40), ((120, 70), 70), ((80, 80), 10)]:
        m = (rng.integers(0, p, size=(shape[0], k)) @ rng.integers(0, p, size=(k, shape[1]))) % p
        assert exactlin._use_flint(*shape)
        r, piv, rank = F.rref(m)
        ref, ref_piv = exactlin.rref_reference(m, p)
        assert piv == ref_piv
        assert (r[:rank] == ref[:rank]).all()
        assert F.rank(m) == rank


def test_matmul_exact_for_large_inner_dimension():
    p = 65521
    F = GF(p)
    a = np.full((2, 3000), p - 1, dtype=np.int64)
    b = np.full((3000, 2), p - 1, dtype=np.int64)
    expected = (3000 * (p - 1) ** 2) % p
    assert (F.matmul(a, b) == expected).all()


def test_contract_agrees_with_einsum():
    F = GF(7)
    rng = np.random.default_rng(1)
    a, b, c = (F.random(rng, s) for s in [(3, 4), (4, 5), (5, 3)])
    assert (F.contract("ij,jk,kl->il", a, b, c) == np.einsum("ij,jk,kl->il", a, b, c) % 7).all()
    assert (F.kron(a, b) == np.kron(a, b) % 7).all()


def test_empty_shapes():
    F = GF(3)
    z = np.zeros((0, 4), dtype=np.int64)
    assert F.rank(z) == 0
    assert F.nullspace(z).shape == (4, 4)
    assert F.solve(np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)).shape == (2,)
    _, _, reps = F.quotient_representatives(np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64))
    assert reps.shape[0] == 0


def test_float_entries_rejected():
    with pytest.raises(ContractError):
        GF(3)(np.zeros(2))
