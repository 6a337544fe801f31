"""Dense exact linear algebra over prime fields GF(p).

Matrices are plain ``numpy.int64`` arrays holding canonical representatives
``0 <= e < p``.  Every operation is a method on :class:`Field`, so the
characteristic travels with the call instead of with each array.

Tensor products of spaces use one basis convention everywhere in the package:
``e_i (x) f_j`` has index ``i * dim(F) + j`` (left factor major), which is the
ordering produced by :func:`numpy.kron`.

Large eliminations are delegated to FLINT (``python-flint``); small ones run
through the numpy routine below, which is also the reference implementation
the test suite compares FLINT against.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError, ParameterError, StructuralError

try:  # pragma: no cover - exercised implicitly
    import flint as _flint
except ImportError:  # pragma: no cover
    _flint = None

# p < 2**16 keeps every pairwise product-and-sum inside int64 for any
# dimension this package can realistically build.
MAX_CHARACTERISTIC = 1 << 16

# Matrices with at least this many entries go to FLINT when it is installed.
FLINT_THRESHOLD = 2500

_FLOAT_EXACT = float(1 << 52)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """The prime field GF(p)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise ParameterError(f"characteristic must be an integer, got {self.p!r}")
        if not is_prime(int(self.p)):
            raise ParameterError(f"characteristic {self.p} is not prime")
        if self.p >= MAX_CHARACTERISTIC:
            raise ParameterError(f"characteristic {self.p} exceeds supported bound {MAX_CHARACTERISTIC}")
        object.__setattr__(self, "p", int(self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"

    # -- construction -----------------------------------------------------

    def __call__(self, data) -> np.ndarray:
        """Reduce ``data`` to an int64 array of canonical representatives."""
        arr = np.asarray(data)
        if arr.dtype.kind in "iub":
            return np.mod(arr.astype(np.int64, copy=False), self.p)
        if arr.dtype == object or arr.size == 0:
            flat = [int(v) % self.p for v in arr.ravel()]
            return np.array(flat, dtype=np.int64).reshape(arr.shape)
        raise ContractError(f"field entries must be integers, got dtype {arr.dtype}")

    def matrix(self, rows, shape: tuple[int, int] | None = None) -> np.ndarray:
        m = self(rows)
        if shape is not None:
            m = m.reshape(shape)
        if m.ndim != 2:
            raise ContractError(f"expected a 2-d matrix, got shape {m.shape}")
        return m

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    # -- scalar arithmetic ------------------------------------------------

    def inv(self, a: int) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, -1, self.p)

    def neg(self, m: np.ndarray) -> np.ndarray:
        return np.mod(-m, self.p)

    # -- products ---------------------------------------------------------

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != b.shape[0 if b.ndim == 1 else -2]:
            raise ContractError(f"cannot multiply shapes {a.shape} and {b.shape}")
        inner = a.shape[-1]
        if inner * (self.p - 1) ** 2 < _FLOAT_EXACT:
            # exact in float64, and BLAS-fast
            out = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
        else:
            out = a @ b
        return np.mod(out, self.p)

    def mul(self, *mats: np.ndarray) -> np.ndarray:
        """Chained product ``mats[0] @ mats[1] @ ...``."""
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix of ``a (x) b`` in the left-factor-major tensor basis."""
        return np.mod(np.kron(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)), self.p)

    tensor_product = kron

    def contract(self, spec: str, *ops: np.ndarray) -> np.ndarray:
        """``einsum`` evaluated pairwise left to right, reducing after each step.

        Keeps intermediate values bounded by ``p**2`` times a contraction
        length, so no overflow regardless of how many factors are involved.
        """
        inputs, output = spec.replace(" ", "").split("->")
        terms = inputs.split(",")
        if len(terms) != len(ops):
            raise ContractError("operand count does not match subscripts")
        cur_idx, cur = terms[0], np.asarray(ops[0], dtype=np.int64)
        for k in range(1, len(ops)):
            nxt_idx = terms[k]
            rest = "".join(terms[k + 1:]) + output
            keep = "".join(dict.fromkeys(c for c in cur_idx + nxt_idx if c in rest))
            cur = np.mod(np.einsum(f"{cur_idx},{nxt_idx}->{keep}", cur, np.asarray(ops[k], dtype=np.int64)), self.p)
            cur_idx = keep
        return np.mod(np.einsum(f"{cur_idx}->{output}", cur), self.p)

    # -- elimination ------------------------------------------------------

    def rref(self, m: np.ndarray) -> tuple[np.ndarray, list[int], int]:
        """Reduced row echelon form, pivot columns, and rank."""
        m = self.matrix(m)
        rows, cols = m.shape
        if rows == 0 or cols == 0:
            return m.copy(), [], 0
        if _use_flint(rows, cols):
            r, piv = _rref_flint(m, self.p)
        else:
            r, piv = _rref_numpy(m, self.p)
        return r, piv, len(piv)

    def rank(self, m: np.ndarray) -> int:
        m = self.matrix(m)
        rows, cols = m.shape
        if _use_flint(rows, cols):
            return int(_flint.nmod_mat(rows, cols, m.ravel().tolist(), self.p).rank())
        return self.rref(m)[2]

    def nullspace(self, m: np.ndarray) -> np.ndarray:
        """Columns form a basis of ``ker m``; the free variable of each column is 1."""
        m = self.matrix(m)
        rows, cols = m.shape
        r, piv, rank = self.rref(m)
        pivot_set = set(piv)
        free = [c for c in range(cols) if c not in pivot_set]
        basis = np.zeros((cols, len(free)), dtype=np.int64)
        if not free:
            return basis
        piv_arr = np.array(piv, dtype=np.int64)
        free_arr = np.array(free, dtype=np.int64)
        basis[free_arr, np.arange(len(free))] = 1
        if rank:
            basis[piv_arr, :] = np.mod(-r[:rank][:, free_arr], self.p)
        return basis

    def solve(self, m: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
        """Some ``x`` with ``m @ x == rhs``, or ``None`` when inconsistent.

        ``rhs`` may be a vector or a matrix (solved column by column, the
        returned witness has matching shape).
        """
        m = self.matrix(m)
        rhs = self(rhs)
        vector = rhs.ndim == 1
        b = rhs.reshape(-1, 1) if vector else rhs
        if b.shape[0] != m.shape[0]:
            raise ContractError(f"row mismatch: matrix has {m.shape[0]} rows, rhs has {b.shape[0]}")
        cols = m.shape[1]
        if b.shape[1] == 0:
            x = np.zeros((cols, 0), dtype=np.int64)
            return x.reshape(-1) if vector else x
        r, piv, rank = self.rref(np.hstack([m, b]))
        if piv and piv[-1] >= cols:
            return None
        x = np.zeros((cols, b.shape[1]), dtype=np.int64)
        if rank:
            x[np.array(piv), :] = r[:rank, cols:]
        return x.reshape(-1) if vector else x

    def cokernel(self, m: np.ndarray) -> tuple[np.ndarray, int]:
        """Surjection ``q`` onto ``coker m`` (``q @ m == 0``) and its dimension."""
        m = self.matrix(m)
        q = self.nullspace(m.T).T
        return q, q.shape[0]

    def column_space(self, m: np.ndarray) -> np.ndarray:
        """Basis of the column span, as columns in RREF-canonical form."""
        m = self.matrix(m)
        r, piv, rank = self.rref(m.T)
        return r[:rank].T.copy()

    def inverse(self, m: np.ndarray) -> np.ndarray:
        m = self.matrix(m)
        n = m.shape[0]
        if m.shape != (n, n):
            raise ContractError(f"inverse of non-square {m.shape} matrix")
        x = self.solve(m, self.eye(n))
        if x is None:
            raise StructuralError("matrix is singular")
        return x

    def left_inverse(self, m: np.ndarray) -> np.ndarray:
        """Some ``l`` with ``l @ m == I``; ``m`` must be injective."""
        m = self.matrix(m)
        sel = _unit_rows(m)
        if sel is not None:
            out = np.zeros(m.shape[::-1], dtype=np.int64)
            out[np.arange(m.shape[1]), sel] = 1
            return out
        x = self.solve(m.T, self.eye(m.shape[1]))
        if x is None:
            raise StructuralError("matrix is not injective")
        return x.T

    def right_inverse(self, m: np.ndarray) -> np.ndarray:
        """Some ``s`` with ``m @ s == I``; ``m`` must be surjective."""
        m = self.matrix(m)
        sel = _unit_rows(m.T)
        if sel is not None:
            out = np.zeros(m.shape[::-1], dtype=np.int64)
            out[sel, np.arange(m.shape[0])] = 1
            return out
        x = self.solve(m, self.eye(m.shape[0]))
        if x is None:
            raise StructuralError("matrix is not surjective")
        return x

    def in_span(self, basis_cols: np.ndarray, v: np.ndarray) -> bool:
        return self.solve(basis_cols, v) is not None

    # -- quotients of row spaces -------------------------------------------

    def reduce_rows(self, rows: np.ndarray, sub_rref: np.ndarray, sub_pivots: list[int]) -> np.ndarray:
        """Normal form of each row modulo the row space of ``sub_rref``.

        ``sub_rref`` must be in reduced echelon form with the given pivots; the
        result has zeros in every pivot column, and two rows are congruent
        modulo the subspace iff their normal forms agree.
        """
        rows = self.matrix(rows)
        if not sub_pivots:
            return rows.copy()
        coeff = rows[:, sub_pivots]
        return np.mod(rows - self.matmul(coeff, sub_rref[: len(sub_pivots)]), self.p)

    def quotient_representatives(self, ambient: np.ndarray, sub: np.ndarray):
        """Canonical coset representatives for ``rowspace(ambient) / rowspace(sub)``.

        Returns ``(sub_rref, sub_pivots, reps)``: ``reps`` are the rows of
        ``rref(ambient)`` whose pivot is not a pivot of the subspace, reduced to
        normal form.  The subspace must lie inside the ambient row space.
        """
        ambient = self.matrix(ambient)
        sub = self.matrix(sub)
        sub = sub.reshape(0 if not sub.size else -1, ambient.shape[1])
        s_r, s_piv, s_rank = self.rref(sub)
        a_r, a_piv, a_rank = self.rref(ambient)
        sub_set = set(s_piv)
        if not sub_set.issubset(a_piv):
            raise ContractError("subspace is not contained in the ambient space")
        keep = [i for i, c in enumerate(a_piv) if c not in sub_set]
        reps = self.reduce_rows(a_r[keep], s_r[:s_rank], s_piv)
        return s_r[:s_rank].copy(), s_piv, reps


@lru_cache(maxsize=None)
def GF(p: int) -> Field:
    return Field(p)


def _rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = a.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = a[r, c:] * inv % p
        hit = np.flatnonzero(a[:, c])
        hit = hit[hit != r]
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(a[hit, c], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _unit_rows(m: np.ndarray) -> np.ndarray | None:
    """For each column ``j`` a row equal to ``e_j``, or ``None`` if some column has none.

    Kernel inclusions and cokernel projections produced by :meth:`Field.nullspace`
    contain such an identity block, which makes one-sided inverses a selection.
    """
    rows, cols = m.shape
    if cols == 0 or rows < cols:
        return None
    nz = m != 0
    unit = (nz.sum(axis=1) == 1) & (m.max(axis=1) == 1)
    idx = np.flatnonzero(unit)
    if idx.size < cols:
        return None
    which = np.argmax(nz[idx], axis=1)
    sel = np.full(cols, -1, dtype=np.int64)
    sel[which[::-1]] = idx[::-1]  # first matching row wins
    return None if (sel < 0).any() else sel


def _use_flint(rows: int, cols: int) -> bool:
    # the numpy loop costs about rank * rows * cols; with at most 48 pivots it
    # beats the conversion overhead of FLINT
    return _flint is not None and rows * cols >= FLINT_THRESHOLD and min(rows, cols) > 48


def _rref_flint(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    rows, cols = a.shape
    fm = _flint.nmod_mat(rows, cols, a.ravel().tolist(), p)
    r, rank = fm.rref()
    out = np.zeros((rows, cols), dtype=np.int64)
    if 2 * rank < rows:
        # only the nonzero rows are read back
        out[:rank] = np.fromiter((int(r[i, j]) for i in range(rank) for j in range(cols)),
                                 dtype=np.int64, count=rank * cols).reshape(rank, cols)
    else:
        out[:] = np.fromiter(map(int, r.entries()), dtype=np.int64, count=rows * cols).reshape(rows, cols)
    pivots = []
    for i in range(rank):
        pivots.append(int(np.flatnonzero(out[i])[0]))
    return out, pivots


def rref_reference(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """The pure-numpy elimination, exposed for cross-checking the FLINT path."""
    return _rref_numpy(np.mod(np.asarray(m, dtype=np.int64), p), p)
