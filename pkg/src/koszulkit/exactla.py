"""Exact linear algebra over prime fields GF(p).

Matrices are numpy int64 arrays with entries in [0, p).  Vectors are columns
when a matrix acts on them; subspace bases are stored as *rows* in reduced
row-echelon form, so coordinates of a vector in the subspace can be read off
at the pivot columns.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import flint
import numba
import numpy as np

DEFAULT_CHARACTERISTIC = 101


def _is_prime(n: int) -> bool:
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
class PrimeField:
    p: int = DEFAULT_CHARACTERISTIC

    def __post_init__(self):
        if not (2 <= self.p < 2**31) or not _is_prime(self.p):
            raise ValueError(f"characteristic must be a prime in [2, 2^31), got {self.p}")

    @classmethod
    def from_env(cls) -> "PrimeField":
        return cls(int(os.environ.get("KK_FIELD", DEFAULT_CHARACTERISTIC)))

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def normalize(self, m) -> np.ndarray:
        return np.asarray(m, dtype=np.int64) % self.p

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=np.int64)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if a.size == 0 or b.size == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        k = a.shape[1]
        bound = k * (self.p - 1) ** 2
        if bound < 2**52:
            # float64 BLAS is exact on integers below 2^53
            af = np.remainder(a, self.p).astype(np.float64)
            bf = np.remainder(b, self.p).astype(np.float64)
            return np.remainder((af @ bf).astype(np.int64), self.p)
        if bound < 2**62:
            return (np.remainder(a, self.p) @ np.remainder(b, self.p)) % self.p
        out = (a.astype(object) @ b.astype(object)) % self.p
        return out.astype(np.int64)

    def mul_chain(self, *mats: np.ndarray) -> np.ndarray:
        out = mats[0]
        for m in mats[1:]:
            out = self.matmul(out, m)
        return out


@dataclass(frozen=True)
class RREF:
    matrix: np.ndarray
    pivots: tuple
    rank: int


# Below this density the zero-skipping kernel beats flint, whose cost on our
# sizes is dominated by converting entries in and out.
SPARSE_DENSITY = 0.15


@numba.njit(cache=True)
def _rref_sparse(a, p):
    """In-place Gauss-Jordan on a normalized int64 matrix; returns the rank."""
    rows, cols = a.shape
    r = 0
    nz = np.empty(cols, np.int64)
    for c in range(cols):
        if r == rows:
            break
        k = -1
        for i in range(r, rows):
            if a[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(c, cols):
                t = a[k, j]
                a[k, j] = a[r, j]
                a[r, j] = t
        inv = 1
        e = p - 2
        b = a[r, c]
        while e:
            if e & 1:
                inv = inv * b % p
            b = b * b % p
            e >>= 1
        m = 0
        for j in range(c, cols):
            if a[r, j] != 0:
                a[r, j] = a[r, j] * inv % p
                nz[m] = j
                m += 1
        for i in range(rows):
            if i != r:
                f = a[i, c]
                if f != 0:
                    for t in range(m):
                        j = nz[t]
                        a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    return r


def rref(field: PrimeField, m, col_order: Optional[Sequence[int]] = None) -> RREF:
    """Reduced row-echelon form, with zero rows dropped.

    The result is canonical, so it agrees with leftmost-column/topmost-row
    Gauss-Jordan elimination.  `col_order` permutes the column scan order;
    pivots are reported as original column indices, in scan order.
    """
    a = field.normalize(m)
    if a.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = a.shape
    if col_order is not None:
        order = np.asarray(col_order, dtype=np.int64)
        a = a[:, order]
    if rows == 0 or cols == 0:
        return RREF(np.zeros((0, cols), dtype=np.int64), (), 0)
    if np.count_nonzero(a) <= SPARSE_DENSITY * a.size:
        out = np.ascontiguousarray(a, dtype=np.int64)
        r = _rref_sparse(out, field.p)
        out = out[:r]
    else:
        red, r = flint.nmod_mat(a.tolist(), field.p).rref()
        out = np.array([int(x) for x in red.entries()], dtype=np.int64).reshape(rows, cols)[:r]
    piv = []
    c = 0
    for i in range(r):
        while out[i, c] == 0:
            c += 1
        piv.append(c)
    if col_order is not None:
        back = np.empty_like(order)
        back[order] = np.arange(cols)
        out = out[:, back]
        piv = [int(order[c]) for c in piv]
    return RREF(out, tuple(piv), r)


def rank(field: PrimeField, m) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return rref(field, m).rank


def row_basis(field: PrimeField, m, cols: Optional[int] = None) -> np.ndarray:
    """Rows of the rref, i.e. a canonical basis of the row space."""
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2:
        m = m.reshape(0, cols or 0)
    if m.shape[0] == 0:
        return np.zeros((0, m.shape[1] if cols is None else cols), dtype=np.int64)
    return rref(field, m).matrix


def kernel_basis(field: PrimeField, m) -> np.ndarray:
    """Rows form a basis of {x : m x = 0}, returned in rref form."""
    m = field.normalize(m)
    rows, cols = m.shape
    if rows == 0:
        return field.eye(cols)
    red = rref(field, m)
    pivots = red.pivots
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    basis[np.arange(len(free)), free] = 1
    if pivots:
        basis[:, list(pivots)] = (-red.matrix[:, free].T) % field.p
    if basis.shape[0] == 0:
        return basis
    return rref(field, basis).matrix


def image_basis(field: PrimeField, m) -> np.ndarray:
    """Rows form a basis of the column space of m."""
    m = field.normalize(m)
    return row_basis(field, m.T, cols=m.shape[0])


def solve(field: PrimeField, m, rhs) -> Optional[np.ndarray]:
    """One solution X of m X = rhs, or None if inconsistent."""
    m = field.normalize(m)
    rhs = field.normalize(rhs)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs[:, None]
    if m.shape[0] != rhs.shape[0]:
        raise ValueError(f"row mismatch: {m.shape} vs {rhs.shape}")
    n = m.shape[1]
    if m.shape[0] == 0:
        x = np.zeros((n, rhs.shape[1]), dtype=np.int64)
        return x[:, 0] if vector else x
    aug = np.concatenate([m, rhs], axis=1)
    red = rref(field, aug)
    if any(c >= n for c in red.pivots):
        return None
    x = np.zeros((n, rhs.shape[1]), dtype=np.int64)
    if red.rank:
        x[list(red.pivots)] = red.matrix[:, n:]
    return x[:, 0] if vector else x


def transpose(m: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(m).T)


def span_sum(field: PrimeField, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if u.shape[0] == 0:
        return row_basis(field, v, cols=v.shape[1])
    if v.shape[0] == 0:
        return row_basis(field, u, cols=u.shape[1])
    return row_basis(field, np.concatenate([u, v], axis=0))


def intersection_of_row_spaces(field: PrimeField, u, v) -> np.ndarray:
    """Basis (rref rows) of rowspace(u) ∩ rowspace(v)."""
    u = row_basis(field, u)
    v = row_basis(field, v)
    cols = u.shape[1] if u.ndim == 2 else v.shape[1]
    if u.shape[0] == 0 or v.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.int64)
    # a u = b v  <=>  [u; -v]^T [a; b] = 0
    stacked = np.concatenate([u, (-v) % field.p], axis=0)
    ker = kernel_basis(field, stacked.T)
    if ker.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.int64)
    vecs = field.matmul(ker[:, : u.shape[0]], u)
    return row_basis(field, vecs)


def in_row_space(field: PrimeField, basis: np.ndarray, vecs: np.ndarray) -> bool:
    """True when every row of vecs lies in the row space of the rref `basis`."""
    vecs = np.atleast_2d(vecs)
    if vecs.shape[0] == 0:
        return True
    if basis.shape[0] == 0:
        return not np.any(field.normalize(vecs))
    return rank(field, np.concatenate([basis, vecs])) == rank(field, basis)


def pivot_columns(basis: np.ndarray) -> list:
    """Pivot columns of a matrix already in (natural-order) rref."""
    if basis.shape[0] == 0:
        return []
    return [int(c) for c in np.argmax(basis != 0, axis=1)]


def coordinates_in(field: PrimeField, basis: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Coordinates (as columns) of column vectors `vecs` in the rref row basis.

    Assumes membership; use `in_row_space` first when unsure.
    """
    piv = pivot_columns(basis)
    vecs = np.asarray(vecs, dtype=np.int64)
    if vecs.ndim == 1:
        return vecs[piv] % field.p
    return vecs[piv, :] % field.p


@dataclass(frozen=True)
class Quotient:
    """V / W with a chosen complement.

    `projection` maps V-coordinates to quotient coordinates; `section` lifts
    quotient coordinates back to the complement (standard basis vectors on the
    non-pivot columns of W's rref).
    """

    sub: np.ndarray
    complement_cols: tuple
    projection: np.ndarray
    section: np.ndarray


def quotient(field: PrimeField, sub: np.ndarray, dim: int, col_order: Optional[Sequence[int]] = None) -> Quotient:
    p = field.p
    if sub.shape[0] == 0:
        red_m = np.zeros((0, dim), dtype=np.int64)
        piv: tuple = ()
    else:
        red = rref(field, sub, col_order=col_order)
        red_m, piv = red.matrix, red.pivots
    pset = set(piv)
    comp = tuple(c for c in range(dim) if c not in pset)
    proj = np.zeros((len(comp), dim), dtype=np.int64)
    proj[:, list(comp)] = np.eye(len(comp), dtype=np.int64)
    if piv:
        # modulo sub, e_pc = -sum_{c in comp} red[r, c] e_c
        proj[:, list(piv)] = (-red_m[:, list(comp)].T) % p
    sec = np.ascontiguousarray(proj[:, :].T * 0)
    sec[list(comp), np.arange(len(comp))] = 1
    return Quotient(red_m, comp, proj, sec)


def inverse(field: PrimeField, m) -> Optional[np.ndarray]:
    m = field.normalize(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    x = solve(field, m, field.eye(n))
    return x


def random_matrix(field: PrimeField, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.integers(0, field.p, size=(rows, cols), dtype=np.int64)
