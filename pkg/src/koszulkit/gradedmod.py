"""Graded modules over a PresentedAlgebra and degree-0 maps between them.

A module stores, for every degree d of its window [lo, hi] and vertex v, the
dimension of e_v M_d, and for every arrow a: u -> w the action matrix
e_u M_d -> e_w M_{d+1}.  A *closed* module is known to vanish above hi; an
open one is simply unknown there and any request beyond hi raises WindowError.
"""

from __future__ import annotations

import json
from typing import Iterable, Optional, Sequence

import numpy as np

from .exactla import PrimeField, image_basis, kernel_basis, pivot_columns, quotient, rank, row_basis
from .presentation import PresentedAlgebra, algebra_from_doc


class WindowError(ValueError):
    """A computation needed degrees outside a module's known window."""


class ModuleError(ValueError):
    pass


def _zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.int64)


class GradedModule:
    def __init__(self, algebra: PresentedAlgebra, lo: int, hi: int, dims: dict, act: dict,
                 closed: bool = True, check: bool = False):
        self.algebra = algebra
        self.field: PrimeField = algebra.field
        n = algebra.n_vertices
        if hi < lo:
            lo, hi = 0, -1
        # drop zero degrees at the ends of closed modules so windows stay tight
        if closed:
            while lo <= hi and not any(dims.get(lo, ())):
                lo += 1
            while hi >= lo and not any(dims.get(hi, ())):
                hi -= 1
            if hi < lo:
                lo, hi = 0, -1
        if not closed and not algebra.finite and hi > lo + algebra.degree_bound:
            raise WindowError(f"window [{lo}, {hi}] is wider than the degree bound {algebra.degree_bound}")
        self.lo, self.hi, self.closed = lo, hi, closed
        self._pcache: dict = {}
        self.dims = {d: tuple(int(x) for x in dims.get(d, (0,) * n)) for d in range(lo, hi + 1)}
        self.act = {}
        for a, arr in enumerate(algebra.quiver.arrows):
            for d in range(lo, hi):
                m = act.get((a, d))
                shape = (self.dims[d + 1][arr.tgt], self.dims[d][arr.src])
                if m is None:
                    m = _zeros(*shape)
                m = np.asarray(m, dtype=np.int64).reshape(shape) % self.field.p
                self.act[(a, d)] = m
        if check:
            self.check_relations()

    # queries ------------------------------------------------------------

    def known(self, d: int) -> bool:
        return self.closed or d <= self.hi

    def vdims(self, d: int) -> tuple:
        if d < self.lo or (self.closed and d > self.hi):
            return (0,) * self.algebra.n_vertices
        if d > self.hi:
            raise WindowError(f"degree {d} is above the known window [{self.lo}, {self.hi}]")
        return self.dims[d]

    def dim(self, d: int, v: Optional[int] = None) -> int:
        vd = self.vdims(d)
        return sum(vd) if v is None else vd[v]

    def action(self, a: int, d: int) -> np.ndarray:
        arr = self.algebra.quiver.arrows[a]
        if self.lo <= d < self.hi:
            return self.act[(a, d)]
        return _zeros(self.dim(d + 1, arr.tgt), self.dim(d, arr.src))

    def path_action(self, path: Sequence[int], d: int, v: int) -> np.ndarray:
        """Action of a path starting at v: e_v M_d -> e_end M_{d+len}."""
        key = (tuple(path), d, v)
        m = self._pcache.get(key)
        if m is None:
            if not path:
                m = np.eye(self.dim(d, v), dtype=np.int64)
            else:
                m = self.field.matmul(self.action(path[-1], d + len(path) - 1), self.path_action(path[:-1], d, v))
            self._pcache[key] = m
        return m

    def element_action(self, x: np.ndarray, e: int, d: int, v: int, w: int) -> np.ndarray:
        """Action of x in e_w A_e e_v on e_v M_d, landing in e_w M_{d+e}."""
        A = self.algebra
        out = _zeros(self.dim(d + e, w), self.dim(d, v))
        for i in np.nonzero(x)[0]:
            s, path = A.basis[e][i]
            if s != v or A.tgt_of(e, i) != w:
                continue
            out = (out + int(x[i]) * self.path_action(path, d, v)) % self.field.p
        return out

    @property
    def total_dim(self) -> int:
        return sum(sum(v) for v in self.dims.values())

    def is_zero(self) -> bool:
        return self.closed and self.total_dim == 0

    def top(self) -> int:
        if not self.closed:
            raise WindowError("open module has no known top degree")
        return self.hi

    def dim_vector(self) -> dict:
        return {d: self.dims[d] for d in range(self.lo, self.hi + 1)}

    def hilbert(self) -> list:
        return [sum(self.dims[d]) for d in range(self.lo, self.hi + 1)]

    def check_relations(self) -> None:
        A = self.algebra
        for k in range(len(A.relations)):
            e, src, vec = A.relation_vector(k)
            del vec
            for d in range(self.lo, self.hi + 1):
                if not self.known(d + e) or d + e > self.hi and self.closed:
                    continue
                tot = None
                for c, path in A.relation_terms()[k]:
                    m = c * self.path_action(path, d, src)
                    tot = m if tot is None else tot + m
                if tot is not None and np.any(tot % self.field.p):
                    raise ModuleError(f"relation {k} does not act as zero in degree {d}")

    def __repr__(self):
        flag = "closed" if self.closed else "open"
        return f"GradedModule([{self.lo},{self.hi}] {flag}, dims={[self.dims[d] for d in range(self.lo, self.hi + 1)]})"

    # derived copies -----------------------------------------------------

    def restrict_window(self, hi: int) -> "GradedModule":
        """Forget degrees above hi (the result is open unless nothing was lost)."""
        if hi >= self.hi:
            return self
        dims = {d: self.dims[d] for d in range(self.lo, hi + 1)}
        act = {k: v for k, v in self.act.items() if k[1] < hi}
        return GradedModule(self.algebra, self.lo, hi, dims, act, closed=False)


class GradedMap:
    """Degree-0 map; mats[(d, v)] is the matrix e_v S_d -> e_v T_d."""

    def __init__(self, source: GradedModule, target: GradedModule, mats: dict):
        self.source, self.target = source, target
        self.field = source.field
        self.mats = {}
        for d in range(source.lo, source.hi + 1):
            for v in range(source.algebra.n_vertices):
                shape = (target.dim(d, v), source.dim(d, v))
                m = mats.get((d, v))
                m = _zeros(*shape) if m is None else np.asarray(m, dtype=np.int64).reshape(shape) % self.field.p
                self.mats[(d, v)] = m

    def mat(self, d: int, v: int) -> np.ndarray:
        if (d, v) in self.mats:
            return self.mats[(d, v)]
        return _zeros(self.target.dim(d, v) if self.target.known(d) else 0, self.source.dim(d, v))

    def commutes(self) -> bool:
        S, T = self.source, self.target
        f = self.field
        for a, arr in enumerate(S.algebra.quiver.arrows):
            for d in range(S.lo, S.hi + 1):
                if not T.known(d + 1):
                    continue
                if d + 1 > S.hi and not S.closed:
                    continue
                lhs = f.matmul(self.mat(d + 1, arr.tgt), S.action(a, d)) if S.known(d + 1) else None
                rhs = f.matmul(T.action(a, d), self.mat(d, arr.src))
                if lhs is None:
                    continue
                if not np.array_equal(lhs, rhs):
                    return False
        return True

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        mats = {}
        for (d, v), m in other.mats.items():
            if self.source.known(d) and (d, v) in self.mats or self.source.dim(d, v) == 0:
                mats[(d, v)] = self.field.matmul(self.mat(d, v), m)
        return GradedMap(other.source, self.target, mats)

    def is_zero(self) -> bool:
        return not any(np.any(m) for m in self.mats.values())

    def is_iso(self) -> bool:
        for (d, v), m in self.mats.items():
            if m.shape[0] != m.shape[1] or rank(self.field, m) != m.shape[0]:
                return False
        return True

    def scaled_sum(self, other: "GradedMap", c: int = 1) -> "GradedMap":
        return GradedMap(self.source, self.target, {k: (m + c * other.mats[k]) % self.field.p for k, m in self.mats.items()})


# constructors ------------------------------------------------------------


def zero_module(A: PresentedAlgebra) -> GradedModule:
    return GradedModule(A, 0, -1, {}, {})


class FreeModule(GradedModule):
    """⊕_g A e_{v_g} with generator g in degree t_g.

    Coordinates of e_u F_d are labelled (g, i) with i a basis index of A_{d-t_g}
    whose path starts at v_g and ends at u, ordered by g and then by i.
    """

    def __init__(self, algebra: PresentedAlgebra, gens: Sequence, hi: Optional[int] = None):
        self.gens = tuple((int(v), int(t)) for v, t in gens)
        A = algebra
        if not self.gens:
            super().__init__(A, 0, -1, {}, {})
            self.labels = {}
            self.label_pos = {}
            return
        lo = min(t for _, t in self.gens)
        natural = max(t for _, t in self.gens) + A.top_degree if A.finite else None
        if hi is None:
            hi = natural if natural is not None else lo + A.degree_bound
        closed = natural is not None and natural <= hi
        if closed:
            hi = natural
        if not A.finite and hi > lo + A.degree_bound:
            raise WindowError(f"free module window [{lo}, {hi}] exceeds the degree bound")
        n = A.n_vertices
        labels = {}
        for d in range(lo, hi + 1):
            for u in range(n):
                labels[(d, u)] = []
            for g, (v, t) in enumerate(self.gens):
                e = d - t
                if e < 0 or e > A.degree_bound:
                    continue
                for i in range(A.dim(e)):
                    if A.src_of(e, i) == v:
                        labels[(d, A.tgt_of(e, i))].append((g, i))
        dims = {d: tuple(len(labels[(d, u)]) for u in range(n)) for d in range(lo, hi + 1)}
        pos = {k: {lab: j for j, lab in enumerate(v)} for k, v in labels.items()}
        act = {}
        for a, arr in enumerate(A.quiver.arrows):
            for d in range(lo, hi):
                m = _zeros(dims[d + 1][arr.tgt], dims[d][arr.src])
                tpos = pos[(d + 1, arr.tgt)]
                for j, (g, i) in enumerate(labels[(d, arr.src)]):
                    e = d - self.gens[g][1]
                    col = A.act[(a, e)][:, i]
                    for k in np.nonzero(col)[0]:
                        m[tpos[(g, int(k))], j] = col[k]
                act[(a, d)] = m
        super().__init__(A, lo, hi, dims, act, closed=closed)
        self.labels = labels
        self.label_pos = pos

    def generator_vector(self, g: int) -> np.ndarray:
        v, t = self.gens[g]
        vec = np.zeros(self.dim(t, v), dtype=np.int64)
        vec[self.label_pos[(t, v)][(g, v)]] = 1
        return vec

    def map_from_images(self, target: GradedModule, images: Sequence[np.ndarray]) -> GradedMap:
        """The map sending generator g to images[g] in e_{v_g} target_{t_g}."""
        A = self.algebra
        p = self.field.p
        vecs = {}  # (g, path) -> image of g*path, built from the image of its prefix
        mats = {}
        for (d, u) in sorted(self.labels):
            if not target.known(d):
                continue
            labs = self.labels[(d, u)]
            m = _zeros(target.dim(d, u), len(labs))
            by_arrow: dict = {}
            for j, (g, i) in enumerate(labs):
                v, t = self.gens[g]
                path = A.basis[d - t][i][1]
                if not path:
                    img = np.asarray(images[g], dtype=np.int64).reshape(-1) % p
                    if img.size == 0:
                        img = np.zeros(target.dim(t, v), dtype=np.int64)
                    vecs[(g, path)] = img
                    m[:, j] = img
                else:
                    by_arrow.setdefault(path[-1], []).append((j, g, path))
            for a, items in by_arrow.items():
                prev = np.stack([vecs[(g, path[:-1])] for _, g, path in items], axis=1)
                out = self.field.matmul(target.action(a, d - 1), prev)
                for c, (j, g, path) in enumerate(items):
                    vecs[(g, path)] = out[:, c]
                    m[:, j] = out[:, c]
            mats[(d, u)] = m
        return GradedMap(self, target, mats)

    def images_of(self, f: GradedMap) -> list:
        """Generator images of a map out of this free module."""
        out = []
        for g, (v, t) in enumerate(self.gens):
            out.append(f.mat(t, v)[:, self.label_pos[(t, v)][(g, v)]].copy())
        return out


def projective(A: PresentedAlgebra, vertex: int, twist: int = 0, hi: Optional[int] = None) -> FreeModule:
    """A e_vertex generated in degree twist (paths starting at vertex)."""
    if not 0 <= vertex < A.n_vertices:
        raise ModuleError(f"vertex {vertex} out of range")
    return FreeModule(A, [(vertex, twist)], hi=hi)


def regular_module(A: PresentedAlgebra, hi: Optional[int] = None) -> FreeModule:
    return FreeModule(A, [(v, 0) for v in range(A.n_vertices)], hi=hi)


def simple(A: PresentedAlgebra, vertex: int, twist: int = 0) -> GradedModule:
    if not 0 <= vertex < A.n_vertices:
        raise ModuleError(f"vertex {vertex} out of range")
    dims = {twist: tuple(1 if u == vertex else 0 for u in range(A.n_vertices))}
    return GradedModule(A, twist, twist, dims, {})


def semisimple(A: PresentedAlgebra, twist: int = 0) -> GradedModule:
    return GradedModule(A, twist, twist, {twist: (1,) * A.n_vertices}, {})


# structural operations ------------------------------------------------------


def shift(M: GradedModule, i: int) -> GradedModule:
    """M[i] with M[i]_j = M_{i+j}."""
    dims = {d - i: M.dims[d] for d in range(M.lo, M.hi + 1)}
    act = {(a, d - i): m for (a, d), m in M.act.items()}
    out = GradedModule(M.algebra, M.lo - i, M.hi - i, dims, act, closed=M.closed)
    return out


def shift_free(F: FreeModule, i: int) -> FreeModule:
    hi = None if F.closed else F.hi - i
    return FreeModule(F.algebra, [(v, t - i) for v, t in F.gens], hi=hi)


def truncate_below(M: GradedModule, s: int) -> GradedModule:
    """M_{>=s}."""
    if s <= M.lo:
        return M
    if s > M.hi:
        if M.closed:
            return zero_module(M.algebra)
        raise WindowError(f"truncation at {s} lies above the known window of an open module")
    dims = {d: M.dims[d] for d in range(s, M.hi + 1)}
    act = {k: m for k, m in M.act.items() if k[1] >= s}
    return GradedModule(M.algebra, s, M.hi, dims, act, closed=M.closed)


truncate_at_least = truncate_below


def truncate_above(M: GradedModule, s: int) -> GradedModule:
    """M / M_{>=s}, the part in degrees < s (always closed)."""
    if s - 1 > M.hi and not M.closed:
        raise WindowError(f"quotient by M>={s} needs degrees above the known window")
    hi = min(M.hi, s - 1)
    dims = {d: M.dims[d] for d in range(M.lo, hi + 1)}
    act = {k: m for k, m in M.act.items() if k[1] < hi}
    return GradedModule(M.algebra, M.lo, hi, dims, act, closed=True)


def truncation_sequence(M: GradedModule, s: int) -> tuple:
    """0 -> M_{>=s} -> M -> M/M_{>=s} -> 0 as a pair of maps."""
    sub = truncate_below(M, s)
    quo = truncate_above(M, s)
    n = M.algebra.n_vertices
    inc = GradedMap(sub, M, {(d, v): np.eye(M.dim(d, v), dtype=np.int64) for d in range(sub.lo, sub.hi + 1) for v in range(n)})
    proj = GradedMap(M, quo, {(d, v): np.eye(M.dim(d, v), dtype=np.int64) for d in range(quo.lo, quo.hi + 1) for v in range(n)})
    return inc, proj


def submodule(M: GradedModule, bases: dict, lo: Optional[int] = None, hi: Optional[int] = None,
              closed: Optional[bool] = None) -> tuple:
    """Submodule spanned degreewise by rref row bases; returns (S, inclusion).

    bases[(d, v)] holds rows in e_v M_d coordinates; missing keys mean zero.
    """
    A = M.algebra
    f = M.field
    n = A.n_vertices
    lo = M.lo if lo is None else lo
    hi = M.hi if hi is None else hi
    closed = M.closed if closed is None else closed
    B = {}
    for d in range(lo, hi + 1):
        for v in range(n):
            b = bases.get((d, v))
            if b is None or b.shape[0] == 0:
                B[(d, v)] = _zeros(0, M.dim(d, v))
            else:
                B[(d, v)] = row_basis(f, b)
    dims = {d: tuple(B[(d, v)].shape[0] for v in range(n)) for d in range(lo, hi + 1)}
    act = {}
    for a, arr in enumerate(A.quiver.arrows):
        for d in range(lo, hi):
            src, tgt = B[(d, arr.src)], B[(d + 1, arr.tgt)]
            img = f.matmul(M.action(a, d), src.T)
            piv = pivot_columns(tgt)
            coords = img[piv, :] if piv else _zeros(0, src.shape[0])
            if src.shape[0] and np.any((f.matmul(tgt.T, coords) - img) % f.p):
                raise ModuleError("subspaces are not closed under the arrow actions")
            act[(a, d)] = coords
    S = GradedModule(A, lo, hi, dims, act, closed=closed)
    inc = GradedMap(S, M, {(d, v): B[(d, v)].T for d in range(S.lo, S.hi + 1) for v in range(n)})
    return S, inc


def quotient_module(M: GradedModule, bases: dict) -> tuple:
    """M / (span of bases); returns (Q, projection)."""
    A = M.algebra
    f = M.field
    n = A.n_vertices
    Qs = {}
    for d in range(M.lo, M.hi + 1):
        for v in range(n):
            b = bases.get((d, v))
            if b is None:
                b = _zeros(0, M.dim(d, v))
            Qs[(d, v)] = quotient(f, b, M.dim(d, v))
    dims = {d: tuple(len(Qs[(d, v)].complement_cols) for v in range(n)) for d in range(M.lo, M.hi + 1)}
    act = {}
    for a, arr in enumerate(A.quiver.arrows):
        for d in range(M.lo, M.hi):
            act[(a, d)] = f.mul_chain(Qs[(d + 1, arr.tgt)].projection, M.action(a, d), Qs[(d, arr.src)].section)
    Q = GradedModule(A, M.lo, M.hi, dims, act, closed=M.closed)
    proj = GradedMap(M, Q, {(d, v): Qs[(d, v)].projection for d in range(Q.lo, Q.hi + 1) for v in range(n)}) if Q.hi >= Q.lo else GradedMap(M, Q, {})
    return Q, proj


def radical_bases(M: GradedModule) -> dict:
    """Degreewise bases of m·M = sum of arrow images."""
    A = M.algebra
    f = M.field
    out = {}
    for d in range(M.lo, M.hi + 1):
        for v in range(A.n_vertices):
            parts = []
            for a, arr in enumerate(A.quiver.arrows):
                if arr.tgt == v and d - 1 >= M.lo:
                    m = M.action(a, d - 1)
                    if m.size:
                        parts.append(m.T)
            if parts:
                out[(d, v)] = row_basis(f, np.concatenate(parts, axis=0), cols=M.dim(d, v))
            else:
                out[(d, v)] = _zeros(0, M.dim(d, v))
    return out


def radical(M: GradedModule) -> GradedModule:
    return submodule(M, radical_bases(M))[0]


def top_quotient(M: GradedModule) -> GradedModule:
    """M / mM."""
    return quotient_module(M, radical_bases(M))[0]


def kernel(f: GradedMap) -> tuple:
    """(K, inclusion) with K = ker f inside f.source."""
    S = f.source
    bases = {}
    for (d, v), m in f.mats.items():
        bases[(d, v)] = kernel_basis(f.field, m) if m.shape[0] else np.eye(m.shape[1], dtype=np.int64)
    return submodule(S, bases)


def image(f: GradedMap) -> tuple:
    """(I, inclusion) with I = im f inside f.target, on the source window."""
    S, T = f.source, f.target
    bases = {}
    for (d, v), m in f.mats.items():
        bases[(d, v)] = image_basis(f.field, m)
    hi = S.hi if not S.closed else max(S.hi, S.lo - 1)
    return submodule(T, bases, lo=S.lo, hi=min(hi, T.hi) if not T.closed else hi, closed=S.closed)


def cokernel(f: GradedMap) -> tuple:
    T = f.target
    bases = {}
    for (d, v), m in f.mats.items():
        if T.known(d) and T.lo <= d <= T.hi:
            bases[(d, v)] = image_basis(f.field, m)
    return quotient_module(T, bases)


def direct_sum(M: GradedModule, N: GradedModule) -> GradedModule:
    A = M.algebra
    n = A.n_vertices
    if M.is_zero():
        return N
    if N.is_zero():
        return M
    lo = min(M.lo, N.lo)
    if M.closed and N.closed:
        hi, closed = max(M.hi, N.hi), True
    else:
        hi = min(x.hi for x in (M, N) if not x.closed)
        closed = False
    dims = {d: tuple(M.dim(d, v) + N.dim(d, v) for v in range(n)) for d in range(lo, hi + 1)}
    act = {}
    for a in range(A.n_arrows):
        for d in range(lo, hi):
            m1, m2 = M.action(a, d), N.action(a, d)
            out = _zeros(m1.shape[0] + m2.shape[0], m1.shape[1] + m2.shape[1])
            out[: m1.shape[0], : m1.shape[1]] = m1
            out[m1.shape[0]:, m1.shape[1]:] = m2
            act[(a, d)] = out
    return GradedModule(A, lo, hi, dims, act, closed=closed)


def direct_sum_many(mods: Iterable[GradedModule]) -> GradedModule:
    mods = list(mods)
    out = mods[0]
    for m in mods[1:]:
        out = direct_sum(out, m)
    return out


def identity_map(M: GradedModule) -> GradedMap:
    n = M.algebra.n_vertices
    return GradedMap(M, M, {(d, v): np.eye(M.dim(d, v), dtype=np.int64) for d in range(M.lo, M.hi + 1) for v in range(n)})


def zero_map(M: GradedModule, N: GradedModule) -> GradedMap:
    return GradedMap(M, N, {})


def hom_degree_zero(M: GradedModule, N: GradedModule) -> list:
    """Basis of degree-0 homomorphisms M -> N.

    Solves f_{d+1} μ^M_a = μ^N_a f_d for every arrow and degree.  For an
    open source only the squares inside its window constrain the maps.
    """
    A = M.algebra
    f = M.field
    n = A.n_vertices
    slots = []
    offset = 0
    where = {}
    for d in range(M.lo, M.hi + 1):
        if not N.known(d):
            raise WindowError(f"target is unknown in degree {d}")
        for v in range(n):
            r, c = N.dim(d, v), M.dim(d, v)
            if r and c:
                where[(d, v)] = (offset, r, c)
                slots.append((d, v))
                offset += r * c
    if offset == 0:
        return []
    eqs = []
    for a, arr in enumerate(A.quiver.arrows):
        for d in range(M.lo, M.hi + 1):
            if d + 1 > M.hi and not M.closed:
                continue
            if not N.known(d + 1):
                continue
            rows = N.dim(d + 1, arr.tgt)
            cols = M.dim(d, arr.src)
            if rows == 0 or cols == 0:
                continue
            block = _zeros(rows * cols, offset)
            # f_{d+1} μ^M : row-major vec(X μ) = (I ⊗ μ^T) vec(X)
            if (d + 1, arr.tgt) in where:
                o, r, c = where[(d + 1, arr.tgt)]
                mu = M.action(a, d)
                block[:, o:o + r * c] += np.kron(np.eye(r, dtype=np.int64), mu.T)
            if (d, arr.src) in where:
                o, r, c = where[(d, arr.src)]
                nu = N.action(a, d)
                block[:, o:o + r * c] -= np.kron(nu, np.eye(c, dtype=np.int64))
            eqs.append(block % f.p)
    system = np.concatenate(eqs, axis=0) if eqs else _zeros(0, offset)
    sols = kernel_basis(f, system)
    out = []
    for s in sols:
        mats = {}
        for key, (o, r, c) in where.items():
            mats[key] = s[o:o + r * c].reshape(r, c)
        out.append(GradedMap(M, N, mats))
    return out


def find_isomorphism(M: GradedModule, N: GradedModule, seed: int = 0, tries: int = 8) -> Optional[GradedMap]:
    """Search for an invertible degree-0 map; None means none was found.

    Dimension mismatch proves non-isomorphism; otherwise random combinations
    of a Hom basis are tested, which succeeds with high probability.
    """
    if M.lo != N.lo or M.hi != N.hi or M.closed != N.closed:
        if not (M.is_zero() and N.is_zero()):
            return None
    if M.dims != N.dims:
        return None
    basis = hom_degree_zero(M, N)
    if M.total_dim == 0:
        return zero_map(M, N)
    if not basis:
        return None
    rng = np.random.default_rng(seed)
    f = M.field
    for _ in range(tries):
        coeffs = rng.integers(0, f.p, size=len(basis))
        mats = {}
        for k in basis[0].mats:
            acc = _zeros(*basis[0].mats[k].shape)
            for c, b in zip(coeffs, basis):
                acc = acc + int(c) * b.mats[k]
            mats[k] = acc % f.p
        g = GradedMap(M, N, mats)
        if g.is_iso():
            return g
    return None


def isomorphic_up_to_shift(M: GradedModule, N: GradedModule) -> Optional[int]:
    """s with N ≅ M[-s] (N is M moved up by s degrees), if found."""
    if M.is_zero() or N.is_zero():
        return 0 if M.is_zero() and N.is_zero() else None
    s = N.lo - M.lo
    if N.hi - M.hi != s:
        return None
    return s if find_isomorphism(shift(M, -s), N) is not None else None


# description documents ---------------------------------------------------


def module_to_doc(M: GradedModule, algebra_doc: Optional[dict] = None) -> dict:
    A = M.algebra
    doc = {
        "algebra": algebra_doc if algebra_doc is not None else A.to_doc(),
        "window": [M.lo, M.hi],
        "dims": {str(d): list(M.dims[d]) for d in range(M.lo, M.hi + 1)},
        "actions": {},
    }
    if not M.closed:
        doc["closed"] = False
    for a, arr in enumerate(A.quiver.arrows):
        entry = {}
        for d in range(M.lo, M.hi):
            m = M.act[(a, d)]
            if m.size and np.any(m):
                entry[str(d)] = m.tolist()
        if entry:
            doc["actions"][arr.id] = entry
    return doc


def module_from_doc(doc: dict, algebra: Optional[PresentedAlgebra] = None) -> GradedModule:
    """Load and validate a module document.

    `algebra` may be passed when the document refers to it by name rather
    than inline.
    """
    try:
        if algebra is None:
            alg = doc["algebra"]
            if not isinstance(alg, dict):
                raise ModuleError("module document refers to an algebra that was not supplied")
            algebra = algebra_from_doc(alg)
        lo, hi = (int(x) for x in doc["window"])
        dims = {int(d): tuple(int(x) for x in v) for d, v in doc["dims"].items()}
        n = algebra.n_vertices
        for d, v in dims.items():
            if len(v) != n:
                raise ModuleError(f"degree {d} lists {len(v)} vertex dimensions, expected {n}")
            if not lo <= d <= hi:
                raise ModuleError(f"degree {d} outside window [{lo}, {hi}]")
        act = {}
        for aid, entry in doc.get("actions", {}).items():
            if aid not in algebra.quiver.index:
                raise ModuleError(f"unknown arrow {aid!r}")
            a = algebra.quiver.index[aid]
            arr = algebra.quiver.arrows[a]
            for d, m in entry.items():
                d = int(d)
                m = np.array(m, dtype=np.int64)
                src = dims.get(d, (0,) * n)[arr.src]
                tgt = dims.get(d + 1, (0,) * n)[arr.tgt]
                if m.size == 0:
                    m = m.reshape(tgt, src)
                if m.shape != (tgt, src):
                    raise ModuleError(f"action of {aid} in degree {d} has shape {m.shape}, expected {(tgt, src)}")
                act[(a, d)] = m
    except (KeyError, TypeError) as exc:
        raise ModuleError(f"malformed module document: {exc!r}") from None
    return GradedModule(algebra, lo, hi, dims, act, closed=bool(doc.get("closed", True)), check=True)


def load_module(path: str, algebra: Optional[PresentedAlgebra] = None) -> GradedModule:
    with open(path) as fh:
        return module_from_doc(json.load(fh), algebra)


def generated_submodule(M: GradedModule, elements: Iterable) -> tuple:
    """Submodule generated by elements (d, v, vector); returns (S, inclusion)."""
    A = M.algebra
    f = M.field
    n = A.n_vertices
    spans = {}
    for d, v, vec in elements:
        row = np.asarray(vec, dtype=np.int64).reshape(1, -1) % f.p
        old = spans.get((d, v))
        spans[(d, v)] = row if old is None else np.concatenate([old, row])
    bases = {}
    for d in range(M.lo, M.hi + 1):
        for v in range(n):
            parts = [spans[(d, v)]] if (d, v) in spans else []
            for a, arr in enumerate(A.quiver.arrows):
                prev = bases.get((d - 1, arr.src))
                if arr.tgt == v and prev is not None and prev.shape[0]:
                    parts.append(f.matmul(M.action(a, d - 1), prev.T).T)
            if parts:
                bases[(d, v)] = row_basis(f, np.concatenate(parts), cols=M.dim(d, v))
    return submodule(M, bases)
