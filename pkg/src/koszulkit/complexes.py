"""Complexes of graded modules with homological indexing (d_i : C_i -> C_{i-1})."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exactla import rank
from .gradedmod import (
    FreeModule,
    GradedMap,
    GradedModule,
    cokernel,
    direct_sum,
    kernel,
    submodule,
    zero_module,
)
from .presentation import PresentedAlgebra


class ComplexError(ValueError):
    pass


@dataclass
class GradedComplex:
    algebra: PresentedAlgebra
    terms: dict   # i -> GradedModule
    diffs: dict   # i -> GradedMap C_i -> C_{i-1}

    def term(self, i: int) -> GradedModule:
        return self.terms.get(i) or zero_module(self.algebra)

    def diff(self, i: int) -> GradedMap:
        if i in self.diffs:
            return self.diffs[i]
        return GradedMap(self.term(i), self.term(i - 1), {})

    @property
    def indices(self) -> list:
        return sorted(i for i, m in self.terms.items() if not m.is_zero())

    def horizon(self) -> float:
        """Largest internal degree known in every term."""
        his = [m.hi for m in self.terms.values() if not m.closed]
        return min(his) if his else float("inf")

    def check_d_squared(self) -> bool:
        f = self.algebra.field
        for i in self.indices:
            d1, d2 = self.diff(i), self.diff(i - 1)
            for (deg, v), m in d1.mats.items():
                m2 = d2.mats.get((deg, v))
                if m2 is None or not m.size or not m2.size:
                    continue
                if np.any(f.matmul(m2, m)):
                    return False
        return True

    def homology_dims(self, i: int, degrees) -> dict:
        """dim H_i in each requested internal degree, by vertex."""
        f = self.algebra.field
        n = self.algebra.n_vertices
        C = self.term(i)
        out = {}
        for d in degrees:
            row = []
            for v in range(n):
                dim = C.dim(d, v) if C.known(d) else None
                if dim is None:
                    raise ComplexError(f"term {i} is unknown in degree {d}")
                if dim == 0:
                    row.append(0)
                    continue
                out_m = self.diff(i).mat(d, v)
                in_m = self.diff(i + 1).mat(d, v)
                z = dim - (rank(f, out_m) if out_m.size else 0)
                b = rank(f, in_m) if in_m.size else 0
                row.append(z - b)
            out[d] = tuple(row)
        return out


def homology(C: GradedComplex, i: int) -> GradedModule:
    """H_i = ker d_i / im d_{i+1} as a module."""
    Z, inc = kernel(C.diff(i))
    d_in = C.diff(i + 1)
    # express the image of d_{i+1} inside Z
    f = C.algebra.field
    mats = {}
    for (deg, v), m in d_in.mats.items():
        if not Z.known(deg) or deg < Z.lo or deg > Z.hi:
            continue
        basis = inc.mat(deg, v)  # columns span Z inside C_i
        if basis.shape[1] == 0:
            mats[(deg, v)] = np.zeros((0, m.shape[1]), dtype=np.int64)
            continue
        piv = [int(np.argmax(basis[:, j] != 0)) for j in range(basis.shape[1])]
        mats[(deg, v)] = m[piv, :] % f.p
    into_z = GradedMap(d_in.source, Z, mats)
    return cokernel(into_z)[0]


def free_complex(algebra: PresentedAlgebra, frees: dict, images: dict) -> GradedComplex:
    """Complex of free modules with d_i given by generator images in C_{i-1}."""
    diffs = {}
    for i, F in frees.items():
        if i - 1 in frees and F.gens:
            diffs[i] = F.map_from_images(frees[i - 1], images[i])
    return GradedComplex(algebra, dict(frees), diffs)


def cone(mu: dict, P: GradedComplex, C: GradedComplex) -> GradedComplex:
    """Cone of a chain map μ: P -> C with Cone_k = P_{k-1} ⊕ C_k.

    d(x, y) = (-d x, μ(x) + d y).
    """
    A = P.algebra
    f = A.field
    n = A.n_vertices
    idx = sorted(set(P.terms) | {i + 1 for i in P.terms} | set(C.terms))
    terms = {k: direct_sum_exact(P.term(k - 1), C.term(k)) for k in idx}
    diffs = {}
    for k in idx:
        if k - 1 not in terms:
            continue
        src, tgt = terms[k], terms[k - 1]
        Pk1, Ck = P.term(k - 1), C.term(k)
        Pk2, Ck1 = P.term(k - 2), C.term(k - 1)
        mats = {}
        for d in range(src.lo, src.hi + 1):
            if not tgt.known(d):
                continue
            for v in range(n):
                a1, b1 = Pk1.dim(d, v), Ck.dim(d, v)
                a2, b2 = Pk2.dim(d, v), Ck1.dim(d, v)
                m = np.zeros((a2 + b2, a1 + b1), dtype=np.int64)
                if a1 and a2:
                    m[:a2, :a1] = -P.diff(k - 1).mat(d, v)
                if a1 and b2 and (k - 1) in mu:
                    m[a2:, :a1] = mu[k - 1].mat(d, v)
                if b1 and b2:
                    m[a2:, a1:] = C.diff(k).mat(d, v)
                mats[(d, v)] = m % f.p
        diffs[k] = GradedMap(src, tgt, mats)
    return GradedComplex(A, terms, diffs)


def direct_sum_exact(M: GradedModule, N: GradedModule) -> GradedModule:
    """Direct sum whose coordinates are always (M-part, N-part), even if one is zero."""
    if M.is_zero() and N.is_zero():
        return zero_module(M.algebra)
    if M.is_zero():
        return N
    if N.is_zero():
        return M
    return direct_sum(M, N)


def exact_in_window(C: GradedComplex, lo_deg: int, hi_deg: int, indices=None) -> tuple:
    """(ok, total homology dimension) over internal degrees [lo_deg, hi_deg]."""
    total = 0
    for i in (indices if indices is not None else sorted(set(C.terms) | {i - 1 for i in C.terms})):
        dims = C.homology_dims(i, range(lo_deg, hi_deg + 1))
        total += sum(sum(v) for v in dims.values())
    return total == 0, total


def total_homology(C: GradedComplex, hi_deg: Optional[int] = None) -> int:
    lo = min((m.lo for m in C.terms.values() if not m.is_zero()), default=0)
    hi = hi_deg
    if hi is None:
        his = [m.hi for m in C.terms.values() if not m.is_zero()]
        hi = max(his) if his else -1
    return exact_in_window(C, lo, hi)[1]


def submodule_restrict(M: GradedModule, bases: dict) -> tuple:
    return submodule(M, bases)


def free_generators_in_degree(F: FreeModule, t: int) -> bool:
    return all(d == t for _, d in F.gens)
