"""Minimal graded projective resolutions, Betti tables and regularity verdicts.

Verdicts about infinite resolutions are bounded by the number of computed
steps unless a certificate promotes them:

* the resolution terminates (a syzygy is provably zero);
* the syzygies become periodic up to shift (finite-dimensional algebras);
* the algebra has a quadratic Gröbner basis (PBW) and some syzygy has a
  linear Gröbner basis, so its resolution is linear from there on;
* for a Koszul algebra, Tor_i(A_0, M)_j = 0 unless j - i lies between the
  lowest and highest degree of M, which bounds every Betti degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .exactla import rank, row_basis
from .gradedmod import (
    FreeModule,
    GradedMap,
    GradedModule,
    ModuleError,
    WindowError,
    isomorphic_up_to_shift,
    kernel,
    radical_bases,
    semisimple,
    simple,
)
from .presentation import PresentedAlgebra, quadratic_dual

INF = math.inf


@dataclass
class Verdict:
    """A value together with how far it can be trusted."""

    value: object
    exact: bool
    reason: str
    bound: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        v = self.value
        if isinstance(v, float) and math.isinf(v):
            v = "inf" if v > 0 else "-inf"
        return {"value": v, "exact": self.exact, "reason": self.reason, "bound": self.bound}


# algebra-level certificates ---------------------------------------------


def _count_words_avoiding(A: PresentedAlgebra, tips: set, d: int) -> int:
    q = A.quiver
    # ways[(last arrow)] for words of the current length
    ways = {a: 1 for a in range(len(q.arrows))}
    for _ in range(d - 1):
        nxt = {}
        for a, c in ways.items():
            for b, arr in enumerate(q.arrows):
                if arr.src == q.arrows[a].tgt and (a, b) not in tips:
                    nxt[b] = nxt.get(b, 0) + c
        ways = nxt
    return sum(ways.values())


def pbw_certificate(A: PresentedAlgebra) -> bool:
    """True when the relations form a quadratic Gröbner basis.

    The normal words of degree 2 determine the tips; by the diamond lemma the
    basis is quadratic as soon as degree 3 has the predicted dimension.  All
    degrees up to the bound are compared anyway.
    """
    cached = getattr(A, "_pbw", None)
    if cached is not None:
        return cached
    ok = A.is_quadratic
    if ok and A.degree_bound >= 2:
        q = A.quiver
        normal2 = {w for _, w in A.basis[2]}
        tips = {(a, b) for a in range(len(q.arrows)) for b in range(len(q.arrows))
                if q.arrows[a].tgt == q.arrows[b].src and (a, b) not in normal2}
        for d in range(3, A.degree_bound + 1):
            if _count_words_avoiding(A, tips, d) != A.dim(d):
                ok = False
                break
    A._pbw = ok
    return ok


# resolutions ---------------------------------------------------------------


@dataclass
class Step:
    free: FreeModule
    images: list          # images of the generators in the previous term (or in M)
    diff: GradedMap       # P_i -> P_{i-1}, or the cover P_0 -> M
    syzygy: GradedModule  # kernel of diff
    inclusion: GradedMap  # syzygy -> P_i


def minimal_cover(M: GradedModule, cap: Optional[int] = None) -> tuple:
    """(P, π): generators lift a basis of M/mM chosen at non-pivot columns.

    `cap` bounds the window of P when M is closed; the caller vouches that
    nothing above it is needed.
    """
    rad = radical_bases(M)
    gens = []
    images = []
    for d in range(M.lo, M.hi + 1):
        for v in range(M.algebra.n_vertices):
            r = rad[(d, v)]
            dim = M.dim(d, v)
            piv = set()
            for row in r:
                piv.add(int(np.argmax(row != 0)))
            for c in range(dim):
                if c not in piv:
                    gens.append((v, d))
                    e = np.zeros(dim, dtype=np.int64)
                    e[c] = 1
                    images.append(e)
    hi = (None if cap is None else max(cap, M.hi)) if M.closed else M.hi
    if not gens:
        P = FreeModule(M.algebra, [])
        return P, GradedMap(P, M, {})
    P = FreeModule(M.algebra, gens, hi=hi)
    if not P.closed and M.closed and P.hi < M.hi:
        raise WindowError("module extends beyond the window of its projective cover")
    return P, P.map_from_images(M, images)


def syzygy(M: GradedModule) -> GradedModule:
    P, pi = minimal_cover(M)
    return kernel(pi)[0]


@dataclass
class Resolution:
    module: GradedModule
    steps: list
    requested: int
    terminated: bool          # a syzygy is provably zero
    horizon: int              # Betti entries are exact in degrees <= horizon (inf if closed)

    @property
    def length(self) -> int:
        return len(self.steps) - 1 if self.terminated else len(self.steps)

    def betti(self) -> dict:
        out = {}
        for i, st in enumerate(self.steps):
            for v, t in st.free.gens:
                out[(i, t)] = out.get((i, t), 0) + 1
        return out

    def betti_by_vertex(self) -> dict:
        out = {}
        for i, st in enumerate(self.steps):
            for v, t in st.free.gens:
                out[(i, v, t)] = out.get((i, v, t), 0) + 1
        return out

    def generator_degrees(self, i: int) -> list:
        if i >= len(self.steps):
            return []
        return [t for _, t in self.steps[i].free.gens]

    def syzygy_module(self, t: int) -> GradedModule:
        """Ω^t M (Ω^0 M = M)."""
        if t == 0:
            return self.module
        return self.steps[t - 1].syzygy

    def linear_part(self, i: int) -> dict:
        """C[a][g, g'] = coefficient of a·g in d_i(g') for g in P_{i-1}, g' in P_i."""
        if i < 1 or i >= len(self.steps):
            raise IndexError(f"no differential d_{i}")
        prev, cur = self.steps[i - 1].free, self.steps[i].free
        A = prev.algebra
        out = {}
        for a, arr in enumerate(A.quiver.arrows):
            C = np.zeros((len(prev.gens), len(cur.gens)), dtype=np.int64)
            for g2, (v2, t2) in enumerate(cur.gens):
                img = self.steps[i].images[g2]
                pos = prev.label_pos.get((t2, v2), {})
                for g, (v, t) in enumerate(prev.gens):
                    if t != t2 - 1 or arr.src != v or arr.tgt != v2:
                        continue
                    k = A.index[1].get((v, (a,)))
                    if k is None or (g, k) not in pos:
                        continue
                    C[g, g2] = img[pos[(g, k)]]
            out[a] = C
        return out

    def certify(self) -> dict:
        """Recheck exactness, minimality and subdiagonality from scratch."""
        f = self.module.field
        exact = minimal = subdiag = True
        lo = self.module.lo
        for i, st in enumerate(self.steps):
            for _, t in st.free.gens:
                if t < lo + i:
                    subdiag = False
            if i > 0:
                prev = self.steps[i - 1].free
                for img, (v, t) in zip(st.images, st.free.gens):
                    for j, (g, k) in enumerate(prev.labels[(t, v)]):
                        if img[j] and prev.gens[g][1] == t:
                            minimal = False
            # exactness: im d_{i+1} = ker d_i degreewise
            if i + 1 < len(self.steps):
                nxt = self.steps[i + 1].diff
                for (d, v), m in st.diff.mats.items():
                    if d > self.horizon:
                        continue
                    kerdim = m.shape[1] - rank(f, m)
                    m2 = nxt.mats.get((d, v))
                    imdim = rank(f, m2) if m2 is not None and m2.size else 0
                    if kerdim != imdim:
                        exact = False
                    if m2 is not None and m2.size and np.any(f.matmul(m, m2)):
                        exact = False
        return {"exact": exact, "minimal": minimal, "subdiagonal": subdiag}


def global_dimension_bound(A: PresentedAlgebra) -> Optional[int]:
    """gl.dim A for a PBW algebra whose quadratic dual is finite, else None.

    A PBW algebra is Koszul, so Ext^i(A_0, A_0) is the degree i part of the
    quadratic dual and the global dimension is the dual's top degree.
    """
    cached = A.__dict__.get("_gldim", False)
    if cached is not False:
        return cached
    g = None
    if not A.finite and A.n_arrows and pbw_certificate(A):
        dual = quadratic_dual(A)
        if dual.finite:
            g = dual.top_degree
    A._gldim = g
    return g


def _window_cap(M: GradedModule) -> Optional[int]:
    """For closed M over a Koszul algebra of global dimension g the generators
    of P_i sit in degrees <= M.hi + i <= M.hi + g, and Ω^{g+1} = 0 is visible
    one degree higher."""
    if not M.closed or M.is_zero():
        return None
    g = global_dimension_bound(M.algebra)
    if g is None:
        return None
    cap = M.hi + g + 1
    return cap if cap < M.lo + M.algebra.degree_bound else None


def resolve(M: GradedModule, steps: int, cap="auto") -> Resolution:
    """Minimal resolution through P_steps (steps + 1 projective terms).

    `cap` limits the free-module windows for closed M: "auto" uses the
    global-dimension bound, None disables it, and an integer raises the
    automatic cap (never lowers it) so that resolutions can share a window.
    """
    A = M.algebra
    cur = M
    out = []
    terminated = False
    horizon = INF if M.closed else M.hi
    auto = _window_cap(M)
    if cap == "auto" or cap is None or auto is None:
        cap = auto if cap == "auto" else None
    else:
        cap = max(int(cap), auto)
    for i in range(steps + 1):
        P, pi = minimal_cover(cur, cap if cur.closed else None)
        if i > 0:
            inc = out[-1].inclusion
            images = [inc.mat(t, v) @ img % A.field.p for img, (v, t) in zip(P.images_of(pi), P.gens)]
            diff = P.map_from_images(out[-1].free, images)
        else:
            images = P.images_of(pi)
            diff = pi
        if P.gens:
            K, inc_k = kernel(pi)
        else:
            K, inc_k = cur, GradedMap(cur, P, {})
        out.append(Step(P, images, diff, K, inc_k))
        if not P.gens:
            if cur.closed:
                terminated = True
                out.pop()
                break
            if _empty_is_certain(M, i, cur):
                terminated = True
                out.pop()
                break
        if K.closed and K.total_dim == 0:
            terminated = True
            break
        if not K.closed and K.total_dim == 0 and _empty_is_certain(M, i + 1, K):
            terminated = True
            break
        cur = K
        if not cur.closed and cur.hi < cur.lo:
            break
    if not A.finite and not (cap is not None and terminated):
        horizon = min(horizon, min((st.free.hi for st in out if not st.free.closed), default=horizon))
    return Resolution(M, out, steps, terminated, horizon)


def _empty_is_certain(M: GradedModule, i: int, K: GradedModule) -> bool:
    """An open Ω^i M that vanishes on its window is zero when the Koszul
    degree bound puts every possible generator inside the window."""
    if not M.closed or not pbw_certificate(M.algebra):
        return False
    return i + M.hi <= K.hi


def ext_to_semisimple(res: Resolution, i: int) -> list:
    """Ext^i(M, A_0) as a multiset of (vertex, degree) with degree -n."""
    if i > res.length and res.terminated:
        return []
    if i >= len(res.steps):
        raise ValueError(f"resolution only computed through step {len(res.steps) - 1}")
    return sorted((v, -t) for v, t in res.steps[i].free.gens)


# linear Gröbner basis test --------------------------------------------------


def has_linear_groebner_basis(N: GradedModule) -> Optional[bool]:
    """Whether the presentation of a finite-length N by its minimal cover has a
    Gröbner basis whose tips all sit one degree above their generator.

    Words are ordered by generator index, then lexicographically; None when N
    is open (the check would not be exhaustive).
    """
    if not N.closed:
        return None
    if N.is_zero():
        return True
    P, pi = minimal_cover(N)
    f = N.field
    A = N.algebra
    pivots = {}
    for (d, v), m in pi.mats.items():
        ker = row_basis(f, _kernel_rows(f, m))
        labs = P.labels[(d, v)]
        if ker.shape[0] == 0:
            pivots[(d, v)] = set()
            continue
        red = _rref_rev(f, ker)
        pivots[(d, v)] = {labs[c] for c in red}
    for (d, v), tips in pivots.items():
        for g, i in tips:
            e = d - P.gens[g][1]
            if e <= 1:
                continue
            _, path = A.basis[e][i]
            k = A.index[e - 1][(P.gens[g][0], path[:-1])]
            if (g, k) not in pivots.get((d - 1, A.quiver.arrows[path[-2]].tgt), ()):
                return False
    return True


def _kernel_rows(f, m):
    from .exactla import kernel_basis

    return kernel_basis(f, m)


def _rref_rev(f, rows) -> list:
    from .exactla import rref

    cols = rows.shape[1]
    return list(rref(f, rows, col_order=list(range(cols - 1, -1, -1))).pivots)


# regularity ------------------------------------------------------------------


def _periodicity(res: Resolution) -> Optional[tuple]:
    """(a, b, s) with Ω^b ≅ Ω^a moved up by s degrees, a < b."""
    if not res.module.algebra.finite:
        return None
    syz = [res.syzygy_module(t) for t in range(len(res.steps) + 1)]
    for b in range(1, len(syz)):
        for a in range(b):
            X, Y = syz[a], syz[b]
            if X.is_zero() or Y.is_zero() or not (X.closed and Y.closed):
                continue
            if [X.dims[d] for d in range(X.lo, X.hi + 1)] != [Y.dims[d] for d in range(Y.lo, Y.hi + 1)]:
                continue
            s = isomorphic_up_to_shift(X, Y)
            if s is not None:
                return a, b, s
    return None


def ext_regularity(M: GradedModule, steps: int = 8, res: Optional[Resolution] = None) -> Verdict:
    if M.is_zero():
        raise ModuleError("Ext-regularity of the zero module is undefined")
    res = res or resolve(M, steps)
    betti = res.betti()
    bound = {"steps": len(res.steps) - 1, "horizon": _json_num(res.horizon)}
    per_step = {}
    for (i, j) in betti:
        per_step[i] = max(per_step.get(i, -INF), j - i)
    lower = max(per_step.values())
    if res.terminated:
        return Verdict(lower, True, "resolution terminates", bound)
    per = _periodicity(res)
    if per is not None:
        a, b, s = per
        val = lower if s <= b - a else INF
        return Verdict(val, True, f"syzygies periodic: Ω^{b} ≅ Ω^{a} moved up {s}", bound)
    A = M.algebra
    if pbw_certificate(A):
        for t in range(len(res.steps) + 1):
            N = res.syzygy_module(t)
            if N.closed and has_linear_groebner_basis(N):
                val = max(per_step[i] for i in range(0, min(t, len(res.steps) - 1) + 1))
                return Verdict(val, True, f"linear Gröbner basis for syzygy {t}", bound)
        if M.closed:
            upper = M.hi
            best = upper
            for t in range(1, len(res.steps) + 1):
                N = res.syzygy_module(t)
                if N.closed and not N.is_zero():
                    cand = max([per_step[i] for i in range(t)] + [N.hi - t])
                    best = min(best, cand)
            if best <= lower:
                return Verdict(lower, True, "Koszul degree bound meets computed value", bound)
            bound["upper"] = best
    return Verdict(lower, False, "lower bound only", bound)


def _json_num(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def is_koszul(A: PresentedAlgebra, steps: int = 8) -> Verdict:
    """Every simple of A_0 has a linear resolution."""
    if A.n_arrows == 0:
        return Verdict(True, True, "semisimple algebra", {"steps": steps})
    S0 = semisimple(A, 0)
    res = resolve(S0, steps)
    off = sorted((i, j) for (i, j) in res.betti() if j != i and j <= res.horizon)
    bound = {"steps": len(res.steps) - 1, "horizon": _json_num(res.horizon)}
    if off:
        i, j = off[0]
        return Verdict(False, True, f"off-diagonal Betti entry beta_{i},{j}", bound)
    if pbw_certificate(A):
        return Verdict(True, True, "quadratic Gröbner basis", bound)
    if res.terminated:
        return Verdict(True, True, "linear resolution terminates", bound)
    per = _periodicity(res)
    if per is not None and per[2] == per[1] - per[0]:
        return Verdict(True, True, "linear and periodic syzygies", bound)
    return Verdict(True, False, "diagonal up to step bound", bound)


# weak Koszulity ------------------------------------------------------------------


def _short_columns(P: FreeModule, k: int, d: int, v: int) -> list:
    """Labels of (P)_{d,v} whose path is shorter than k, i.e. outside m^k P."""
    return [j for j, (g, _) in enumerate(P.labels.get((d, v), [])) if d - P.gens[g][1] < k]


def weakly_koszul_steps(res: Resolution) -> list:
    """For each computed i, whether m^{k+1}P_i ∩ ker d_i = m^k ker d_i for all k."""
    f = res.module.field
    A = res.module.algebra
    n = A.n_vertices
    out = []
    for i, st in enumerate(res.steps):
        P = st.free
        K = st.syzygy
        inc = st.inclusion
        ok = True
        if K.is_zero() or not P.gens:
            out.append(True)
            continue
        # m^k K as subspaces of P, iterated through the arrow actions
        cur = {}
        for d in range(K.lo, K.hi + 1):
            for v in range(n):
                cur[(d, v)] = row_basis(f, inc.mat(d, v).T, cols=P.dim(d, v)) if K.dim(d, v) else np.zeros((0, P.dim(d, v)), dtype=np.int64)
        hi = min(K.hi, res.horizon) if not math.isinf(res.horizon) else K.hi
        kbases = {key: m for key, m in cur.items()}
        # beyond k = hi - lo(P) both sides vanish in every degree of the window
        for k in range(int(hi) - P.lo + 1):
            for d in range(K.lo, int(hi) + 1):
                for v in range(n):
                    if K.dim(d, v) == 0:
                        continue
                    # m^{k+1}P is a coordinate subspace, so its meet with K is
                    # the part of K vanishing on the shorter-path coordinates
                    kb = kbases[(d, v)]
                    short = _short_columns(P, k + 1, d, v)
                    lhs = kb.shape[0] - (rank(f, kb[:, short]) if short else 0)
                    if lhs != cur[(d, v)].shape[0]:
                        ok = False
            if not ok:
                break
            nxt = {}
            for d in range(K.lo, K.hi + 1):
                for v in range(n):
                    parts = []
                    for a, arr in enumerate(A.quiver.arrows):
                        if arr.tgt == v and (d - 1, arr.src) in cur and cur[(d - 1, arr.src)].shape[0]:
                            parts.append(f.matmul(P.action(a, d - 1), cur[(d - 1, arr.src)].T).T)
                    nxt[(d, v)] = row_basis(f, np.concatenate(parts), cols=P.dim(d, v)) if parts else np.zeros((0, P.dim(d, v)), dtype=np.int64)
            cur = nxt
        out.append(ok)
    return out


def weakly_koszul_check(M: GradedModule, steps: int = 6, res: Optional[Resolution] = None) -> Verdict:
    # the identity lives in every internal degree, so no window cap here
    res = res or resolve(M, steps, cap=None)
    flags = weakly_koszul_steps(res)
    ok = all(flags)
    exact = (res.terminated and M.algebra.finite) or not ok
    return Verdict(ok, exact, "subspace identity at every computed step" if ok else
                   f"identity fails at step {flags.index(False)}", {"steps": len(res.steps) - 1})


def weakly_koszul_syzygy_index(M: GradedModule, max_t: int = 6, steps: int = 8,
                               res: Optional[Resolution] = None) -> Verdict:
    """Least t <= max_t such that Ω^t M passes the weakly Koszul check.

    Ω^t M is resolved by the tail of M's resolution, so one resolution serves
    every t.
    """
    res = res or resolve(M, max(steps, max_t + 2), cap=None)
    flags = weakly_koszul_steps(res)
    for t in range(min(max_t, len(flags)) + 1):
        if all(flags[t:]):
            return Verdict(t, res.terminated and M.algebra.finite, "first weakly Koszul syzygy", {"max_t": max_t, "steps": len(res.steps) - 1})
    return Verdict(None, False, "not found within bound", {"max_t": max_t, "steps": len(res.steps) - 1})


def betti_tsv(res: Resolution) -> str:
    """Betti table with rows i and columns j, padded for diffing."""
    betti = res.betti()
    if not betti:
        return "i\n"
    js = range(min(j for _, j in betti), max(j for _, j in betti) + 1)
    rows = [["i"] + [str(j) for j in js]]
    for i in range(len(res.steps)):
        rows.append([str(i)] + [str(betti.get((i, j), 0)) for j in js])
    width = max(len(c) for r in rows for c in r)
    return "\n".join("\t".join(c.rjust(width) for c in r) for r in rows) + "\n"


def simple_module(A: PresentedAlgebra, v: int, t: int = 0) -> GradedModule:
    return simple(A, v, t)
