"""The linearization functor Φ, its inverse, linear approximations of complexes,
the density pipeline and stable-hom stabilization.

Φ takes a graded A-module M to a linear complex over the Koszul side G of A
(the quadratic dual read on A's quiver).  Index k of Φ(M) is the free
G-module on D(M_k) generated in degree k; the differential sends the dual
basis vector ψ of e_v M_k to Σ_a a·(μ_a^T ψ), where μ_a is the action of the
arrow a: u -> v.  No signs are inserted; d² = 0 is exactly the statement that
M satisfies A's relations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .complexes import GradedComplex, cone, direct_sum_exact
from .corpus import koszul_side
from .exactla import rank
from .gradedmod import (
    FreeModule,
    GradedMap,
    GradedModule,
    ModuleError,
    WindowError,
    find_isomorphism,
    hom_degree_zero,
    identity_map,
    kernel,
    module_from_doc,
    module_to_doc,
    shift,
    truncate_above,
    top_quotient,
    truncate_below,
    zero_module,
)
from .localcoh import koszul_truncation_index
from .presentation import PresentationError, PresentedAlgebra, algebra_from_doc
from .resolve import Resolution, Verdict, ext_regularity, is_koszul, minimal_cover, resolve


class PipelineError(RuntimeError):
    """A stage of a certified construction failed; `stage` names it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


# linear complexes -------------------------------------------------------------


@dataclass
class LinearComplex:
    """Free modules frees[k] over G with d_k given by generator images in frees[k-1]."""

    algebra: PresentedAlgebra
    frees: dict
    images: dict
    _complex: Optional[GradedComplex] = dc_field(default=None, repr=False)

    @property
    def indices(self) -> list:
        return sorted(k for k, F in self.frees.items() if F.gens)

    def is_linear(self) -> bool:
        return all(t == k for k, F in self.frees.items() for _, t in F.gens)

    def complex(self) -> GradedComplex:
        if self._complex is None:
            diffs = {}
            for k, F in self.frees.items():
                if k - 1 in self.frees and F.gens and self.frees[k - 1].gens:
                    diffs[k] = F.map_from_images(self.frees[k - 1], self.images[k])
            self._complex = GradedComplex(self.algebra, dict(self.frees), diffs)
        return self._complex

    def linear_coefficients(self, k: int) -> dict:
        """C[a][g, g'] = coefficient of a·g in d(g'), g in frees[k-1], g' in frees[k]."""
        G = self.algebra
        prev, cur = self.frees.get(k - 1), self.frees.get(k)
        out = {}
        for a, arr in enumerate(G.quiver.arrows):
            C = np.zeros((len(prev.gens) if prev else 0, len(cur.gens) if cur else 0), dtype=np.int64)
            if prev is not None and cur is not None and prev.gens and cur.gens:
                ai = G.index[1][(arr.src, (a,))]
                for g2, (v2, t2) in enumerate(cur.gens):
                    if v2 != arr.tgt:
                        continue
                    pos = prev.label_pos.get((t2, v2), {})
                    y = self.images[k][g2]
                    for g, (v, t) in enumerate(prev.gens):
                        if v == arr.src and t == t2 - 1 and (g, ai) in pos:
                            C[g, g2] = y[pos[(g, ai)]]
            out[a] = C
        return out

    def check_d_squared(self) -> bool:
        return self.complex().check_d_squared()


def _horizon(G: PresentedAlgebra, lo: int, hi: Optional[int]) -> Optional[int]:
    if G.finite:
        return None
    top = lo + G.degree_bound
    return top if hi is None else min(hi, top)


def phi(M: GradedModule, hi: Optional[int] = None) -> LinearComplex:
    """Φ(M) over koszul_side(A); hi caps the internal-degree window on an infinite G."""
    A = M.algebra
    if not A.is_quadratic:
        raise PresentationError("Φ needs a quadratic algebra")
    G = koszul_side(A)
    f = A.field
    if M.is_zero():
        return LinearComplex(G, {}, {})
    H = _horizon(G, M.lo, hi)
    frees, gen_of = {}, {}
    for k in range(M.lo, M.hi + 1):
        gens = []
        for v in range(A.n_vertices):
            for j in range(M.dim(k, v)):
                gen_of[(k, v, j)] = len(gens)
                gens.append((v, k))
        frees[k] = FreeModule(G, gens, hi=H)
    images = {}
    for k in range(M.lo + 1, M.hi + 1):
        src, tgt = frees[k], frees[k - 1]
        imgs = []
        for v, _ in src.gens:
            imgs.append(np.zeros(tgt.dim(k, v), dtype=np.int64))
        for a, arr in enumerate(A.quiver.arrows):
            mu = M.action(a, k - 1)   # e_u M_{k-1} -> e_v M_k
            if not mu.size:
                continue
            ai = G.index[1][(arr.src, (a,))]
            pos = tgt.label_pos[(k, arr.tgt)]
            for j in range(mu.shape[0]):
                g2 = gen_of[(k, arr.tgt, j)]
                for i in np.nonzero(mu[j])[0]:
                    g = gen_of[(k - 1, arr.src, int(i))]
                    imgs[g2][pos[(g, ai)]] += int(mu[j, i])
        images[k] = [x % f.p for x in imgs]
    return LinearComplex(G, frees, images)


def phi_map(fmap: GradedMap) -> dict:
    """Φ(f): Φ(N) -> Φ(M) for f: M -> N, as generator maps D(N_k) -> D(M_k)."""
    return {(d, v): m.T.copy() for (d, v), m in fmap.mats.items()}


def phi_inverse(L: LinearComplex, A: PresentedAlgebra) -> GradedModule:
    """Read a module off a linear complex over koszul_side(A)."""
    if not L.is_linear():
        raise ModuleError("phi_inverse needs a linear complex")
    if koszul_side(A) is not L.algebra and L.algebra.to_doc() != koszul_side(A).to_doc():
        raise ModuleError("complex does not live over the Koszul side of this algebra")
    idx = L.indices
    if not idx:
        return zero_module(A)
    n = A.n_vertices
    lo, hi = idx[0], idx[-1]
    local = {}
    dims = {}
    for k in range(lo, hi + 1):
        F = L.frees.get(k)
        gens = F.gens if F is not None else ()
        counters = [0] * n
        for g, (v, _) in enumerate(gens):
            local[(k, g)] = counters[v]
            counters[v] += 1
        dims[k] = tuple(counters)
    act = {}
    for k in range(lo + 1, hi + 1):
        C = L.linear_coefficients(k) if (k in L.frees and k - 1 in L.frees) else {}
        for a, arr in enumerate(A.quiver.arrows):
            m = np.zeros((dims[k][arr.tgt], dims[k - 1][arr.src]), dtype=np.int64)
            Ca = C.get(a)
            if Ca is not None:
                for g, g2 in zip(*np.nonzero(Ca)):
                    v = L.frees[k - 1].gens[g][0]
                    v2 = L.frees[k].gens[g2][0]
                    if v == arr.src and v2 == arr.tgt:
                        m[local[(k, g2)], local[(k - 1, g)]] = Ca[g, g2]
            act[(a, k - 1)] = m
    return GradedModule(A, lo, hi, dims, act, check=True)


def linear_complexes_equal(L1: LinearComplex, L2: LinearComplex) -> Optional[dict]:
    """A generator permutation identifying L1 with L2, or None.

    Generators are matched by vertex in order of appearance; the linear
    coefficients must then agree exactly.
    """
    if L1.indices != L2.indices:
        return None
    perm = {}
    for k in L1.indices:
        g1, g2 = L1.frees[k].gens, L2.frees[k].gens
        if sorted(g1) != sorted(g2):
            return None
        order2 = {}
        for j, (v, t) in enumerate(g2):
            order2.setdefault(v, []).append(j)
        used = {v: 0 for v in order2}
        p = []
        for v, t in g1:
            p.append(order2[v][used[v]])
            used[v] += 1
        perm[k] = p
    for k in L1.indices:
        if k - 1 not in perm:
            continue
        C1, C2 = L1.linear_coefficients(k), L2.linear_coefficients(k)
        for a in C1:
            if not np.array_equal(C1[a], C2[a][np.ix_(perm[k - 1], perm[k])]):
                return None
    return perm


def phi_roundtrip(M: GradedModule) -> dict:
    """phi_inverse(phi(M)) ≅ M and phi(phi_inverse(Φ(M))) = Φ(M)."""
    L = phi(M)
    d2 = L.check_d_squared()
    back = phi_inverse(L, M.algebra)
    iso = find_isomorphism(M, back) is not None
    again = phi(back)
    same = linear_complexes_equal(L, again) is not None
    return {"d_squared": d2, "linear": L.is_linear(), "module_roundtrip": iso, "complex_roundtrip": same}


# Koszulity through Φ ------------------------------------------------------------


def _phi_homology_cells(L: LinearComplex, indices, max_offset: int, margin: int = 0) -> dict:
    """dim H_k(Φ)_{d} for k in indices and k <= d <= k + max_offset within the window."""
    C = L.complex()
    out = {}
    H = C.horizon()
    for k in indices:
        top = k + max_offset
        if not math.isinf(H):
            top = min(top, int(H) - margin)
        if top < k:
            continue
        dims = C.homology_dims(k, range(k, top + 1))
        for d, row in dims.items():
            if sum(row):
                out[(k, d)] = sum(row)
    return out


def _resolve_linear(res: Resolution, limit: float) -> bool:
    lo = res.module.lo
    return all(t == lo + i for (i, t) in res.betti() if t <= limit)


def koszulity_via_phi(M: GradedModule, steps: int = 8) -> Verdict:
    """M is Koszul iff Φ(M) is exact away from its lowest index; both pipelines must agree."""
    if M.is_zero():
        return Verdict(True, True, "zero module", {"steps": steps})
    L = phi(M)
    H = L.complex().horizon()
    cells = _phi_homology_cells(L, [k for k in L.indices if k > M.lo], steps)
    via_phi = not cells
    res = resolve(M, steps)
    limit = min(H, res.horizon)
    via_res = _resolve_linear(res, limit)
    if via_phi != via_res:
        raise PipelineError("koszulity", f"Φ says {via_phi}, the resolution says {via_res}")
    ev = ext_regularity(M, steps, res)
    exact = ev.exact or not via_res
    bound = {"steps": steps, "generated_in": M.lo, "horizon": "inf" if math.isinf(limit) else int(limit)}
    if cells:
        bound["first_homology"] = [list(k) for k in sorted(cells)[:1]]
    return Verdict(via_phi, exact, "Φ exact off the lowest index" if via_phi else "Φ has homology off the lowest index", bound)


def phi_bounded_homology_check(M: GradedModule, K: int = 8, steps: int = 8, margin: int = 2) -> dict:
    """Φ(M) has no homology at indices above the truncation index."""
    if M.is_zero():
        return {"ok": True, "vacuous": True}
    L = phi(M)
    s = koszul_truncation_index(M, K, steps)["s"]
    idx = L.indices
    cells = _phi_homology_cells(L, idx, steps, margin)
    beyond = sorted(k for k in cells if k[0] > s)
    return {
        "ok": not beyond,
        "truncation_index": s,
        "homology": [{"index": k, "degree": d, "dim": v} for (k, d), v in sorted(cells.items())],
        "violations": [list(k) for k in beyond],
        "bound": {"steps": steps, "margin": margin},
    }


# linear subcomplexes and approximations ------------------------------------------


def _restrict_map(f: GradedMap, S: GradedModule, T: GradedModule) -> GradedMap:
    return GradedMap(S, T, {k: m for k, m in f.mats.items() if S.lo <= k[0] <= S.hi})


def shift_map(f: GradedMap, S: GradedModule, T: GradedModule, i: int) -> GradedMap:
    return GradedMap(S, T, {(d - i, v): m for (d, v), m in f.mats.items()})


def shift_complex(C: GradedComplex, i: int) -> GradedComplex:
    terms = {k: shift(M, i) for k, M in C.terms.items()}
    diffs = {k: shift_map(f, terms[k], terms[k - 1], i) for k, f in C.diffs.items()}
    return GradedComplex(C.algebra, terms, diffs)


def linear_subcomplex(C: GradedComplex, K: int = 8, steps: int = 8) -> tuple:
    """(L, report) with L_j = (C_j)_{>= n+j} and n = max_j (s_j - j)."""
    idx = C.indices
    if not idx:
        return C, {"n": 0, "quotient_dims": {}, "koszul_terms": {}, "subcomplex": True}
    s = {}
    for j in idx:
        try:
            s[j] = koszul_truncation_index(C.terms[j], K, steps)["s"]
        except WindowError as exc:
            raise PipelineError("linear_subcomplex", f"truncation index of term {j}: {exc}") from None
    n = max(s[j] - j for j in idx)
    terms, diffs = {}, {}
    for j in idx:
        terms[j] = truncate_below(C.terms[j], n + j)
    for j in idx:
        if j - 1 in terms and j in C.diffs:
            diffs[j] = _restrict_map(C.diffs[j], terms[j], terms[j - 1])
    L = GradedComplex(C.algebra, terms, diffs)
    ok_sub = all(d.commutes() for d in diffs.values()) and L.check_d_squared()
    koszul_terms = {}
    for j in idx:
        T = shift(terms[j], n + j)
        if T.is_zero():
            koszul_terms[j] = True
            continue
        res = resolve(T, steps)
        koszul_terms[j] = all(t == i for (i, t) in res.betti() if t <= res.horizon)
    quotient_dims = {j: truncate_above(C.terms[j], n + j).total_dim for j in idx}
    report = {"n": n, "truncation_indices": s, "subcomplex": ok_sub, "koszul_terms": koszul_terms,
              "quotient_dims": quotient_dims}
    return L, report


@dataclass
class Approximation:
    P: LinearComplex
    mu: dict                 # k -> GradedMap P_k -> C_k
    complete: bool           # resolution of the last kernel finished
    certificates: dict


def _block_map(S: GradedModule, T: GradedModule, left: GradedMap, right: Optional[GradedMap], sign: int) -> GradedMap:
    """(m, z) ↦ left(m) + sign·right(z) from S = X ⊕ Z (coordinates concatenated)."""
    f = S.field
    mats = {}
    n = S.algebra.n_vertices
    for d in range(S.lo, S.hi + 1):
        if not T.known(d):
            continue
        for v in range(n):
            a = left.source.dim(d, v) if left.source.known(d) else 0
            m = np.zeros((T.dim(d, v), S.dim(d, v)), dtype=np.int64)
            if a:
                m[:, :a] = left.mat(d, v)
            if right is not None and S.dim(d, v) > a:
                m[:, a:] = sign * right.mat(d, v)
            mats[(d, v)] = m % f.p
    return GradedMap(S, T, mats)


def totally_linear_approximation(C: GradedComplex, max_length: int = 6, margin: int = 2,
                                 steps: int = 8) -> Approximation:
    """Linear complex of projectives P with a termwise surjective quasi-isomorphism μ: P -> C.

    Built from the bottom: P_a covers C_a, and P_j covers the pullback of
    C_j -> C_{j-1} <- ker(P_{j-1} -> P_{j-2}).
    """
    G = C.algebra
    f = G.field
    idx = C.indices
    if not idx:
        return Approximation(LinearComplex(G, {}, {}), {}, True, {"linear": True, "surjective": True, "cone_exact": True})
    for j in idx:
        tops = top_quotient(C.terms[j])
        if any(tops.dim(d) for d in range(tops.lo, tops.hi + 1) if d != j):
            raise PipelineError("approximation", f"term {j} is not generated in degree {j}")
    a, b = idx[0], idx[-1]
    frees, images, mu = {}, {}, {}
    P0, pi0 = minimal_cover(C.terms[a])
    frees[a], images[a], mu[a] = P0, [], pi0
    complete = False
    j = a + 1
    while j <= b + max_length:
        prevP = frees[j - 1]
        if j - 1 == a:
            Z, zinc = prevP, identity_map(prevP)
        else:
            dprev = prevP.map_from_images(frees[j - 2], images[j - 1])
            Z, zinc = kernel(dprev)
        Cj = C.term(j)
        Cj1 = C.term(j - 1)
        S = direct_sum_exact(Cj, Z)
        if Cj.is_zero():
            left = GradedMap(zero_module(G), Cj1, {})
        else:
            left = C.diff(j)
        right = mu[j - 1].compose(zinc)
        psi = _block_map(S, Cj1, left, right, -1)
        W, winc = kernel(psi)
        Q, piW = minimal_cover(W)
        if not Q.gens and j > b:
            complete = True
            break
        mimgs, dimgs = [], []
        for img, (v, t) in zip(Q.images_of(piW), Q.gens):
            full = winc.mat(t, v) @ img % f.p
            c = Cj.dim(t, v) if Cj.known(t) else 0
            mimgs.append(full[:c])
            z = full[c:]
            dimgs.append(zinc.mat(t, v) @ z % f.p if z.size else np.zeros(prevP.dim(t, v), dtype=np.int64))
        frees[j] = Q
        images[j] = dimgs
        mu[j] = Q.map_from_images(Cj, mimgs) if not Cj.is_zero() else GradedMap(Q, Cj, {})
        j += 1
    P = LinearComplex(G, frees, images)
    Pc = P.complex()
    linear = P.is_linear()
    surjective = True
    for k in idx:
        for (d, v), m in mu[k].mats.items():
            if C.terms[k].known(d) and rank(f, m) != C.terms[k].dim(d, v):
                surjective = False
    mu_ok = all(mu[k].commutes() for k in mu)
    chain = True
    for k in mu:
        if k - 1 in mu and k in Pc.diffs and k in C.diffs:
            lhs = C.diffs[k].compose(mu[k])
            rhs = mu[k - 1].compose(Pc.diffs[k])
            for key, m in lhs.mats.items():
                if key in rhs.mats and not np.array_equal(m, rhs.mats[key]):
                    chain = False
    cone_ok, cone_dim = cone_exact_in_window(mu, Pc, C, margin, top_index=None if complete else max(frees))
    certs = {"linear": linear, "surjective": surjective, "chain_map": chain and mu_ok, "d_squared": Pc.check_d_squared(),
             "cone_exact": cone_ok, "cone_homology_in_window": cone_dim, "complete": complete}
    return Approximation(P, mu, complete, certs)


def cone_exact_in_window(mu: dict, P: GradedComplex, C: GradedComplex, margin: int,
                         top_index: Optional[int] = None) -> tuple:
    Z = cone(mu, P, C)
    H = min(Z.horizon(), P.horizon(), C.horizon())
    lo = min((m.lo for m in Z.terms.values() if not m.is_zero()), default=0)
    if math.isinf(H):
        hi = max((m.hi for m in Z.terms.values() if not m.is_zero()), default=lo)
    else:
        hi = int(H) - margin
    total = 0
    for k in Z.indices:
        if top_index is not None and k > top_index:
            continue
        dims = Z.homology_dims(k, range(lo, hi + 1))
        total += sum(sum(r) for r in dims.values())
    return total == 0, total


def realize(B: GradedComplex, A: PresentedAlgebra, K: int = 8, steps: int = 8, margin: int = 2,
            max_length: int = 6) -> tuple:
    """Density pipeline: linear subcomplex, linear approximation, Φ^{-1}.

    Returns (M, certificates).  The approximation is taken of L reindexed so
    that its term j is generated in degree j.
    """
    certs = {}
    if not B.check_d_squared():
        raise PipelineError("input", "d² ≠ 0")
    L, sub = linear_subcomplex(B, K, steps)
    certs["linear_subcomplex"] = sub
    if not sub["subcomplex"]:
        raise PipelineError("linear_subcomplex", "differentials do not restrict")
    n = sub["n"]
    Lr = shift_complex(L, n)
    if not Lr.indices:
        M = zero_module(A)
        certs["approximation"] = {"empty": True}
        certs["qgr_zero"] = True
        certs["discarded_total_dim"] = sum(sub["quotient_dims"].values())
        certs["ok"] = True
        return M, certs
    approx = totally_linear_approximation(Lr, max_length, margin, steps)
    certs["approximation"] = approx.certificates
    if not (approx.certificates["linear"] and approx.certificates["surjective"]):
        raise PipelineError("approximation", f"certificates failed: {approx.certificates}")
    M = phi_inverse(approx.P, A)
    back = phi(M, hi=_common_hi(approx.P))
    perm = linear_complexes_equal(back, approx.P)
    certs["phi_matches_approximation"] = perm is not None
    if perm is not None:
        Bc = back.complex()
        iota = {}
        for k in back.indices:
            Fk, Tk = back.frees[k], approx.P.frees[k]
            iota[k] = Fk.map_from_images(Tk, [Tk.generator_vector(perm[k][g]) for g in range(len(Fk.gens))])
        comp = {k: approx.mu[k].compose(iota[k]) for k in iota if k in approx.mu}
        ok, dim = cone_exact_in_window(comp, Bc, Lr, margin, top_index=None if approx.complete else max(back.indices))
        certs["cone_exact"] = ok
        certs["cone_homology_in_window"] = dim
    else:
        certs["cone_exact"] = False
    certs["discarded_total_dim"] = sum(sub["quotient_dims"].values())
    certs["qgr_zero"] = all(T.closed for T in B.terms.values())
    certs["shift"] = n
    certs["ok"] = bool(certs["phi_matches_approximation"] and certs["cone_exact"])
    return M, certs


def _common_hi(L: LinearComplex) -> Optional[int]:
    his = [F.hi for F in L.frees.values() if F.gens and not F.closed]
    return min(his) if his else None


def complex_from_linear(L: LinearComplex) -> GradedComplex:
    return L.complex()


def single_term(M: GradedModule, index: int = 0) -> GradedComplex:
    return GradedComplex(M.algebra, {index: M}, {})


def two_term(f: GradedMap, index: int = 1) -> GradedComplex:
    """f: X -> Y placed at indices (index, index - 1)."""
    return GradedComplex(f.source.algebra, {index: f.source, index - 1: f.target}, {index: f})


def resolution_complex(res: Resolution) -> GradedComplex:
    terms = {i: st.free for i, st in enumerate(res.steps)}
    diffs = {i: res.steps[i].diff for i in range(1, len(res.steps))}
    return GradedComplex(res.module.algebra, terms, diffs)


# complex description documents ----------------------------------------------------


def complex_to_doc(C: GradedComplex) -> dict:
    """Terms as module documents (algebra stored once) plus per-degree,
    per-vertex differential matrices."""
    terms = [{"index": i, "module": module_to_doc(C.terms[i], algebra_doc="complex")} for i in C.indices]
    diffs = []
    for i in C.indices:
        if i - 1 not in C.terms or C.terms[i - 1].is_zero():
            continue
        d = C.diff(i)
        for (deg, v), m in sorted(d.mats.items()):
            if m.size and np.any(m):
                diffs.append({"index": i, "degree": deg, "vertex": v, "matrix": m.tolist()})
    return {"algebra": C.algebra.to_doc(), "terms": terms, "differentials": diffs}


def complex_from_doc(doc: dict, algebra: Optional[PresentedAlgebra] = None) -> GradedComplex:
    """Load a complex document; d² = 0 and degree-0 linearity are validated."""
    try:
        A = algebra if algebra is not None else algebra_from_doc(doc["algebra"])
        terms = {int(t["index"]): module_from_doc(t["module"], A) for t in doc["terms"]}
        mats: dict = {}
        for e in doc.get("differentials", []):
            i = int(e["index"])
            if i not in terms or i - 1 not in terms:
                raise ModuleError(f"differential {i} has no source or target term")
            mats.setdefault(i, {})[(int(e["degree"]), int(e["vertex"]))] = np.array(e["matrix"], dtype=np.int64)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModuleError):
            raise
        raise ModuleError(f"malformed complex document: {exc!r}") from None
    diffs = {}
    for i in terms:
        if i - 1 in terms:
            src, tgt = terms[i], terms[i - 1]
            for (deg, v), m in mats.get(i, {}).items():
                want = (tgt.dim(deg, v), src.dim(deg, v))
                if m.shape != want:
                    raise ModuleError(f"differential {i} at ({deg}, {v}) has shape {m.shape}, expected {want}")
            diffs[i] = GradedMap(src, tgt, mats.get(i, {}))
            if not diffs[i].commutes():
                raise ModuleError(f"differential {i} is not a module map")
    C = GradedComplex(A, terms, diffs)
    if not C.check_d_squared():
        raise ModuleError("d² ≠ 0 in complex document")
    return C


# stable homs ---------------------------------------------------------------------


def _flatten(g: GradedMap, keys: list) -> np.ndarray:
    parts = [g.mats[k].reshape(-1) for k in keys if k in g.mats]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def stable_hom_dim(X: GradedModule, Y: GradedModule) -> int:
    """dim of degree-0 Hom(X, Y) modulo maps factoring through the cover of Y."""
    f = X.field
    homs = hom_degree_zero(X, Y)
    if not homs:
        return 0
    P, pi = minimal_cover(Y)
    keys = sorted(homs[0].mats)
    through = [pi.compose(h) for h in hom_degree_zero(X, P)] if P.gens else []
    full = np.array([_flatten(h, keys) for h in homs])
    fac = np.array([_flatten(h, keys) for h in through]) if through else np.zeros((0, full.shape[1]), dtype=np.int64)
    return rank(f, full) - (rank(f, fac) if fac.shape[0] else 0)


def stable_hom_stabilized(M: GradedModule, N: GradedModule, max_k: int = 4) -> dict:
    rM, rN = resolve(M, max_k, cap=None), resolve(N, max_k, cap=None)
    seq = []
    for k in range(max_k + 1):
        X = rM.syzygy_module(k) if k <= len(rM.steps) else zero_module(M.algebra)
        Y = rN.syzygy_module(k) if k <= len(rN.steps) else zero_module(N.algebra)
        if X.is_zero() or Y.is_zero():
            seq.append(0)
            continue
        seq.append(stable_hom_dim(X, Y))
    index = None
    for k in range(len(seq) - 1):
        if all(x == seq[k] for x in seq[k:]):
            index = k
            break
    return {"dims": seq, "stabilization_index": index, "bound": {"max_k": max_k}}


# F(M) and the weakly Koszul criterion ------------------------------------------------


def ext_module(M: GradedModule, steps: int = 6, res: Optional[Resolution] = None) -> GradedModule:
    """F(M) = ⊕ Ext^i(M, A_0) graded by i, as a module over koszul_side(A).

    The arrow a acts from F_{i-1} to F_i by the transpose of the linear part of
    the differential d_i.
    """
    A = M.algebra
    G = koszul_side(A)
    res = res or resolve(M, steps)
    n = A.n_vertices
    last = len(res.steps) - 1
    dims, local = {}, {}
    for i in range(last + 1):
        counters = [0] * n
        for g, (v, _) in enumerate(res.steps[i].free.gens):
            local[(i, g)] = counters[v]
            counters[v] += 1
        dims[i] = tuple(counters)
    act = {}
    for i in range(1, last + 1):
        C = res.linear_part(i)
        for a, arr in enumerate(A.quiver.arrows):
            m = np.zeros((dims[i][arr.tgt], dims[i - 1][arr.src]), dtype=np.int64)
            for g, g2 in zip(*np.nonzero(C[a])):
                m[local[(i, g2)], local[(i - 1, g)]] = C[a][g, g2]
            act[(a, i - 1)] = m
    closed = res.terminated
    return GradedModule(G, 0, last, dims, act, closed=closed, check=True)


def weakly_koszul_via_ext_module(M: GradedModule, steps: int = 6) -> Verdict:
    """M is weakly Koszul iff F(M) is Koszul (generated in degree 0, linear)."""
    A = M.algebra
    kos = is_koszul(A, steps)
    if not (kos.value and kos.exact):
        return Verdict(None, False, "algebra not certified Koszul", {"steps": steps})
    F = ext_module(M, steps)
    res = resolve(F, steps)
    linear = all(t == i for (i, t) in res.betti() if t <= res.horizon)
    return Verdict(linear, F.closed and res.terminated, "Ext-module resolution", {"steps": steps, "horizon": F.hi})
