"""Local cohomology through the truncation tower, CM-regularity and friends.

Γ^i(M) is approximated by Ext^i(A/A_{>=k}, M) for the top three tower heights
k = K-2, K-1, K.  Each Ext group is the cohomology of Hom(P, M) for the minimal
resolution P of A/A_{>=k}; the tower maps come from lifting the surjections
A/A_{>=k+1} -> A/A_{>=k} to chain maps between resolutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .complexes import GradedComplex, homology
from .exactla import image_basis, kernel_basis, rank, solve
from .gradedmod import (
    FreeModule,
    GradedMap,
    GradedModule,
    ModuleError,
    WindowError,
    isomorphic_up_to_shift,
    projective,
    regular_module,
    shift,
    semisimple,
    simple,
    truncate_below,
)
from .presentation import PresentedAlgebra, opposite, truncated_quotient
from .resolve import (
    Resolution,
    Verdict,
    _json_num,
    _periodicity,
    _window_cap,
    ext_regularity,
    is_koszul,
    resolve,
)

INF = math.inf
NEG_INF = -math.inf


class HypothesisError(RuntimeError):
    """A verification that the theory guarantees has failed."""


# Hom(P, M) for free P ---------------------------------------------------------


def _hom_offsets(P: FreeModule, M: GradedModule, n: int) -> tuple:
    offs, pos = [], 0
    for v, t in P.gens:
        offs.append(pos)
        pos += M.dim(t + n, v)
    return offs, pos


def hom_pullback(src_gens, images, target: FreeModule, M: GradedModule, n: int) -> np.ndarray:
    """Matrix of Hom(target, M)_n -> Hom(src, M)_n, φ ↦ φ∘f.

    f sends the source generator (v', t') to images[g'] in target at (t', v').
    """
    A = M.algebra
    f = M.field
    row_off, rows = [], 0
    for v, t in src_gens:
        row_off.append(rows)
        rows += M.dim(t + n, v)
    col_off, cols = _hom_offsets(target, M, n)
    out = np.zeros((rows, cols), dtype=np.int64)
    for g2, (v2, t2) in enumerate(src_gens):
        r = M.dim(t2 + n, v2)
        if r == 0:
            continue
        y = images[g2]
        labs = target.labels.get((t2, v2), [])
        for j in np.nonzero(y)[0]:
            g, i = labs[j]
            v, t = target.gens[g]
            c = M.dim(t + n, v)
            if c == 0:
                continue
            _, path = A.basis[t2 - t][i]
            block = M.path_action(path, t + n, v)
            o, p = row_off[g2], col_off[g]
            out[o:o + r, p:p + c] = (out[o:o + r, p:p + c] + int(y[j]) * block) % f.p
    return out


def _free(res: Resolution, j: int) -> Optional[FreeModule]:
    if j < 0:
        return None
    if j < len(res.steps):
        return res.steps[j].free
    return None


def _coboundary(res: Resolution, j: int, M: GradedModule, n: int) -> np.ndarray:
    """δ_j : Hom(P_{j-1}, M)_n -> Hom(P_j, M)_n."""
    Pj, Pj1 = _free(res, j), _free(res, j - 1)
    rows = _hom_offsets(Pj, M, n)[1] if Pj is not None else 0
    cols = _hom_offsets(Pj1, M, n)[1] if Pj1 is not None else 0
    if Pj is None or Pj1 is None or rows == 0 or cols == 0:
        return np.zeros((rows, cols), dtype=np.int64)
    return hom_pullback(Pj.gens, res.steps[j].images, Pj1, M, n)


@dataclass
class ExtPiece:
    dim: int
    cycles: np.ndarray      # rows spanning ker δ_{i+1}
    boundaries: np.ndarray  # rows spanning im δ_i


def ext_piece(res: Resolution, i: int, M: GradedModule, n: int) -> ExtPiece:
    f = M.field
    out_m = _coboundary(res, i + 1, M, n)
    in_m = _coboundary(res, i, M, n)
    width = _hom_offsets(_free(res, i), M, n)[1] if _free(res, i) is not None else 0
    Z = kernel_basis(f, out_m) if out_m.shape[0] else np.eye(width, dtype=np.int64)
    B = image_basis(f, in_m) if in_m.size else np.zeros((0, width), dtype=np.int64)
    return ExtPiece(Z.shape[0] - B.shape[0], Z, B)


# the truncation tower -----------------------------------------------------------


@dataclass
class TowerLevel:
    k: int
    module: GradedModule
    res: Resolution
    lift: list = dc_field(default_factory=list)  # lift[j] = images of P^{(k)}_j gens in P^{(k-1)}_j


class Tower:
    """Resolutions of A/A_{>=k} for k = K-2..K with chain maps between neighbours."""

    def __init__(self, A: PresentedAlgebra, K: int, max_index: int):
        if K < 3:
            raise ValueError("tower height must be at least 3")
        if K > A.degree_bound:
            raise WindowError(f"tower height {K} exceeds the degree bound {A.degree_bound}")
        self.algebra, self.K, self.max_index = A, K, max_index
        self.levels = {}
        # one window for all levels, so the chain maps between them fit
        cap = _window_cap(truncated_quotient(A, K))
        for k in range(K - 2, K + 1):
            X = truncated_quotient(A, k)
            self.levels[k] = TowerLevel(k, X, resolve(X, max_index + 1, cap=cap))
        for k in range(K - 1, K + 1):
            self.levels[k].lift = self._lift(self.levels[k], self.levels[k - 1])

    @property
    def heights(self) -> list:
        return sorted(self.levels)

    def _lift(self, hi: TowerLevel, lo: TowerLevel) -> list:
        f = self.algebra.field
        out = []
        rh, rl = hi.res, lo.res
        # α_0: generators of A/A_{>=k} are the vertex idempotents in degree 0
        P0h, P0l = rh.steps[0].free, rl.steps[0].free
        imgs = []
        for v, t in P0h.gens:
            g = P0l.gens.index((v, t))
            imgs.append(P0l.generator_vector(g))
        out.append(imgs)
        prev_map = P0h.map_from_images(P0l, imgs)
        for j in range(1, len(rh.steps)):
            Ph = rh.steps[j].free
            if j >= len(rl.steps):
                imgs = [np.zeros(0, dtype=np.int64) for _ in Ph.gens]
                out.append(imgs)
                break
            Pl = rl.steps[j].free
            dl = rl.steps[j].diff
            imgs = []
            for (v, t), y0 in zip(Ph.gens, rh.steps[j].images):
                y = prev_map.mat(t, v) @ y0 % f.p
                if not np.any(y):
                    imgs.append(np.zeros(Pl.dim(t, v), dtype=np.int64))
                    continue
                x = solve(f, dl.mat(t, v), y[:, None])
                if x is None:
                    raise HypothesisError("tower map does not lift through the resolution")
                imgs.append(x[:, 0] % f.p)
            out.append(imgs)
            prev_map = Ph.map_from_images(Pl, imgs) if Ph.gens else GradedMap(Ph, Pl, {})
        return out

    def generator_degrees(self, k: int, j: int) -> list:
        P = _free(self.levels[k].res, j)
        return [t for _, t in P.gens] if P is not None else []

    def known_index(self, k: int, j: int) -> bool:
        """Whether P_j of level k is fully known (computed or provably zero)."""
        res = self.levels[k].res
        return j < len(res.steps) or res.terminated


_TOWERS: dict = {}


def get_tower(A: PresentedAlgebra, K: int, max_index: int) -> Tower:
    key = (id(A), K, max_index)
    hit = _TOWERS.get(key)
    if hit is None or hit.algebra is not A:
        hit = Tower(A, K, max_index)
        _TOWERS[key] = hit
    return hit


def default_max_index(A: PresentedAlgebra) -> int:
    """Cohomological indices worth computing: 0 for finite algebras (the top
    tower level is free), otherwise the number of arrows."""
    return 1 if A.finite else max(1, A.n_arrows)


# local cohomology table ---------------------------------------------------------


@dataclass
class Cell:
    dims: tuple          # dimension at heights K-2, K-1, K (None where unknown)
    stable: bool
    valid: bool

    @property
    def dim(self) -> Optional[int]:
        return self.dims[-1]


@dataclass
class LocalCohomologyTable:
    K: int
    indices: list
    degrees: list
    cells: dict          # (i, d) -> Cell

    def value(self, i: int, d: int) -> Optional[int]:
        c = self.cells.get((i, d))
        return c.dim if c and c.stable and c.valid else None

    def nonzero_stable(self) -> list:
        return sorted(k for k, c in self.cells.items() if c.stable and c.valid and c.dim)

    def all_settled(self) -> bool:
        return all(c.stable and c.valid for c in self.cells.values())

    def to_json(self) -> dict:
        return {
            "tower_height": self.K,
            "cells": [{"i": i, "degree": d, "dims": list(c.dims), "stable": c.stable, "valid": c.valid}
                      for (i, d), c in sorted(self.cells.items())],
        }


def _cell_valid(tower: Tower, M: GradedModule, i: int, n: int) -> bool:
    for k in tower.heights:
        res = tower.levels[k].res
        for j in (i - 1, i, i + 1):
            if j < 0:
                continue
            if not tower.known_index(k, j):
                return False
            P = _free(res, j)
            if P is None:
                continue
            if not res.terminated and not math.isinf(res.horizon):
                # generators above the resolution horizon are unknown
                if not M.closed or M.hi - n > res.horizon:
                    return False
            if not M.closed and any(t + n > M.hi for t in tower.generator_degrees(k, j)):
                return False
    return True


def _ext_iso(tower: Tower, k: int, i: int, M: GradedModule, n: int, lo: ExtPiece, hi: ExtPiece) -> bool:
    """Whether the tower map Ext^i(X_{k-1}, M)_n -> Ext^i(X_k, M)_n is bijective."""
    if lo.dim != hi.dim:
        return False
    if lo.dim == 0:
        return True
    f = M.field
    res_hi, res_lo = tower.levels[k].res, tower.levels[k - 1].res
    Ph, Pl = _free(res_hi, i), _free(res_lo, i)
    pull = hom_pullback(Ph.gens, tower.levels[k].lift[i], Pl, M, n)
    moved = f.matmul(pull, lo.cycles.T).T
    stacked = np.concatenate([moved, hi.boundaries]) if hi.boundaries.shape[0] else moved
    return rank(f, stacked) - hi.boundaries.shape[0] == hi.dim


def local_cohomology(M: GradedModule, K: int = 8, indices=None, degrees=None,
                     max_index: Optional[int] = None) -> LocalCohomologyTable:
    A = M.algebra
    mi = default_max_index(A) if max_index is None else max_index
    idx = list(range(mi + 1)) if indices is None else list(indices)
    tower = get_tower(A, K, max(max(idx, default=0), mi))
    if degrees is None:
        if M.is_zero():
            degrees = []
        else:
            tmax = max((t for k in tower.heights for j in range(max(idx) + 2)
                        for t in tower.generator_degrees(k, j)), default=0)
            degrees = range(M.lo - tmax, M.hi + 1)
    degrees = list(degrees)
    cells = {}
    for i in idx:
        for n in degrees:
            if M.is_zero():
                cells[(i, n)] = Cell((0, 0, 0), True, True)
                continue
            if not _cell_valid(tower, M, i, n):
                cells[(i, n)] = Cell((None, None, None), False, False)
                continue
            pieces = {k: ext_piece(tower.levels[k].res, i, M, n) for k in tower.heights}
            dims = tuple(pieces[k].dim for k in tower.heights)
            stable = len(set(dims)) == 1 and all(
                _ext_iso(tower, k, i, M, n, pieces[k - 1], pieces[k]) for k in tower.heights[1:])
            cells[(i, n)] = Cell(dims, stable, True)
    return LocalCohomologyTable(K, idx, degrees, cells)


def cm_regularity(M: GradedModule, K: int = 8, table: Optional[LocalCohomologyTable] = None) -> Verdict:
    """Least p with Γ^i(M)_{>=p+1-i} = 0, read off the stable cells.

    For a closed (finite length) module Γ^0 = M and Hom(P_i, M)_n = 0 once
    n + i exceeds the top degree, so the value is exactly the top degree; the
    table must then agree with it.
    """
    if M.is_zero():
        return Verdict(NEG_INF, True, "zero module", {"tower_height": K})
    table = table or local_cohomology(M, K)
    nz = table.nonzero_stable()
    observed = max((d + i for i, d in nz), default=NEG_INF)
    bound = {"tower_height": K, "degrees": [min(table.degrees), max(table.degrees)] if table.degrees else []}
    unsettled = [k for k, c in table.cells.items() if not (c.stable and c.valid)]
    if unsettled:
        bound["unsettled_cells"] = len(unsettled)
    if M.closed:
        if observed != M.hi:
            raise HypothesisError(f"local cohomology gives {observed}, but a finite-length module has regularity {M.hi}")
        return Verdict(M.hi, True, "finite length: top degree", bound)
    return Verdict(observed, False, "observed on stable cells", bound)


# Ext(-, A) via the dualized resolution ------------------------------------------


def dual_resolution_complex(res: Resolution, Aop: PresentedAlgebra, upto: int) -> GradedComplex:
    """Hom_A(P, A) as a complex of free A^op-modules, homological index -j for P_j^*."""
    f = Aop.field
    steps = min(upto, len(res.steps) - 1)
    duals = {}
    los = []
    for j in range(steps + 1):
        gens = [(v, -t) for v, t in res.steps[j].free.gens]
        if gens:
            los.append(min(t for _, t in gens))
    H = (min(los) + Aop.degree_bound) if (los and not Aop.finite) else None
    for j in range(steps + 1):
        gens = [(v, -t) for v, t in res.steps[j].free.gens]
        duals[j] = FreeModule(Aop, gens, hi=H)
    diffs = {}
    for j in range(steps):
        src, tgt = duals[j], duals[j + 1]
        if not src.gens or not tgt.gens:
            continue
        P_next = res.steps[j + 1].free
        P_cur = res.steps[j].free
        images = [np.zeros(tgt.dim(-t, v), dtype=np.int64) for v, t in P_cur.gens]
        for g2, (v2, t2) in enumerate(P_next.gens):
            y = res.steps[j + 1].images[g2]
            labs = P_cur.labels.get((t2, v2), [])
            for pos in np.nonzero(y)[0]:
                g, i = labs[pos]
                v, t = P_cur.gens[g]
                e = t2 - t
                _, path = res.module.algebra.basis[e][i]
                if not path:
                    vec = np.zeros(Aop.dim(0), dtype=np.int64)
                    vec[Aop.index[0][(v2, ())]] = 1
                else:
                    vec = Aop.normal_form(tuple(reversed(path)))
                where = tgt.label_pos[(-t, v)]
                for b in np.nonzero(vec)[0]:
                    images[g][where[(g2, int(b))]] += int(y[pos]) * int(vec[b])
        images = [x % f.p for x in images]
        diffs[-j] = src.map_from_images(tgt, images)
    terms = {-j: duals[j] for j in duals}
    return GradedComplex(Aop, terms, {k: v for k, v in diffs.items()})


def _as_closed(M: GradedModule) -> GradedModule:
    return GradedModule(M.algebra, M.lo, M.hi, M.dims, M.act, closed=True)


def dual_module(N: GradedModule, A: PresentedAlgebra) -> GradedModule:
    """k-dual of a closed module over A^op, as a left A-module with reversed grading."""
    if not N.closed:
        raise WindowError("dual of an open module is not determined")
    if N.is_zero():
        return GradedModule(A, 0, -1, {}, {})
    dims = {-d: N.dims[d] for d in range(N.lo, N.hi + 1)}
    act = {}
    for a in range(A.n_arrows):
        for d in range(N.lo, N.hi):
            act[(a, -d - 1)] = N.act[(a, d)].T
    return GradedModule(A, -N.hi, -N.lo, dims, act, check=True)


def _ext_into_algebra(M: GradedModule, steps: int) -> tuple:
    """([(j, H_j)], resolution) with H_j = Ext^j(M, A) as A^op-modules, j < steps."""
    A = M.algebra
    Aop = opposite(A)
    res = resolve(M, steps)
    C = dual_resolution_complex(res, Aop, steps)
    out = []
    last = len(res.steps) - 1 if res.terminated else len(res.steps) - 2
    for j in range(last + 1):
        H = homology(C, -j)
        out.append((j, H))
    return out, res, Aop


def _simple_shape(H: GradedModule) -> Optional[tuple]:
    """(vertex, degree) when H is one-dimensional."""
    if H.is_zero() or H.total_dim != 1:
        return None
    for d in range(H.lo, H.hi + 1):
        for v, x in enumerate(H.dims[d]):
            if x:
                return v, d
    return None


def selfinjective_certificate(A: PresentedAlgebra) -> Optional[dict]:
    """For finite A: u -> (v, s) with D(e_u A) ≅ A e_v moved by s, or None."""
    if not A.finite:
        return None
    Aop = opposite(A)
    out = {}
    for u in range(A.n_vertices):
        D = dual_module(projective(Aop, u, 0), A)
        hit = None
        for v in range(A.n_vertices):
            s = isomorphic_up_to_shift(projective(A, v, 0), D)
            if s is not None:
                hit = (v, s)
                break
        if hit is None:
            return None
        out[u] = hit
    return out


def _ext_profile(A: PresentedAlgebra, steps: int) -> dict:
    """Per simple: list of (j, shape-or-dims) over computed indices, and exactness."""
    out = {}
    selfinj = selfinjective_certificate(A)
    for v in range(A.n_vertices):
        S = simple(A, v, 0)
        exts, res, _ = _ext_into_algebra(S, steps)
        nonzero = [(j, H) for j, H in exts if H.total_dim]
        if A.finite:
            if res.terminated:
                exact = True
            elif selfinj is not None:
                exact = True
            else:
                per = _periodicity(res)
                covered = per is not None and len(exts) > per[1]
                exact = bool(covered and not any(j >= 1 for j, _ in nonzero))
        else:
            exact = False
        out[v] = {"nonzero": nonzero, "exact": exact, "computed": len(exts), "terminated": res.terminated}
    return out


def as_gorenstein_check(A: PresentedAlgebra, steps: int = 6) -> dict:
    """AS Gorenstein test: one index n where every Ext^n(S_i, A) is a shifted
    simple, zero elsewhere, with the analogous statement over A^op."""
    report = {"n": None, "sigma": {}, "shifts": {}, "verdict": False, "exact": False, "reasons": []}
    sides = {}
    for name, B in (("left", A), ("right", opposite(A))):
        prof = _ext_profile(B, steps)
        ns = set()
        pair, shifts = {}, {}
        ok = True
        for v, info in prof.items():
            nz = info["nonzero"]
            if len(nz) != 1:
                ok = False
                report["reasons"].append(f"{name}: simple {v} has {len(nz)} nonzero Ext groups into the algebra")
                continue
            j, H = nz[0]
            shape = _simple_shape(H)
            if shape is None:
                ok = False
                report["reasons"].append(f"{name}: Ext^{j}(S_{v}, A) is not simple")
                continue
            ns.add(j)
            pair[v], shifts[v] = shape[0], shape[1]
        if len(ns) > 1:
            ok = False
            report["reasons"].append(f"{name}: Ext concentrated in several indices {sorted(ns)}")
        if ok and sorted(pair.values()) != list(range(B.n_vertices)):
            ok = False
            report["reasons"].append(f"{name}: simples are not permuted")
        sides[name] = {"ok": ok, "n": min(ns) if ns else None, "pairing": pair, "shifts": shifts,
                       "exact": all(i["exact"] for i in prof.values())}
    left, right = sides["left"], sides["right"]
    verdict = left["ok"] and right["ok"] and left["n"] == right["n"]
    if verdict:
        # condition (iii): the two pairings are mutually inverse
        for v, u in left["pairing"].items():
            if right["pairing"].get(u) != v:
                verdict = False
                report["reasons"].append(f"pairing of simple {v} does not return")
    report.update({
        "n": left["n"],
        "sigma": {str(k): v for k, v in left["pairing"].items()},
        "tau": {str(k): v for k, v in right["pairing"].items()},
        "shifts": {str(k): v for k, v in left["shifts"].items()},
        "verdict": verdict,
        "exact": left["exact"] and right["exact"],
        "bound": {"steps": steps},
    })
    return report


# local duality ------------------------------------------------------------------


def dualizing_module(A: PresentedAlgebra, n0: int, K: int = 8) -> GradedModule:
    """D(Ext^{n0}(A/A_{>=K}, A)) as a left A-module.

    The Ext group is a finitely generated module killed by A_{>=K}, so it has
    finite length and is closed once the window covers its top degree.
    """
    X = truncated_quotient(A, K)
    Aop = opposite(A)
    res = resolve(X, n0 + 1)
    C = dual_resolution_complex(res, Aop, n0 + 1)
    E = homology(C, -n0)
    if not E.closed:
        gens = [-t for _, t in res.steps[n0].free.gens] if n0 < len(res.steps) else [0]
        if max(gens) + K - 1 > E.hi:
            raise WindowError("window too small to close the local cohomology of the algebra")
        E = _as_closed(E)
    return dual_module(E, A)


def ext_dims(M: GradedModule, N: GradedModule, j: int, degrees, res: Optional[Resolution] = None) -> dict:
    """dim Ext^j(M, N)_n for n in degrees."""
    res = res or resolve(M, j + 1)
    out = {}
    for n in degrees:
        if j < 0 or (res.terminated and j >= len(res.steps)):
            out[n] = 0
            continue
        out[n] = ext_piece(res, j, N, n).dim
    return out


def local_duality_crosscheck(M: GradedModule, i: int, K: int = 8, steps: int = 6,
                             gorenstein: Optional[dict] = None) -> dict:
    """Compare dim Γ^i(M)_{-n} with dim Ext^{n0-i}(M, D(Γ^{n0}(A)))_n on stable cells."""
    A = M.algebra
    gor = gorenstein or as_gorenstein_check(A, steps)
    if not gor["verdict"]:
        return {"ok": False, "reason": "algebra failed the AS Gorenstein check", "cells": 0}
    n0 = gor["n"]
    if M.is_zero():
        return {"ok": True, "reason": "zero module", "cells": 0, "n": n0}
    table = local_cohomology(M, K, indices=[i])
    N = dualizing_module(A, n0, K)
    res = resolve(M, max(n0 - i, 0) + 1)
    mismatches = []
    compared = 0
    for (ii, d), c in sorted(table.cells.items()):
        if not (c.stable and c.valid):
            continue
        rhs = ext_dims(M, N, n0 - i, [-d], res)[-d]
        compared += 1
        if rhs != c.dim:
            mismatches.append({"degree": d, "local": c.dim, "ext": rhs})
    return {"ok": not mismatches and compared > 0, "n": n0, "cells": compared, "mismatches": mismatches}


# truncation index and regularity report -----------------------------------------


def _is_linear(res: Resolution) -> bool:
    lo = res.module.lo
    return all(t == lo + i for (i, t) in res.betti())


def koszul_truncation_index(M: GradedModule, K: int = 8, steps: int = 8,
                            cm: Optional[Verdict] = None, koszul: Optional[Verdict] = None) -> dict:
    """s = CMreg(M) and the verification that M_{>=s}[s] resolves linearly.

    The guarantee needs a Koszul algebra; without it the outcome is only
    reported.  With it, a nonlinear truncation is a hard error.
    """
    if M.is_zero():
        raise ModuleError("truncation index of the zero module is undefined")
    A = M.algebra
    cm = cm or cm_regularity(M, K)
    koszul = koszul or is_koszul(A, steps)
    hyp = bool(koszul.value) and koszul.exact
    if math.isinf(cm.value):
        raise HypothesisError("CM-regularity is not finite inside the window; widen the degree bound")
    s = int(cm.value)
    T = shift(truncate_below(M, s), s)
    res = resolve(T, steps)
    linear = _is_linear(res)
    if hyp and not linear:
        raise HypothesisError(f"M>={s}[{s}] has a nonlinear resolution although the algebra is Koszul")
    least = None
    for s2 in range(M.lo, s + 1):
        T2 = shift(truncate_below(M, s2), s2)
        if T2.is_zero():
            continue
        if _is_linear(resolve(T2, steps)):
            least = s2
            break
    out = {
        "s": s,
        "s_exact": cm.exact,
        "linear": linear,
        "least_linear": least,
        "hypotheses": "algebra Koszul" if hyp else "hypothesis not met: algebra not Koszul",
        "bound": {"steps": steps, "tower_height": K},
    }
    return out


def _algebra_invariants(A: PresentedAlgebra, K: int, steps: int) -> tuple:
    """(is_koszul, Ext-reg A_0, CMreg A), memoized on the algebra."""
    cache = A.__dict__.setdefault("_regularity_invariants", {})
    key = (K, steps)
    if key not in cache:
        cache[key] = (is_koszul(A, steps), ext_regularity(semisimple(A, 0), steps),
                      cm_regularity(regular_module(A), K))
    return cache[key]


def _interval(v: Verdict) -> tuple:
    """Certified range of a regularity verdict; an inexact value is a lower bound."""
    if v.exact:
        return v.value, v.value
    return v.value, v.bound.get("upper", INF)


def _decide(l_lo, l_hi, r_lo, r_hi) -> dict:
    """Verdict on left <= right for quantities known to lie in intervals."""
    if l_hi <= r_lo:
        return {"holds": True, "exact": True}
    if l_lo > r_hi:
        return {"holds": False, "exact": True}
    return {"holds": bool(l_lo <= r_hi), "exact": False}


def regularity_report(M: GradedModule, K: int = 8, steps: int = 8) -> dict:
    """Ext-reg, CM-reg, truncation index and both regularity inequalities."""
    if M.is_zero():
        raise ModuleError("regularity of the zero module is undefined")
    A = M.algebra
    ext = ext_regularity(M, steps)
    cm = cm_regularity(M, K)
    kos, ext_a0, cm_a = _algebra_invariants(A, K, steps)
    trunc = koszul_truncation_index(M, K, steps, cm=cm, koszul=kos)
    e_lo, e_hi = _interval(ext)
    c_lo, c_hi = _interval(cm)
    a0_lo, a0_hi = _interval(ext_a0)
    ca_lo, ca_hi = _interval(cm_a)
    checks = {
        "ext_le_cm_plus_ext_A0": _decide(e_lo, e_hi, c_lo + a0_lo, c_hi + a0_hi),
        "cm_le_ext_plus_cm_A": _decide(c_lo, c_hi, e_lo + ca_lo, e_hi + ca_hi),
    }
    if kos.value and kos.exact and cm_a.value == 0:
        checks["equality_when_cm_A_zero"] = {"holds": ext.value == cm.value, "exact": ext.exact and cm.exact}
    return {
        "ext_reg": ext.to_json(),
        "cm_reg": cm.to_json(),
        "ext_reg_A0": ext_a0.to_json(),
        "cm_reg_A": cm_a.to_json(),
        "koszul": kos.to_json(),
        "truncation": trunc,
        "inequalities": checks,
    }


def simple_sum(A: PresentedAlgebra) -> GradedModule:
    return semisimple(A, 0)


def cm_left_right(A: PresentedAlgebra, K: int = 8) -> dict:
    left = cm_regularity(regular_module(A), K)
    right = cm_regularity(regular_module(opposite(A)), K)
    return {"left": _json_num(left.value), "right": _json_num(right.value), "agree": left.value == right.value,
            "exact": left.exact and right.exact}


__all__ = [
    "Cell", "HypothesisError", "LocalCohomologyTable", "Tower", "as_gorenstein_check", "cm_left_right",
    "cm_regularity", "dual_module", "dualizing_module", "ext_dims", "hom_pullback", "koszul_truncation_index",
    "local_cohomology", "local_duality_crosscheck", "regularity_report", "selfinjective_certificate",
]
