"""Quiver algebras kQ/I realized degree by degree.

Paths are tuples of arrow indices in traversal order (first arrow first).
A path w from vertex i to vertex j lies in e_j A e_i, and left
multiplication by an arrow a appends a to the path.  The basis of A_d is the
lexicographically least set of paths that is independent modulo the ideal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .exactla import PrimeField, kernel_basis, quotient


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    id: str
    src: int
    tgt: int


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple

    def __post_init__(self):
        if self.vertices < 1:
            raise PresentationError("a quiver needs at least one vertex")
        seen = set()
        for a in self.arrows:
            if a.id in seen:
                raise PresentationError(f"duplicate arrow id {a.id!r}")
            seen.add(a.id)
            if not (0 <= a.src < self.vertices and 0 <= a.tgt < self.vertices):
                raise PresentationError(f"arrow {a.id!r} has an endpoint out of range")

    @cached_property
    def index(self) -> dict:
        return {a.id: i for i, a in enumerate(self.arrows)}

    def arrow(self, i: int) -> Arrow:
        return self.arrows[i]


# a relation is a tuple of (coefficient, path of arrow ids)
Relation = tuple


def _path_ends(quiver: Quiver, path: Sequence[int]) -> tuple:
    for x, y in zip(path, path[1:]):
        if quiver.arrows[x].tgt != quiver.arrows[y].src:
            raise PresentationError(f"path {[quiver.arrows[i].id for i in path]} is not composable")
    return quiver.arrows[path[0]].src, quiver.arrows[path[-1]].tgt


class PresentedAlgebra:
    """A = kQ/I truncated at degree `degree_bound`.

    `basis[d]` lists the normal paths of degree d as (source, path) pairs and
    `act[(a, d)]` is left multiplication by arrow a as a matrix A_d -> A_{d+1}.
    """

    def __init__(self, quiver: Quiver, relations: Iterable, field: PrimeField, degree_bound: int):
        self.quiver = quiver
        self.field = field
        self.degree_bound = int(degree_bound)
        self.relations = tuple(tuple((int(c), tuple(path)) for c, path in rel) for rel in relations)
        self._rel_idx = []
        for rel in self.relations:
            self._rel_idx.append(self._check_relation(rel))
        if self.degree_bound < 2:
            raise PresentationError("degree bound must be at least 2")
        top_rel = max((len(r[0][1]) for r in self._rel_idx if r), default=0)
        if top_rel > self.degree_bound:
            raise PresentationError(f"degree bound {self.degree_bound} is below relation degree {top_rel}")
        self._build()
        self._path_cache: dict = {}

    # construction -------------------------------------------------------

    def _check_relation(self, rel) -> tuple:
        if not rel:
            raise PresentationError("empty relation")
        out = []
        ends = None
        length = None
        for c, path in rel:
            try:
                idx = tuple(self.quiver.index[x] for x in path)
            except KeyError as exc:
                raise PresentationError(f"unknown arrow {exc.args[0]!r} in relation") from None
            if len(idx) < 2:
                raise PresentationError("relations must have degree at least 2")
            if length is None:
                length = len(idx)
            elif len(idx) != length:
                raise PresentationError("inhomogeneous relation")
            e = _path_ends(self.quiver, idx)
            if ends is None:
                ends = e
            elif e != ends:
                raise PresentationError("relation terms have mismatched endpoints")
            out.append((c % self.field.p, idx))
        return tuple(out)

    def _build(self):
        f = self.field
        q = self.quiver
        n = q.vertices
        self.basis = [[(v, ()) for v in range(n)]]
        self.act = {}
        for d in range(1, self.degree_bound + 1):
            prev = self.basis[d - 1]
            cands = []
            for i, (s, w) in enumerate(prev):
                end = q.arrows[w[-1]].tgt if w else s
                for a, arr in enumerate(q.arrows):
                    if arr.src == end:
                        cands.append((w + (a,), s, i, a))
            cands.sort(key=lambda c: (c[0], c[1]))
            cidx = {(i, a): k for k, (_, _, i, a) in enumerate(cands)}
            rows = []
            for rel in self._rel_idx:
                e = len(rel[0][1])
                if e > d:
                    continue
                src = q.arrows[rel[0][1][0]].src
                lower = self.basis[d - e]
                for j, (s, w) in enumerate(lower):
                    end = q.arrows[w[-1]].tgt if w else s
                    if end != src:
                        continue
                    row = np.zeros(len(cands), dtype=np.int64)
                    for c, path in rel:
                        vec = np.zeros(len(lower), dtype=np.int64)
                        vec[j] = 1
                        for k, a in enumerate(path[:-1]):
                            vec = f.matmul(self.act[(a, d - e + k)], vec[:, None])[:, 0]
                        for i in np.nonzero(vec)[0]:
                            row[cidx[(int(i), path[-1])]] += c * int(vec[i])
                    rows.append(row % f.p)
            sub = np.array(rows, dtype=np.int64).reshape(len(rows), len(cands))
            quo = quotient(f, sub, len(cands), col_order=list(range(len(cands) - 1, -1, -1)))
            self.basis.append([(cands[c][1], cands[c][0]) for c in quo.complement_cols])
            for a in range(len(q.arrows)):
                m = np.zeros((len(quo.complement_cols), len(prev)), dtype=np.int64)
                for i in range(len(prev)):
                    k = cidx.get((i, a))
                    if k is not None:
                        m[:, i] = quo.projection[:, k]
                self.act[(a, d - 1)] = m
        self.index = [{b: i for i, b in enumerate(bs)} for bs in self.basis]

    # basic data ---------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return self.quiver.vertices

    @property
    def n_arrows(self) -> int:
        return len(self.quiver.arrows)

    def dim(self, d: int) -> int:
        if d < 0:
            return 0
        if d > self.degree_bound:
            if self.finite:
                return 0
            raise PresentationError(f"degree {d} exceeds the degree bound {self.degree_bound}")
        return len(self.basis[d])

    def dims(self) -> list:
        return [len(b) for b in self.basis]

    @cached_property
    def finite(self) -> bool:
        return len(self.basis[self.degree_bound]) == 0

    @cached_property
    def top_degree(self) -> int:
        """Largest degree with A_d != 0 inside the bound."""
        return max(d for d, b in enumerate(self.basis) if b)

    def src_of(self, d: int, i: int) -> int:
        return self.basis[d][i][0]

    def tgt_of(self, d: int, i: int) -> int:
        s, w = self.basis[d][i]
        return self.quiver.arrows[w[-1]].tgt if w else s

    def block(self, d: int, src: int, tgt: int) -> list:
        """Indices of basis elements of e_tgt A_d e_src."""
        return [i for i in range(self.dim(d)) if self.src_of(d, i) == src and self.tgt_of(d, i) == tgt]

    def hilbert_table(self) -> list:
        """H[d][i][j] = dim e_j A_d e_i."""
        n = self.n_vertices
        table = []
        for d in range(self.degree_bound + 1):
            h = np.zeros((n, n), dtype=np.int64)
            for i in range(self.dim(d)):
                h[self.src_of(d, i), self.tgt_of(d, i)] += 1
            table.append(h)
        return table

    @cached_property
    def is_quadratic(self) -> bool:
        return all(len(r[0][1]) == 2 for r in self._rel_idx)

    # arithmetic ---------------------------------------------------------

    def path_matrix(self, path: Sequence[int], d: int) -> np.ndarray:
        """Left multiplication by a path: A_d -> A_{d+len(path)}."""
        key = (tuple(path), d)
        m = self._path_cache.get(key)
        if m is None:
            if not path:
                m = np.eye(self.dim(d), dtype=np.int64)
            else:
                m = self.field.matmul(self.act[(path[-1], d + len(path) - 1)], self.path_matrix(path[:-1], d))
            self._path_cache[key] = m
        return m

    def normal_form(self, path: Sequence, src: Optional[int] = None) -> np.ndarray:
        """Coordinates in A_len of a path (arrow ids or indices)."""
        idx = tuple(self.quiver.index[x] if isinstance(x, str) else int(x) for x in path)
        if not idx:
            if src is None:
                raise PresentationError("a trivial path needs its vertex")
            e = np.zeros(self.n_vertices, dtype=np.int64)
            e[src] = 1
            return e
        s, _ = _path_ends(self.quiver, idx)
        e = np.zeros(self.n_vertices, dtype=np.int64)
        e[s] = 1
        return self.path_matrix(idx, 0) @ e % self.field.p

    def left_multiplication(self, x: np.ndarray, e: int, d: int) -> np.ndarray:
        """Matrix of y -> x*y from A_d to A_{d+e}, for x in A_e."""
        out = np.zeros((self.dim(d + e), self.dim(d)), dtype=np.int64)
        for i in np.nonzero(x)[0]:
            _, w = self.basis[e][i]
            if not w:
                v = self.basis[e][i][0]
                proj = np.diag([1 if self.tgt_of(d, j) == v else 0 for j in range(self.dim(d))])
                out = (out + int(x[i]) * proj) % self.field.p
            else:
                out = (out + int(x[i]) * self.path_matrix(w, d)) % self.field.p
        return out

    def multiply(self, x: np.ndarray, e: int, y: np.ndarray, d: int) -> np.ndarray:
        """x*y for x in A_e and y in A_d: traverse y, then x."""
        return self.field.matmul(self.left_multiplication(x, e, d), np.asarray(y)[:, None])[:, 0]

    def relation_vector(self, rel_index: int) -> tuple:
        """(degree, source vertex, coordinates in A_deg) of a relation."""
        rel = self._rel_idx[rel_index]
        d = len(rel[0][1])
        v = np.zeros(self.dim(d), dtype=np.int64)
        for c, path in rel:
            v = (v + c * self.normal_form(path)) % self.field.p
        return d, self.quiver.arrows[rel[0][1][0]].src, v

    def relation_terms(self) -> list:
        """Relations with arrow indices: list of tuples of (coeff, path)."""
        return list(self._rel_idx)

    def __repr__(self):
        return f"PresentedAlgebra(vertices={self.n_vertices}, arrows={self.n_arrows}, dims={self.dims()}, p={self.field.p})"

    # description documents ---------------------------------------------

    def to_doc(self) -> dict:
        return {
            "field": self.field.p,
            "degree_bound": self.degree_bound,
            "vertices": self.quiver.vertices,
            "arrows": [{"id": a.id, "src": a.src, "tgt": a.tgt} for a in self.quiver.arrows],
            "relations": [[{"coeff": c, "path": list(p)} for c, p in rel] for rel in self.relations],
        }


def build_algebra(quiver: Quiver, relations: Iterable, field: Optional[PrimeField] = None, degree_bound: int = 12) -> PresentedAlgebra:
    return PresentedAlgebra(quiver, relations, field or PrimeField.from_env(), degree_bound)


def quiver_from_arrows(vertices: int, arrows: Iterable) -> Quiver:
    return Quiver(vertices, tuple(Arrow(str(i), int(s), int(t)) for i, s, t in arrows))


def parse_algebra_doc(doc: dict) -> tuple:
    """Validate an algebra document; returns (quiver, relations, field, D)."""
    try:
        p = int(doc["field"]) if "field" in doc else PrimeField.from_env().p
        D = int(doc.get("degree_bound", 12))
        quiver = Quiver(int(doc["vertices"]), tuple(Arrow(str(a["id"]), int(a["src"]), int(a["tgt"])) for a in doc["arrows"]))
        rels = []
        for rel in doc.get("relations", []):
            terms = []
            for term in rel:
                terms.append((int(term["coeff"]), tuple(str(x) for x in term["path"])))
            rels.append(tuple(terms))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, PresentationError):
            raise
        raise PresentationError(f"malformed algebra document: {exc!r}") from None
    return quiver, rels, PrimeField(p), D


def algebra_from_doc(doc: dict) -> PresentedAlgebra:
    quiver, rels, field, D = parse_algebra_doc(doc)
    return PresentedAlgebra(quiver, rels, field, D)


def serialize_doc(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def load_algebra(path: str) -> PresentedAlgebra:
    with open(path) as fh:
        return algebra_from_doc(json.load(fh))


# certificates ------------------------------------------------------------


def structure_certificate(A: PresentedAlgebra, top: Optional[int] = None) -> dict:
    """Associativity and relation checks up to total degree `top`.

    For every normal path w of degree e, arrow a and degree d with
    d + e + 1 <= top, left multiplication must satisfy L(a) L(w) = L(a*w) on
    A_d.  Every relation must reduce to zero, and so must its left action.
    """
    top = min(A.degree_bound, 6) if top is None else min(int(top), A.degree_bound)
    f = A.field
    checked = 0
    failures = []
    for e in range(top):
        for i, (s, w) in enumerate(A.basis[e]):
            for a in range(A.n_arrows):
                if A.quiver.arrows[a].src != (A.quiver.arrows[w[-1]].tgt if w else s):
                    continue
                prod = A.normal_form(w + (a,)) if w else A.normal_form((a,))
                for d in range(top - e):
                    lhs = f.matmul(A.act[(a, d + e)], A.left_multiplication(np.eye(A.dim(e), dtype=np.int64)[i], e, d))
                    rhs = A.left_multiplication(prod, e + 1, d)
                    checked += 1
                    if not np.array_equal(lhs % f.p, rhs % f.p):
                        failures.append({"path": [A.quiver.arrows[x].id for x in w], "arrow": A.quiver.arrows[a].id, "degree": d})
    rel_ok = []
    for r in range(len(A.relations)):
        d, _, v = A.relation_vector(r)
        zero = not np.any(v)
        for k in range(max(0, top - d) + 1):
            zero = zero and not np.any(A.left_multiplication(v, d, k)) if d + k <= A.degree_bound else zero
        rel_ok.append(bool(zero))
    return {
        "top_degree": top,
        "associativity_checks": checked,
        "associativity_failures": failures[:10],
        "associative": not failures,
        "relations_vanish": all(rel_ok),
        "ok": not failures and all(rel_ok),
    }


def double_dual_certificate(A: PresentedAlgebra) -> dict:
    """(A^!)^! has A's quiver and Hilbert series (up to the degree bound)."""
    B = quadratic_dual(quadratic_dual(A))
    same_quiver = B.quiver == A.quiver
    same_dims = [h.tolist() for h in B.hilbert_table()] == [h.tolist() for h in A.hilbert_table()]
    same_relations = True
    if same_quiver:
        # relation spaces agree iff both relation sets vanish in the other algebra
        for X, Y in ((A, B), (B, A)):
            for rel in Y.relations:
                v = sum(c * X.normal_form(path) for c, path in rel) % X.field.p
                same_relations = same_relations and not np.any(v)
    return {"same_quiver": same_quiver, "same_hilbert_table": same_dims, "same_relations": bool(same_relations),
            "ok": bool(same_quiver and same_dims and same_relations)}


# derived algebras -------------------------------------------------------


def opposite(A: PresentedAlgebra) -> PresentedAlgebra:
    q = Quiver(A.quiver.vertices, tuple(Arrow(a.id, a.tgt, a.src) for a in A.quiver.arrows))
    rels = [tuple((c, tuple(reversed(p))) for c, p in rel) for rel in A.relations]
    return PresentedAlgebra(q, rels, A.field, A.degree_bound)


def dual_arrow_id(aid: str) -> str:
    return aid[:-1] if aid.endswith("*") else aid + "*"


def quadratic_dual(A: PresentedAlgebra, degree_bound: Optional[int] = None) -> PresentedAlgebra:
    """A^! on the opposite quiver.

    The dual path (x*, y*) pairs with the path (y, x) with coefficient 1; the
    relations of A^! span the annihilator of A's relation space.
    """
    if not A.is_quadratic:
        raise PresentationError("quadratic dual needs an algebra with only quadratic relations")
    q = A.quiver
    f = A.field
    dq = Quiver(q.vertices, tuple(Arrow(dual_arrow_id(a.id), a.tgt, a.src) for a in q.arrows))
    paths = [(x, y) for x in range(len(q.arrows)) for y in range(len(q.arrows)) if q.arrows[x].tgt == q.arrows[y].src]
    blocks: dict = {}
    for k, (x, y) in enumerate(paths):
        blocks.setdefault((q.arrows[x].src, q.arrows[y].tgt), []).append(k)
    rel_rows = []
    for rel in A.relation_terms():
        row = np.zeros(len(paths), dtype=np.int64)
        for c, path in rel:
            row[paths.index(path)] += c
        rel_rows.append(row % f.p)
    rels = []
    for key in sorted(blocks):
        cols = blocks[key]
        sub = np.array([[r[c] for c in cols] for r in rel_rows], dtype=np.int64).reshape(len(rel_rows), len(cols))
        ann = kernel_basis(f, sub)
        for phi in ann:
            terms = []
            for c, val in zip(cols, phi):
                if val:
                    y, x = paths[c]
                    terms.append((int(val), (dual_arrow_id(q.arrows[x].id), dual_arrow_id(q.arrows[y].id))))
            rels.append(tuple(terms))
    return PresentedAlgebra(dq, rels, f, A.degree_bound if degree_bound is None else degree_bound)


def truncated_quotient(A: PresentedAlgebra, k: int):
    """The left module A/A_{>=k}, concentrated in degrees [0, k-1]."""
    from .gradedmod import regular_module, truncate_above

    if not 1 <= k <= A.degree_bound:
        raise PresentationError(f"truncation height {k} outside [1, {A.degree_bound}]")
    return truncate_above(regular_module(A, k - 1), k)
