"""Standard test algebras and seeded random modules."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .exactla import PrimeField, random_matrix
from .gradedmod import FreeModule, GradedModule, generated_submodule, quotient_module, truncate_above
from .presentation import Arrow, PresentedAlgebra, Quiver, build_algebra, opposite, quadratic_dual

LETTERS = "xyzw"


def exterior(n: int, field: Optional[PrimeField] = None, degree_bound: int = 12) -> PresentedAlgebra:
    names = LETTERS[:n]
    q = Quiver(1, tuple(Arrow(c, 0, 0) for c in names))
    rels = [[(1, (c, c))] for c in names]
    rels += [[(1, (a, b)), (1, (b, a))] for i, a in enumerate(names) for b in names[i + 1:]]
    return build_algebra(q, rels, field, degree_bound)


def polynomial(n: int, field: Optional[PrimeField] = None, degree_bound: int = 12) -> PresentedAlgebra:
    names = LETTERS[:n]
    q = Quiver(1, tuple(Arrow(c, 0, 0) for c in names))
    rels = [[(1, (a, b)), (-1, (b, a))] for i, a in enumerate(names) for b in names[i + 1:]]
    return build_algebra(q, rels, field, degree_bound)


def truncated_loop(power: int, field: Optional[PrimeField] = None, degree_bound: int = 12) -> PresentedAlgebra:
    """k[x]/(x^power)."""
    q = Quiver(1, (Arrow("x", 0, 0),))
    return build_algebra(q, [[(1, ("x",) * power)]], field, degree_bound)


def two_vertex(field: Optional[PrimeField] = None, degree_bound: int = 12) -> PresentedAlgebra:
    """Path algebra of the quiver 0 -> 1."""
    return build_algebra(Quiver(2, (Arrow("a", 0, 1),)), [], field, degree_bound)


def koszul_side(A: PresentedAlgebra) -> PresentedAlgebra:
    """The algebra Φ lands in: the quadratic dual, read on the original quiver."""
    cached = getattr(A, "_koszul_side", None)
    if cached is None:
        cached = opposite(quadratic_dual(A))
        A._koszul_side = cached
    return cached


def standard_algebras(field: Optional[PrimeField] = None, degree_bound: int = 12) -> dict:
    E2 = exterior(2, field, degree_bound)
    E3 = exterior(3, field, degree_bound)
    K2 = truncated_loop(2, field, degree_bound)
    return {
        "k[x]/(x^2)": K2,
        "k[y]": koszul_side(K2),
        "exterior(2)": E2,
        "k[x,y]": koszul_side(E2),
        "exterior(3)": E3,
        "k[x,y,z]": koszul_side(E3),
        "k[x]/(x^3)": truncated_loop(3, field, degree_bound),
        "A2 quiver": two_vertex(field, degree_bound),
    }


def random_module(A: PresentedAlgebra, seed: int, max_degree: int = 6, max_gens: int = 2,
                  max_gen_degree: int = 2, max_relations: int = 3) -> GradedModule:
    """A free module modulo a random submodule and everything in degrees > max_degree.

    The result is closed with window inside [0, max_degree].
    """
    rng = np.random.default_rng(seed)
    f = A.field
    n = A.n_vertices
    r = int(rng.integers(1, max_gens + 1))
    gens = sorted((int(rng.integers(0, n)), int(rng.integers(0, max_gen_degree + 1))) for _ in range(r))
    F = FreeModule(A, gens, hi=None if A.finite else max_degree)
    F = truncate_above(F, max_degree + 1)
    elements = []
    for _ in range(int(rng.integers(0, max_relations + 1))):
        d = int(rng.integers(F.lo + 1, F.hi + 1)) if F.hi > F.lo else F.lo
        v = int(rng.integers(0, n))
        size = F.dim(d, v)
        if size == 0:
            continue
        vec = random_matrix(f, rng, 1, size)[0]
        elements.append((d, v, vec))
    if not elements:
        return F
    _, inc = generated_submodule(F, elements)
    bases = {key: m.T for key, m in inc.mats.items() if m.shape[1]}
    return quotient_module(F, bases)[0]


def corpus_top_degree(A: PresentedAlgebra) -> int:
    """Window cap for random modules: [0, 6] for finite algebras, tighter for
    polynomial rings in several variables so resolutions stay desk-sized."""
    if A.finite or A.n_arrows <= 1:
        return 6
    return 4 if A.n_arrows == 2 else 3


def corpus_modules(A: PresentedAlgebra, count: int = 10, base_seed: int = 0) -> list:
    out = []
    seed = base_seed
    top = corpus_top_degree(A)
    while len(out) < count:
        M = random_module(A, seed, max_degree=top)
        seed += 1
        if not M.is_zero():
            out.append(M)
    return out
