import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koszulkit.corpus import exterior, polynomial, random_module, truncated_loop, two_vertex
from koszulkit.exactla import PrimeField, inverse, random_matrix
from koszulkit.gradedmod import (
    GradedMap,
    GradedModule,
    ModuleError,
    WindowError,
    cokernel,
    direct_sum,
    find_isomorphism,
    hom_degree_zero,
    identity_map,
    image,
    kernel,
    module_from_doc,
    module_to_doc,
    projective,
    radical,
    regular_module,
    shift,
    simple,
    top_quotient,
    truncate_above,
    truncate_below,
    truncation_sequence,
    zero_map,
)
from koszulkit.resolve import minimal_cover

F = PrimeField(101)
E2 = exterior(2, F)
K2 = truncated_loop(2, F)
Q2 = two_vertex(F)
P2 = polynomial(2, F, 8)
ALGEBRAS = [E2, K2, Q2, exterior(3, F), P2]


def profile(M):
    return [M.dim(d) for d in range(M.lo, M.hi + 1)]


def random_modules():
    return st.builds(lambda i, seed: random_module(ALGEBRAS[i], seed, max_degree=4),
                     st.integers(0, len(ALGEBRAS) - 1), st.integers(0, 10_000))


def conjugate(M, seed):
    """An isomorphic copy of M under a random change of basis in every (degree, vertex)."""
    rng = np.random.default_rng(seed)
    n = M.algebra.n_vertices
    g = {}
    for d in range(M.lo, M.hi + 1):
        for v in range(n):
            k = M.dim(d, v)
            while True:
                m = random_matrix(F, rng, k, k)
                if k == 0 or inverse(F, m) is not None:
                    break
            g[(d, v)] = m
    act = {}
    for (a, d), m in M.act.items():
        arr = M.algebra.quiver.arrows[a]
        act[(a, d)] = F.mul_chain(g[(d + 1, arr.tgt)], m, inverse(F, g[(d, arr.src)])) if m.size else m
    return GradedModule(M.algebra, M.lo, M.hi, M.dims, act, closed=M.closed, check=True)


def test_shift_follows_index_convention():
    S = simple(Q2, 1)
    T = shift(S, 3)
    assert (T.lo, T.hi) == (-3, -3) and T.dim(-3, 1) == 1
    M = random_module(E2, 4)
    assert profile(shift(M, 0)) == profile(M)
    assert profile(shift(shift(M, 2), -5)) == profile(shift(M, -3))
    assert shift(shift(M, 2), -5).lo == shift(M, -3).lo


def test_truncation():
    L = regular_module(E2)
    T = truncate_below(L, 1)
    assert (T.lo, profile(T)) == (1, [2, 1])
    assert profile(truncate_below(L, -4)) == profile(L)
    assert truncate_below(L, 3).is_zero()
    R = radical(L)
    assert (R.lo, profile(R)) == (1, [2, 1])


def test_projectives():
    assert profile(projective(K2, 0)) == [1, 1]
    assert profile(projective(E2, 0)) == [1, 2, 1]
    P = projective(Q2, 0)
    assert (P.dim(0, 0), P.dim(0, 1), P.dim(1, 0), P.dim(1, 1)) == (1, 0, 0, 1)


def test_simple_and_radical():
    assert radical(simple(E2, 0, 2)).is_zero()
    for A in (E2, K2, Q2):
        S = simple(A, 0, 1)
        assert S.total_dim == 1 and (S.lo, S.hi) == (1, 1)
    P = projective(K2, 0)
    assert (radical(P).lo, profile(radical(P))) == (1, [1])


def test_hom_examples():
    assert len(hom_degree_zero(simple(E2, 0), simple(E2, 0))) == 1
    assert len(hom_degree_zero(simple(E2, 0), projective(E2, 0))) == 0
    assert len(hom_degree_zero(simple(E2, 0, 2), projective(E2, 0))) == 1


@settings(max_examples=25, deadline=None)
@given(random_modules(), st.integers(0, 2), st.integers(0, 3))
def test_hom_from_projective_is_evaluation(M, v, t):
    A = M.algebra
    v = v % A.n_vertices
    P = projective(A, v, t, hi=None if A.finite else M.hi)
    assert len(hom_degree_zero(P, M)) == M.dim(t, v)


def test_kernel_cokernel_image_examples():
    M = random_module(E2, 7)
    assert kernel(identity_map(M))[0].is_zero()
    Q, _ = cokernel(zero_map(M, M))
    assert profile(Q) == profile(M)
    P, pi = minimal_cover(simple(K2, 0))
    Z, _ = kernel(pi)
    assert (Z.lo, profile(Z)) == (1, [1])


@settings(max_examples=25, deadline=None)
@given(random_modules())
def test_rank_nullity_and_cover(M):
    P, pi = minimal_cover(M)
    assert pi.commutes()
    Z, zinc = kernel(pi)
    I, _ = image(pi)
    for d in range(M.lo, M.hi + 1):
        assert Z.dim(d) + I.dim(d) == P.dim(d)
        assert I.dim(d) == M.dim(d)
    del zinc
    # minimality: P/mP and M/mM agree, so the kernel lies in the radical
    TM, TP = top_quotient(M), top_quotient(P)
    assert TM.total_dim == len(P.gens)
    for d in range(M.lo, M.hi + 1):
        assert TM.dim(d) == TP.dim(d)


@settings(max_examples=25, deadline=None)
@given(random_modules(), st.integers(0, 6))
def test_truncation_sequence_is_exact(M, s):
    inc, proj = truncation_sequence(M, s)
    high, low = inc.source, proj.target
    for d in range(M.lo, M.hi + 1):
        assert high.dim(d) + low.dim(d) == M.dim(d)
    assert profile(truncate_above(M, s)) == profile(low) or low.is_zero()


@settings(max_examples=25, deadline=None)
@given(random_modules(), random_modules())
def test_direct_sum_dims(M, N):
    if M.algebra is not N.algebra:
        N = random_module(M.algebra, 1, max_degree=4)
    S = direct_sum(M, N)
    for d in range(min(M.lo, N.lo), max(M.hi, N.hi) + 1):
        assert S.dim(d) == M.dim(d) + N.dim(d)


@settings(max_examples=20, deadline=None)
@given(random_modules(), st.integers(0, 10_000))
def test_isomorphism_search_finds_basis_changes(M, seed):
    N = conjugate(M, seed)
    f = find_isomorphism(M, N)
    assert f is not None and f.commutes()


def test_isomorphism_search_rejects_dimension_mismatch():
    assert find_isomorphism(simple(E2, 0), simple(E2, 0, 1)) is None


@settings(max_examples=20, deadline=None)
@given(random_modules())
def test_module_document_round_trip(M):
    doc = module_to_doc(M)
    text = json.dumps(doc)
    N = module_from_doc(json.loads(text), M.algebra)
    assert module_to_doc(N) == doc
    assert find_isomorphism(M, N) is not None


def test_module_document_errors():
    doc = module_to_doc(regular_module(E2))
    bad = json.loads(json.dumps(doc))
    bad["actions"]["x"]["0"] = [[1, 0]]
    with pytest.raises(ModuleError, match="shape"):
        module_from_doc(bad, E2)
    bad = json.loads(json.dumps(doc))
    bad["actions"]["y"]["0"] = [[1], [0]]
    bad["actions"]["x"]["1"] = [[0, 0]]
    with pytest.raises(ModuleError):
        module_from_doc(bad, E2)
    with pytest.raises(ModuleError, match="unknown arrow"):
        module_from_doc(dict(doc, actions={"q": {}}), E2)


def test_maps_must_commute():
    S = regular_module(E2)
    T = simple(E2, 0)
    bad = GradedMap(S, S, {(1, 0): np.array([[1, 0], [0, 0]])})
    assert not bad.commutes()
    assert GradedMap(S, T, {(0, 0): np.array([[1]])}).commutes()


def test_open_window_limits():
    with pytest.raises(WindowError):
        regular_module(P2).dim(P2.degree_bound + 3)
