import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from koszulkit.exactla import (
    PrimeField,
    image_basis,
    intersection_of_row_spaces,
    inverse,
    kernel_basis,
    quotient,
    rank,
    rref,
    solve,
    span_sum,
)


def naive_rref(rows, p):
    """Textbook Gauss-Jordan on python lists; the oracle for the fast path."""
    a = [[x % p for x in r] for r in rows]
    if not a:
        return [], []
    n, m = len(a), len(a[0])
    r = 0
    piv = []
    for c in range(m):
        k = next((i for i in range(r, n) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(n):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == n:
            break
    return a[:r], piv


def matrices(p_choices=(2, 3, 5, 7, 101), max_side=7):
    @st.composite
    def build(draw):
        p = draw(st.sampled_from(p_choices))
        rows = draw(st.integers(0, max_side))
        cols = draw(st.integers(1, max_side))
        entries = draw(st.lists(st.integers(0, p - 1), min_size=rows * cols, max_size=rows * cols))
        return PrimeField(p), np.array(entries, dtype=np.int64).reshape(rows, cols)

    return build()


def test_field_rejects_composites():
    with pytest.raises(ValueError):
        PrimeField(15)
    with pytest.raises(ValueError):
        PrimeField(1)
    assert PrimeField(2).p == 2


def test_field_from_env(monkeypatch):
    monkeypatch.setenv("KK_FIELD", "7")
    assert PrimeField.from_env().p == 7


def test_rref_examples():
    f5 = PrimeField(5)
    r = rref(f5, np.eye(2, dtype=np.int64))
    assert r.matrix.tolist() == [[1, 0], [0, 1]] and r.pivots == (0, 1) and r.rank == 2
    r = rref(f5, np.zeros((3, 4), dtype=np.int64))
    assert r.rank == 0 and r.pivots == ()
    r = rref(f5, [[1, 2], [2, 4]])
    assert r.matrix.tolist() == [[1, 2]] and r.pivots == (0,) and r.rank == 1


def test_kernel_examples():
    f7 = PrimeField(7)
    assert kernel_basis(f7, np.eye(3, dtype=np.int64)).shape == (0, 3)
    assert kernel_basis(f7, np.zeros((3, 3), dtype=np.int64)).tolist() == np.eye(3, dtype=int).tolist()
    k = kernel_basis(f7, [[1, 1]])
    assert k.tolist() == [[1, 6]]


def test_solve_examples():
    f5 = PrimeField(5)
    rhs = np.array([[3], [4]])
    assert solve(f5, np.eye(2, dtype=np.int64), rhs).tolist() == rhs.tolist()
    assert solve(f5, np.zeros((2, 2), dtype=np.int64), rhs) is None
    assert solve(f5, [[2]], [1]).tolist() == [3]
    with pytest.raises(ValueError):
        solve(f5, np.eye(2, dtype=np.int64), np.zeros((3, 1)))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rref_matches_textbook_oracle(fm):
    f, m = fm
    expect, piv = naive_rref(m.tolist(), f.p)
    got = rref(f, m)
    assert got.matrix.tolist() == expect
    assert list(got.pivots) == piv


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity_and_idempotence(fm):
    f, m = fm
    r = rref(f, m)
    k = kernel_basis(f, m)
    assert r.rank + k.shape[0] == m.shape[1]
    assert not np.any(f.matmul(m, k.T))
    again = rref(f, r.matrix)
    assert np.array_equal(again.matrix, r.matrix)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.integers(0, 2**32 - 1))
def test_solve_recovers_consistent_systems(fm, seed):
    f, m = fm
    x = np.random.default_rng(seed).integers(0, f.p, size=(m.shape[1], 2))
    b = f.matmul(m, x)
    y = solve(f, m, b)
    assert y is not None
    assert np.array_equal(f.matmul(m, y), b)


@settings(max_examples=150, deadline=None)
@given(matrices(max_side=6), st.integers(0, 2**32 - 1))
def test_intersection_dimension(fm, seed):
    f, u = fm
    rng = np.random.default_rng(seed)
    v = rng.integers(0, f.p, size=(int(rng.integers(0, 6)), u.shape[1]))
    # share a random combination so intersections are not always trivial
    if u.shape[0] and v.shape[0]:
        v[0] = f.matmul(rng.integers(0, f.p, size=(1, u.shape[0])), u)[0]
    inter = intersection_of_row_spaces(f, u, v)
    assert inter.shape[0] == rank(f, u) + rank(f, v) - span_sum(f, rref(f, u).matrix, rref(f, v).matrix).shape[0]
    assert rank(f, np.concatenate([rref(f, u).matrix, inter])) == rank(f, u)
    assert rank(f, np.concatenate([rref(f, v).matrix, inter])) == rank(f, v) if v.shape[0] else inter.shape[0] == 0


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_quotient_projection_kills_subspace(fm):
    f, m = fm
    q = quotient(f, m, m.shape[1])
    assert not np.any(f.matmul(q.projection, m.T))
    assert np.array_equal(f.matmul(q.projection, q.section), np.eye(len(q.complement_cols), dtype=np.int64))
    assert q.projection.shape[0] == m.shape[1] - rank(f, m)


def test_image_and_inverse():
    f = PrimeField(101)
    m = np.array([[1, 2], [3, 4], [5, 6]])
    assert image_basis(f, m).shape == (2, 3)
    sq = np.array([[1, 2], [3, 4]])
    inv = inverse(f, sq)
    assert np.array_equal(f.matmul(sq, inv), np.eye(2, dtype=np.int64))
    assert inverse(f, [[1, 2], [2, 4]]) is None


def test_large_products_are_exact():
    f = PrimeField(2147483647)
    a = np.full((3, 40), f.p - 1, dtype=np.int64)
    out = f.matmul(a, a.T)
    assert out[0, 0] == (40 * (f.p - 1) ** 2) % f.p


@pytest.mark.parametrize("density", [0.0, 1.0])
@settings(max_examples=80, deadline=None)
@given(fm=matrices(max_side=9), sparsify=st.integers(0, 2**32 - 1))
def test_both_elimination_paths_agree_with_oracle(density, fm, sparsify):
    import koszulkit.exactla as ex

    f, m = fm
    rng = np.random.default_rng(sparsify)
    m = m * (rng.random(m.shape) < 0.3)
    expect, piv = naive_rref(m.tolist(), f.p)
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(ex, "SPARSE_DENSITY", density)
        got = rref(f, m)
    assert got.matrix.tolist() == expect
    assert list(got.pivots) == piv


def test_column_order_pivots_follow_scan_order():
    f = PrimeField(7)
    m = np.array([[1, 1, 0], [0, 1, 1]])
    r = rref(f, m, col_order=[2, 1, 0])
    assert r.pivots == (2, 1)
    assert rank(f, np.concatenate([r.matrix, m])) == 2
