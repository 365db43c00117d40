"""Independent brute-force oracles, deliberately sharing no code with the package.

Everything here works on python lists with a textbook elimination mod p.
"""

from itertools import product

P = 101


def _rref(rows, p=P):
    a = [[x % p for x in r] for r in rows]
    if not a:
        return []
    n, m = len(a), len(a[0])
    r = 0
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
        r += 1
        if r == n:
            break
    return a[:r]


def _rank(rows, p=P):
    return len(_rref(rows, p)) if rows else 0


def _kernel(cols_as_rows, ncols, p=P):
    """Null space of the matrix whose rows are given; vectors of length ncols."""
    red = _rref(cols_as_rows, p) if cols_as_rows else []
    piv = []
    for row in red:
        piv.append(next(i for i, x in enumerate(row) if x))
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, piv):
            v[pc] = (-row[f]) % p
        out.append(v)
    return out


def exterior_basis(n):
    """Monomials of the exterior algebra on n generators, as sorted tuples."""
    basis = []
    for mask in product((0, 1), repeat=n):
        basis.append(tuple(i for i in range(n) if mask[i]))
    basis.sort(key=lambda t: (len(t), t))
    return basis


def exterior_mul(u, v):
    """Product of two monomials: (sign, monomial) or (0, None)."""
    if set(u) & set(v):
        return 0, None
    seq = list(u) + list(v)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign, tuple(sorted(seq))


def exterior_simple_betti(n, steps, p=P):
    """Graded Betti numbers {(i, j): beta} of k over the exterior algebra on n letters.

    Brute force: the module Lambda^r is spelled out as coordinate vectors, each
    syzygy is an explicit kernel, and minimal generators are counted degree by
    degree as dim K_d - dim (m K)_d.
    """
    basis = exterior_basis(n)
    index = {b: i for i, b in enumerate(basis)}
    dimL = len(basis)

    def left_mul(mono, vec, gens):
        out = [0] * (dimL * gens)
        for g in range(gens):
            for b, c in enumerate(vec[g * dimL:(g + 1) * dimL]):
                if c:
                    s, m = exterior_mul(mono, basis[b])
                    if s:
                        out[g * dimL + index[m]] = (out[g * dimL + index[m]] + s * c) % p
        return out

    def degree_of(pos, gdeg):
        g, b = divmod(pos, dimL)
        return gdeg[g] + len(basis[b])

    # step 0: cover of k is Lambda itself, kernel is the augmentation ideal
    gdeg = [0]
    images = None  # images of generators of the current free module in the previous one
    prev_gdeg = None
    betti = {(0, 0): 1}
    # kernel of Lambda -> k: all positive-degree monomials
    kernel = [[1 if i == index[b] else 0 for i in range(dimL)] for b in basis if len(b) > 0]
    for step in range(1, steps + 1):
        rows = len(gdeg) * dimL
        # homogeneous pieces of the kernel
        degs = sorted({degree_of(i, gdeg) for i in range(rows)})
        new_gens = []
        for d in degs:
            positions = [i for i in range(rows) if degree_of(i, gdeg) == d]
            kd = [v for v in kernel if any(v[i] for i in range(rows)) and all(
                v[i] == 0 for i in range(rows) if degree_of(i, gdeg) != d)]
            kd = _rref(kd, p) if kd else []
            lower = [v for v in kernel if v and all(
                v[i] == 0 for i in range(rows) if degree_of(i, gdeg) != d - 1)]
            mk = []
            for v in lower:
                for x in range(n):
                    w = left_mul((x,), v, len(gdeg))
                    if any(w):
                        mk.append(w)
            rmk = _rank(mk, p) if mk else 0
            count = len(kd) - rmk
            if count:
                betti[(step, d)] = count
                base = _rref(mk, p) if mk else []
                for v in kd:
                    if _rank(base + [v], p) > len(base):
                        base = _rref(base + [v], p)
                        new_gens.append((d, v))
                del positions
        # next free module maps generators onto the chosen kernel elements
        prev_gdeg = gdeg
        gdeg = [d for d, _ in new_gens]
        images = [v for _, v in new_gens]
        # full matrix of the new differential: column (g, b) = basis[b] * images[g]
        cols = []
        for g in range(len(gdeg)):
            for b in basis:
                cols.append(left_mul(b, images[g], len(prev_gdeg)))
        nrows = len(prev_gdeg) * dimL
        mat_rows = [[cols[c][r] for c in range(len(cols))] for r in range(nrows)]
        kernel = _kernel(mat_rows, len(cols), p)
        # split the kernel into homogeneous vectors (the map is graded)
        homog = []
        for d in sorted({degree_of(i, gdeg) for i in range(len(cols))}):
            sel = [i for i in range(len(cols)) if degree_of(i, gdeg) == d]
            sub_rows = [[r[i] for i in sel] for r in mat_rows]
            for v in _kernel(sub_rows, len(sel), p):
                full = [0] * len(cols)
                for i, x in zip(sel, v):
                    full[i] = x
                homog.append(full)
        kernel = homog
    return betti


def commutative_monomials(n, d):
    """Number of monomials of degree d in n commuting letters, by enumeration."""
    return sum(1 for e in product(range(d + 1), repeat=n) if sum(e) == d)


def exterior_dims(n):
    """Degree-wise dims of the exterior algebra from its explicit basis."""
    dims = [0] * (n + 1)
    for b in exterior_basis(n):
        dims[len(b)] += 1
    return dims
