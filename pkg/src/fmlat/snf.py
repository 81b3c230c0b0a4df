"""Smith normal form over Z with unimodular transforms, plus kernel/saturation.

The decomposition satisfies left * input * right = diag(d_1, ..., d_r) with
d_i >= 0 and d_i | d_{i+1}.  Pivoting is deterministic (smallest nonzero
absolute value, ties broken by position) so downstream generator choices are
reproducible run to run.
"""

from dataclasses import dataclass

from .matrixops import as_matrix, bareiss_det, identity, matmul


@dataclass(frozen=True)
class SmithDecomposition:
    left: tuple
    diagonal: tuple
    right: tuple

    def reassemble(self, mat):
        """left * mat * right, for contract checking."""
        return matmul(matmul(self.left, as_matrix(mat)), self.right)


def _pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        for j in range(t, n):
            v = abs(a[i][j])
            if v and (best is None or v < best[0]):
                best = (v, i, j)
    return best


def _xgcd(a, b):
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        qq = g // next_g
        x, next_x = next_x, x - qq * next_x
        y, next_y = next_y, y - qq * next_y
        g, next_g = next_g, g - qq * next_g
    if g < 0:
        g, x, y = -g, -x, -y
    return g, x, y


def smith_normal_form(mat):
    mat = as_matrix(mat)
    m = len(mat)
    n = len(mat[0]) if m else 0
    a = [list(row) for row in mat]
    p = [list(row) for row in identity(m)]
    q = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        p[i], p[j] = p[j], p[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in q:
            row[i], row[j] = row[j], row[i]

    def clear_row_entry(t, i):
        # one Bezout block op zeroes a[i][t] and puts gcd at the pivot
        av, bv = a[t][t], a[i][t]
        if bv % av == 0:
            qq = bv // av
            for k in range(n):
                a[i][k] -= qq * a[t][k]
            for k in range(m):
                p[i][k] -= qq * p[t][k]
            return
        g, x, y = _xgcd(av, bv)
        u, v = av // g, bv // g
        for k in range(n):
            a[t][k], a[i][k] = x * a[t][k] + y * a[i][k], -v * a[t][k] + u * a[i][k]
        for k in range(m):
            p[t][k], p[i][k] = x * p[t][k] + y * p[i][k], -v * p[t][k] + u * p[i][k]

    def clear_col_entry(t, j):
        av, bv = a[t][t], a[t][j]
        if bv % av == 0:
            qq = bv // av
            for row in a:
                row[j] -= qq * row[t]
            for row in q:
                row[j] -= qq * row[t]
            return
        g, x, y = _xgcd(av, bv)
        u, v = av // g, bv // g
        for row in a:
            row[t], row[j] = x * row[t] + y * row[j], -v * row[t] + u * row[j]
        for row in q:
            row[t], row[j] = x * row[t] + y * row[j], -v * row[t] + u * row[j]

    t = 0
    while t < min(m, n):
        found = _pivot(a, t, m, n)
        if found is None:
            break
        _, pi, pj = found
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        while True:
            # column ops can re-dirty the pivot column, so sweep until stable;
            # the pivot shrinks to a gcd at every mixing step, which bounds
            # the number of sweeps
            while True:
                dirty = False
                for i in range(t + 1, m):
                    if a[i][t]:
                        clear_row_entry(t, i)
                        dirty = True
                for j in range(t + 1, n):
                    if a[t][j]:
                        clear_col_entry(t, j)
                        dirty = True
                if not dirty:
                    break
            # pivot must divide the whole trailing block before we advance,
            # otherwise the divisibility chain would break later
            viol = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % a[t][t]:
                        viol = i
                        break
                if viol is not None:
                    break
            if viol is None:
                break
            for k in range(n):
                a[t][k] += a[viol][k]
            for k in range(m):
                p[t][k] += p[viol][k]
        t += 1

    for k in range(min(m, n)):
        if a[k][k] < 0:
            for c in range(n):
                a[k][c] = -a[k][c]
            for c in range(m):
                p[k][c] = -p[k][c]

    diag = tuple(a[k][k] for k in range(min(m, n)))
    return SmithDecomposition(as_matrix(p), diag, as_matrix(q))


def elementary_divisors(mat):
    return smith_normal_form(mat).diagonal


def integer_kernel(mat):
    """Basis of {x in Z^n : mat @ x = 0}, as a tuple of vectors.

    The basis is saturated (extends to a basis of Z^n) since it consists of
    columns of a unimodular transform.
    """
    mat = as_matrix(mat)
    m = len(mat)
    n = len(mat[0]) if m else 0
    if m == 0:
        return tuple(identity(n))
    dec = smith_normal_form(mat)
    rank = sum(1 for d in dec.diagonal if d)
    return tuple(
        tuple(dec.right[i][j] for i in range(n)) for j in range(rank, n)
    )


def row_saturation(rows):
    """Basis of the saturation of the row span of `rows` inside Z^n.

    Uses the double-kernel identity: the saturation is the integer kernel of
    any matrix whose rows span the (euclidean) kernel of `rows`.
    """
    rows = as_matrix(rows)
    ker = integer_kernel(rows)
    if not ker:
        n = len(rows[0]) if rows else 0
        return tuple(identity(n))
    return integer_kernel(ker)


def transform_determinants(dec):
    return bareiss_det(dec.left), bareiss_det(dec.right)
