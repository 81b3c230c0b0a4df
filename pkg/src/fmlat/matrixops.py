"""Small exact-integer matrix helpers shared across the package.

Matrices are tuples of row tuples with Python int entries; vectors are plain
tuples.  Everything here is exact: determinants use fraction-free Bareiss
elimination, signatures use rational symmetric diagonalization.
"""

from fractions import Fraction

# Gram entries are rejected beyond this bound at construction time so that
# downstream reports stay within 64-bit range for external consumers.
MAX_ENTRY = 2**63 - 1


def as_matrix(rows):
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    if not m:
        return ()
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0])))


def matmul(a, b):
    if not a or not b:
        return ()
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def is_symmetric(m):
    n = len(m)
    return all(len(row) == n for row in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n)
    )


def bareiss_det(m):
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if pivot is None:
                return 0
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def signature(m):
    """(positive, negative, zero) inertia of a symmetric integer matrix.

    Exact rational symmetric diagonalization; the zero count is the radical
    dimension, so degenerate inputs are fine.
    """
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    pos = neg = zero = 0
    for i in range(n):
        if a[i][i] == 0:
            swap = next((j for j in range(i + 1, n) if a[j][j] != 0), None)
            if swap is not None:
                for r in range(n):
                    a[r][i], a[r][swap] = a[r][swap], a[r][i]
                a[i], a[swap] = a[swap], a[i]
            else:
                off = next((j for j in range(i + 1, n) if a[i][j] != 0), None)
                if off is None:
                    zero += 1
                    continue
                # add row/col `off` onto row/col i: new diagonal entry is
                # 2*a[i][off] since both diagonals vanish here
                for c in range(n):
                    a[i][c] += a[off][c]
                for r in range(n):
                    a[r][i] += a[r][off]
        piv = a[i][i]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        for r in range(i + 1, n):
            f = a[r][i] / piv
            if f:
                for c in range(n):
                    a[r][c] -= f * a[i][c]
                for c in range(n):
                    a[c][r] -= f * a[c][i]
    return pos, neg, zero


def frac_matvec(m, v):
    return tuple(sum(Fraction(x) * y for x, y in zip(row, v)) for row in m)


def frac_inverse(m):
    """Exact inverse of a nonsingular square integer/Fraction matrix."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
         for i, row in enumerate(m)]
    for i in range(n):
        pivot = next((r for r in range(i, n) if a[r][i] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        a[i], a[pivot] = a[pivot], a[i]
        inv = 1 / a[i][i]
        a[i] = [x * inv for x in a[i]]
        for r in range(n):
            if r != i and a[r][i]:
                f = a[r][i]
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    return tuple(tuple(row[n:]) for row in a)


def check_entry_bound(rows):
    for row in rows:
        for x in row:
            if abs(x) > MAX_ENTRY:
                raise OverflowError(
                    f"matrix entry {x} exceeds the 64-bit safety bound"
                )
