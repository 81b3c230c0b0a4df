"""Discriminant groups A_L = L*/L and their quadratic/bilinear forms.

Generator lifts live in L* tensor Q, written in the lattice basis.  With
P * G * Q = diag(d_i) a Smith decomposition of the Gram matrix, the class of
column i of Q divided by d_i generates a cyclic factor of order d_i, and the
coordinates of any y in L* are (P @ (G @ y)) reduced modulo the orders.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError
from .fqf import FiniteQuadraticForm, mod1, mod2
from .matrixops import frac_matvec
from .snf import smith_normal_form


@dataclass(frozen=True)
class DiscriminantGroup:
    """A_L as a product of cyclic groups in divisor-chain order.

    `proj_rows` are the integer rows implementing the coordinate map
    L* -> prod Z/d_i described in the module docstring.
    """

    orders: tuple
    lifts: tuple           # one rational vector per cyclic factor
    proj_rows: tuple

    @property
    def group_order(self):
        n = 1
        for d in self.orders:
            n *= d
        return n

    def coordinates_of(self, gram, vector):
        """Class of a rational vector in L* as a tuple mod the orders."""
        image = frac_matvec(gram, vector)
        if any(x.denominator != 1 for x in image):
            raise PreconditionError("vector does not lie in the dual lattice")
        ints = tuple(int(x) for x in image)
        return tuple(
            sum(r * y for r, y in zip(row, ints)) % d
            for row, d in zip(self.proj_rows, self.orders)
        )

    def to_json_dict(self):
        return {
            "orders": list(self.orders),
            "lifts": [[str(x) for x in lift] for lift in self.lifts],
        }


def discriminant_group(lat):
    if lat.is_degenerate():
        raise PreconditionError("discriminant group needs a nondegenerate lattice")
    if lat.rank == 0:
        return DiscriminantGroup((), (), ())
    dec = smith_normal_form(lat.gram)
    orders, lifts, rows = [], [], []
    for i, d in enumerate(dec.diagonal):
        if d <= 1:
            continue
        orders.append(d)
        lifts.append(tuple(Fraction(dec.right[r][i], d) for r in range(lat.rank)))
        rows.append(dec.left[i])
    return DiscriminantGroup(tuple(orders), tuple(lifts), tuple(rows))


def discriminant_form(lat, bilinear_only=False):
    """The finite quadratic form (A_L, q_L, b_L) of an even lattice.

    Odd lattices are rejected unless `bilinear_only` is set, in which case the
    returned form carries only the Q/Z-valued pairing (q slots hold b(x, x)).
    """
    even = lat.is_even()
    if not even and not bilinear_only:
        raise PreconditionError("q_L requires an even lattice "
                                "(pass bilinear_only=True for b_L alone)")
    dg = discriminant_group(lat)
    gram = lat.gram
    images = [frac_matvec(gram, lift) for lift in dg.lifts]

    def pair(i, j):
        return sum(x * y for x, y in zip(dg.lifts[i], images[j]))

    k = len(dg.orders)
    b = tuple(tuple(mod1(pair(i, j)) for j in range(k)) for i in range(k))
    if bilinear_only and not even:
        q = tuple(mod1(pair(i, i)) for i in range(k))
        return FiniteQuadraticForm(dg.orders, q, b, quadratic=False)
    q = tuple(mod2(pair(i, i)) for i in range(k))
    return FiniteQuadraticForm(dg.orders, q, b)


@dataclass(frozen=True)
class PAnalysis:
    p: int
    is_p_elementary: bool
    a: int     # number of cyclic p-power factors (the exponent when elementary)
    l_p: int

    def to_json_dict(self):
        return {
            "p": self.p,
            "is_p_elementary": self.is_p_elementary,
            "a": self.a,
            "l_p": self.l_p,
        }


def _is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def p_analysis(lat, p):
    if not _is_prime(p):
        raise PreconditionError(f"{p} is not prime")
    dg = discriminant_group(lat)
    l_p = sum(1 for d in dg.orders if d % p == 0)
    elementary = bool(dg.orders) and all(d == p for d in dg.orders)
    if not dg.orders:
        elementary = True  # trivial group is (Z/p)^0
    return PAnalysis(p=p, is_p_elementary=elementary, a=l_p, l_p=l_p)
