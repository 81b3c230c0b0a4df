"""Finite quadratic forms (A, q, b) with q valued in Q/2Z and b in Q/Z.

A form is presented on a fixed generator tuple of a product of cyclic groups;
q and b extend to all elements through q(nx) = n^2 q(x) and the polarization
identity.  Values are exact `Fraction`s canonicalized to [0, 2) resp. [0, 1).

Automorphism and isometry searches are exhaustive generator-image
backtrackings with hard caps: they either finish or fail loudly, never
truncate silently.
"""

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import InconclusiveError, PreconditionError
from .snf import smith_normal_form


def mod1(x):
    x = Fraction(x)
    return x - math.floor(x)


def mod2(x):
    x = Fraction(x)
    return x - 2 * math.floor(x / 2)


def _lcm(a, b):
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple        # cyclic orders d_i > 1
    q_gen: tuple         # q on each generator, canonical in [0, 2)
    b_gen: tuple         # symmetric pairing table, canonical in [0, 1)
    quadratic: bool = True

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        q = tuple(mod2(x) if self.quadratic else mod1(x) for x in self.q_gen)
        b = tuple(tuple(mod1(x) for x in row) for row in self.b_gen)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "q_gen", q)
        object.__setattr__(self, "b_gen", b)
        k = len(orders)
        if any(d < 2 for d in orders):
            raise PreconditionError("cyclic orders must be at least 2")
        if len(q) != k or len(b) != k or any(len(row) != k for row in b):
            raise PreconditionError("generator table sizes disagree")
        for i in range(k):
            for j in range(k):
                if b[i][j] != b[j][i]:
                    raise PreconditionError("pairing table must be symmetric")
                if (orders[i] * b[i][j]).denominator != 1:
                    raise PreconditionError("d_i * b(g_i, g_j) must be integral")
        if self.quadratic:
            for i, d in enumerate(orders):
                if (d * q[i]).denominator != 1:
                    raise PreconditionError("d_i * q(g_i) must be integral")
                twice = d * d * q[i]
                if twice.denominator != 1 or twice.numerator % 2:
                    raise PreconditionError("d_i^2 * q(g_i) must be even")
                if mod1(q[i]) != b[i][i]:
                    raise PreconditionError("q(g_i) must reduce to b(g_i, g_i) mod 1")

    @property
    def group_order(self):
        n = 1
        for d in self.orders:
            n *= d
        return n

    def elements(self):
        return product(*(range(d) for d in self.orders))

    def add(self, x, y):
        return tuple((a + c) % d for a, c, d in zip(x, y, self.orders))

    def order_of(self, x):
        o = 1
        for c, d in zip(x, self.orders):
            o = _lcm(o, d // math.gcd(d, c))
        return o

    def q_of(self, x):
        total = Fraction(0)
        k = len(self.orders)
        for i in range(k):
            if x[i]:
                total += x[i] * x[i] * self.q_gen[i]
                for j in range(i + 1, k):
                    if x[j]:
                        total += 2 * x[i] * x[j] * self.b_gen[i][j]
        return mod2(total)

    def b_of(self, x, y):
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.b_gen[i]
                total += xi * sum(yj * row[j] for j, yj in enumerate(y) if yj)
        return mod1(total)

    def canonical_orders(self):
        return _canonical_chain(self.orders)

    def direct_sum(self, other):
        k1, k2 = len(self.orders), len(other.orders)
        b = [[Fraction(0)] * (k1 + k2) for _ in range(k1 + k2)]
        for i in range(k1):
            for j in range(k1):
                b[i][j] = self.b_gen[i][j]
        for i in range(k2):
            for j in range(k2):
                b[k1 + i][k1 + j] = other.b_gen[i][j]
        return FiniteQuadraticForm(
            self.orders + other.orders,
            self.q_gen + other.q_gen,
            tuple(tuple(row) for row in b),
            quadratic=self.quadratic and other.quadratic,
        )

    def p_part(self, p):
        """Orthogonal p-Sylow component, with scaled generators."""
        idx, new_orders, scales = [], [], []
        for i, d in enumerate(self.orders):
            pk = 1
            while d % p == 0:
                pk *= p
                d //= p
            if pk > 1:
                idx.append(i)
                new_orders.append(pk)
                scales.append(self.orders[i] // pk)
        q = tuple(mod2(scales[a] * scales[a] * self.q_gen[idx[a]])
                  for a in range(len(idx)))
        b = tuple(
            tuple(mod1(scales[a] * scales[c] * self.b_gen[idx[a]][idx[c]])
                  for c in range(len(idx)))
            for a in range(len(idx))
        )
        return FiniteQuadraticForm(tuple(new_orders), q, b,
                                   quadratic=self.quadratic)

    def radical_order(self):
        """Order of the radical of b, computed via Smith form (no enumeration)."""
        k = len(self.orders)
        if k == 0:
            return 1
        denom = 1
        for row in self.b_gen:
            for x in row:
                denom = _lcm(denom, x.denominator)
        bnum = tuple(
            tuple(int(self.b_gen[i][j] * denom) for j in range(k))
            for i in range(k)
        )
        divisors = smith_normal_form(bnum).diagonal
        index = 1
        for e in divisors:
            index *= denom // math.gcd(e, denom)
        order = self.group_order
        if order % index:
            raise ArithmeticError("radical index must divide the group order")
        return order // index

    def is_nondegenerate(self):
        return self.radical_order() == 1

    def to_json_dict(self):
        return {
            "orders": list(self.orders),
            "q": [str(x) for x in self.q_gen],
            "b": [[str(x) for x in row] for row in self.b_gen],
            "quadratic": self.quadratic,
        }


def _canonical_chain(orders):
    """Invariant-factor chain of a product of cyclic groups."""
    by_prime = {}
    for d in orders:
        m = d
        f = 2
        while f * f <= m:
            if m % f == 0:
                e = 0
                while m % f == 0:
                    m //= f
                    e += 1
                by_prime.setdefault(f, []).append(f**e)
            f += 1
        if m > 1:
            by_prime.setdefault(m, []).append(m)
    for powers in by_prime.values():
        powers.sort(reverse=True)
    depth = max((len(v) for v in by_prime.values()), default=0)
    chain = []
    for t in range(depth):
        d = 1
        for powers in by_prime.values():
            if t < len(powers):
                d *= powers[t]
        chain.append(d)
    return tuple(reversed(chain))


def fqf_standard(name):
    """The standard rank-2 forms on (Z/2)^2: u(2) and v(2).

    u(2) is the discriminant form of U(2); v(2) is the discriminant form of
    the D4 root lattice (q = 1 on every nonzero element).
    """
    half = Fraction(1, 2)
    if name == "u2":
        return FiniteQuadraticForm(
            (2, 2), (Fraction(0), Fraction(0)),
            ((Fraction(0), half), (half, Fraction(0))),
        )
    if name == "v2":
        return FiniteQuadraticForm(
            (2, 2), (Fraction(1), Fraction(1)),
            ((Fraction(0), half), (half, Fraction(0))),
        )
    raise PreconditionError(f"unknown standard form {name!r} (use 'u2' or 'v2')")


def _q_histogram(form):
    """Counter {canonical q value: multiplicity} over all of A, in O(|A| k)."""
    orders, qg, bg = form.orders, form.q_gen, form.b_gen
    k = len(orders)
    hist = Counter()

    def rec(i, acc, lin):
        if i == k:
            hist[mod2(acc)] += 1
            return
        for x in range(orders[i]):
            if x:
                acc2 = acc + x * x * qg[i] + 2 * x * lin[i]
                lin2 = list(lin)
                for l in range(i + 1, k):
                    lin2[l] = lin[l] + x * bg[i][l]
                rec(i + 1, acc2, lin2)
            else:
                rec(i + 1, acc, lin)

    rec(0, Fraction(0), [Fraction(0)] * k)
    return hist


def gauss_milgram_signature(form, element_cap=10**6):
    """Mod-8 residue sigma with sum exp(pi i q(x)) = sqrt|A| exp(2 pi i sigma/8).

    The sum is evaluated exactly over the rationals and mapped to unit-circle
    points in floating point; the recovered residue is checked back against
    the normalized sum to 1e-9.
    """
    if not form.quadratic:
        raise PreconditionError("Gauss-Milgram needs a quadratic form")
    n = form.group_order
    if n > element_cap:
        raise InconclusiveError(f"group of order {n} exceeds the cap {element_cap}")
    if form.radical_order() != 1:
        raise PreconditionError("Gauss-Milgram needs a nondegenerate pairing")
    total = 0j
    for value, count in _q_histogram(form).items():
        total += count * cmath.exp(1j * math.pi * float(value))
    sigma = round(cmath.phase(total) * 4 / math.pi) % 8
    target = cmath.exp(1j * math.pi * sigma / 4)
    if abs(total / math.sqrt(n) - target) > 1e-9:
        raise ArithmeticError("Gauss sum does not land on an 8th root of unity")
    return sigma


def order_d_element_count(form, d):
    """Number of elements of order exactly d (Moebius over order-dividing counts)."""
    if d < 1:
        raise PreconditionError("order must be positive")

    def dividing(e):
        n = 1
        for o in form.orders:
            n *= math.gcd(o, e)
        return n

    total = 0
    for e in _divisors(d):
        total += _mobius(d // e) * dividing(e)
    return total


def _divisors(n):
    out = []
    f = 1
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            if f != n // f:
                out.append(n // f)
        f += 1
    return sorted(out)


def _mobius(n):
    result = 1
    f = 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            result = -result
        f += 1
    if n > 1:
        result = -result
    return result


# ---------------------------------------------------------------------------
# matrices acting on generator coordinates


def identity_matrix(orders):
    k = len(orders)
    return tuple(tuple(1 if i == j else 0 for j in range(k)) for i in range(k))


def neg_identity_matrix(orders):
    k = len(orders)
    return tuple(
        tuple((orders[i] - 1) if i == j else 0 for j in range(k)) for i in range(k)
    )


def compose(orders, a, b):
    k = len(orders)
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) % orders[i]
              for j in range(k))
        for i in range(k)
    )


def matrix_apply(orders, mat, x):
    k = len(orders)
    return tuple(
        sum(mat[i][j] * x[j] for j in range(k)) % orders[i] for i in range(k)
    )


def is_homomorphism_matrix(orders, mat):
    k = len(orders)
    return all(
        (mat[i][j] * orders[j]) % orders[i] == 0
        for i in range(k) for j in range(k)
    )


def preserves_form(form, mat):
    """Exact check that a coordinate matrix preserves q (and hence b)."""
    k = len(form.orders)
    images = [matrix_apply(form.orders, mat, tuple(1 if t == j else 0 for t in range(k)))
              for j in range(k)]
    for j in range(k):
        if form.q_of(images[j]) != mod2(form.q_gen[j]):
            return False
        for l in range(j + 1, k):
            if form.b_of(images[j], images[l]) != form.b_gen[j][l]:
                return False
    return True


def matrix_inverse_in_group(orders, mat):
    ident = identity_matrix(orders)
    seen = set()
    power = mat
    prev = ident
    while power != ident:
        if power in seen:
            raise PreconditionError("matrix is not invertible modulo the orders")
        seen.add(power)
        prev = power
        power = compose(orders, power, mat)
    return prev


def subgroup_closure(orders, mats):
    """Closure of a set of coordinate matrices under composition."""
    ident = identity_matrix(orders)
    seen = {ident}
    frontier = [ident]
    gens = [tuple(tuple(row) for row in m) for m in mats]
    while frontier:
        current = frontier.pop()
        for g in gens:
            for prod_ in (compose(orders, current, g), compose(orders, g, current)):
                if prod_ not in seen:
                    seen.add(prod_)
                    frontier.append(prod_)
    return tuple(sorted(seen))


@dataclass(frozen=True)
class FqfAutomorphismGroup:
    """All (or a known subgroup of) q-preserving group automorphisms."""

    orders: tuple
    elements: tuple      # coordinate matrices, canonically sorted
    complete: bool = True

    @property
    def order(self):
        return len(self.elements)

    def identity(self):
        return identity_matrix(self.orders)

    def compose(self, a, b):
        return compose(self.orders, a, b)

    def inverse(self, a):
        return matrix_inverse_in_group(self.orders, a)

    def contains(self, mat):
        return mat in set(self.elements)

    def to_json_dict(self):
        return {
            "orders": list(self.orders),
            "order": self.order,
            "complete": self.complete,
            "elements": [[list(row) for row in m] for m in self.elements],
        }


def _span_is_everything(form, images):
    """Subgroup generated by `images` equals A (needed only when b is degenerate)."""
    seen = {(0,) * len(form.orders)}
    for img in images:
        if all(c == 0 for c in img):
            continue
        layer = list(seen)
        current = img
        while any(current):
            for s in layer:
                t = form.add(s, current)
                if t not in seen:
                    seen.add(t)
            current = form.add(current, img)
    return len(seen) == form.group_order


def _image_backtrack(source, target, node_budget):
    """Shared generator-image search with forward checking.

    Yields tuples of images (one per source generator, restored to natural
    order).  Placing an image immediately filters the candidate pools of all
    unplaced generators by the required pairings, so dead branches die at the
    first empty pool.  Raises InconclusiveError when the node budget blows.
    """
    k = len(source.orders)
    if k == 0:
        yield ()
        return
    elements = list(target.elements())
    qfrac = {x: target.q_of(x) for x in elements}
    denom = 1
    for v in qfrac.values():
        denom = _lcm(denom, v.denominator)
    for j in range(k):
        denom = _lcm(denom, mod2(source.q_gen[j]).denominator)
        for l in range(k):
            denom = _lcm(denom, source.b_gen[j][l].denominator)
    two_d = 2 * denom
    qint = {x: int(qfrac[x] * denom) for x in elements}
    ordtab = {x: target.order_of(x) for x in elements}
    positions = sorted(range(k), key=lambda j: (-source.orders[j], j))
    source_q_int = [int(mod2(source.q_gen[j]) * denom) for j in range(k)]
    # b target as a numerator over 2*denom
    b_target = [[int(source.b_gen[j][l] * two_d) for l in range(k)] for j in range(k)]

    pools = []
    for j in positions:
        d = source.orders[j]
        pools.append([x for x in elements
                      if ordtab[x] == d and qint[x] == source_q_int[j]])

    add = target.add
    b_cache = {}

    def b_int(x, y):
        key = (x, y)
        v = b_cache.get(key)
        if v is None:
            v = (qint[add(x, y)] - qint[x] - qint[y]) % two_d
            b_cache[key] = v
            b_cache[(y, x)] = v
        return v

    nodes = 0
    chosen = [None] * k
    restore = {pos: depth for depth, pos in enumerate(positions)}

    def rec(depth, live):
        nonlocal nodes
        if depth == k:
            yield tuple(chosen[restore[j]] for j in range(k))
            return
        j = positions[depth]
        for cand in live[0]:
            nodes += 1
            if nodes > node_budget:
                raise InconclusiveError(
                    f"generator-image search exceeded {node_budget} nodes"
                )
            filtered = []
            ok = True
            for offset, pool in enumerate(live[1:], start=depth + 1):
                l = positions[offset]
                want = b_target[l][j]
                narrowed = [y for y in pool if b_int(y, cand) == want]
                if not narrowed:
                    ok = False
                    break
                filtered.append(narrowed)
            if not ok:
                continue
            chosen[depth] = cand
            yield from rec(depth + 1, filtered)
        chosen[depth] = None

    yield from rec(0, pools)


def fqf_automorphisms(form, element_cap=10**4, group_cap=2 * 10**5):
    """The full group O(A, q) by exhaustive generator-image search."""
    if not form.quadratic:
        raise PreconditionError("automorphism search needs a quadratic form")
    if form.group_order > element_cap:
        raise InconclusiveError(
            f"group of order {form.group_order} exceeds the cap {element_cap}"
        )
    k = len(form.orders)
    if k == 0:
        return FqfAutomorphismGroup((), ((),), complete=True)
    nondegenerate = form.is_nondegenerate()
    found = []
    # automorphisms preserve element orders even when b is degenerate, so the
    # exact-order pools lose nothing; the span check filters non-bijective
    # homomorphisms, which only survive the pools in the degenerate case
    for images in _image_backtrack(form, form, node_budget=10**7):
        if not nondegenerate and not _span_is_everything(form, images):
            continue
        mat = tuple(
            tuple(images[j][i] for j in range(k)) for i in range(k)
        )
        found.append(mat)
        if len(found) > group_cap:
            raise InconclusiveError(
                f"automorphism group larger than the cap {group_cap}"
            )
    return FqfAutomorphismGroup(form.orders, tuple(sorted(found)), complete=True)


def fqf_isometric(form1, form2, node_budget=10**6):
    """Decide (A_1, q_1) isomorphic to (A_2, q_2); never silently false.

    Cheap invariants first (orders chain, per-order q-value multisets,
    Gauss-Milgram residue), then an exhaustive generator-image search.  A
    blown budget raises InconclusiveError.
    """
    for f in (form1, form2):
        if not f.quadratic:
            raise PreconditionError("isometry test needs quadratic forms")
        if not f.is_nondegenerate():
            raise PreconditionError("isometry test needs nondegenerate forms")
    if form1.group_order != form2.group_order:
        return False
    if form1.canonical_orders() != form2.canonical_orders():
        return False
    if form1.group_order > node_budget:
        raise InconclusiveError("groups too large for the brute-force check")
    inv1 = Counter((form1.order_of(x), form1.q_of(x)) for x in form1.elements())
    inv2 = Counter((form2.order_of(x), form2.q_of(x)) for x in form2.elements())
    if inv1 != inv2:
        return False
    if gauss_milgram_signature(form1) != gauss_milgram_signature(form2):
        return False
    for _ in _image_backtrack(form1, form2, node_budget=node_budget):
        return True
    return False


def has_u2_or_v2_component(form, two_torsion_cap=2**12):
    """Does the 2-part form split off u(2) or v(2)?

    Exhaustive scan over pairs (x, y) of order-2 elements with b(x, y) = 1/2
    and (q(x), q(y)) in {(0,0), (1,1)}; a pair splits iff the two linear
    functionals b(-, x), b(-, y) are independent on the generators, which
    makes span(x, y) an orthogonal direct summand by order counting.

    The cap is measured on the 2-torsion subgroup, the only set the scan
    enumerates, so higher 2-power cyclic factors do not blow the budget.
    """
    if not form.quadratic:
        raise PreconditionError("component search needs a quadratic form")
    if any(d & (d - 1) for d in form.orders):
        raise PreconditionError("expects the 2-part of a discriminant form")
    k = len(form.orders)
    if k == 0:
        return False
    if 2**k > two_torsion_cap:
        raise InconclusiveError(
            f"2-torsion subgroup of order 2^{k} exceeds the cap {two_torsion_cap}"
        )

    halves = [d // 2 for d in form.orders]
    q_h = [mod2(halves[i] * halves[i] * form.q_gen[i]) for i in range(k)]
    c_h = [[mod2(2 * halves[i] * halves[j] * form.b_gen[i][j]) for j in range(k)]
           for i in range(k)]
    denom = 1
    for x in q_h:
        denom = _lcm(denom, x.denominator)
    for row in c_h:
        for x in row:
            denom = _lcm(denom, x.denominator)
    qn = [int(x * denom) for x in q_h]
    cn = [[int(x * denom) for x in row] for row in c_h]
    two_d = 2 * denom

    size = 1 << k
    qmask = [0] * size
    for mask in range(1, size):
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        extra = qn[i]
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            extra += cn[i][j]
            m ^= m & -m
        qmask[mask] = (qmask[rest] + extra) % two_d

    # bit i of w[j] set iff b(g_j, h_i) = 1/2
    w = []
    for j in range(k):
        bits = 0
        for i in range(k):
            if mod1(halves[i] * form.b_gen[j][i]) == Fraction(1, 2):
                bits |= 1 << i
        w.append(bits)

    def pair_bits(mask):
        return tuple(bin(w[j] & mask).count("1") & 1 for j in range(k))

    candidates = [m for m in range(1, size) if qmask[m] in (0, denom)]
    for x in candidates:
        qx = qmask[x]
        vx = pair_bits(x)
        for y in candidates:
            if y == x or qmask[y] != qx:
                continue
            # b(x, y) = (q(x+y) - q(x) - q(y)) / 2 must be 1/2
            if (qmask[x ^ y] - qx - qmask[y]) % two_d != denom:
                continue
            vy = pair_bits(y)
            distinct = set()
            for j in range(k):
                v = (vx[j], vy[j])
                if v != (0, 0):
                    distinct.add(v)
                if len(distinct) >= 2:
                    break
            if len(distinct) >= 2:
                return True
    return False
