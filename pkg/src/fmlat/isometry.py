"""Integer isometry groups O(L) for small lattices, the map O(L) -> O(A_L),
binary-form equivalence and the bounded genus scanner.

Supported shapes: rank <= 2 (any signature) and definite lattices of rank <= 8.
Indefinite binary groups are certified complete exactly when -det(G) is a
perfect square (otherwise a Pell unit gives an infinite group, and the result
is an entry-bounded subset marked incomplete).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .discriminant import discriminant_form, discriminant_group
from .errors import InconclusiveError, PreconditionError, UnsupportedLatticeError
from .fqf import (
    FqfAutomorphismGroup,
    fqf_automorphisms,
    fqf_isometric,
    identity_matrix,
    preserves_form,
)
from .lattice import Lattice
from .matrixops import as_matrix, frac_matvec, matmul, matvec, transpose


@dataclass(frozen=True)
class IsometrySet:
    gram: tuple
    elements: tuple          # integer matrices M with M^T G M = G, columns = images
    complete: bool
    entry_bound: int = None
    certificate: str = ""

    @property
    def order(self):
        return len(self.elements)

    def to_json_dict(self):
        return {
            "order": self.order,
            "complete": self.complete,
            "entry_bound": self.entry_bound,
            "certificate": self.certificate,
            "elements": [[list(row) for row in m] for m in self.elements],
        }


def _is_isometry(gram, mat):
    return matmul(matmul(transpose(mat), gram), mat) == gram


def lattice_isometries(lat, bound=None, definite_cap=10**5):
    """Enumerate O(L) for rank <= 2 lattices or definite lattices of rank <= 8."""
    if lat.is_degenerate():
        raise PreconditionError("isometry enumeration needs a nondegenerate lattice")
    if lat.rank == 0:
        return IsometrySet(lat.gram, ((),), True, None, "trivial")
    if lat.rank == 1:
        return IsometrySet(lat.gram, (((-1,),), ((1,),)), True, 1, "rank 1")
    if lat.is_definite():
        if lat.rank > 8:
            raise UnsupportedLatticeError(
                "definite isometry enumeration is limited to rank <= 8"
            )
        return _definite_isometries(lat, definite_cap)
    if lat.rank == 2:
        return _binary_indefinite_isometries(lat, bound)
    raise UnsupportedLatticeError(
        "indefinite isometry enumeration is limited to rank 2"
    )


def _binary_indefinite_isometries(lat, bound):
    g = lat.gram
    max_entry = max(abs(x) for row in g for x in row)
    certified_bound = 3 * max_entry
    if bound is None:
        bound = certified_bound
    targets = (g[0][0], g[1][1], g[0][1])
    box = range(-bound, bound + 1)
    cols0 = [v for v in product(box, repeat=2) if lat.norm(v) == targets[0]]
    cols1 = [v for v in product(box, repeat=2) if lat.norm(v) == targets[1]]
    elements = []
    for v in cols0:
        row = matvec(g, v)
        for w in cols1:
            if row[0] * w[0] + row[1] * w[1] == targets[2]:
                elements.append(((v[0], w[0]), (v[1], w[1])))
    disc = -lat.det
    square = math.isqrt(disc) ** 2 == disc if disc >= 0 else False
    complete = square and bound >= certified_bound
    cert = (
        f"finite group (disc {disc} is a square); entry bound {bound} >= "
        f"3*max|G| = {certified_bound}" if complete else
        f"entry-bounded subset at bound {bound}"
        + ("" if square else f" (disc {disc} not a square: group is infinite)")
    )
    return IsometrySet(g, tuple(sorted(elements)), complete, bound, cert)


def _definite_isometries(lat, cap):
    sign = 1 if lat.signature()[0] else -1
    h = tuple(tuple(sign * x for x in row) for row in lat.gram)
    n = lat.rank

    cols = [_vectors_of_norm(h, h[i][i]) for i in range(n)]
    elements = []
    chosen = []

    def rec(i):
        if i == n:
            # columns of the matrix are the chosen images
            elements.append(tuple(tuple(chosen[c][r] for c in range(n))
                                  for r in range(n)))
            if len(elements) > cap:
                raise InconclusiveError(
                    f"definite orthogonal group exceeds the cap {cap}"
                )
            return
        for v in cols[i]:
            if all(_pair(h, chosen[j], v) == h[j][i] for j in range(i)):
                chosen.append(v)
                rec(i + 1)
                chosen.pop()

    rec(0)
    return IsometrySet(lat.gram, tuple(sorted(elements)), True, None,
                       "definite backtracking over vectors of the basis norms")


def _pair(gram, v, w):
    return sum(a * b for a, b in zip(matvec(gram, v), w))


def _vectors_of_norm(h, norm):
    """All integer vectors of a given norm for a positive definite Gram h."""
    n = len(h)
    # h = L D L^T with unit lower-triangular L, exact rationals
    d = [Fraction(0)] * n
    lo = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        s = Fraction(h[j][j])
        for k in range(j):
            s -= lo[j][k] * lo[j][k] * d[k]
        d[j] = s
        lo[j][j] = Fraction(1)
        for i in range(j + 1, n):
            t = Fraction(h[i][j])
            for k in range(j):
                t -= lo[i][k] * lo[j][k] * d[k]
            lo[i][j] = t / d[j]
    out = []
    coords = [0] * n

    def rec(i, budget):
        # Q(x) = sum_j d_j (x_j + sum_{r>j} L[r][j] x_r)^2, filled from the tail
        if i < 0:
            if budget == 0:
                out.append(tuple(coords))
            return
        center = -sum(lo[r][i] * coords[r] for r in range(i + 1, n))
        span = math.isqrt(int(budget / d[i])) + 2
        for x in range(math.floor(center) - span, math.floor(center) + span + 1):
            used = d[i] * (x - center) ** 2
            if used <= budget:
                coords[i] = x
                rec(i - 1, budget - used)
        coords[i] = 0

    rec(n - 1, Fraction(norm))
    return sorted(out)


@dataclass(frozen=True)
class InducedMap:
    group: FqfAutomorphismGroup   # image of O(L) in O(A_L)
    kernel_size: int
    pairs: tuple                  # (image matrix, one isometry preimage)


def induced_on_discriminant(lat, iso):
    """Image of an isometry set under O(L) -> O(A_L), with the kernel size."""
    if not lat.is_even():
        raise PreconditionError("the discriminant action is defined for even lattices")
    dg = discriminant_group(lat)
    form = discriminant_form(lat)
    orders = dg.orders
    k = len(orders)
    image = {}
    kernel = 0
    ident = identity_matrix(orders)
    for m in iso.elements:
        cols = []
        for lift in dg.lifts:
            moved = frac_matvec(m, lift) if k else ()
            cols.append(dg.coordinates_of(lat.gram, moved))
        mat = tuple(tuple(cols[j][i] for j in range(k)) for i in range(k))
        if not preserves_form(form, mat):
            raise ArithmeticError("induced map failed to preserve the form")
        if mat == ident:
            kernel += 1
        image.setdefault(mat, m)
    group = FqfAutomorphismGroup(orders, tuple(sorted(image)), complete=iso.complete)
    return InducedMap(group=group, kernel_size=kernel,
                      pairs=tuple(sorted(image.items())))


@dataclass(frozen=True)
class SurjectivityReport:
    status: str                  # "surjective" | "not_surjective" | "inconclusive"
    image_order: int = None
    full_order: int = None
    preimages: tuple = None      # (target automorphism, isometry) pairs
    missing: tuple = None
    detail: str = ""

    def to_json_dict(self):
        d = {"status": self.status, "detail": self.detail}
        if self.image_order is not None:
            d["image_order"] = self.image_order
            d["full_order"] = self.full_order
        return d


def is_surjective_on_discriminant(lat, aut_cap=10**4):
    """Tri-state check that O(L) -> O(A_L) is onto, with certificates."""
    try:
        iso = lattice_isometries(lat)
    except InconclusiveError as exc:
        return SurjectivityReport(status="inconclusive", detail=str(exc))
    if not iso.complete:
        return SurjectivityReport(
            status="inconclusive",
            detail="isometry enumeration is not certified complete: " + iso.certificate,
        )
    induced = induced_on_discriminant(lat, iso)
    try:
        full = fqf_automorphisms(discriminant_form(lat), element_cap=aut_cap)
    except InconclusiveError as exc:
        return SurjectivityReport(status="inconclusive", detail=str(exc))
    image_set = set(induced.group.elements)
    missing = tuple(m for m in full.elements if m not in image_set)
    if not missing:
        return SurjectivityReport(
            status="surjective",
            image_order=induced.group.order,
            full_order=full.order,
            preimages=induced.pairs,
            detail=f"all {full.order} automorphisms lift",
        )
    return SurjectivityReport(
        status="not_surjective",
        image_order=induced.group.order,
        full_order=full.order,
        preimages=induced.pairs,
        missing=missing,
        detail=f"image has order {induced.group.order} < {full.order}",
    )


@lru_cache(maxsize=8)
def _unimodular_matrices(bound):
    """All integer 2x2 matrices with det +-1 and entries bounded, sorted."""
    out = []
    rng = range(-bound, bound + 1)
    for p in rng:
        for q in rng:
            for r in rng:
                if p:
                    for eps in (1, -1):
                        num = eps + q * r
                        if num % p == 0:
                            s = num // p
                            if abs(s) <= bound:
                                out.append(((p, q), (r, s)))
                elif q * r in (1, -1):
                    for s in rng:
                        out.append(((p, q), (r, s)))
    return tuple(sorted(set(out)))


def binary_equivalence(g1, g2, bound=10):
    """Search for P with P^T G1 P = G2, |entries| <= bound; None if not found."""
    g1 = as_matrix(g1)
    g2 = as_matrix(g2)
    for mat in _unimodular_matrices(bound):
        if matmul(matmul(transpose(mat), g1), mat) == g2:
            return mat
    return None


@dataclass(frozen=True)
class GenusClass:
    representative: tuple
    members: tuple               # (gram, transform from representative) pairs
    signature: tuple
    disc_orders: tuple
    disc_q: tuple

    def to_json_dict(self):
        return {
            "representative": [list(r) for r in self.representative],
            "member_count": len(self.members),
            "members": [[list(r) for r in g] for g, _ in self.members],
            "signature": list(self.signature),
            "disc_orders": list(self.disc_orders),
            "disc_q": [str(x) for x in self.disc_q],
        }


@dataclass(frozen=True)
class GenusScanReport:
    det: int
    coeff_bound: int
    transform_bound: int
    classes: tuple
    possibly_equal: tuple        # pairs of class indices with matching invariants
    caveat: str

    def to_json_dict(self):
        return {
            "det": self.det,
            "coeff_bound": self.coeff_bound,
            "transform_bound": self.transform_bound,
            "class_count": len(self.classes),
            "classes": [c.to_json_dict() for c in self.classes],
            "possibly_equal": [list(p) for p in self.possibly_equal],
            "caveat": self.caveat,
        }


def binary_genus_scan(det, coeff_bound, transform_bound):
    """Cluster even binary Gram matrices of a given determinant.

    Candidates [[2a, b], [b, 2c]] with |a|, |c| <= coeff_bound and
    |b| <= 2 * coeff_bound are clustered by certified unimodular equivalence
    (transform orbits), then cross-checked by signature and discriminant-form
    isometry.  Classes sharing all invariants without a connecting transform
    are reported in `possibly_equal` rather than merged.
    """
    if det == 0:
        raise PreconditionError("determinant must be nonzero")
    candidates = []
    for a in range(-coeff_bound, coeff_bound + 1):
        for c in range(-coeff_bound, coeff_bound + 1):
            for b in range(-2 * coeff_bound, 2 * coeff_bound + 1):
                if 4 * a * c - b * b == det:
                    candidates.append(((2 * a, b), (b, 2 * c)))
    candidates.sort()

    transforms = _unimodular_matrices(transform_bound)
    reps = []      # representative grams
    orbits = []    # dict gram -> transform
    members = []   # list of (gram, transform) per class
    for gram in candidates:
        placed = False
        for idx, orbit in enumerate(orbits):
            if gram in orbit:
                members[idx].append((gram, orbit[gram]))
                placed = True
                break
        if not placed:
            orbit = {}
            for mat in transforms:
                image = matmul(matmul(transpose(mat), gram), mat)
                orbit.setdefault(image, mat)
            reps.append(gram)
            orbits.append(orbit)
            members.append([(gram, ((1, 0), (0, 1)))])

    classes = []
    for rep, mem in zip(reps, members):
        lat = Lattice(rep)
        form = discriminant_form(lat) if lat.is_even() else None
        classes.append(GenusClass(
            representative=rep,
            members=tuple(mem),
            signature=lat.signature(),
            disc_orders=form.orders if form else (),
            disc_q=form.q_gen if form else (),
        ))

    possibly_equal = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            ci, cj = classes[i], classes[j]
            if ci.signature != cj.signature:
                continue
            fi = discriminant_form(Lattice(ci.representative))
            fj = discriminant_form(Lattice(cj.representative))
            try:
                same = fqf_isometric(fi, fj)
            except InconclusiveError:
                same = True
            if same:
                possibly_equal.append((i, j))

    caveat = (
        f"classes enumerated for |a|,|c| <= {coeff_bound}, |b| <= {2*coeff_bound}; "
        f"splits are certified only up to transform entries <= {transform_bound}"
    )
    return GenusScanReport(
        det=det,
        coeff_bound=coeff_bound,
        transform_bound=transform_bound,
        classes=tuple(classes),
        possibly_equal=tuple(possibly_equal),
        caveat=caveat,
    )
