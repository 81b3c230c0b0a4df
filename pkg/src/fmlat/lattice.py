"""Even integral lattices: constructors, expression parser, sublattice operations.

A lattice is stored as its Gram matrix in a fixed basis.  Constructors record
the block terms they were built from ("U", "E8", rank-one) so that structural
facts (a hyperbolic-plane summand, say) can be read off without searching.

Expression grammar (ASCII):

    Expr := Term ("+" Term)*
    Term := "U" ["(" int ")"] | "E8" ["(" int ")"] | "<" int ">" | "Lambda"
"""

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ExpressionError, PreconditionError
from .matrixops import (
    MAX_ENTRY,
    as_matrix,
    bareiss_det,
    check_entry_bound,
    is_symmetric,
    matvec,
    signature,
)
from .snf import elementary_divisors, integer_kernel, row_saturation

# Cartan matrix of the E8 root system, Bourbaki node numbering.  Any even
# unimodular positive definite rank-8 Gram would do; this one is fixed so
# reports are reproducible.
E8_GRAM = (
    (2, 0, -1, 0, 0, 0, 0, 0),
    (0, 2, 0, -1, 0, 0, 0, 0),
    (-1, 0, 2, -1, 0, 0, 0, 0),
    (0, -1, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, -1),
    (0, 0, 0, 0, 0, 0, -1, 2),
)


@lru_cache(maxsize=None)
def _det_cached(gram):
    return bareiss_det(gram)


@lru_cache(maxsize=None)
def _signature_cached(gram):
    return signature(gram)


@dataclass(frozen=True)
class Lattice:
    """Integral symmetric bilinear form on Z^rank.

    `terms` is optional constructor provenance: a tuple of ("U", k),
    ("E8", k) or ("rank1", m) blocks in basis order.  `flagged_degenerate`
    marks Gram matrices with det 0, which are only produced as orthogonal
    complements of isotropic sublattices.
    """

    gram: tuple
    labels: tuple = None
    terms: tuple = None
    flagged_degenerate: bool = field(default=False, compare=False)

    def __post_init__(self):
        gram = as_matrix(self.gram)
        object.__setattr__(self, "gram", gram)
        if gram and not is_symmetric(gram):
            raise PreconditionError("Gram matrix must be symmetric")
        check_entry_bound(gram)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(gram):
                raise PreconditionError("labels must match the rank")
        if not self.flagged_degenerate and gram and _det_cached(gram) == 0:
            raise PreconditionError(
                "degenerate Gram matrix (det 0); only orthogonal complements "
                "may carry one, flagged"
            )

    @property
    def rank(self):
        return len(self.gram)

    @property
    def det(self):
        return _det_cached(self.gram)

    def signature(self):
        pos, neg, _ = _signature_cached(self.gram)
        return pos, neg

    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def is_degenerate(self):
        return self.rank > 0 and self.det == 0

    def is_definite(self):
        pos, neg = self.signature()
        return (pos == 0 or neg == 0) and not self.is_degenerate()

    def bilinear(self, v, w):
        return sum(c * x for c, x in zip(matvec(self.gram, v), w))

    def norm(self, v):
        return self.bilinear(v, v)

    def rescaled(self, k):
        if k == 0:
            raise PreconditionError("scale must be nonzero")
        terms = None
        if self.terms is not None:
            terms = tuple((name, s * k) for name, s in self.terms)
        return Lattice(
            tuple(tuple(k * x for x in row) for row in self.gram),
            labels=self.labels,
            terms=terms,
        )

    def to_json_dict(self):
        d = {"gram": [list(row) for row in self.gram]}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    def describe(self):
        if self.terms is None:
            return f"rank-{self.rank} lattice"
        return "+".join(_term_str(t) for t in self.terms)


def _term_str(term):
    name, k = term
    if name == "rank1":
        return f"<{k}>"
    return name if k == 1 else f"{name}({k})"


def U(scale=1):
    """Hyperbolic plane, rescaled: Gram [[0, k], [k, 0]]."""
    if scale == 0:
        raise PreconditionError("scale must be nonzero")
    return Lattice(
        ((0, scale), (scale, 0)),
        labels=("e", "f"),
        terms=(("U", scale),),
    )


def E8(scale=1):
    if scale == 0:
        raise PreconditionError("scale must be nonzero")
    return Lattice(
        tuple(tuple(scale * x for x in row) for row in E8_GRAM),
        labels=tuple(f"a{i}" for i in range(1, 9)),
        terms=(("E8", scale),),
    )


def rank_one(m):
    """The rank-1 lattice <m>."""
    if m == 0:
        raise PreconditionError("rank-one lattice needs a nonzero norm")
    return Lattice(((m,),), labels=("v",), terms=(("rank1", m),))


def direct_sum(*lattices):
    rank = sum(lat.rank for lat in lattices)
    rows = []
    offset = 0
    for lat in lattices:
        for row in lat.gram:
            rows.append((0,) * offset + row + (0,) * (rank - offset - lat.rank))
        offset += lat.rank
    labels = None
    if all(lat.labels is not None for lat in lattices):
        labels = []
        for i, lat in enumerate(lattices, start=1):
            labels.extend(f"{lab}.{i}" for lab in lat.labels)
        labels = tuple(labels)
    terms = None
    if all(lat.terms is not None for lat in lattices):
        terms = tuple(t for lat in lattices for t in lat.terms)
    return Lattice(tuple(rows), labels=labels, terms=terms)


def k3_lattice():
    """The rank-22 K3 lattice E8(-1) + E8(-1) + U + U + U."""
    return direct_sum(E8(-1), E8(-1), U(), U(), U())


def enriques_lattice():
    """U(2) + E8(-2), the pullback of an Enriques Picard lattice to its cover."""
    return direct_sum(U(2), E8(-2))


def f_lattice(n):
    """Rank-11 series U(2) + E8(-2) + <-2N>, N >= 2."""
    if n < 2:
        raise PreconditionError("F-series needs N >= 2")
    return direct_sum(U(2), E8(-2), rank_one(-2 * n))


def g_lattice(m):
    """Rank-11 series U + E8(-2) + <-4M>, M >= 1."""
    if m < 1:
        raise PreconditionError("G-series needs M >= 1")
    return direct_sum(U(), E8(-2), rank_one(-4 * m))


_TOKEN = re.compile(r"\s*(Lambda|E8|U|[+<>()]|-?\d+)")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ExpressionError(
                f"unexpected character {stripped[0]!r}", len(text) - len(stripped)
            )
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    return tokens


def parse_lattice_expr(text):
    """Parse an expression like "U(2)+E8(-2)+<-4>" into a Lattice."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExpressionError("empty expression", 0)
    idx = 0

    def peek():
        return tokens[idx][0] if idx < len(tokens) else None

    def take(expected=None):
        nonlocal idx
        if idx >= len(tokens):
            raise ExpressionError(
                f"unexpected end of expression, expected {expected}", len(text)
            )
        tok, pos = tokens[idx]
        if expected is not None and tok != expected:
            raise ExpressionError(f"expected {expected!r}, found {tok!r}", pos)
        idx += 1
        return tok, pos

    def take_int():
        tok, pos = take("an integer" if peek() is None else None)
        try:
            value = int(tok)
        except ValueError:
            raise ExpressionError(f"expected an integer, found {tok!r}", pos) from None
        if abs(value) > MAX_ENTRY:
            raise ExpressionError("integer exceeds the 64-bit safety bound", pos)
        return value, pos

    def term():
        tok, pos = take()
        if tok == "U" or tok == "E8":
            scale = 1
            if peek() == "(":
                take("(")
                scale, spos = take_int()
                take(")")
                if scale == 0:
                    raise ExpressionError("zero scale", spos)
            return U(scale) if tok == "U" else E8(scale)
        if tok == "<":
            m, mpos = take_int()
            take(">")
            if m == 0:
                raise ExpressionError("zero scale", mpos)
            return rank_one(m)
        if tok == "Lambda":
            return k3_lattice()
        raise ExpressionError(f"expected a lattice term, found {tok!r}", pos)

    parts = [term()]
    while idx < len(tokens):
        take("+")
        parts.append(term())
    return direct_sum(*parts) if len(parts) > 1 else parts[0]


@dataclass(frozen=True)
class LatticeInvariants:
    rank: int
    det: int
    signature: tuple
    even: bool
    degenerate: bool

    def to_json_dict(self):
        return {
            "rank": self.rank,
            "det": self.det,
            "signature": list(self.signature),
            "even": self.even,
            "degenerate": self.degenerate,
        }


def basic_invariants(lat):
    return LatticeInvariants(
        rank=lat.rank,
        det=lat.det,
        signature=lat.signature(),
        even=lat.is_even(),
        degenerate=lat.is_degenerate(),
    )


@dataclass(frozen=True)
class SublatticeSpec:
    ambient: Lattice
    generators: tuple

    def __post_init__(self):
        gens = as_matrix(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise PreconditionError("sublattice needs at least one generator")
        if any(len(v) != self.ambient.rank for v in gens):
            raise PreconditionError("generator length must equal the ambient rank")
        if all(all(x == 0 for x in v) for v in gens):
            raise PreconditionError("sublattice generators are all zero")


@dataclass(frozen=True)
class ComplementResult:
    lattice: Lattice
    basis: tuple  # integral basis vectors in ambient coordinates
    degenerate: bool

    @property
    def rank(self):
        return len(self.basis)


def _induced_gram(ambient, basis):
    return tuple(
        tuple(ambient.bilinear(v, w) for w in basis) for v in basis
    )


def orthogonal_complement(spec):
    """Orthogonal complement of the generated sublattice, always primitive.

    The result may be empty (rank 0) or carry a degenerate induced form; the
    latter happens exactly when the sublattice meets its own complement.
    """
    ambient = spec.ambient
    if ambient.is_degenerate():
        raise PreconditionError("ambient lattice must be nondegenerate")
    pairing = tuple(matvec(ambient.gram, v) for v in spec.generators)
    basis = integer_kernel(pairing)
    gram = _induced_gram(ambient, basis)
    degenerate = bool(basis) and bareiss_det(gram) == 0
    lattice = Lattice(gram, flagged_degenerate=degenerate)
    return ComplementResult(lattice=lattice, basis=basis, degenerate=degenerate)


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    saturation: tuple = None  # basis of the saturated sublattice when not primitive


def is_primitive_sublattice(spec):
    """True iff the generated sublattice is primitive (torsion-free quotient)."""
    gens = spec.generators
    divisors = elementary_divisors(gens)
    rank = sum(1 for d in divisors if d)
    if rank < len(gens):
        dep = _dependency_certificate(gens, rank)
        raise PreconditionError(
            f"generators are dependent: {dep} is an integral relation"
        )
    if all(d == 1 for d in divisors):
        return PrimitivityResult(primitive=True)
    return PrimitivityResult(primitive=False, saturation=row_saturation(gens))


def _dependency_certificate(gens, rank):
    from .snf import smith_normal_form

    dec = smith_normal_form(gens)
    # rows of `left` beyond the rank combine the generators to zero
    return tuple(dec.left[rank][j] for j in range(len(gens)))


@dataclass(frozen=True)
class HyperbolicSummand:
    found: bool
    e: tuple = None
    f: tuple = None
    method: str = None  # "structural" or "search"
    searched_height: int = None


def _block_offsets(lat):
    offsets = []
    pos = 0
    for term in lat.terms or ():
        offsets.append((term, pos))
        pos += 8 if term[0] == "E8" else (2 if term[0] == "U" else 1)
    return offsets


def has_hyperbolic_summand(lat, height_bound=10):
    """Detect a U direct summand: structurally first, then a bounded search.

    The search enumerates isotropic vector pairs with pairing 1 up to a
    coordinate height; a miss means "not found up to the reported height",
    never nonexistence.  For ranks where the full box would be astronomically
    large the effective height is lowered (and reported) so the scan stays
    total.
    """
    if not lat.is_even() or lat.is_degenerate():
        raise PreconditionError("hyperbolic-summand detection needs an even "
                                "nondegenerate lattice")
    for term, pos in _block_offsets(lat):
        if term == ("U", 1):
            n = lat.rank
            e = tuple(1 if i == pos else 0 for i in range(n))
            f = tuple(1 if i == pos + 1 else 0 for i in range(n))
            return HyperbolicSummand(True, e, f, "structural", None)

    n = lat.rank
    height = height_bound
    while height > 0 and (2 * height + 1) ** n > 3 * 10**6:
        height -= 1
    if height == 0:
        return HyperbolicSummand(False, method="search", searched_height=0)

    from itertools import product

    box = [v for v in product(range(-height, height + 1), repeat=n)
           if any(v)]
    isotropic = [v for v in box if lat.norm(v) == 0]
    for e in isotropic:
        row = matvec(lat.gram, e)
        for f in isotropic:
            if sum(a * b for a, b in zip(row, f)) != 1:
                continue
            if _splits_off_u(lat, e, f):
                return HyperbolicSummand(True, e, f, "search", height)
    return HyperbolicSummand(False, method="search", searched_height=height)


def _splits_off_u(lat, e, f):
    comp = orthogonal_complement(SublatticeSpec(lat, (e, f)))
    if comp.degenerate:
        return False
    stack = (e, f) + comp.basis
    if len(stack) != lat.rank:
        return False
    return abs(bareiss_det(stack)) == 1
