import random

import pytest

from fmlat.counting import (
    GHodgeSpec,
    double_coset_count,
    fm_count_abelian,
    fm_count_k3,
    nikulin_check,
    parse_ghodge,
    totient_order_bound,
    twisted_partner_check,
)
from fmlat.discriminant import discriminant_form
from fmlat.errors import PreconditionError, SubgroupClosureError
from fmlat.fqf import (
    FiniteQuadraticForm,
    FqfAutomorphismGroup,
    compose,
    fqf_automorphisms,
    fqf_standard,
    matrix_inverse_in_group,
    subgroup_closure,
)
from fmlat.lattice import (
    E8,
    U,
    enriques_lattice,
    f_lattice,
    g_lattice,
    parse_lattice_expr,
    rank_one,
)
from fmlat.scenarios import abelian_embedding, transcendental_of_f_series
from fractions import Fraction


def test_nikulin_generic_transcendental():
    rep = nikulin_check(parse_lattice_expr("U+U(2)+E8(-2)"))
    assert rep.holds
    assert rep.condition_a == ()          # no odd primes divide det
    assert not rep.b_applicable           # rank 12 > l_2 = 10
    assert rep.l_2 == 10


def test_nikulin_f_series_transcendental():
    t = transcendental_of_f_series(3)
    rep = nikulin_check(t)
    assert rep.holds
    assert [c.p for c in rep.condition_a] == [3]
    assert rep.condition_a[0].l_p == 1
    assert rep.b_applicable and rep.b_holds   # rank 11 = l_2, u(2) found


def test_nikulin_u3_fails_at_3():
    rep = nikulin_check(U(3))
    assert not rep.holds
    assert [(c.p, c.holds) for c in rep.condition_a] == [(3, False)]
    assert rep.condition_a[0].l_p == 2        # 2 >= 2 + 2 fails


def test_nikulin_u2_condition_b_checked():
    rep = nikulin_check(U(2))
    assert rep.holds
    assert rep.b_applicable and rep.b_holds


def test_nikulin_preconditions():
    with pytest.raises(PreconditionError):
        nikulin_check(E8(-2))             # definite
    with pytest.raises(PreconditionError):
        nikulin_check(rank_one(-3))       # odd


def _group_from_units(modulus, units, q_value=None):
    """Cyclic-group automorphism set {x -> u x} as an FqfAutomorphismGroup."""
    elements = tuple(sorted(((u % modulus,),) for u in units))
    return FqfAutomorphismGroup((modulus,), elements, complete=True)


def test_double_coset_left_everything():
    form = discriminant_form(U(3))
    ambient = fqf_automorphisms(form)
    rng = random.Random(51)
    for _ in range(5):
        gen = rng.choice(ambient.elements)
        right = subgroup_closure(form.orders, [gen])
        assert double_coset_count(ambient, list(ambient.elements), list(right)) == 1


def test_double_coset_u3_paper_case():
    form = discriminant_form(U(3))
    ambient = fqf_automorphisms(form)         # order 4
    from fmlat.isometry import induced_on_discriminant, lattice_isometries

    image = induced_on_discriminant(U(3), lattice_isometries(U(3))).group
    assert double_coset_count(ambient, list(image.elements),
                              [ambient.identity()]) == 1


def test_double_coset_cyclic4_with_sign_subgroup():
    # units of Z/5 form a cyclic group of order 4; {+-1} \ G / {1} has 2 orbits
    ambient = _group_from_units(5, (1, 2, 3, 4))
    left = [((1,),), ((4,),)]
    right = [((1,),)]
    assert double_coset_count(ambient, left, right) == 2


def test_double_coset_rejects_non_subgroup():
    ambient = _group_from_units(5, (1, 2, 3, 4))
    with pytest.raises(SubgroupClosureError) as err:
        double_coset_count(ambient, [((2,),)], [((1,),)])
    assert "identity" in str(err.value) or "closed" in str(err.value)
    with pytest.raises(SubgroupClosureError):
        double_coset_count(ambient, [((1,),), ((2,),)], [((1,),)])


def _burnside_double_cosets(ambient, left, right):
    """Oracle: average fixed points of (h, k) acting by g -> h g k."""
    orders = ambient.orders
    total = 0
    elements = list(ambient.elements)
    for h in left:
        for k in right:
            for g in elements:
                if compose(orders, compose(orders, h, g), k) == g:
                    total += 1
    assert total % (len(left) * len(right)) == 0
    return total // (len(left) * len(right))


def _ambient_corpus():
    corpus = [
        fqf_automorphisms(discriminant_form(U(3))),                   # 4
        fqf_automorphisms(fqf_standard("v2")),                        # 6
        fqf_automorphisms(fqf_standard("u2").direct_sum(fqf_standard("u2"))),
        fqf_automorphisms(FiniteQuadraticForm(
            (3, 3), (Fraction(0), Fraction(0)),
            ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(0))),
        )),                                                           # GL(2,3), 48
        _group_from_units(16, (1, 3, 5, 7, 9, 11, 13, 15)),           # 8
    ]
    return [g for g in corpus if g.order <= 200]


def test_double_coset_against_burnside():
    rng = random.Random(53)
    corpus = _ambient_corpus()
    assert any(g.order >= 48 for g in corpus)
    checked = 0
    while checked < 20:
        ambient = rng.choice(corpus)
        gens_left = rng.sample(ambient.elements, k=min(2, ambient.order))
        gens_right = rng.sample(ambient.elements, k=1)
        left = list(subgroup_closure(ambient.orders, gens_left))
        right = list(subgroup_closure(ambient.orders, gens_right))
        got = double_coset_count(ambient, left, right)
        want = _burnside_double_cosets(ambient, left, right)
        assert got == want
        checked += 1


def test_double_coset_symmetry_under_inversion():
    rng = random.Random(59)
    corpus = _ambient_corpus()
    for _ in range(8):
        ambient = rng.choice(corpus)
        left = list(subgroup_closure(
            ambient.orders, rng.sample(ambient.elements, k=1)))
        right = list(subgroup_closure(
            ambient.orders, rng.sample(ambient.elements, k=1)))
        assert double_coset_count(ambient, left, right) == \
            double_coset_count(ambient, right, left)


def test_totient_order_bound():
    assert totient_order_bound(12) == 42
    assert totient_order_bound(1) == 2
    assert totient_order_bound(4) == 12

    def phi(n):
        out = n
        m, p = n, 2
        while p * p <= m:
            if m % p == 0:
                out -= out // p
                while m % p == 0:
                    m //= p
            p += 1
        if m > 1:
            out -= out // m
        return out

    for r in (1, 2, 4, 6, 12):
        want = max(m for m in range(1, 4 * r * r + 4) if r % phi(m) == 0)
        assert totient_order_bound(r) == want


def test_twisted_partner_check():
    rep = twisted_partner_check(parse_lattice_expr("U+U(2)+E8(-2)"))
    assert (rep.order2_exact, rep.hodge_bound, rep.partner_exists) == (1023, 42, True)
    assert rep.order2_dividing == 1024

    trivial = twisted_partner_check(parse_lattice_expr("U+U"))
    assert (trivial.order2_exact, trivial.partner_exists) == (0, False)

    small = twisted_partner_check(parse_lattice_expr("U+U(2)"))
    assert (small.order2_exact, small.hodge_bound, small.partner_exists) == (3, 12, False)


def test_fm_count_k3_paths():
    e = enriques_lattice()
    t = parse_lattice_expr("U+U(2)+E8(-2)")
    rep = fm_count_k3(e, t)
    assert rep.total == 1 and rep.shortcut == "nikulin-ns"

    rep_f = fm_count_k3(f_lattice(2), transcendental_of_f_series(2))
    assert rep_f.total == 1

    from fmlat.scenarios import transcendental_of_g_series

    rep_g = fm_count_k3(g_lattice(1), transcendental_of_g_series(1))
    assert rep_g.total == 1 and rep_g.shortcut == "hyperbolic-summand"


def test_fm_count_abelian_paths():
    ns, t = abelian_embedding("U(3)")
    rep = fm_count_abelian(ns, t)
    assert rep.total == 1 and rep.shortcut == "binary-scan"
    assert "B-dual" in rep.interpretation

    ns2, t2 = abelian_embedding("U(2)")
    rep2 = fm_count_abelian(ns2, t2)
    assert rep2.total == 1 and rep2.shortcut == "nikulin-ns"

    ns3, t3 = abelian_embedding("U")
    rep3 = fm_count_abelian(ns3, t3)
    assert rep3.total == 1 and rep3.shortcut == "hyperbolic-summand"


def test_fm_count_ghodge_invariance():
    # surjectivity makes the Hodge group irrelevant: same count for any mode
    ns, t = abelian_embedding("U(3)")
    for spec in (GHodgeSpec.trivial(), GHodgeSpec.plus_minus(),
                 GHodgeSpec.cyclic(4)):
        assert fm_count_abelian(ns, t, spec).total == 1


def test_fm_count_rank_check():
    with pytest.raises(PreconditionError):
        fm_count_k3(enriques_lattice(), parse_lattice_expr("U"))


def test_fm_count_requires_certificate():
    # rank-3 NS failing the criterion on both sides demands an explicit genus
    ns = parse_lattice_expr("U(3)+<-6>")
    t = parse_lattice_expr("U(3)+<6>")
    with pytest.raises(PreconditionError) as err:
        fm_count_abelian(ns, t)
    assert "genus_reps" in str(err.value)


def test_fm_count_explicit_genus():
    ns, t = abelian_embedding("U(3)")
    rep = fm_count_abelian(ns, t, genus_reps=[ns])
    assert rep.total == 1 and rep.shortcut == "explicit-genus"


def test_fm_count_runs_real_double_cosets():
    # synthetic non-surjective representative: O(<-12>) maps onto only half of
    # the four units preserving q on Z/12, so the coset count genuinely runs
    ns = rank_one(-12)
    t = parse_lattice_expr("U+U+<2>")
    rep = fm_count_abelian(ns, t, genus_reps=[ns])
    assert rep.per_rep_count == (2,)
    assert rep.total == 2
    # enlarging the Hodge image to the whole of O(A) collapses the count
    full = GHodgeSpec.explicit([((5,),), ((7,),)])
    rep_full = fm_count_abelian(ns, t, full, genus_reps=[ns])
    assert rep_full.total == 1


def test_explicit_ghodge_generator_validation():
    ns = rank_one(-12)
    form = discriminant_form(ns)
    with pytest.raises(PreconditionError):
        GHodgeSpec.explicit([((2,),)]).image_elements(form)  # q not preserved


def test_ghodge_validation():
    with pytest.raises(PreconditionError):
        GHodgeSpec.cyclic(5).validate(6)   # phi(5) = 4 does not divide 6
    GHodgeSpec.cyclic(5).validate(4)
    assert parse_ghodge("trivial").mode == "trivial"
    assert parse_ghodge("cyclic:6").m == 6
    with pytest.raises(PreconditionError):
        parse_ghodge("nonsense")


def test_ghodge_cyclic_blocks_explicit_count():
    ns, t = abelian_embedding("U(3)")
    spec = GHodgeSpec.cyclic(4)
    with pytest.raises(PreconditionError):
        spec.image_elements(discriminant_form(ns))


def test_subgroup_inverse_helper():
    ambient = _group_from_units(16, (1, 3, 5, 7, 9, 11, 13, 15))
    for m in ambient.elements:
        inv = matrix_inverse_in_group(ambient.orders, m)
        assert compose(ambient.orders, m, inv) == ambient.identity()
