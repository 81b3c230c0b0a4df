from hypothesis import given, settings
from hypothesis import strategies as st

from fmlat.lattice import E8
from fmlat.matrixops import bareiss_det
from fmlat.snf import integer_kernel, row_saturation, smith_normal_form


@st.composite
def int_matrices(draw, max_dim=8, max_entry=50):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    rows = draw(st.lists(
        st.lists(st.integers(-max_entry, max_entry), min_size=n, max_size=n),
        min_size=m, max_size=m,
    ))
    return tuple(tuple(r) for r in rows)


def assert_snf_contract(mat):
    dec = smith_normal_form(mat)
    m, n = len(mat), len(mat[0])
    product = dec.reassemble(mat)
    for i in range(m):
        for j in range(n):
            want = dec.diagonal[i] if i == j and i < len(dec.diagonal) else 0
            assert product[i][j] == want
    for a, b in zip(dec.diagonal, dec.diagonal[1:]):
        if a == 0:
            assert b == 0
        else:
            assert b % a == 0
    assert all(d >= 0 for d in dec.diagonal)
    assert abs(bareiss_det(dec.left)) == 1
    assert abs(bareiss_det(dec.right)) == 1
    return dec


@given(int_matrices())
@settings(max_examples=100, deadline=None)
def test_snf_contract_random(mat):
    assert_snf_contract(mat)


def test_snf_fixed_examples():
    assert smith_normal_form(((0, 3), (3, 0))).diagonal == (3, 3)
    assert smith_normal_form(((0, 2), (2, 0))).diagonal == (2, 2)
    # SNF of a doubled unimodular Gram is all twos; |det| = 2^8
    dec = smith_normal_form(E8(-2).gram)
    assert dec.diagonal == (2,) * 8
    assert abs(bareiss_det(E8(-2).gram)) == 256


def test_snf_deterministic():
    mat = ((6, 4, 2), (4, 8, 0), (2, 0, 10))
    assert smith_normal_form(mat) == smith_normal_form(mat)


def test_integer_kernel():
    # kernel of (1 1) pairing row inside Z^2
    basis = integer_kernel(((1, 1),))
    assert len(basis) == 1
    assert basis[0][0] + basis[0][1] == 0
    # full-rank matrix has trivial kernel
    assert integer_kernel(((1, 0), (0, 1))) == ()
    # zero-row matrix keeps everything
    assert len(integer_kernel(((0, 0, 0),))) == 3


def test_row_saturation():
    # index-2 subgroup of Z^2 saturates to the full lattice
    sat = row_saturation(((1, -1), (1, 1)))
    assert abs(bareiss_det(sat)) == 1
    sat2 = row_saturation(((2, 0),))
    assert len(sat2) == 1 and abs(sat2[0][0]) == 1 and sat2[0][1] == 0
