import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from norirank.errors import (
    DegreeError,
    NotPrimeError,
    OrderOverflowError,
    SingularError,
)
from norirank.gf import Field, Mat, gl_order, is_prime, make_field, mat_order, weil_restrict


# --- oracles ----------------------------------------------------------------

def poly_has_root(coeffs, ell):
    return any(
        sum(c * pow(r, i, ell) for i, c in enumerate(coeffs)) % ell == 0
        for r in range(ell)
    )


def brute_order(m, cap=10**6):
    acc = m
    for k in range(1, cap + 1):
        if acc.is_identity():
            return k
        acc = acc * m
    raise AssertionError("no order found")


# --- make_field -------------------------------------------------------------------

def test_make_field_prime_case():
    F = make_field(7, 1)
    assert F.modulus == (0, 1)  # the polynomial x; unused for f = 1
    assert F.q == 7


def test_make_field_f2_over_f5():
    # Oracle: x^2 + c has a root for c in {0, 1} but not for c = 2, and no
    # candidate with a smaller leading part precedes the binomials.
    assert poly_has_root((0, 0, 1), 5)
    assert poly_has_root((1, 0, 1), 5)
    assert not poly_has_root((2, 0, 1), 5)
    assert make_field(5, 2).modulus == (2, 0, 1)


def test_make_field_f2_over_f7():
    # Oracle: -1 is a non-square mod 7.
    squares = {x * x % 7 for x in range(1, 7)}
    assert 6 not in squares
    assert make_field(7, 2).modulus == (1, 0, 1)


def test_make_field_deterministic():
    a = Field(11, 2, make_field(11, 2).modulus)
    assert a.modulus == make_field(11, 2).modulus
    assert make_field(11, 2) is make_field(11, 2)  # cached, identical


def test_make_field_rejects_bad_input():
    with pytest.raises(NotPrimeError):
        make_field(6)
    with pytest.raises(NotPrimeError):
        make_field(3)  # primes below 5 are rejected by design
    with pytest.raises(DegreeError):
        make_field(7, 0)


def test_modulus_irreducibility_enforced():
    with pytest.raises(DegreeError):
        Field(5, 2, (1, 0, 1))  # x^2 + 1 = (x-2)(x+2) over F_5


@pytest.mark.parametrize("ell,f", [(5, 2), (7, 2), (11, 2), (5, 4), (7, 3)])
def test_fermat_exhaustive(ell, f):
    # a^(q-1) = 1 for every nonzero a; exhaustive for q <= 2500.
    F = make_field(ell, f)
    assert F.q <= 2500
    for a in range(1, F.q):
        assert F.pow(a, F.q - 1) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 48), st.integers(0, 48), st.integers(0, 48))
def test_field_axioms_f49(a, b, c):
    F = make_field(7, 2)
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(a, F.neg(a)) == 0
    if a != 0:
        assert F.mul(a, F.inv(a)) == 1


def test_encode_decode_roundtrip(F25):
    for a in F25.elements():
        assert F25.encode(F25.decode(a)) == a


def test_tables_match_scalar_ops(F25):
    mul, add, neg = F25.tables()
    q = F25.q
    for a in range(q):
        assert neg[a] == F25.neg(a)
        for b in range(q):
            assert mul[a * q + b] == F25.mul(a, b)
            assert add[a * q + b] == F25.add(a, b)


# --- Mat ------------------------------------------------------------------------

def test_mat_mul_inverse(F7):
    a = Mat(F7, [[1, 2], [3, 4]])
    assert a.det() == (4 - 6) % 7
    assert (a * a.inv()).is_identity()
    assert (a.inv() * a).is_identity()


def test_mat_negative_entries_reduce(F7):
    m = Mat(F7, [[-1, 0], [0, 1]])
    assert m.rows == ((6, 0), (0, 1))


def test_singular_inverse_raises(F7):
    with pytest.raises(SingularError):
        Mat(F7, [[1, 1], [1, 1]]).inv()


# --- mat_order ---------------------------------------------------------------------

def test_mat_order_identity(F7):
    assert mat_order(Mat.identity(F7, 2), cap=10) == 1


def test_mat_order_unipotent(F7):
    assert mat_order(Mat(F7, [[1, 1], [0, 1]]), cap=10) == 7


def test_mat_order_diagonal(F7):
    # Oracle: direct powering shows 3 generates the multiplicative group.
    m = Mat.diagonal(F7, (3, 1))
    assert brute_order(m) == 6
    assert mat_order(m, cap=10) == 6


def test_mat_order_errors(F7):
    with pytest.raises(SingularError):
        mat_order(Mat(F7, [[0, 0], [0, 0]]), cap=5)
    with pytest.raises(OrderOverflowError):
        mat_order(Mat(F7, [[1, 1], [0, 1]]), cap=3)


# --- weil_restrict ------------------------------------------------------------------

def test_weil_restrict_f1_unchanged(F7):
    m = Mat(F7, [[1, 2], [3, 4]])
    assert weil_restrict(m) is m


def test_weil_restrict_generator_of_f25(F25):
    # Oracle: by hand, x*1 = x and x*x = -2 in F_5[x]/(x^2+2), so the
    # multiplication-by-x matrix has columns (0,1) and (-2,0) = (3,0).
    x = F25.encode([0, 1])
    w = weil_restrict(Mat(F25, [[x]]))
    assert w.rows == ((0, 3), (1, 0))


def test_weil_restrict_multiplicative(F25):
    rng = random.Random(2024)
    n = 2
    for _ in range(100):
        while True:
            a = Mat(F25, [[rng.randrange(25) for _ in range(n)] for _ in range(n)])
            b = Mat(F25, [[rng.randrange(25) for _ in range(n)] for _ in range(n)])
            if a.det() != 0 and b.det() != 0:
                break
        assert weil_restrict(a * b) == weil_restrict(a) * weil_restrict(b)
        assert weil_restrict(a.inv()) == weil_restrict(a).inv()


def test_weil_restrict_injective(F49):
    seen = set()
    for a in range(49):
        w = weil_restrict(Mat(F49, [[a]]))
        assert w not in seen
        seen.add(w)


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for m in range(2, 50):
        assert is_prime(m) == (m in primes)


def test_gl_order_small(F5):
    # Oracle: count invertible 2x2 matrices over F_5 by brute force.
    count = 0
    for code in range(5**4):
        e = [(code // 5**i) % 5 for i in range(4)]
        if Mat(F5, [[e[0], e[1]], [e[2], e[3]]]).det() != 0:
            count += 1
    assert gl_order(5, 2) == count
