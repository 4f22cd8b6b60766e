import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cyclodyn.cyclotomic import (
    CyclotomicElement as C,
    CyclotomicError,
    cyclotomic_polynomial,
    euler_phi,
    hermite_normal_form,
    ideal_norm,
    units,
)
from cyclodyn.intervals import RigorousContext

from oracles import embedding_value


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert len(cyclotomic_polynomial(105)) == euler_phi(105) + 1


def test_arithmetic_examples():
    z4 = C.zeta(4)
    assert z4 * z4 == -1
    z3 = C.zeta(3)
    assert z3 + z3 ** 2 == -1
    assert C.from_rational(1) / 2 == Fraction(1, 2)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        C.from_rational(1) / C.from_rational(0)


def test_galois_examples():
    z5 = C.zeta(5)
    assert z5.galois_conjugate(2) == z5 ** 2
    assert C.from_rational(Fraction(3, 2)).galois_conjugate(7) == Fraction(3, 2)
    x = z5 + z5 ** 4
    assert x.galois_conjugate(2) == z5 ** 2 + z5 ** 3


def test_galois_requires_coprime():
    with pytest.raises(CyclotomicError):
        C.zeta(4).galois_conjugate(2)


def test_embed_examples():
    ctx = RigorousContext(128)
    z8 = C.zeta(8)
    box = ctx.complex_from_element_coeffs(z8.coeffs, z8.order, 1)
    target = embedding_value(z8.coeffs, 8, 1)
    # midpoints are float views: allow one ulp on top of the interval radius
    assert abs(box.mid_real - target.real) <= box.error_radius + 1e-15
    assert abs(box.mid_imag - target.imag) <= box.error_radius + 1e-15
    assert abs(box.mid_real - math.cos(math.pi / 4)) < 1e-15

    one = C.from_rational(1)
    b1 = ctx.complex_from_element_coeffs(one.coeffs, one.order, 1)
    assert b1.mid_real == 1.0 and b1.error_radius == 0.0

    x = C.zeta(5) + C.zeta(5) ** 4
    bx = ctx.complex_from_element_coeffs(x.coeffs, x.order, 1)
    assert abs(bx.mid_real - 2 * math.cos(2 * math.pi / 5)) < 1e-15
    assert abs(bx.mid_imag) < 1e-15


def test_is_algebraic_integer():
    assert C.zeta(12).is_algebraic_integer()
    assert not C.from_rational(Fraction(1, 2)).is_algebraic_integer()
    assert (C.zeta(5) + C.zeta(5) ** 4).is_algebraic_integer()


def test_field_norm_examples():
    assert C.from_rational(2).field_norm(4) == 4
    assert (C.from_rational(1) + C.zeta(4)).field_norm() == 2
    assert C.from_rational(1).field_norm() == 1
    assert C.from_rational(1).field_norm(12) == 1


def test_ideal_norm_examples():
    assert ideal_norm([C.from_rational(1)]) == 1
    assert ideal_norm([C.from_rational(2), C.from_rational(1) + C.zeta(4)]) == 2
    assert ideal_norm([C.from_rational(3)], field_order=4) == 9


def test_ideal_norm_errors():
    with pytest.raises(CyclotomicError):
        ideal_norm([C.from_rational(0)])
    with pytest.raises(CyclotomicError):
        ideal_norm([C.from_rational(Fraction(1, 2))])


def test_hnf_shape():
    h = hermite_normal_form([[2, 0], [1, 3], [0, 6]])
    assert len(h) == 2
    assert h[0][0] > 0 and h[1][1] > 0
    # determinant of the lattice spanned by rows of [[2,0],[1,3]] is 6
    assert h[0][0] * h[1][1] == 6


def test_minimal_order_canonicalization():
    x = C.zeta(12) ** 4
    assert x.order == 3 and x == C.zeta(3)
    assert hash(x) == hash(C.zeta(3))
    y = C(4, [Fraction(1, 2), Fraction(0)])
    assert y.order == 1 and y == Fraction(1, 2)
    # zeta_2 collapses to -1 over Q
    assert C.zeta(2).order == 1 and C.zeta(2) == -1


_orders = st.sampled_from([1, 3, 4, 5, 8, 12])


@st.composite
def elements(draw, order=None):
    n = order if order is not None else draw(_orders)
    coeffs = [
        Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 6)))
        for _ in range(euler_phi(n))
    ]
    return C(n, coeffs)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    assert x * y == y * x


@settings(max_examples=40, deadline=None)
@given(elements())
def test_division_inverts(x):
    if x:
        assert (C.from_rational(1) / x) * x == 1


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_galois_composition(data):
    n = data.draw(st.sampled_from([5, 8, 12]))
    x = data.draw(elements(order=n))
    k1 = data.draw(st.sampled_from(units(n)))
    k2 = data.draw(st.sampled_from(units(n)))
    assert x.galois_conjugate(k1).galois_conjugate(k2) == x.galois_conjugate(k1 * k2)


@settings(max_examples=25, deadline=None)
@given(elements())
def test_norm_in_product_of_embeddings(x):
    ctx = RigorousContext(128)
    prod = None
    for k in units(x.order):
        box = ctx.complex_from_element_coeffs(x.coeffs, x.order, k)
        prod = box if prod is None else prod * box
    target = float(x.field_norm())
    slack = 1e-9 * (1 + abs(target))  # float views of high-precision midpoints
    assert abs(prod.mid_real - target) <= prod.error_radius + slack
    assert abs(prod.mid_imag) <= prod.error_radius + slack


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_ideal_norm_matches_field_norm(data):
    n = data.draw(_orders)
    coeffs = [data.draw(st.integers(-6, 6)) for _ in range(euler_phi(n))]
    x = C(n, coeffs)
    if x:
        assert ideal_norm([x], field_order=n) == abs(x.field_norm(n))


@settings(max_examples=30, deadline=None)
@given(elements(), elements())
def test_embed_respects_multiplication(x, y):
    ctx = RigorousContext(128)
    n = x.order * y.order // math.gcd(x.order, y.order)
    p = x * y
    bx = ctx.complex_from_element_coeffs(x.to_order(n), n, 1)
    by = ctx.complex_from_element_coeffs(y.to_order(n), n, 1)
    bp = ctx.complex_from_element_coeffs(p.to_order(n), n, 1)
    prod = bx * by
    slack = prod.error_radius + bp.error_radius + 1e-9
    assert abs(prod.mid_real - bp.mid_real) <= slack
    assert abs(prod.mid_imag - bp.mid_imag) <= slack
