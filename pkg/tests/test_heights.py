import math
import random
from fractions import Fraction

import pytest

from cyclodyn.cyclotomic import CyclotomicElement as C, units
from cyclodyn.heights import (
    AffinePoint,
    RationalPlace,
    house,
    integrality_scaler,
    poly_sup_norm,
    rational_abs,
    weil_height,
)
from cyclodyn.intervals import RigorousContext, midpoint
from cyclodyn.parsing import parse_point, parse_polynomial

from oracles import height_by_places, padic_abs


CTX = RigorousContext(192)


def test_weil_height_examples():
    h = weil_height(parse_point("3/2, 5"), CTX)
    assert h.value == pytest.approx(math.log(10), abs=1e-12)
    assert weil_height(parse_point("1, 1"), CTX).value == pytest.approx(0, abs=1e-15)
    z = AffinePoint([C.zeta(5)])
    assert weil_height(z, CTX).value == pytest.approx(0, abs=1e-15)


def test_weil_height_against_place_oracle():
    rng = random.Random(2024)
    for _ in range(100):
        dim = rng.choice([1, 2, 3])
        coords = [Fraction(rng.randint(-80, 80), rng.randint(1, 40)) for _ in range(dim)]
        h = weil_height(AffinePoint(coords), CTX)
        assert abs(h.value - height_by_places(coords)) < 1e-12


def test_weil_height_nonnegative_and_kronecker():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.choice([1, 3, 4, 5, 8])
        x = C.zeta(n) ** rng.randrange(n) if n > 1 else C.from_rational(rng.choice([1, -1]))
        h = weil_height(AffinePoint([x]), CTX)
        assert h.value >= -1e-15
        assert h.value <= 1e-12  # roots of unity have height zero
    assert weil_height(parse_point("0, 1"), CTX).value == pytest.approx(0, abs=1e-15)
    assert weil_height(parse_point("2"), CTX).value > 0.5


def test_weil_height_galois_invariant():
    rng = random.Random(6)
    for _ in range(10):
        n = rng.choice([5, 8, 12])
        x = AffinePoint([
            C.zeta(n) + rng.randint(-2, 2),
            C.zeta(n) ** 2 * Fraction(rng.randint(1, 5), 2),
        ])
        base = weil_height(x, CTX)
        for k in units(n):
            hk = weil_height(x.galois_conjugate(k), CTX)
            assert hk.value == pytest.approx(base.value, abs=1e-10)


def test_weil_height_scaler_independent():
    # any positive multiple of the minimal denominator-clearing integer
    # gives the same height: the formula is projective
    rng = random.Random(9)
    for _ in range(15):
        p = AffinePoint([
            Fraction(rng.randint(-30, 30), rng.randint(1, 12)),
            C.zeta(4) * Fraction(rng.randint(1, 9), rng.randint(1, 6)),
        ])
        base = weil_height(p, CTX)
        for mult in (2, 3, 10):
            t = mult * _minimal_scaler(p)
            h = weil_height(p, CTX, scaler=t)
            assert h.value == pytest.approx(base.value, abs=1e-12)
    with pytest.raises(ValueError):
        weil_height(parse_point("3/2"), CTX, scaler=3)


def _minimal_scaler(p):
    t = 1
    for c in p.coords:
        d = c.denominator_lcm()
        t = t * d // math.gcd(t, d)
    return t


def test_house_examples():
    assert house(AffinePoint([C.zeta(8)]), CTX).value == pytest.approx(1, abs=1e-14)
    assert house(parse_point("z3, 2", 3), CTX).value == pytest.approx(2, abs=1e-14)
    golden = house(AffinePoint([C.zeta(5) + C.zeta(5) ** 4]), CTX)
    assert golden.value == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-12)


def test_house_invariant_under_root_scaling():
    rng = random.Random(8)
    for _ in range(10):
        n = rng.choice([4, 5, 12])
        p = AffinePoint([C.zeta(n) + 2, Fraction(rng.randint(1, 7), 3)])
        scaled = AffinePoint([
            c * C.zeta(n) ** rng.randrange(n) for c in p.coords
        ])
        a, b = house(p, CTX), house(scaled, CTX)
        assert a.value == pytest.approx(b.value, abs=1e-10)


def test_poly_sup_norm_examples():
    F = [parse_polynomial("X1^2 + 3*X2", 2), parse_polynomial("X2^2", 2)]
    assert midpoint(poly_sup_norm(F, 1, CTX)) == pytest.approx(3, abs=1e-14)
    G = [parse_polynomial("z8*X1^2", 1, 8), parse_polynomial("z8^3", 1, 8)]
    assert midpoint(poly_sup_norm(G, 1, CTX)) == pytest.approx(1, abs=1e-14)
    H = [parse_polynomial("z3*X1^2/2", 2, 3), parse_polynomial("X2^2", 2, 3)]
    assert midpoint(poly_sup_norm(H, 1, CTX)) == pytest.approx(1, abs=1e-14)


def test_integrality_scaler_examples():
    assert integrality_scaler([[parse_polynomial("X1/2 + 3", 1)]]) == 2
    assert integrality_scaler([[parse_polynomial("X1^2 - 4", 1)]]) == 1
    polys = [[parse_polynomial("(1/3)*z4*X1", 1, 4), parse_polynomial("X1/6", 1)]]
    assert integrality_scaler(polys) == 6


def test_rational_abs_examples():
    assert rational_abs(Fraction(3, 2), RationalPlace.finite(2)) == 2
    assert rational_abs(5, RationalPlace.finite(5)) == Fraction(1, 5)
    assert rational_abs(Fraction(-7, 4), RationalPlace.archimedean()) == Fraction(7, 4)
    assert rational_abs(0, RationalPlace.finite(3)) == 0


def test_rational_place_validation():
    with pytest.raises(ValueError):
        RationalPlace.finite(6)


def test_product_formula():
    rng = random.Random(77)
    for _ in range(100):
        x = Fraction(rng.randint(1, 500), rng.randint(1, 500)) * rng.choice([1, -1])
        primes = set()
        n = abs(x.numerator) * x.denominator
        d = 2
        while d * d <= n:
            while n % d == 0:
                primes.add(d)
                n //= d
            d += 1
        if n > 1:
            primes.add(n)
        total = Fraction(1)
        for p in sorted(primes):
            total *= rational_abs(x, RationalPlace.finite(p))
        total *= rational_abs(x, RationalPlace.archimedean())
        assert total == 1
