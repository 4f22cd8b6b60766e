from fractions import Fraction

import pytest

from cyclodyn.cyclotomic import CyclotomicElement as C
from cyclodyn.parsing import (
    PolyParseError,
    parse_element,
    parse_point,
    parse_polynomial,
)
from cyclodyn.polynomials import MultiPoly


def test_basic_grammar():
    p = parse_polynomial("X1^2 - 1", 1)
    assert p == MultiPoly(1, {(2,): 1, (0,): -1})
    q = parse_polynomial("X1^2 - X2^2 + (1/2)*z12^3*X1", 2, 12)
    assert q.terms[(1, 0)] == C.zeta(12) ** 3 * Fraction(1, 2)


def test_unary_and_precedence():
    assert parse_polynomial("-X1^2", 1) == -parse_polynomial("X1^2", 1)
    assert parse_polynomial("2*X1 + 3*X1", 1) == parse_polynomial("5*X1", 1)
    assert parse_polynomial("(X1 + 1)^2", 1) == parse_polynomial("X1^2 + 2*X1 + 1", 1)
    assert parse_element("3/2/3") == Fraction(1, 2)


def test_zeta_field_membership():
    assert parse_element("z4", 4) == C.zeta(4)
    assert parse_element("z2", 4) == -1
    # odd field order: mu_{2n} is available
    assert parse_element("z6", 3) == -C.zeta(3) ** 2
    with pytest.raises(PolyParseError):
        parse_polynomial("z7", 1, 4)


def test_variable_range():
    with pytest.raises(PolyParseError):
        parse_polynomial("X3", 2)


def test_division_rules():
    assert parse_polynomial("X1/2", 1) == parse_polynomial("(1/2)*X1", 1)
    with pytest.raises(PolyParseError):
        parse_polynomial("1/X1", 1)
    with pytest.raises(PolyParseError):
        parse_polynomial("X1/0", 1)


def test_error_positions():
    with pytest.raises(PolyParseError) as e:
        parse_polynomial("X1 $ 2", 1)
    assert "column" in str(e.value)


def test_points():
    p = parse_point("3/2, 5")
    assert p.rational_coords() == (Fraction(3, 2), Fraction(5))
    z = parse_point("z5 + z5^4", 5)
    assert z.coords[0] == C.zeta(5) + C.zeta(5) ** 4
    with pytest.raises(PolyParseError):
        parse_point("")


def test_str_round_trip():
    sources = [
        ("X1^2 - X2^2 + (1/2)*z4*X1", 2, 4),
        ("X1^3 - 1", 1, 1),
        ("z12^5*X1*X2 + 7/3", 2, 12),
    ]
    for text, nvars, order in sources:
        p = parse_polynomial(text, nvars, order)
        again = parse_polynomial(str(p), nvars, order)
        assert again == p
