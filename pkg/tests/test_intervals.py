from fractions import Fraction

import pytest

from cyclodyn.intervals import (
    ComplexBox,
    RigorousContext,
    certainly_greater,
    interval_max,
    lower,
    midpoint,
    radius,
    upper,
)


@pytest.fixture
def ctx():
    return RigorousContext(128)


def test_fraction_containment(ctx):
    x = ctx.from_fraction(Fraction(1, 3))
    assert lower(x) <= 1 / 3 <= upper(x)
    assert radius(x) < 1e-30


def test_outward_rounding_propagates(ctx):
    x = ctx.from_fraction(Fraction(1, 3))
    y = x * x - x
    # true value -2/9 must stay inside
    assert lower(y) <= -2 / 9 <= upper(y)


def test_interval_max_and_compare(ctx):
    a = ctx.from_fraction(Fraction(2))
    b = ctx.from_fraction(Fraction(3))
    m = interval_max(ctx, [a, b])
    assert midpoint(m) == 3.0
    assert certainly_greater(b, a)
    assert not certainly_greater(a, b)


def test_compare_survives_huge_magnitudes(ctx):
    a = ctx.real(10) ** 4000
    b = ctx.real(3) ** 6000
    m = interval_max(ctx, [a, b])
    # 10^4000 > 3^6000 ~ 10^2862.98; float() of either overflows
    assert certainly_greater(a, b)
    assert not certainly_greater(b, a)
    assert upper(ctx.log(m)) == pytest.approx(4000 * 2.302585092994046, rel=1e-12)


def test_complex_box_modulus(ctx):
    z = ComplexBox(ctx, ctx.real(3), ctx.real(4))
    m = z.modulus()
    assert lower(m) <= 5 <= upper(m)
    assert radius(m) < 1e-30


def test_root_of_unity_on_circle(ctx):
    for t, n in [(1, 8), (3, 7), (5, 12)]:
        w = ctx.root_of_unity(t, n)
        m = w.modulus()
        assert lower(m) <= 1 <= upper(m)


def test_precision_shrinks_radius():
    wide = RigorousContext(32)
    tight = RigorousContext(256)
    a = wide.from_fraction(Fraction(1, 7)) * wide.pi
    b = tight.from_fraction(Fraction(1, 7)) * tight.pi
    assert radius(b) < radius(a)


def test_low_precision_rejected():
    with pytest.raises(ValueError):
        RigorousContext(4)
