"""Outward-rounded interval arithmetic for rigorous embeddings.

Thin layer over mpmath's interval contexts.  Real intervals are the
context's native ivmpf values; complex quantities are rectangles
(a pair of real intervals).  Every numeric claim downstream is an
interval claim: the true value is always inside.
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath.ctx_iv import MPIntervalContext

DEFAULT_PRECISION = 256


class RigorousContext:
    """A fixed-precision interval context (not shared, cheap to create)."""

    def __init__(self, precision: int = DEFAULT_PRECISION):
        if precision < 8:
            raise ValueError("precision below 8 bits is not rigorous")
        self.precision = precision
        self._iv = MPIntervalContext()
        self._iv.prec = precision

    # -- real interval constructors ------------------------------------

    def real(self, value):
        return self._iv.mpf(value)

    def from_fraction(self, q: Fraction):
        q = Fraction(q)
        return self._iv.mpf(q.numerator) / self._iv.mpf(q.denominator)

    def span(self, lo, hi):
        return self._iv.mpf([lo, hi])

    @property
    def pi(self):
        return self._iv.pi

    def log(self, x):
        return self._iv.log(x)

    def exp(self, x):
        return self._iv.exp(x)

    def sqrt(self, x):
        return self._iv.sqrt(x)

    def cos(self, x):
        return self._iv.cos(x)

    def sin(self, x):
        return self._iv.sin(x)

    def root_of_unity(self, t: int, n: int) -> "ComplexBox":
        """Rectangle containing e^(2*pi*i*t/n)."""
        angle = self.pi * (2 * (t % n)) / n
        return ComplexBox(self, self.cos(angle), self.sin(angle))

    def complex_from_element_coeffs(self, coeffs, order: int, k: int) -> "ComplexBox":
        """Sum of coeff_j * e^(2*pi*i*(j*k)/order), outward rounded."""
        re = self.real(0)
        im = self.real(0)
        for j, c in enumerate(coeffs):
            if not c:
                continue
            w = self.root_of_unity(j * k, order)
            cq = self.from_fraction(c)
            re += cq * w.re
            im += cq * w.im
        return ComplexBox(self, re, im)


def upper(x) -> float:
    return float(x.b)


def lower(x) -> float:
    return float(x.a)


def midpoint(x) -> float:
    return float(x.mid)


def radius(x) -> float:
    return float(x.delta) / 2.0


def interval_max(ctx: RigorousContext, items):
    """Interval enclosing max of the true values of the given intervals."""
    items = list(items)
    if not items:
        raise ValueError("interval_max of empty sequence")
    out = items[0]
    for x in items[1:]:
        out = _pairwise_max(ctx, out, x)
    return out


def _pairwise_max(ctx, a, b):
    # endpoint objects compare exactly at any magnitude (no float overflow)
    lo = a.a if a.a >= b.a else b.a
    hi = a.b if a.b >= b.b else b.b
    return ctx.span(lo, hi)


def certainly_greater(a, b) -> bool:
    """True when every value of interval a exceeds every value of b."""
    return a.a > b.b


class ComplexBox:
    """Axis-aligned rectangle in C; arithmetic is outward rounded."""

    __slots__ = ("ctx", "re", "im")

    def __init__(self, ctx: RigorousContext, re, im):
        self.ctx = ctx
        self.re = re
        self.im = im

    @staticmethod
    def from_fraction(ctx: RigorousContext, q: Fraction) -> "ComplexBox":
        return ComplexBox(ctx, ctx.from_fraction(q), ctx.real(0))

    def __add__(self, other):
        return ComplexBox(self.ctx, self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ComplexBox(self.ctx, self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return ComplexBox(
            self.ctx,
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def scale(self, real_interval):
        return ComplexBox(self.ctx, self.re * real_interval, self.im * real_interval)

    def modulus(self):
        """Real interval containing |z|."""
        re2 = self.re * self.re
        im2 = self.im * self.im
        return self.ctx.sqrt(re2 + im2)

    @property
    def mid_real(self) -> float:
        return midpoint(self.re)

    @property
    def mid_imag(self) -> float:
        return midpoint(self.im)

    @property
    def error_radius(self) -> float:
        # half-diagonal of the rectangle, an upper bound on the distance
        # from the midpoint to any point of the box
        return math.hypot(radius(self.re), radius(self.im))

    def __repr__(self):
        return f"ComplexBox({self.mid_real}+{self.mid_imag}j, r<={self.error_radius:.3g})"
