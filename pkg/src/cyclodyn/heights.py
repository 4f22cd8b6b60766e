"""Weil heights, house, sup norms and exact rational place values.

Heights are absolute logarithmic heights (natural log) of the
projective point (1 : x_1 : ... : x_N).  The archimedean part runs
over all complex embeddings with interval arithmetic, the finite part
is aggregated exactly through the norm of the coordinate ideal, so the
only error contribution is the embedding intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .cyclotomic import CyclotomicElement, euler_phi, ideal_norm, units
from .intervals import RigorousContext, interval_max, midpoint, radius

_DEFAULT_CTX = RigorousContext()


@dataclass(frozen=True)
class HeightEstimate:
    """A real value with a rigorous error radius (natural-log scale for
    heights, linear scale for house)."""

    value: float
    error: float

    def upper(self) -> float:
        return self.value + self.error

    def lower(self) -> float:
        return self.value - self.error

    def __str__(self):
        return f"{self.value!r} (+/- {self.error:.3g})"


class AffinePoint:
    """A point of affine N-space with exact cyclotomic coordinates."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        vals = tuple(CyclotomicElement.coerce(c) for c in coords)
        if not vals:
            raise ValueError("affine points need at least one coordinate")
        object.__setattr__(self, "coords", vals)

    def __setattr__(self, *args):
        raise AttributeError("AffinePoint is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def field_order(self) -> int:
        n = 1
        for c in self.coords:
            n = n * c.order // math.gcd(n, c.order)
        return n

    def galois_conjugate(self, k: int) -> "AffinePoint":
        return AffinePoint([c.galois_conjugate(k) for c in self.coords])

    def scale(self, value) -> "AffinePoint":
        return AffinePoint([c * value for c in self.coords])

    def is_integral(self) -> bool:
        return all(c.is_algebraic_integer() for c in self.coords)

    def is_rational(self) -> bool:
        return all(c.is_rational for c in self.coords)

    def rational_coords(self) -> tuple[Fraction, ...]:
        return tuple(c.rational_value() for c in self.coords)

    def __eq__(self, other):
        if isinstance(other, AffinePoint):
            return self.coords == other.coords
        return NotImplemented

    def __hash__(self):
        return hash(self.coords)

    def sort_key(self):
        return tuple(c.sort_key() for c in self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# rational places

@dataclass(frozen=True)
class RationalPlace:
    """A place of Q: a finite prime or the archimedean place."""

    prime: int | None  # None marks the archimedean place

    def __post_init__(self):
        if self.prime is not None and not _is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")

    @staticmethod
    def finite(p: int) -> "RationalPlace":
        return RationalPlace(p)

    @staticmethod
    def archimedean() -> "RationalPlace":
        return RationalPlace(None)

    @property
    def is_finite(self) -> bool:
        return self.prime is not None

    def __str__(self):
        return f"v_{self.prime}" if self.is_finite else "v_inf"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def padic_valuation(x: Fraction, p: int) -> int:
    if x == 0:
        raise ZeroDivisionError("valuation of zero is infinite")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def rational_abs(x, v: RationalPlace) -> Fraction:
    """Exact absolute value of a rational at the given place.

    Zero at a finite place returns 0 (the log -infinity sentinel is the
    caller's concern)."""
    x = Fraction(x)
    if not v.is_finite:
        return abs(x)
    if x == 0:
        return Fraction(0)
    return Fraction(v.prime) ** (-padic_valuation(x, v.prime))


# ---------------------------------------------------------------------------
# heights

def _denominator_scaler(coords: Sequence[CyclotomicElement]) -> int:
    t = 1
    for c in coords:
        d = c.denominator_lcm()
        t = t * d // math.gcd(t, d)
    return t


def _log_int(n: int) -> float:
    # math.log handles arbitrary int magnitudes; 0 only arises for the
    # all-zero point whose max coordinate is t >= 1
    return math.log(n) if n else 0.0


def weil_height(
    point: AffinePoint,
    ctx: RigorousContext | None = None,
    scaler: int | None = None,
) -> HeightEstimate:
    """Absolute logarithmic Weil height of (1 : x_1 : ... : x_N).

    `scaler` overrides the denominator-clearing integer t; any multiple
    of the minimal one gives the same height (the formula is projective).
    """
    ctx = ctx or _DEFAULT_CTX
    n = point.field_order()
    t = _denominator_scaler(point.coords)
    if scaler is not None:
        if scaler % t != 0 or scaler <= 0:
            raise ValueError(f"scaler must be a positive multiple of {t}")
        t = scaler
    if n == 1:
        # over Q the sum collapses to integers: one embedding, and the
        # coordinate ideal is the gcd
        ints = [t] + [int(c.rational_value() * t) for c in point.coords]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        value = _log_int(max(abs(v) for v in ints)) - _log_int(g)
        return HeightEstimate(value, 4e-16 * (1.0 + abs(value)))
    scaled = [CyclotomicElement.from_rational(t)] + [c * t for c in point.coords]
    arch = ctx.real(0)
    for k in units(n):
        mods = [
            ctx.complex_from_element_coeffs(c.to_order(n), n, k).modulus()
            for c in scaled
        ]
        arch += ctx.log(interval_max(ctx, mods))
    norm = ideal_norm(scaled, field_order=n)
    fin = ctx.log(ctx.real(norm))
    total = (arch - fin) / euler_phi(n)
    return HeightEstimate(midpoint(total), radius(total))


def house(point: AffinePoint, ctx: RigorousContext | None = None) -> HeightEstimate:
    """Max modulus of the coordinates over all Galois conjugates (linear scale)."""
    ctx = ctx or _DEFAULT_CTX
    n = point.field_order()
    mods = []
    for k in units(n):
        for c in point.coords:
            mods.append(ctx.complex_from_element_coeffs(c.to_order(n), n, k).modulus())
    best = interval_max(ctx, mods)
    return HeightEstimate(midpoint(best), radius(best))


def _iter_polys(polys) -> list:
    # accepts MultiPoly sequences or objects exposing .components
    if hasattr(polys, "components"):
        return list(polys.components)
    if hasattr(polys, "terms"):
        return [polys]
    return list(polys)


def poly_sup_norm(polys, k: int = 1, ctx: RigorousContext | None = None):
    """Interval containing max |sigma_k(coefficient)| over every coefficient
    of every component polynomial."""
    ctx = ctx or _DEFAULT_CTX
    items = _iter_polys(polys)
    mods = []
    for poly in items:
        for c in poly.terms.values():
            n = c.order
            kr = k % n if n > 1 else 1
            if math.gcd(kr if kr else n, n) != 1:
                raise ValueError(f"embedding index {k} not coprime to order {n}")
            mods.append(ctx.complex_from_element_coeffs(c.coeffs, n, kr).modulus())
    if not mods:
        mods.append(ctx.real(0))
    return interval_max(ctx, mods)


def coefficient_point(polys) -> AffinePoint:
    """All coefficients of the given polynomials as one affine point."""
    coeffs = []
    for poly in _iter_polys(polys):
        coeffs.extend(poly.terms[e] for e in poly.sorted_exponents())
    if not coeffs:
        coeffs = [CyclotomicElement.from_rational(0)]
    return AffinePoint(coeffs)


def integrality_scaler(poly_tuples: Iterable) -> int:
    """Least positive integer D with D * (every coefficient) integral."""
    out = 1
    for polys in poly_tuples:
        for poly in _iter_polys(polys):
            d = poly.denominator_lcm()
            out = out * d // math.gcd(out, d)
    return out
