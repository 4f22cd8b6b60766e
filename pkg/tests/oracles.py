"""Independent oracles used to freeze expected values.

These deliberately avoid the library code paths they check: heights
come from prime factorization place by place, embeddings from mpmath
at high precision, norms from products of numeric conjugates.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


def factorize(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def padic_abs(x: Fraction, p: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    v = factorize(x.numerator).get(p, 0) - factorize(x.denominator).get(p, 0)
    return Fraction(p) ** (-v)


def height_by_places(coords: list[Fraction]) -> float:
    """h(1 : x_1 : ... : x_N) = sum over places of log max(1, |x_i|_v)."""
    primes: set[int] = set()
    for x in coords:
        if x:
            primes |= set(factorize(x.numerator))
            primes |= set(factorize(x.denominator))
    total = 0.0
    arch = max([1.0] + [abs(float(x)) for x in coords])
    total += math.log(arch)
    for p in sorted(primes):
        mx = max([Fraction(1)] + [padic_abs(x, p) for x in coords])
        total += math.log(float(mx))
    return total


def embedding_value(coeffs, order: int, k: int, dps: int = 60) -> complex:
    """Numeric sum coeff_j * exp(2 pi i j k / order) at high precision."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(0)
        for j, c in enumerate(coeffs):
            c = Fraction(c)
            w = mpmath.expjpi(mpmath.mpf(2 * ((j * k) % order)) / order)
            z += mpmath.mpf(c.numerator) / c.denominator * w
        return complex(z)
