"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored as rational vectors in the power basis
1, zeta, ..., zeta^(phi(n)-1) reduced modulo the n-th cyclotomic
polynomial, and are canonicalized down to the smallest cyclotomic
field containing them.  Equality is therefore plain tuple equality
and elements hash consistently across mixed-field collections.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

_ZERO = Fraction(0)
_ONE = Fraction(1)


class CyclotomicError(ValueError):
    pass


# ---------------------------------------------------------------------------
# integer polynomial helpers (coefficient lists, low degree first)

def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    if n < 1:
        raise CyclotomicError(f"order must be positive, got {n}")
    result = n
    for p in prime_factors(n):
        result -= result // p
    return result


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _int_poly_div_exact(num: list[int], den: Sequence[int]) -> list[int]:
    # exact division of integer polynomials, den monic up to +-1 lead
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % lead != 0:
            raise CyclotomicError("non-exact polynomial division")
        c //= lead
        q[i] = c
        if c:
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    if any(num[: len(den) - 1]):
        raise CyclotomicError("non-exact polynomial division")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first, monic of degree phi(n)."""
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in _divisors(n):
        if d != n:
            poly = _int_poly_div_exact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """zeta_n^t in the power basis for t = 0..n-1."""
    phi = euler_phi(n)
    cyc = cyclotomic_polynomial(n)
    rows = []
    cur = [_ZERO] * phi
    cur[0] = _ONE
    for _ in range(n):
        rows.append(tuple(cur))
        nxt = [_ZERO] + cur[: phi - 1] if phi > 1 else [_ZERO]
        top = cur[phi - 1]
        if top:
            # zeta^phi = -(cyc[0] + cyc[1] x + ...)/1, Phi monic
            for j in range(phi):
                nxt[j] -= top * cyc[j]
        cur = nxt if phi > 1 else [cur[0] * Fraction(-cyc[0])]
    return tuple(rows)


@lru_cache(maxsize=None)
def units(n: int) -> tuple[int, ...]:
    """Residues 1 <= k <= n coprime to n (the Galois group indices)."""
    return tuple(k for k in range(1, n + 1) if math.gcd(k, n) == 1)


def _reduce_mod_cyclotomic(coeffs: list[Fraction], n: int) -> list[Fraction]:
    phi = euler_phi(n)
    cyc = cyclotomic_polynomial(n)
    coeffs = list(coeffs)
    for i in range(len(coeffs) - 1, phi - 1, -1):
        c = coeffs[i]
        if c:
            for j in range(phi + 1):
                coeffs[i - phi + j] -= c * cyc[j]
        coeffs.pop()
    while len(coeffs) < phi:
        coeffs.append(_ZERO)
    return coeffs


def _conjugate_coeffs(n: int, coeffs: Sequence[Fraction], k: int) -> tuple[Fraction, ...]:
    phi = euler_phi(n)
    table = _power_table(n)
    out = [_ZERO] * phi
    for j, c in enumerate(coeffs):
        if c:
            row = table[(j * k) % n]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


def _solve_rational(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve an exact overdetermined rational system; None if inconsistent."""
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    ncols = len(matrix[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][-1]:
            return None
    sol = [_ZERO] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol


def _descend_order(n: int, coeffs: tuple[Fraction, ...]) -> tuple[int, tuple[Fraction, ...]]:
    """Smallest cyclotomic field containing the element, canonical coeffs."""
    if all(c == 0 for c in coeffs[1:]):
        return 1, (coeffs[0],)
    while True:
        moved = False
        for p in prime_factors(n):
            m = n // p
            if m < 1:
                continue
            phi_n, phi_m = euler_phi(n), euler_phi(m)
            if phi_m < phi_n:
                fixers = [k for k in units(n) if k % m == 1 and k != 1]
                if any(_conjugate_coeffs(n, coeffs, k) != tuple(coeffs) for k in fixers):
                    continue
            # express in the basis zeta_n^(p*i), i < phi(m)
            table = _power_table(n)
            cols = [table[(p * i) % n] for i in range(phi_m)]
            matrix = [[cols[j][i] for j in range(phi_m)] for i in range(phi_n)]
            sol = _solve_rational(matrix, list(coeffs))
            if sol is None:
                continue
            n, coeffs = m, tuple(sol)
            moved = True
            break
        if not moved:
            return n, tuple(coeffs)
        if all(c == 0 for c in coeffs[1:]):
            return 1, (coeffs[0],)


class CyclotomicElement:
    """An element of Q(zeta_n), canonicalized to its minimal order."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable):
        vals = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        if len(vals) > euler_phi(order):
            vals = _reduce_mod_cyclotomic(vals, order)
        while len(vals) < euler_phi(order):
            vals.append(_ZERO)
        n, tup = _descend_order(order, tuple(vals))
        object.__setattr__(self, "order", n)
        object.__setattr__(self, "coeffs", tup)

    def __setattr__(self, *args):
        raise AttributeError("CyclotomicElement is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(q) -> "CyclotomicElement":
        return CyclotomicElement(1, [Fraction(q)])

    @staticmethod
    def zeta(n: int, k: int = 1) -> "CyclotomicElement":
        return CyclotomicElement(n, _power_table(n)[k % n])

    @staticmethod
    def coerce(value) -> "CyclotomicElement":
        if isinstance(value, CyclotomicElement):
            return value
        return CyclotomicElement.from_rational(value)

    # -- structure ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.order == 1

    def rational_value(self) -> Fraction:
        if self.order != 1:
            raise CyclotomicError(f"{self} is not rational")
        return self.coeffs[0]

    def is_algebraic_integer(self) -> bool:
        # valid test: the power basis generates the full ring of integers
        # of a cyclotomic field
        return all(c.denominator == 1 for c in self.coeffs)

    def to_order(self, m: int) -> tuple[Fraction, ...]:
        """Power-basis coefficients of this element inside Q(zeta_m)."""
        if m % self.order != 0:
            raise CyclotomicError(f"order {self.order} does not divide {m}")
        if m == self.order:
            return self.coeffs
        table = _power_table(m)
        step = m // self.order
        out = [_ZERO] * euler_phi(m)
        for j, c in enumerate(self.coeffs):
            if c:
                row = table[(step * j) % m]
                for i, r in enumerate(row):
                    if r:
                        out[i] += c * r
        return tuple(out)

    # -- arithmetic ---------------------------------------------------

    def _pair(self, other) -> tuple[int, tuple[Fraction, ...], tuple[Fraction, ...]]:
        other = CyclotomicElement.coerce(other)
        n = self.order * other.order // math.gcd(self.order, other.order)
        return n, self.to_order(n), other.to_order(n)

    def __add__(self, other):
        n, a, b = self._pair(other)
        return CyclotomicElement(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-CyclotomicElement.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        n, a, b = self._pair(other)
        prod = [_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return CyclotomicElement(n, prod)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicElement":
        if not self:
            raise ZeroDivisionError("division by zero in cyclotomic field")
        if self.order == 1:
            return CyclotomicElement(1, [1 / self.coeffs[0]])
        # extended Euclid against Phi_n over Q
        n = self.order
        cyc = [Fraction(c) for c in cyclotomic_polynomial(n)]
        r0, r1 = cyc, list(self.coeffs)
        s0, s1 = [_ZERO], [_ONE]
        while any(r1):
            while r1 and not r1[-1]:
                r1.pop()
            if len(r1) == 1:
                inv = 1 / r1[0]
                return CyclotomicElement(n, [c * inv for c in s1])
            q, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        raise CyclotomicError("element not invertible (unreachable for a field)")

    def __truediv__(self, other):
        other = CyclotomicElement.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CyclotomicElement.coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CyclotomicElement.from_rational(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- Galois action ------------------------------------------------

    def galois_conjugate(self, k: int) -> "CyclotomicElement":
        """Image under zeta |-> zeta^k; k must be coprime to the order."""
        kr = k % self.order
        if math.gcd(kr, self.order) != 1:
            raise CyclotomicError(f"{k} is not coprime to the order {self.order}")
        if self.order == 1:
            return self
        return CyclotomicElement(self.order, _conjugate_coeffs(self.order, self.coeffs, kr))

    def conjugates(self) -> list["CyclotomicElement"]:
        return [self.galois_conjugate(k) for k in units(self.order)]

    def field_norm(self, field_order: int | None = None) -> Fraction:
        """Product of all Galois embeddings from Q(zeta_m), exact.

        m defaults to the element's own minimal order; passing a larger
        ambient order raises the norm to the power [Q(zeta_m) : Q(self)].
        """
        if self.order == 1:
            base = self.coeffs[0]
        else:
            prod = CyclotomicElement.from_rational(1)
            for k in units(self.order):
                prod = prod * self.galois_conjugate(k)
            base = prod.rational_value()
        if field_order is None:
            return base
        m = field_order * self.order // math.gcd(field_order, self.order)
        return base ** (euler_phi(m) // euler_phi(self.order))

    # -- misc ---------------------------------------------------------

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            out = out * c.denominator // math.gcd(out, c.denominator)
        return out

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, CyclotomicElement):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.order == 1 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        if self.order == 1:
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def sort_key(self):
        return (self.order, tuple((c.numerator, c.denominator) for c in self.coeffs))

    def __repr__(self):
        return f"CyclotomicElement({self})"

    def __str__(self):
        if self.order == 1:
            return str(self.coeffs[0])
        parts = []
        for j in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[j]
            if not c:
                continue
            if j == 0:
                mono = ""
            elif j == 1:
                mono = f"z{self.order}"
            else:
                mono = f"z{self.order}^{j}"
            if not mono:
                term = str(c)
            elif c == 1:
                term = mono
            elif c == -1:
                term = f"-{mono}"
            else:
                term = f"{c}*{mono}"
            parts.append(term)
        text = parts[0]
        for term in parts[1:]:
            text += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return text


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [_ZERO] * max(len(a) - db, 1)
    for i in range(len(a) - db - 1, -1, -1):
        c = a[i + db] / lead
        q[i] = c
        if c:
            for j in range(db + 1):
                a[i + j] -= c * b[j]
    rem = a[:db]
    while rem and not rem[-1]:
        rem.pop()
    return q, rem if rem else [_ZERO]


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = list(a) + [_ZERO] * (len(b) - len(a))
    for j, y in enumerate(b):
        out[j] -= y
    return out


# ---------------------------------------------------------------------------
# ideal norms via integer Hermite normal form

def hermite_normal_form(rows: list[list[int]]) -> list[list[int]]:
    """Row-style HNF (upper triangular, positive pivots) of an integer matrix."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, len(rows)):
            while rows[i][c]:
                q = rows[r][c] // rows[i][c]
                rows[r] = [a - q * b for a, b in zip(rows[r], rows[i])]
                rows[r], rows[i] = rows[i], rows[r]
        if rows[r][c] < 0:
            rows[r] = [-a for a in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return rows[:r]


def ideal_norm(generators: Sequence[CyclotomicElement], field_order: int | None = None) -> int:
    """Absolute norm of the Z[zeta_n]-ideal spanned by integral generators.

    Computed as the index of the integer lattice generated by all
    generator * zeta^j inside the full ring of integers, via HNF.
    """
    gens = [CyclotomicElement.coerce(g) for g in generators]
    if not gens or all(not g for g in gens):
        raise CyclotomicError("ideal norm needs at least one nonzero generator")
    n = field_order or 1
    for g in gens:
        n = n * g.order // math.gcd(n, g.order)
    phi = euler_phi(n)
    zeta = CyclotomicElement.zeta(n) if n > 1 else CyclotomicElement.from_rational(1)
    rows = []
    for g in gens:
        if not g:
            continue
        if not g.is_algebraic_integer():
            raise CyclotomicError(f"generator {g} is not an algebraic integer")
        cur = g
        for _ in range(phi):
            vec = cur.to_order(n)
            rows.append([int(c) for c in vec])
            cur = cur * zeta
    hnf = hermite_normal_form(rows)
    if len(hnf) < phi:
        raise CyclotomicError("generators span a rank-deficient lattice")
    norm = 1
    for i in range(phi):
        norm *= hnf[i][i]
    return norm
