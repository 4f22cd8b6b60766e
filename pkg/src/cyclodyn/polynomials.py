"""Sparse multivariate polynomials over cyclotomic fields.

Terms are stored as a dict mapping exponent tuples to nonzero
coefficients, e.g. {(2, 0): 1, (0, 1): 3} for X1^2 + 3*X2.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .cyclotomic import CyclotomicElement


def _coeff(value) -> CyclotomicElement:
    return CyclotomicElement.coerce(value)


class MultiPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], object] | None = None):
        clean: dict[tuple[int, ...], CyclotomicElement] = {}
        for expo, c in (terms or {}).items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != nvars:
                raise ValueError(f"exponent {expo} does not match {nvars} variables")
            if any(e < 0 for e in expo):
                raise ValueError(f"negative exponent in {expo}")
            c = _coeff(c)
            if c:
                clean[expo] = clean[expo] + c if expo in clean else c
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    def __setattr__(self, *args):
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "MultiPoly":
        return MultiPoly(nvars, {})

    @staticmethod
    def constant(nvars: int, value) -> "MultiPoly":
        return MultiPoly(nvars, {(0,) * nvars: value})

    @staticmethod
    def variable(index: int, nvars: int) -> "MultiPoly":
        expo = [0] * nvars
        expo[index] = 1
        return MultiPoly(nvars, {tuple(expo): 1})

    # -- queries ----------------------------------------------------------

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        if not self.terms:
            return True
        degrees = {sum(e) for e in self.terms}
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def nterms(self) -> int:
        return len(self.terms)

    def coefficients(self) -> list[CyclotomicElement]:
        return [self.terms[e] for e in self.sorted_exponents()]

    def sorted_exponents(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=lambda e: (sum(e), e), reverse=True)

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> CyclotomicElement:
        if not self.terms:
            return CyclotomicElement.from_rational(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.nvars, other)
        self._check(other)
        out: dict[tuple[int, ...], CyclotomicElement] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def scale(self, value) -> "MultiPoly":
        c = _coeff(value)
        return MultiPoly(self.nvars, {e: x * c for e, x in self.terms.items()})

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- evaluation and substitution ---------------------------------------

    def evaluate(self, point: Sequence) -> CyclotomicElement:
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        vals = [_coeff(x) for x in point]
        powers: list[dict[int, CyclotomicElement]] = [dict() for _ in range(self.nvars)]

        def power(i, e):
            if e == 0:
                return CyclotomicElement.from_rational(1)
            if e not in powers[i]:
                powers[i][e] = power(i, e - 1) * vals[i]
            return powers[i][e]

        acc = CyclotomicElement.from_rational(0)
        for expo, c in self.terms.items():
            term = c
            for i, e in enumerate(expo):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        return acc

    def substitute(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Plug a polynomial in for each variable."""
        if len(polys) != self.nvars:
            raise ValueError("substitution arity mismatch")
        nvars = polys[0].nvars
        acc = MultiPoly.zero(nvars)
        cache: list[dict[int, MultiPoly]] = [dict() for _ in range(self.nvars)]

        def power(i, e):
            if e == 0:
                return MultiPoly.constant(nvars, 1)
            if e not in cache[i]:
                cache[i][e] = power(i, e - 1) * polys[i]
            return cache[i][e]

        for expo, c in self.terms.items():
            term = MultiPoly.constant(nvars, c)
            for i, e in enumerate(expo):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        return acc

    def homogenize(self, degree: int) -> "MultiPoly":
        """Append one variable and pad every term up to the given degree."""
        if self.total_degree() > degree:
            raise ValueError("degree too small to homogenize")
        out = {}
        for expo, c in self.terms.items():
            out[expo + (degree - sum(expo),)] = c
        return MultiPoly(self.nvars + 1, out)

    def dehomogenize(self) -> "MultiPoly":
        """Set the last variable to 1."""
        out: dict[tuple[int, ...], CyclotomicElement] = {}
        for expo, c in self.terms.items():
            e = expo[:-1]
            out[e] = out[e] + c if e in out else c
        return MultiPoly(self.nvars - 1, out)

    def galois_conjugate(self, k: int) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: c.galois_conjugate(k) for e, c in self.terms.items()})

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.terms.values():
            d = c.denominator_lcm()
            out = out * d // math.gcd(out, d)
        return out

    # -- identity ---------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for expo in self.sorted_exponents():
            c = self.terms[expo]
            mono = "*".join(
                f"X{i + 1}" if e == 1 else f"X{i + 1}^{e}"
                for i, e in enumerate(expo)
                if e
            )
            cs = str(c)
            needs_parens = ("+" in cs[1:]) or ("-" in cs[1:]) or "/" in cs or "*" in cs
            if not mono:
                parts.append(f"({cs})" if needs_parens and parts else cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            elif needs_parens:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return text


class LaurentPoly:
    """Univariate Laurent polynomial over a cyclotomic field."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean: dict[int, CyclotomicElement] = {}
        for e, c in (terms or {}).items():
            c = _coeff(c)
            if c:
                clean[int(e)] = clean[int(e)] + c if int(e) in clean else c
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    def __setattr__(self, *args):
        raise AttributeError("LaurentPoly is immutable")

    @staticmethod
    def constant(value) -> "LaurentPoly":
        return LaurentPoly({0: value})

    @staticmethod
    def t(exponent: int = 1) -> "LaurentPoly":
        return LaurentPoly({exponent: 1})

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        out: dict[int, CyclotomicElement] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            if len(self.terms) != 1:
                raise ValueError("can only invert Laurent monomials")
            (e, c), = self.terms.items()
            return LaurentPoly({-e: c.inverse()}) ** (-exponent)
        result = LaurentPoly.constant(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def nonconstant_term_count(self) -> int:
        return sum(1 for e in self.terms if e != 0)

    def is_constant(self) -> bool:
        return all(e == 0 for e in self.terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "LaurentPoly(0)"
        body = " + ".join(f"({c})*t^{e}" for e, c in sorted(self.terms.items()))
        return f"LaurentPoly({body})"
