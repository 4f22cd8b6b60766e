"""Polynomial self-maps of affine N-space and their projective lifts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclotomic import CyclotomicElement
from .heights import AffinePoint
from .polynomials import LaurentPoly, MultiPoly


class AffineMorphism:
    """An N-tuple of polynomials in N variables over a cyclotomic field."""

    __slots__ = ("dim", "components", "degree")

    def __init__(self, components: Sequence[MultiPoly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a morphism needs at least one component")
        dim = comps[0].nvars
        if len(comps) != dim:
            raise ValueError(f"{len(comps)} components for {dim} variables")
        for c in comps:
            if c.nvars != dim:
                raise ValueError("component variable counts differ")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "degree", max(c.total_degree() for c in comps))

    def __setattr__(self, *args):
        raise AttributeError("AffineMorphism is immutable")

    def field_order(self) -> int:
        n = 1
        for comp in self.components:
            for c in comp.terms.values():
                n = n * c.order // math.gcd(n, c.order)
        return n

    def evaluate(self, point: AffinePoint | Sequence) -> AffinePoint:
        coords = point.coords if isinstance(point, AffinePoint) else list(point)
        if len(coords) != self.dim:
            raise ValueError("point dimension mismatch")
        return AffinePoint([c.evaluate(coords) for c in self.components])

    def compose(self, other: "AffineMorphism") -> "AffineMorphism":
        """self after other."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in composition")
        return AffineMorphism([c.substitute(other.components) for c in self.components])

    def lift(self) -> "ProjectiveLift":
        d = self.degree
        comps = [c.homogenize(d) for c in self.components]
        comps.append(MultiPoly.variable(self.dim, self.dim + 1) ** d)
        return ProjectiveLift(tuple(comps))

    def galois_conjugate(self, k: int) -> "AffineMorphism":
        return AffineMorphism([c.galois_conjugate(k) for c in self.components])

    def __eq__(self, other):
        if isinstance(other, AffineMorphism):
            return self.components == other.components
        return NotImplemented

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return "AffineMorphism(" + ", ".join(str(c) for c in self.components) + ")"


class ProjectiveLift:
    """Homogeneous (N+1)-tuple of common degree; standard lifts end in
    X_{N+1}^d."""

    __slots__ = ("components", "degree")

    def __init__(self, components: Sequence[MultiPoly]):
        comps = tuple(components)
        degrees = {c.total_degree() for c in comps if c}
        if len(degrees) != 1:
            raise ValueError("lift components must share one degree")
        d = degrees.pop()
        for c in comps:
            if not c.is_homogeneous(d):
                raise ValueError("lift components must be homogeneous")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "degree", d)

    def __setattr__(self, *args):
        raise AttributeError("ProjectiveLift is immutable")

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    def evaluate(self, coords: Sequence) -> list[CyclotomicElement]:
        vals = [CyclotomicElement.coerce(c) for c in coords]
        return [c.evaluate(vals) for c in self.components]

    def __repr__(self):
        return "ProjectiveLift(" + ", ".join(str(c) for c in self.components) + ")"


def conjugate_map(morphism: AffineMorphism, k: int) -> AffineMorphism:
    return morphism.galois_conjugate(k)


def compose(first: AffineMorphism, second: AffineMorphism) -> AffineMorphism:
    """first composed after second (first(second(x)))."""
    return first.compose(second)


def nonconstant_term_count(morphism: AffineMorphism, laurent_tuple: Sequence[LaurentPoly]) -> int:
    """Max over components of the number of nonconstant Laurent terms of
    component(q_1(t), ..., q_N(t)) after full expansion and cancellation."""
    qs = list(laurent_tuple)
    if len(qs) != morphism.dim:
        raise ValueError("Laurent tuple arity mismatch")
    worst = 0
    for comp in morphism.components:
        acc = LaurentPoly({})
        cache: list[dict[int, LaurentPoly]] = [dict() for _ in range(morphism.dim)]

        def power(i, e):
            if e == 0:
                return LaurentPoly.constant(1)
            if e not in cache[i]:
                cache[i][e] = power(i, e - 1) * qs[i]
            return cache[i][e]

        for expo, c in comp.terms.items():
            term = LaurentPoly.constant(c)
            for i, e in enumerate(expo):
                if e:
                    term = term * power(i, e)
            acc = acc + term
        worst = max(worst, acc.nonconstant_term_count())
    return worst


def is_root_of_unity(x: CyclotomicElement) -> bool:
    """Exact test: roots of unity in Q(zeta_n) form mu_m with
    m = n for even n and m = 2n for odd n."""
    x = CyclotomicElement.coerce(x)
    if not x or not x.is_algebraic_integer():
        return False
    n = x.order
    if n == 1:
        return x.coeffs[0] in (1, -1)
    m = n if n % 2 == 0 else 2 * n
    return x ** m == CyclotomicElement.from_rational(1)


@dataclass(frozen=True)
class MonomialForm:
    """Decomposition F_i = root_i * X_{permutation[i]}^exponent."""

    permutation: tuple[int, ...]  # component i reads variable permutation[i]
    roots: tuple[CyclotomicElement, ...]
    exponent: int


def is_unitary_monomial_form(morphism: AffineMorphism) -> MonomialForm | None:
    """Detect maps of the shape (c_1 X_{pi(1)}^d, ..., c_N X_{pi(N)}^d)
    with every c_i a root of unity and pi a permutation; None otherwise."""
    perm = []
    roots = []
    exponent = None
    for comp in morphism.components:
        if comp.nterms() != 1:
            return None
        (expo, c), = comp.terms.items()
        live = [i for i, e in enumerate(expo) if e]
        if len(live) != 1:
            return None
        i = live[0]
        if exponent is None:
            exponent = expo[i]
        elif expo[i] != exponent:
            return None
        if not is_root_of_unity(c):
            return None
        perm.append(i)
        roots.append(c)
    if sorted(perm) != list(range(morphism.dim)) or exponent is None or exponent < 1:
        return None
    form = MonomialForm(tuple(perm), tuple(roots), exponent)
    # recomposition check: the decomposition must rebuild the map exactly
    rebuilt = AffineMorphism(
        [
            MultiPoly.variable(form.permutation[i], morphism.dim) ** form.exponent
            * MultiPoly.constant(morphism.dim, form.roots[i])
            for i in range(morphism.dim)
        ]
    )
    return form if rebuilt == morphism else None
