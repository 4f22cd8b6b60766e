"""Semigroup orbits: level sets, collisions, preperiodicity, growth
checks above certificate thresholds, and the scaled-relation search.

Level k of the orbit of P is the set of values F_{i_k} o ... o F_{i_1}(P)
over all length-k index words, deduplicated by exact coordinate vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .certificates import (
    Certificate,
    EffectiveConstants,
    NoCertificate,
    effective_constants,
    find_certificate,
    finite_place_norm,
)
from .cyclotomic import CyclotomicElement, units
from .heights import (
    AffinePoint,
    HeightEstimate,
    RationalPlace,
    house,
    integrality_scaler,
    rational_abs,
)
from .intervals import RigorousContext, certainly_greater, interval_max, lower, upper
from .morphisms import AffineMorphism
from .polynomials import MultiPoly


class OrbitCapExceeded(RuntimeError):
    """Resource cap hit; .partial carries whatever was computed."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class HypothesisError(ValueError):
    """A theorem hypothesis is violated (e.g. unequal degrees)."""


@dataclass(frozen=True)
class Word:
    indices: tuple[int, ...]

    def __post_init__(self):
        if any(i < 0 for i in self.indices):
            raise ValueError("word indices must be non-negative")

    def __len__(self):
        return len(self.indices)

    def __str__(self):
        return "." .join(str(i + 1) for i in self.indices) if self.indices else "<empty>"


@dataclass(frozen=True)
class GeneratorData:
    morphism: AffineMorphism
    lift_components: tuple[MultiPoly, ...]
    certificate: Certificate
    constants: EffectiveConstants


class SemigroupSystem:
    """A finite set of affine self-maps of common dimension, degrees >= 2."""

    def __init__(self, generators: Sequence[AffineMorphism], names: Sequence[str] | None = None):
        gens = tuple(generators)
        if not gens:
            raise ValueError("at least one generator required")
        dim = gens[0].dim
        for g in gens:
            if g.dim != dim:
                raise ValueError("generators must share the dimension")
            if g.degree < 2:
                raise ValueError("dynamical generators need degree >= 2")
        self.generators = gens
        self.dim = dim
        self.names = tuple(names) if names else tuple(f"F{i+1}" for i in range(len(gens)))
        self._data: dict[int, GeneratorData] = {}
        self._ctx = RigorousContext()

    @property
    def size(self) -> int:
        return len(self.generators)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.generators)

    def common_degree(self) -> int:
        ds = set(self.degrees)
        if len(ds) != 1:
            raise HypothesisError(f"generators have unequal degrees {sorted(ds)}")
        return ds.pop()

    def field_order(self) -> int:
        n = 1
        for g in self.generators:
            m = g.field_order()
            n = n * m // math.gcd(n, m)
        return n

    def generator_data(self, i: int, e_max: int | None = None) -> GeneratorData:
        if i not in self._data:
            g = self.generators[i]
            comps = g.lift().components
            cert = find_certificate(comps, e_max)
            if isinstance(cert, NoCertificate):
                raise HypothesisError(
                    f"generator {self.names[i]} is not a morphism: no certificate "
                    f"up to e={cert.e_max} (common zero of the lift?)"
                )
            n = self.field_order()
            consts = effective_constants(comps, cert, self._ctx, embeddings=units(n))
            self._data[i] = GeneratorData(g, comps, cert, consts)
        return self._data[i]

    def all_generator_data(self) -> list[GeneratorData]:
        return [self.generator_data(i) for i in range(self.size)]

    def apply_word(self, word: Word | Sequence[int], point: AffinePoint) -> AffinePoint:
        indices = word.indices if isinstance(word, Word) else tuple(word)
        value = point
        for i in indices:
            value = self.generators[i].evaluate(value)
        return value

    def integrality_scaler(self) -> int:
        """Clears the denominators of all map and cofactor coefficients."""
        polys = []
        for data in self.all_generator_data():
            polys.append(list(data.lift_components))
            polys.append(data.certificate.cofactor_polys())
        return integrality_scaler(polys)


@dataclass
class OrbitLevels:
    base: AffinePoint
    levels: list[list[AffinePoint]]  # levels[k] sorted canonically
    capped: bool = False

    def level_set(self, k: int) -> frozenset:
        return frozenset(self.levels[k])

    def total_points(self) -> int:
        return sum(len(lv) for lv in self.levels)


def orbit_levels(
    sys: SemigroupSystem, point: AffinePoint, depth: int, cap: int = 200_000
) -> OrbitLevels:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    levels = [[point]]
    total = 1
    for _ in range(depth):
        seen = set()
        nxt = []
        for p in levels[-1]:
            for g in sys.generators:
                q = g.evaluate(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        total += len(nxt)
        if total > cap:
            raise OrbitCapExceeded(
                f"orbit cap {cap} exceeded at depth {len(levels)}",
                partial=OrbitLevels(point, levels, capped=True),
            )
        nxt.sort(key=lambda p: p.sort_key())
        levels.append(nxt)
    return OrbitLevels(point, levels)


@dataclass(frozen=True)
class Collision:
    n: int
    m: int
    witness: AffinePoint


def collision_search(
    sys: SemigroupSystem, point: AffinePoint, n_max: int, cap: int = 200_000
) -> list[Collision]:
    """All level pairs n < m <= n_max with a shared value, with witnesses."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    levels = orbit_levels(sys, point, n_max, cap)
    out = []
    sets = [levels.level_set(k) for k in range(len(levels.levels))]
    for n in range(len(sets)):
        for m in range(n + 1, len(sets)):
            common = sets[n] & sets[m]
            if common:
                witness = min(common, key=lambda p: p.sort_key())
                out.append(Collision(n, m, witness))
    return out


@dataclass(frozen=True)
class PreperiodicityWitness:
    found: bool
    k: int | None = None
    path_word: Word | None = None
    l: int | None = None
    return_word: Word | None = None
    k_max: int = 0
    l_max: int = 0


def preperiodicity_search(
    sys: SemigroupSystem,
    point: AffinePoint,
    k_max: int,
    l_max: int,
    cap: int = 200_000,
) -> PreperiodicityWitness:
    """Bounded search for a path image Q with Q in level l of its own orbit.

    `found=False` only means "not found within the caps".
    """
    if k_max < 0 or l_max < 0:
        raise ValueError("caps must be >= 0")
    frontier: dict[AffinePoint, Word] = {point: Word(())}
    seen = dict(frontier)
    for k in range(k_max + 1):
        for q, path in sorted(frontier.items(), key=lambda kv: kv[0].sort_key()):
            ret = _self_return(sys, q, l_max, cap)
            if ret is not None:
                l, word = ret
                return PreperiodicityWitness(True, k, path, l, word, k_max, l_max)
        if k == k_max:
            break
        nxt: dict[AffinePoint, Word] = {}
        for q, path in frontier.items():
            for i, g in enumerate(sys.generators):
                r = g.evaluate(q)
                if r not in seen and r not in nxt:
                    nxt[r] = Word(path.indices + (i,))
        if len(seen) + len(nxt) > cap:
            raise OrbitCapExceeded(f"path cap {cap} exceeded at k={k + 1}")
        seen.update(nxt)
        frontier = nxt
    return PreperiodicityWitness(False, k_max=k_max, l_max=l_max)


def _self_return(sys, q: AffinePoint, l_max: int, cap: int):
    frontier: dict[AffinePoint, Word] = {q: Word(())}
    total = 1
    for l in range(1, l_max + 1):
        nxt: dict[AffinePoint, Word] = {}
        for p, word in frontier.items():
            for i, g in enumerate(sys.generators):
                r = g.evaluate(p)
                if r not in nxt:
                    nxt[r] = Word(word.indices + (i,))
        total += len(nxt)
        if total > cap:
            raise OrbitCapExceeded(f"return-orbit cap {cap} exceeded at l={l}")
        if q in nxt:
            return l, nxt[q]
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# growth above certificate thresholds

@dataclass(frozen=True)
class GrowthReport:
    place: RationalPlace
    embedding: int
    precondition_met: bool
    threshold: object  # Fraction (finite) or float upper bound (arch)
    sizes: tuple  # Fractions (finite) or (lo, hi) float pairs (arch)
    strictly_increasing: bool | None  # None when precondition unmet


def _finite_threshold(sys: SemigroupSystem, p: RationalPlace) -> Fraction:
    best = Fraction(1)
    for data in sys.all_generator_data():
        best = max(best, finite_place_norm(data.certificate.cofactor_polys(), p))
    return best


def _arch_threshold(sys: SemigroupSystem, k: int, ctx: RigorousContext):
    vals = []
    for data in sys.all_generator_data():
        g = data.constants.g_norms[k]
        vals.append(g / ctx.from_fraction(data.constants.lower_c))
    vals.append(ctx.real(1))
    return interval_max(ctx, vals)


def growth_check(
    sys: SemigroupSystem,
    point: AffinePoint,
    place: RationalPlace,
    word: Word | Sequence[int],
    embedding: int = 1,
    ctx: RigorousContext | None = None,
) -> GrowthReport:
    """Verify the strict size increase along a word when the starting size
    clears the certificate threshold; silent (precondition unmet) below."""
    ctx = ctx or RigorousContext()
    indices = word.indices if isinstance(word, Word) else tuple(word)
    values = [point]
    for i in indices:
        values.append(sys.generators[i].evaluate(values[-1]))
    if place.is_finite:
        if not point.is_rational or any(
            not c.is_rational
            for data in sys.all_generator_data()
            for poly in list(data.lift_components) + data.certificate.cofactor_polys()
            for c in poly.terms.values()
        ):
            raise HypothesisError("finite-place growth checks run over Q only")
        threshold = _finite_threshold(sys, place)
        sizes = tuple(
            max(rational_abs(c.rational_value(), place) for c in v.coords)
            for v in values
        )
        met = sizes[0] > threshold
        increasing = (
            all(sizes[i + 1] > sizes[i] for i in range(len(sizes) - 1)) if met else None
        )
        return GrowthReport(place, 0, met, threshold, sizes, increasing)
    n = sys.field_order()
    pn = point.field_order()
    n = n * pn // math.gcd(n, pn)
    k = embedding % n if n > 1 else 1
    if math.gcd(k if k else n, n) != 1:
        raise ValueError(f"embedding {embedding} not coprime to field order {n}")
    threshold = _arch_threshold(sys, k if n > 1 else 1, ctx)
    mods = []
    for v in values:
        coords = [
            ctx.complex_from_element_coeffs(c.to_order(n), n, k).modulus()
            for c in v.coords
        ]
        mods.append(interval_max(ctx, coords))
    met = certainly_greater(mods[0], threshold)
    increasing = None
    if met:
        increasing = all(
            certainly_greater(mods[i + 1], mods[i]) for i in range(len(mods) - 1)
        )
    sizes = tuple((lower(m), upper(m)) for m in mods)
    return GrowthReport(place, k, met, upper(threshold), sizes, increasing)


# ---------------------------------------------------------------------------
# explicit house bounds

def backward_house_bound(sys: SemigroupSystem, bound_a: float, ctx: RigorousContext | None = None) -> float:
    """Upper bound L for the house of intermediate images of a point whose
    deeper image has house <= A: L = max(thresholds, A) over embeddings."""
    if bound_a < 0:
        raise ValueError("A must be >= 0")
    ctx = ctx or RigorousContext()
    n = sys.field_order()
    best = float(bound_a)
    for k in units(n):
        best = max(best, upper(_arch_threshold(sys, k, ctx)))
    return best


@dataclass(frozen=True)
class RelationHouseBound:
    m: int
    bound: float
    lower_c: Fraction
    upper_d: int
    f_norm_max: float
    g_norm_max: float


def relation_house_bound(
    sys: SemigroupSystem, bound_a: float, ctx: RigorousContext | None = None
) -> RelationHouseBound:
    """Explicit house bound 2*s*m^2*A + D*max|sigma(F_i)| for points whose
    level-n value is a bounded-integral combination of shorter-word values.

    Needs the common degree >= 3 and A >= 1.
    """
    d = sys.common_degree()
    if d < 3:
        raise HypothesisError(f"relation house bound needs degree >= 3, got {d}")
    if bound_a < 1:
        raise HypothesisError("relation house bound needs A >= 1")
    ctx = ctx or RigorousContext()
    data = sys.all_generator_data()
    c_min = min(g.constants.lower_c for g in data)
    d_max = max(g.constants.upper_d for g in data)
    g_max = max(upper(v) for g in data for v in g.constants.g_norms.values())
    f_max = max(upper(v) for g in data for v in g.constants.f_norms.values())
    # least m with c_min / |sigma(G)| > 1/m for every embedding and generator
    m = math.floor(g_max / c_min) + 1
    bound = 2 * sys.size * m * m * bound_a + d_max * f_max
    return RelationHouseBound(m, bound, c_min, d_max, f_max, g_max)


# ---------------------------------------------------------------------------
# candidate boxes

@dataclass(frozen=True)
class RationalBox:
    dim: int
    num_max: int
    den_max: int
    exclude_zero_coords: bool = False

    def coordinate_values(self) -> list[Fraction]:
        vals = set()
        for den in range(1, self.den_max + 1):
            for num in range(-self.num_max, self.num_max + 1):
                vals.add(Fraction(num, den))
        if self.exclude_zero_coords:
            vals.discard(Fraction(0))
        return sorted(vals)

    def points(self) -> list[AffinePoint]:
        vals = self.coordinate_values()
        out = []

        def rec(prefix):
            if len(prefix) == self.dim:
                out.append(AffinePoint(list(prefix)))
                return
            for v in vals:
                rec(prefix + [v])

        rec([])
        return out

    def describe(self):
        return {
            "kind": "rational",
            "num_max": self.num_max,
            "den_max": self.den_max,
            "exclude_zero_coords": self.exclude_zero_coords,
        }


@dataclass(frozen=True)
class CyclotomicIntegerBox:
    dim: int
    order: int
    coeff_bound: int
    exclude_zero_coords: bool = False

    def coordinate_values(self) -> list[CyclotomicElement]:
        from itertools import product

        from .cyclotomic import euler_phi

        phi = euler_phi(self.order)
        vals = []
        for coeffs in product(range(-self.coeff_bound, self.coeff_bound + 1), repeat=phi):
            x = CyclotomicElement(self.order, list(coeffs))
            if self.exclude_zero_coords and not x:
                continue
            vals.append(x)
        uniq = {v: None for v in vals}
        return sorted(uniq, key=lambda v: v.sort_key())

    def points(self) -> list[AffinePoint]:
        vals = self.coordinate_values()
        out = []

        def rec(prefix):
            if len(prefix) == self.dim:
                out.append(AffinePoint(list(prefix)))
                return
            for v in vals:
                rec(prefix + [v])

        rec([])
        return out

    def describe(self):
        return {
            "kind": "cyclotomic-integer",
            "order": self.order,
            "coeff_bound": self.coeff_bound,
            "exclude_zero_coords": self.exclude_zero_coords,
        }


# ---------------------------------------------------------------------------
# scaled-relation search (bounded-integral combinations of orbit values)

@dataclass(frozen=True)
class RelationHit:
    point: AffinePoint
    n: int
    level_word: Word
    combination: str
    house_estimate: HeightEstimate
    house_bounded: bool | None  # vs the relation house bound, None if d < 3
    scaled_integral: bool


@dataclass
class RelationSearchResult:
    hits: list[RelationHit]
    bound: RelationHouseBound | None
    scaler: int
    skipped_gammas: list[str]
    box: dict
    n_max: int
    slice_mode: str

    def empirical_max_house(self) -> float | None:
        if not self.hits:
            return None
        return max(h.house_estimate.upper() for h in self.hits)


def _word_values_with_words(sys, point, depth, cap):
    """Level lists [(word, value)] with value dedup per level."""
    levels = [[(Word(()), point)]]
    total = 1
    for _ in range(depth):
        seen = set()
        nxt = []
        for word, p in levels[-1]:
            for i, g in enumerate(sys.generators):
                q = g.evaluate(p)
                if q not in seen:
                    seen.add(q)
                    nxt.append((Word(word.indices + (i,)), q))
        total += len(nxt)
        if total > cap:
            raise OrbitCapExceeded(f"relation search cap {cap} exceeded")
        nxt.sort(key=lambda wv: wv[1].sort_key())
        levels.append(nxt)
    return levels


def sigma_relation_search(
    sys: SemigroupSystem,
    bound_a: float,
    gamma_set: Sequence,
    box,
    n_max: int,
    slice_mode: str = "single",
    cap: int = 200_000,
    ctx: RigorousContext | None = None,
) -> RelationSearchResult:
    """Find box points P whose level-n value equals a gamma-combination of
    shorter-word values, gamma ranging over the supplied finite set.

    slice_mode "single" pairs one gamma with one shorter word; "uniform"
    applies the same gamma to the sum of all shorter-word values.  Every
    hit is checked against the explicit house bound (common degree >= 3)
    and for integrality after scaling.
    """
    if slice_mode not in ("single", "uniform"):
        raise ValueError("slice_mode must be 'single' or 'uniform'")
    ctx = ctx or RigorousContext()
    d = sys.common_degree()
    gammas = [CyclotomicElement.coerce(g) for g in gamma_set]
    bound = None
    if d >= 3 and bound_a >= 1:
        bound = relation_house_bound(sys, bound_a, ctx)
    scaler = sys.integrality_scaler()
    skipped: list[str] = []
    usable: list[CyclotomicElement] = []
    for g in gammas:
        if not g.is_algebraic_integer():
            skipped.append(f"{g}: not an algebraic integer")
            continue
        usable.append(g)
    hits = []
    for point in box.points():
        levels = _word_values_with_words(sys, point, n_max, cap)
        for n in range(1, n_max + 1):
            # admissible gammas for level n have house <= A^(d^(n-1))
            limit = float(bound_a) ** (d ** (n - 1))
            level_gammas = []
            for g in usable:
                hg = house(AffinePoint([g]), ctx)
                if hg.lower() > limit:
                    skipped.append(f"{g}: house exceeds A^(d^{n - 1}) at n={n}")
                    continue
                level_gammas.append(g)
            targets: dict[CyclotomicElement, str] = {}
            if slice_mode == "single":
                for g in level_gammas:
                    for k in range(n):
                        for word, value in levels[k]:
                            tval = _scalar_point(g, value)
                            targets.setdefault(tval, f"gamma={g} * word[{word}]")
            else:
                total = None
                for k in range(n):
                    for _, value in levels[k]:
                        total = value if total is None else _point_add(total, value)
                for g in level_gammas:
                    tval = _scalar_point(g, total)
                    targets.setdefault(tval, f"gamma={g} * sum(levels<={n - 1})")
            for word, value in levels[n]:
                if value in targets:
                    hp = house(point, ctx)
                    bounded = None
                    if bound is not None:
                        bounded = hp.lower() <= bound.bound
                    scaled = point.scale(scaler).is_integral()
                    hits.append(
                        RelationHit(
                            point, n, word, targets[value], hp, bounded, scaled
                        )
                    )
                    break
            else:
                continue
            break
    return RelationSearchResult(
        hits, bound, scaler, skipped, box.describe(), n_max, slice_mode
    )


def _scalar_point(scalar: CyclotomicElement, point: AffinePoint) -> AffinePoint:
    return AffinePoint([scalar * c for c in point.coords])


def _point_add(a: AffinePoint, b: AffinePoint) -> AffinePoint:
    return AffinePoint([x + y for x, y in zip(a.coords, b.coords)])
