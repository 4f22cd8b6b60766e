"""Canonical heights for maps, map sequences and finitely generated
semigroups, with computable error bounds.

For rational data the height limit h(f_n o ... o f_1 x) / (d_1 ... d_n)
is evaluated place by place with renormalized iteration:

  * archimedean: iterate the homogeneous lift on unit-sup interval
    vectors, accumulating log of the renormalization;
  * each bad prime (a prime dividing a coefficient denominator of a
    lift or of its certificate cofactors): iterate residues, tracking
    only the valuation drops, which the certificate bounds uniformly;
  * all other primes contribute nothing once the start vector is
    primitive.

Truncation tails are bounded by certificate constants, so every result
carries a rigorous error radius.  Non-rational inputs fall back to
exact iteration with a size cap.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .cyclotomic import CyclotomicElement, prime_factors
from .heights import (
    AffinePoint,
    HeightEstimate,
    coefficient_point,
    house,
    weil_height,
)
from .intervals import RigorousContext, interval_max, lower, midpoint, radius, upper
from .orbits import (
    Collision,
    HypothesisError,
    OrbitCapExceeded,
    SemigroupSystem,
    Word,
    collision_search,
    preperiodicity_search,
)
from .polynomials import MultiPoly

_SYSTEM_CACHE: dict = {}


def _as_system(obj) -> SemigroupSystem:
    if isinstance(obj, SemigroupSystem):
        return obj
    key = obj
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = SemigroupSystem([obj])
    return _SYSTEM_CACHE[key]


# ---------------------------------------------------------------------------
# height drift bounds (the computable stand-in for the sup constant)

@dataclass(frozen=True)
class DriftBound:
    """Upper bound on sup |h(F(x))/deg - h(x)| per generator; `combined`
    is the max over generators."""

    per_generator: tuple[float, ...]
    combined: float


def drift_bound(system_or_map, ctx: RigorousContext | None = None) -> DriftBound:
    sys = _as_system(system_or_map)
    ctx = ctx or RigorousContext()
    values = []
    for i in range(sys.size):
        data = sys.generator_data(i)
        d = sys.generators[i].degree
        m_f = max(c.nterms() for c in data.lift_components)
        h_f = weil_height(coefficient_point(data.lift_components), ctx)
        gpolys = data.certificate.cofactor_polys()
        m_g = max((g.nterms() for g in gpolys), default=1)
        h_g = weil_height(coefficient_point(gpolys), ctx)
        nplus1 = len(data.lift_components)
        up = max(
            h_f.upper() + math.log(m_f),
            h_g.upper() + math.log(nplus1 * m_g),
        )
        values.append(up / d)
    return DriftBound(tuple(values), max(values))


# ---------------------------------------------------------------------------
# Green-function engine over Q

@dataclass
class _GreenGenerator:
    degree: int
    scaler: int  # clears the lift's coefficient denominators
    int_components: list[list[tuple[tuple[int, ...], int]]]
    windows: dict[int, int]  # prime -> max valuation drop per step
    arch_tail: float  # upper bound on |log ||lift(u)||| at sup-1 vectors


def _rational_fraction(c: CyclotomicElement) -> Fraction:
    return c.rational_value()


def _is_rational_system(sys: SemigroupSystem) -> bool:
    for data in sys.all_generator_data():
        for poly in list(data.lift_components) + data.certificate.cofactor_polys():
            for c in poly.terms.values():
                if not c.is_rational:
                    return False
    return True


def _fraction_lcm_den(polys) -> int:
    out = 1
    for poly in polys:
        for c in poly.terms.values():
            den = c.rational_value().denominator
            out = out * den // math.gcd(out, den)
    return out


def _green_generators(sys: SemigroupSystem, ctx: RigorousContext) -> list[_GreenGenerator]:
    cached = getattr(sys, "_green_data", None)
    if cached is not None:
        return cached
    gens = []
    for i in range(sys.size):
        data = sys.generator_data(i)
        comps = data.lift_components
        t = _fraction_lcm_den(comps)
        int_comps = []
        for poly in comps:
            rows = []
            for expo, c in poly.terms.items():
                q = c.rational_value() * t
                rows.append((expo, int(q)))
            int_comps.append(rows)
        u = _fraction_lcm_den(data.certificate.cofactor_polys())
        windows: dict[int, int] = {}
        for p in set(prime_factors(t)) | set(prime_factors(u)):
            tau = _int_valuation(t, p)
            gamma = _int_valuation(u, p)
            windows[p] = tau + gamma
        # |log ||lift(u)|| | <= max(log(D*|F|), log(|G|/C)) on sup-1 vectors
        f_sup = max(abs(c.rational_value()) for poly in comps for c in poly.terms.values())
        g_sup = max(
            (abs(c.rational_value()) for g in data.certificate.cofactor_polys() for c in g.terms.values()),
            default=Fraction(1),
        )
        d_const = data.constants.upper_d
        c_const = data.constants.lower_c
        arch_tail = max(
            math.log(float(d_const * max(f_sup, Fraction(1)))),
            math.log(float(max(g_sup, Fraction(1)) / c_const)),
        ) + 1e-9
        gens.append(
            _GreenGenerator(sys.generators[i].degree, t, int_comps, windows, arch_tail)
        )
    sys._green_data = gens
    return gens


def _int_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _primitive_vector(point: AffinePoint) -> list[int]:
    fracs = [c.rational_value() for c in point.coords] + [Fraction(1)]
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(f * den) for f in fracs]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return [v // g for v in ints]


def _eval_int_component(rows, coords, mod=None):
    acc = 0
    for expo, c in rows:
        term = c
        for x, e in zip(coords, expo):
            if e:
                term = term * (pow(x, e, mod) if mod else x ** e)
        acc += term
    return acc % mod if mod else acc


def _stream_canonical_height(
    sys: SemigroupSystem,
    index_at: Callable[[int], int],
    point: AffinePoint,
    tol: float,
    ctx: RigorousContext | None = None,
    max_steps: int = 600,
) -> HeightEstimate:
    """Canonical height of a rational point along a stream of generator
    indices, to within tol (rigorous)."""
    ctx = ctx or RigorousContext()
    gens = _green_generators(sys, ctx)
    prim = _primitive_vector(point)
    bad_primes = sorted({p for g in gens for p in g.windows})
    # constant bounding every per-place one-step increment
    c_arch = max(g.arch_tail for g in gens)
    c_fin = 0.0
    for p in bad_primes:
        w = max(g.windows.get(p, 0) for g in gens)
        c_fin += w * math.log(p)
    c_total = c_arch + c_fin + 1e-12

    # choose the number of steps: tail <= c_total / prod(degrees[:n]) < tol/2
    degs = []
    prod = 1
    n = 0
    while prod <= 2 * c_total / tol and n < max_steps:
        degs.append(gens[index_at(n)].degree)
        prod *= degs[-1]
        n += 1
    if prod <= 2 * c_total / tol:
        raise OrbitCapExceeded(f"needed more than {max_steps} height iterations")

    # archimedean Green value
    z = [ctx.real(v) for v in prim]
    sup = interval_max(ctx, [abs(x) for x in z])
    green = ctx.log(sup)
    z = [x / sup for x in z]
    scale = 1
    for k in range(n):
        g = gens[index_at(k)]
        w = [
            _eval_poly_interval(rows, z, ctx)
            for rows in g.int_components
        ]
        sup = interval_max(ctx, [abs(x) for x in w])
        if lower(sup) <= 0:
            raise ArithmeticError("interval collapse; raise the precision")
        scale *= g.degree
        green += (ctx.log(sup) - ctx.log(ctx.real(g.scaler))) / scale
        z = [x / sup for x in w]

    # finite Green values at bad primes
    for p in bad_primes:
        wmax = max(g.windows.get(p, 0) for g in gens)
        digits = (n + 1) * wmax + 4
        modulus = p ** digits
        res = [v % modulus for v in prim]
        remaining = digits
        coeff = Fraction(0)
        scale = 1
        for k in range(n):
            g = gens[index_at(k)]
            tau = _int_valuation(g.scaler, p)
            w = [
                _eval_int_component(rows, res, p ** remaining)
                for rows in g.int_components
            ]
            window = g.windows.get(p, 0)
            m = min(_residue_valuation(x, p, window + 1) for x in w)
            if m > window:
                raise ArithmeticError("valuation exceeded the certificate window")
            remaining -= m
            res = [(x // (p ** m)) % (p ** remaining) for x in w]
            scale *= g.degree
            coeff += Fraction(tau - m, scale)
        green += ctx.log(ctx.real(p)) * ctx.from_fraction(coeff)

    tail = c_total / prod
    return HeightEstimate(midpoint(green), radius(green) + tail)


def _residue_valuation(x: int, p: int, limit: int) -> int:
    if x == 0:
        return limit
    v = 0
    while x % p == 0 and v < limit:
        x //= p
        v += 1
    return v


def _eval_poly_interval(rows, coords, ctx):
    acc = ctx.real(0)
    for expo, c in rows:
        term = ctx.real(c)
        for x, e in zip(coords, expo):
            for _ in range(e):
                term = term * x
        acc = acc + term
    return acc


def _naive_canonical_height(
    sys: SemigroupSystem,
    index_at: Callable[[int], int],
    point: AffinePoint,
    tol: float,
    ctx: RigorousContext,
    drift: float,
    bit_cap: int = 400_000,
) -> HeightEstimate:
    value = point
    prod = 1
    k = 0
    while 2 * drift / prod >= tol:
        g = sys.generators[index_at(k)]
        value = g.evaluate(value)
        prod *= g.degree
        k += 1
        bits = sum(
            c.numerator.bit_length() + c.denominator.bit_length()
            for x in value.coords
            for c in x.coeffs
        )
        if bits > bit_cap:
            raise OrbitCapExceeded(
                f"orbit coefficients exceeded {bit_cap} bits at step {k}; "
                "loosen tol or use rational data"
            )
    h = weil_height(value, ctx)
    return HeightEstimate(h.value / prod, h.error / prod + 2 * drift / prod)


def canonical_height_word(
    sys: SemigroupSystem,
    word_stream,
    point: AffinePoint,
    tol: float,
    ctx: RigorousContext | None = None,
    bit_cap: int = 400_000,
) -> HeightEstimate:
    """Canonical height along an infinite generator sequence given by a
    callable index -> generator position (or a sequence cycled)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ctx = ctx or RigorousContext()
    if callable(word_stream):
        index_at = word_stream
    else:
        seq = list(word_stream)
        if not seq:
            raise ValueError("word stream must be nonempty")
        index_at = lambda k: seq[k % len(seq)]  # noqa: E731
    for probe in range(4):
        i = index_at(probe)
        if not 0 <= i < sys.size:
            raise ValueError(f"stream index {i} out of range")
    if point.is_rational() and _is_rational_system(sys):
        return _stream_canonical_height(sys, index_at, point, tol, ctx)
    drift = drift_bound(sys, ctx).combined
    return _naive_canonical_height(sys, index_at, point, tol, ctx, drift, bit_cap)


def canonical_height_map(
    system_or_map,
    point: AffinePoint,
    tol: float,
    ctx: RigorousContext | None = None,
    bit_cap: int = 400_000,
) -> HeightEstimate:
    """Canonical height for a single map (constant sequence)."""
    sys = _as_system(system_or_map)
    if sys.size != 1:
        raise ValueError("canonical_height_map expects a single map")
    return canonical_height_word(sys, lambda k: 0, point, tol, ctx, bit_cap)


# ---------------------------------------------------------------------------
# semigroup canonical height (Kawaguchi-style averaged height)

@dataclass(frozen=True)
class WordMeasure:
    """Branch weights degree_j / (sum of degrees); the product measure over
    infinite words drives the monte-carlo mode."""

    weights: tuple[Fraction, ...]

    @staticmethod
    def of(sys: SemigroupSystem) -> "WordMeasure":
        total = sum(sys.degrees)
        return WordMeasure(tuple(Fraction(d, total) for d in sys.degrees))


@dataclass(frozen=True)
class McInfo:
    samples: int
    seed: int
    stderr: float


@dataclass(frozen=True)
class SemigroupHeightResult:
    estimate: HeightEstimate
    depth: int
    mode: str
    distinct_points: int | None = None
    mc: McInfo | None = None


def canonical_height_semigroup(
    sys: SemigroupSystem,
    point: AffinePoint,
    tol: float,
    mode: str = "exact-sum",
    seed: int | None = None,
    samples: int = 400,
    depth: int | None = None,
    cap_points: int = 200_000,
    ctx: RigorousContext | None = None,
) -> SemigroupHeightResult:
    """Averaged canonical height of the semigroup.

    exact-sum: (1/D^n) * sum over all length-n words of h(word value),
    deduplicating repeated values; truncation error 2*drift/2^n.
    monte-carlo: mean of word canonical heights over words sampled from
    the degree-weighted product measure (statistical error reported
    separately; the seed is required).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ctx = ctx or RigorousContext()
    drift = drift_bound(sys, ctx).combined
    n = depth if depth is not None else _depth_for(drift, tol)
    if mode == "exact-sum":
        big_d = sum(sys.degrees)
        level: dict[AffinePoint, int] = {point: 1}
        for _ in range(n):
            nxt: dict[AffinePoint, int] = {}
            for p, count in level.items():
                for g in sys.generators:
                    q = g.evaluate(p)
                    nxt[q] = nxt.get(q, 0) + count
            if len(nxt) > cap_points:
                raise OrbitCapExceeded(
                    f"exact-sum level grew past {cap_points} distinct points; "
                    "use monte-carlo mode or pass an explicit depth"
                )
            level = nxt
        total = 0.0
        err = 0.0
        weight = Fraction(1, big_d) ** n
        for p, count in sorted(level.items(), key=lambda kv: kv[0].sort_key()):
            h = weil_height(p, ctx)
            total += float(count * weight) * h.value
            err += float(count * weight) * h.error
        trunc = 2 * drift / (2 ** n)
        est = HeightEstimate(total, err + trunc)
        return SemigroupHeightResult(est, n, mode, distinct_points=len(level))
    if mode == "monte-carlo":
        if seed is None:
            raise ValueError("monte-carlo mode requires a seed")
        rng = random.Random(seed)
        weights = [float(w) for w in WordMeasure.of(sys).weights]
        values = []
        errs = []
        for _ in range(samples):
            word = rng.choices(range(sys.size), weights=weights, k=n)
            h = canonical_height_word(sys, lambda k, w=word: w[k % len(w)], point, tol, ctx)
            values.append(h.value)
            errs.append(h.error)
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / max(len(values) - 1, 1)
        stderr = math.sqrt(var / len(values))
        est = HeightEstimate(mean, max(errs) + tol)
        return SemigroupHeightResult(
            est, n, mode, mc=McInfo(samples, seed, stderr)
        )
    raise ValueError(f"unknown mode {mode!r}")


def _depth_for(drift: float, tol: float) -> int:
    n = 0
    while 2 * drift / (2 ** n) >= tol and n < 64:
        n += 1
    return n


# ---------------------------------------------------------------------------
# preperiodicity by height

@dataclass(frozen=True)
class PreperiodicVerdict:
    status: str  # preperiodic-confirmed | nonpreperiodic-certified | undecided
    estimate: HeightEstimate
    witness: object | None
    k_max: int
    l_max: int
    depth: int


def preperiodic_by_height(
    sys: SemigroupSystem,
    point: AffinePoint,
    tol: float,
    k_max: int = 8,
    l_max: int = 8,
    max_depth: int = 14,
    ctx: RigorousContext | None = None,
) -> PreperiodicVerdict:
    """Certify positivity of the semigroup height, else search for an exact
    orbit return; undecided when both are silent within the caps."""
    ctx = ctx or RigorousContext()
    if sys.size == 1:
        est = canonical_height_map(sys, point, tol, ctx)
        depth = 0
    else:
        drift = drift_bound(sys, ctx).combined
        depth = min(_depth_for(drift, tol), max_depth)
        est = canonical_height_semigroup(
            sys, point, tol, mode="exact-sum", depth=depth, ctx=ctx
        ).estimate
    if est.lower() > 0:
        return PreperiodicVerdict(
            "nonpreperiodic-certified", est, None, k_max, l_max, depth
        )
    witness = preperiodicity_search(sys, point, k_max, l_max)
    if witness.found:
        return PreperiodicVerdict(
            "preperiodic-confirmed", est, witness, k_max, l_max, depth
        )
    return PreperiodicVerdict("undecided", est, None, k_max, l_max, depth)


# ---------------------------------------------------------------------------
# collision boundedness experiment

@dataclass(frozen=True)
class CollisionRow:
    point: AffinePoint
    height: HeightEstimate
    collisions: tuple[Collision, ...]


@dataclass
class CollisionExperiment:
    rows: list[CollisionRow]
    n_max: int
    box: dict
    equal_degrees: bool = True

    def colliding_rows(self) -> list[CollisionRow]:
        return [r for r in self.rows if r.collisions]

    def max_collision_height(self) -> float | None:
        rows = self.colliding_rows()
        if not rows:
            return None
        return max(r.height.upper() for r in rows)

    def max_first_level(self) -> int | None:
        rows = self.colliding_rows()
        if not rows:
            return None
        return max(min(c.m for c in r.collisions) for r in rows)


def collision_bound_experiment(
    sys: SemigroupSystem, box, n_max: int, cap: int = 200_000, ctx: RigorousContext | None = None
) -> CollisionExperiment:
    # the boundedness statement assumes one common degree; the experiment
    # still runs on mixed degrees and records the hypothesis status
    equal = len(set(sys.degrees)) == 1
    ctx = ctx or RigorousContext()
    rows = []
    for point in box.points():
        cols = collision_search(sys, point, n_max, cap)
        rows.append(CollisionRow(point, weil_height(point, ctx), tuple(cols)))
    return CollisionExperiment(rows, n_max, box.describe(), equal_degrees=equal)


# ---------------------------------------------------------------------------
# split multilinear forms

@dataclass(frozen=True)
class SplitMultilinearForm:
    """F(T_1, ..., T_k) = sum_i c_i * prod_{j in J_i} T_j, evaluated
    coordinate by coordinate; the J_i partition {1, ..., k}."""

    arity: int
    dim: int
    partition: tuple[tuple[int, ...], ...]  # 1-based variable indices
    coefficients: tuple[AffinePoint, ...]

    def __post_init__(self):
        seen = set()
        for block in self.partition:
            for j in block:
                if not 1 <= j <= self.arity or j in seen:
                    raise ValueError("partition must disjointly cover 1..k")
                seen.add(j)
        if len(seen) != self.arity:
            raise ValueError("partition must cover 1..k")
        if len(self.coefficients) != len(self.partition):
            raise ValueError("one coefficient vector per block")
        for c in self.coefficients:
            if c.dim != self.dim:
                raise ValueError("coefficient dimension mismatch")
            if any(not x for x in c.coords):
                raise ValueError("coefficient vectors must have nonzero coordinates")


def split_form_eval(form: SplitMultilinearForm, args: Sequence[AffinePoint]) -> AffinePoint:
    if len(args) != form.arity:
        raise ValueError("arity mismatch")
    for a in args:
        if a.dim != form.dim:
            raise ValueError("argument dimension mismatch")
    one = CyclotomicElement.from_rational(1)
    total = [CyclotomicElement.from_rational(0)] * form.dim
    for block, c in zip(form.partition, form.coefficients):
        prod = [one] * form.dim
        for j in block:
            prod = [p * x for p, x in zip(prod, args[j - 1].coords)]
        total = [t + ci * p for t, ci, p in zip(total, c.coords, prod)]
    return AffinePoint(total)


@dataclass(frozen=True)
class SplitFormHit:
    point: AffinePoint
    levels: tuple[int, ...]  # n_1 > ... > n_k
    words: tuple[Word, ...]  # one word per sequence used
    height: HeightEstimate
    height_bound: float
    within_bound: bool


@dataclass
class SplitFormSearchResult:
    hits: list[SplitFormHit]
    mode: str
    n_max: int
    box: dict
    height_bound: float


def _height_bound_for_form(
    sys: SemigroupSystem, form: SplitMultilinearForm, ctx: RigorousContext
) -> float:
    r = len(form.partition)
    coeff_heights = sum(weil_height(c, ctx).upper() for c in form.coefficients)
    drift = drift_bound(sys, ctx).combined
    slack = 2 * drift * (1 + form.dim * form.arity)
    log_term = math.log(r - 1) if r >= 2 else 0.0
    return form.dim * coeff_heights + log_term + slack


def split_form_zero_search(
    sys: SemigroupSystem,
    form: SplitMultilinearForm,
    box,
    n_max: int,
    mode: str = "single-sequence",
    cap_words: int = 20_000,
    ctx: RigorousContext | None = None,
) -> SplitFormSearchResult:
    """All (P, word(s), n_1 > ... > n_k) in the box with form value zero.

    single-sequence uses one orbit sequence for every slot (needs every
    degree > N); multi-sequence uses independent sequences (needs a
    common degree >= (3N+2)/2).
    """
    ctx = ctx or RigorousContext()
    if mode not in ("single-sequence", "multi-sequence"):
        raise ValueError("mode must be single-sequence or multi-sequence")
    n_dim = sys.dim
    if form.dim != n_dim:
        raise ValueError("form dimension must match the system")
    if mode == "single-sequence":
        bad = [d for d in sys.degrees if d <= n_dim]
        if bad:
            raise HypothesisError(
                f"single-sequence mode needs every degree > N={n_dim}; got {bad}"
            )
    else:
        d = sys.common_degree()
        if 2 * d < 3 * n_dim + 2:
            raise HypothesisError(
                f"multi-sequence mode needs degree >= (3N+2)/2 = {(3 * n_dim + 2) / 2}, got {d}"
            )
    k = form.arity
    if n_max + 1 < k:
        raise ValueError("n_max too small for the arity")
    bound = _height_bound_for_form(sys, form, ctx)
    hits = []
    from itertools import combinations, product

    level_tuples = [tuple(reversed(c)) for c in combinations(range(n_max + 1), k)]
    level_tuples.sort()
    for point in box.points():
        found = {}
        if mode == "single-sequence":
            words = list(product(range(sys.size), repeat=n_max))
            if len(words) > cap_words:
                raise OrbitCapExceeded(f"word budget {cap_words} exceeded")
            for word in words:
                chain = [point]
                for i in word:
                    chain.append(sys.generators[i].evaluate(chain[-1]))
                for levels in level_tuples:
                    args = [chain[t] for t in levels]
                    if n_dim > 1 and any(not c for a in args for c in a.coords):
                        continue
                    if not any(split_form_eval(form, args).coords):
                        key = levels
                        if key not in found:
                            found[key] = (Word(word[: levels[0]]),)
            for levels, ws in sorted(found.items()):
                h = weil_height(point, ctx)
                hits.append(
                    SplitFormHit(point, levels, ws, h, bound, h.lower() <= bound)
                )
        else:
            budget = 0
            for levels in level_tuples:
                word_sets = [list(product(range(sys.size), repeat=t)) for t in levels]
                combos = 1
                for wset in word_sets:
                    combos *= len(wset)
                budget += combos
                if budget > cap_words:
                    raise OrbitCapExceeded(f"word budget {cap_words} exceeded")
                for choice in product(*word_sets):
                    args = []
                    for word in choice:
                        value = point
                        for i in word:
                            value = sys.generators[i].evaluate(value)
                        args.append(value)
                    if n_dim > 1 and any(not c for a in args for c in a.coords):
                        continue
                    if not any(split_form_eval(form, args).coords):
                        key = levels
                        if key not in found:
                            found[key] = tuple(Word(w) for w in choice)
            for levels, ws in sorted(found.items()):
                h = weil_height(point, ctx)
                hits.append(
                    SplitFormHit(point, levels, ws, h, bound, h.lower() <= bound)
                )
    return SplitFormSearchResult(hits, mode, n_max, box.describe(), bound)
