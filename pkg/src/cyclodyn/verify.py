"""Self-check battery behind the `verify-suite` command.

Each check is a pure function returning (ok, detail); the runner may
execute them on worker threads, but results are collected in a fixed
order so reports are byte-identical for any thread count.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .canonical import (
    canonical_height_map,
    canonical_height_semigroup,
    drift_bound,
)
from .certificates import find_certificate, NoCertificate, verify_certificate
from .cyclotomic import CyclotomicElement, units
from .heights import (
    AffinePoint,
    RationalPlace,
    rational_abs,
    weil_height,
)
from .intervals import RigorousContext, certainly_greater, interval_max, lower, upper
from .morphisms import AffineMorphism, is_unitary_monomial_form
from .orbits import RationalBox, SemigroupSystem, collision_search, growth_check
from .parsing import parse_polynomial, parse_point


def _trial_factor(n: int) -> dict[int, int]:
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


def rational_height_oracle(coords: list[Fraction]) -> float:
    """Independent place-by-place height over Q via prime factorization.

    h(1 : x_1 : ... : x_N) = sum_v log max(1, |x_1|_v, ..., |x_N|_v).
    """
    primes: set[int] = set()
    for x in coords:
        if x:
            primes |= set(_trial_factor(abs(x.numerator)))
            primes |= set(_trial_factor(x.denominator))
    total = math.log(max(1.0, max((abs(float(x)) for x in coords), default=0.0)))
    for p in sorted(primes):
        best = max(rational_abs(x, RationalPlace.finite(p)) for x in coords)
        if best > 1:
            total += math.log(float(best))
    return total


def _sample_fraction(rng: random.Random, num=60, den=30, nonzero=False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-num, num), rng.randint(1, den))
        if not nonzero or q:
            return q


def _sample_element(rng: random.Random, order: int, bound=6) -> CyclotomicElement:
    from .cyclotomic import euler_phi

    coeffs = [
        Fraction(rng.randint(-bound, bound), rng.randint(1, 4))
        for _ in range(euler_phi(order))
    ]
    return CyclotomicElement(order, coeffs)


# ---------------------------------------------------------------------------
# individual checks: each returns (ok: bool, detail: str)

def check_ring_axioms():
    rng = random.Random(101)
    for _ in range(24):
        order = rng.choice([1, 3, 4, 5, 8, 12])
        x, y, z = (_sample_element(rng, order, 4) for _ in range(3))
        if (x + y) + z != x + (y + z):
            return False, "associativity of addition failed"
        if (x * y) * z != x * (y * z):
            return False, "associativity of multiplication failed"
        if x * (y + z) != x * y + x * z:
            return False, "distributivity failed"
        if y and (x / y) * y != x:
            return False, "division failed"
    return True, "24 random triples"

def check_galois_composition():
    rng = random.Random(102)
    for _ in range(24):
        order = rng.choice([5, 8, 12])
        x = _sample_element(rng, order, 4)
        ks = units(order)
        k1, k2 = rng.choice(ks), rng.choice(ks)
        if x.galois_conjugate(k1).galois_conjugate(k2) != x.galois_conjugate(k1 * k2):
            return False, f"composition failed at order {order}"
    return True, "24 random conjugation pairs"

def check_norm_embeddings():
    rng = random.Random(103)
    ctx = RigorousContext(128)
    for _ in range(12):
        order = rng.choice([3, 4, 5, 12])
        x = _sample_element(rng, order, 3)
        prod = None
        for k in units(x.order) if x.order > 1 else [1]:
            box = ctx.complex_from_element_coeffs(x.coeffs, x.order, k)
            prod = box if prod is None else prod * box
        target = float(x.field_norm())
        if prod is not None and abs(prod.mid_real - target) > 1e-6 + prod.error_radius:
            return False, f"norm mismatch: {prod.mid_real} vs {target}"
    return True, "12 norm/embedding agreements"

def check_height_oracle():
    rng = random.Random(104)
    worst = 0.0
    for _ in range(25):
        dim = rng.choice([1, 2, 3])
        coords = [_sample_fraction(rng) for _ in range(dim)]
        h = weil_height(AffinePoint(coords))
        o = rational_height_oracle(coords)
        worst = max(worst, abs(h.value - o))
        if abs(h.value - o) > 1e-12:
            return False, f"height mismatch {h.value} vs {o}"
    return True, f"25 points, max deviation {worst:.2e}"

def _fixture_systems():
    return {
        "square": AffineMorphism([parse_polynomial("X1^2", 1)]),
        "square-minus-one": AffineMorphism([parse_polynomial("X1^2 - 1", 1)]),
        "cube": AffineMorphism([parse_polynomial("X1^3", 1)]),
        "plane-pair": AffineMorphism(
            [parse_polynomial("X1^2 + X2^2", 2), parse_polynomial("X2^2", 2)]
        ),
        "gauss-half": AffineMorphism([parse_polynomial("z4*X1^2 + 1/2", 1, 4)]),
    }

def check_certificates():
    for name, f in _fixture_systems().items():
        cert = find_certificate(f.lift().components)
        if isinstance(cert, NoCertificate):
            return False, f"no certificate for {name}"
        if not verify_certificate(f.lift().components, cert):
            return False, f"residual nonzero for {name}"
    bad = [parse_polynomial("X1*X2", 2), parse_polynomial("X1^2", 2)]
    if not isinstance(find_certificate(bad, e_max=8), NoCertificate):
        return False, "common-zero pair produced a certificate"
    return True, "5 fixtures certified, common-zero pair rejected"

def check_growth():
    rng = random.Random(105)
    fx = _fixture_systems()
    systems = [
        SemigroupSystem([fx["square"]]),
        SemigroupSystem([fx["square-minus-one"]]),
        SemigroupSystem([fx["square"], fx["square-minus-one"]]),
    ]
    trials = 0
    for _ in range(60):
        sys = rng.choice(systems)
        if rng.random() < 0.5:
            p = rng.choice([2, 3, 5, 7])
            place = RationalPlace.finite(p)
            point = parse_point(str(Fraction(rng.randint(1, 40), p ** rng.randint(1, 3))))
        else:
            place = RationalPlace.archimedean()
            point = parse_point(str(rng.randint(3, 40)))
        word = [rng.randrange(sys.size) for _ in range(rng.randint(1, 3))]
        rep = growth_check(sys, point, place, word)
        if rep.precondition_met:
            trials += 1
            if rep.strictly_increasing is not True:
                return False, f"non-increase at {point} {place}"
    return True, f"{trials} above-threshold trials strictly increased"

def check_canonical_contracts():
    ctx = RigorousContext()
    fx = _fixture_systems()
    sys1 = SemigroupSystem([fx["square-minus-one"]])
    drift = drift_bound(sys1, ctx).combined
    tol = 1e-6
    rng = random.Random(106)
    for _ in range(8):
        x = parse_point(str(_sample_fraction(rng, 9, 5)))
        hhat = canonical_height_map(sys1, x, tol, ctx)
        h = weil_height(x, ctx)
        if abs(hhat.value - h.value) > 2 * drift + tol:
            return False, f"|hhat - h| escaped at {x}"
        fx1 = sys1.generators[0].evaluate(x)
        hf = canonical_height_map(sys1, fx1, tol, ctx)
        if abs(hf.value - 2 * hhat.value) > 3 * tol:
            return False, f"functional equation escaped at {x}"
    return True, "8 points: drift and functional equation hold"

def check_collision_fixture():
    fx = _fixture_systems()
    sys1 = SemigroupSystem([fx["square-minus-one"]])
    box = RationalBox(1, 3, 3)
    bad = []
    for point in box.points():
        cols = collision_search(sys1, point, 5)
        if cols and weil_height(point).value > 1e-9:
            bad.append(str(point))
    if bad:
        return False, f"collisions at positive height: {bad}"
    return True, "collisions confined to height-zero points"

def check_monomial_form():
    yes = AffineMorphism(
        [parse_polynomial("z3*X2^2", 2, 3), parse_polynomial("X1^2", 2, 3)]
    )
    no1 = AffineMorphism([parse_polynomial("X1^2 - 1", 1)])
    no2 = AffineMorphism(
        [parse_polynomial("2*X2^2", 2), parse_polynomial("X1^2", 2)]
    )
    form = is_unitary_monomial_form(yes)
    if form is None or form.exponent != 2 or form.permutation != (1, 0):
        return False, "missed the rotated square form"
    if is_unitary_monomial_form(no1) is not None:
        return False, "false positive on a binomial"
    if is_unitary_monomial_form(no2) is not None:
        return False, "false positive on a non-unitary scaling"
    return True, "detection and the two rejections agree"


CHECKS = [
    ("ring-axioms", check_ring_axioms),
    ("galois-composition", check_galois_composition),
    ("norm-embeddings", check_norm_embeddings),
    ("height-oracle", check_height_oracle),
    ("certificates", check_certificates),
    ("growth-lemma", check_growth),
    ("canonical-contracts", check_canonical_contracts),
    ("collision-fixture", check_collision_fixture),
    ("monomial-form", check_monomial_form),
]


def run_suite(threads: int = 1) -> dict:
    names = [name for name, _ in CHECKS]
    if threads <= 1:
        results = [fn() for _, fn in CHECKS]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(fn) for _, fn in CHECKS]
            results = [f.result() for f in futures]
    checks = [
        {"name": name, "status": "pass" if ok else "fail", "detail": detail}
        for name, (ok, detail) in zip(names, results)
    ]
    return {
        "checks": checks,
        "passed": sum(1 for c in checks if c["status"] == "pass"),
        "failed": sum(1 for c in checks if c["status"] == "fail"),
    }
