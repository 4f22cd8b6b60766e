import math
import random
from fractions import Fraction

import pytest

from cyclodyn.canonical import (
    SplitMultilinearForm,
    WordMeasure,
    canonical_height_map,
    canonical_height_semigroup,
    canonical_height_word,
    collision_bound_experiment,
    drift_bound,
    preperiodic_by_height,
    split_form_eval,
    split_form_zero_search,
)
from cyclodyn.cyclotomic import CyclotomicElement as C
from cyclodyn.heights import AffinePoint, weil_height
from cyclodyn.intervals import RigorousContext
from cyclodyn.morphisms import AffineMorphism
from cyclodyn.orbits import (
    HypothesisError,
    OrbitCapExceeded,
    RationalBox,
    SemigroupSystem,
)
from cyclodyn.parsing import parse_point, parse_polynomial

CTX = RigorousContext(192)


def m(*sources, order=1):
    nvars = len(sources)
    return AffineMorphism([parse_polynomial(s, nvars, order) for s in sources])


SQ = m("X1^2")
MINK = m("X1^2 - 1")
CUBE = m("X1^3")
S_SQ = SemigroupSystem([SQ])
S_MINK = SemigroupSystem([MINK])
S_POWERS = SemigroupSystem([SQ, CUBE])
S_MIX = SemigroupSystem([SQ, MINK])


def test_drift_bound_examples():
    assert drift_bound(S_SQ, CTX).combined == pytest.approx(0.5 * math.log(2), abs=1e-9)
    assert drift_bound(S_MINK, CTX).combined == pytest.approx(0.5 * math.log(2), abs=1e-9)
    two = drift_bound(SemigroupSystem([m("2*X1^2")]), CTX).combined
    assert two >= 0.5 * math.log(2) - 1e-12


def test_drift_bound_is_a_true_drift_bound():
    rng = random.Random(31)
    for sys_ in (S_SQ, S_MINK, SemigroupSystem([m("X1^2/3 - 1/6")])):
        c = drift_bound(sys_, CTX).combined
        d = sys_.generators[0].degree
        for _ in range(12):
            x = AffinePoint([Fraction(rng.randint(-40, 40), rng.randint(1, 20))])
            hx = weil_height(x, CTX).value
            hfx = weil_height(sys_.generators[0].evaluate(x), CTX).value
            assert abs(hfx / d - hx) <= c + 1e-9


def test_canonical_height_power_map():
    h = canonical_height_map(S_SQ, parse_point("2"), 1e-8, CTX)
    assert h.value == pytest.approx(math.log(2), abs=1e-8)
    assert h.error <= 1e-8


def test_canonical_height_preperiodic_zero():
    h = canonical_height_map(S_MINK, parse_point("0"), 1e-8, CTX)
    assert abs(h.value) <= 1e-8


def test_canonical_height_matches_deep_oracle():
    h = canonical_height_map(S_MINK, parse_point("2"), 1e-8, CTX)
    v = Fraction(2)
    for _ in range(20):
        v = v * v - 1
    oracle = math.log(max(abs(v.numerator), v.denominator)) / 2 ** 20
    assert h.value == pytest.approx(oracle, abs=1e-6 + h.error)


def test_canonical_height_functional_equation():
    rng = random.Random(77)
    for _ in range(10):
        x = AffinePoint([Fraction(rng.randint(-9, 9), rng.randint(1, 5))])
        hx = canonical_height_map(S_MINK, x, 1e-9, CTX)
        hfx = canonical_height_map(S_MINK, MINK.evaluate(x), 1e-9, CTX)
        assert abs(hfx.value - 2 * hx.value) <= 3e-9


def test_canonical_height_with_bad_primes():
    f = m("X1^2/3 - 1/6")
    S = SemigroupSystem([f])
    h = canonical_height_map(S, parse_point("5/7"), 1e-9, CTX)
    v = Fraction(5, 7)
    for _ in range(14):
        v = v * v / 3 - Fraction(1, 6)
    oracle = math.log(max(abs(v.numerator), v.denominator)) / 2 ** 14
    drift = drift_bound(S, CTX).combined
    assert abs(h.value - oracle) <= 2 * drift / 2 ** 14 + 1e-9
    hf = canonical_height_map(S, f.evaluate(parse_point("5/7")), 1e-9, CTX)
    assert abs(hf.value - 2 * h.value) <= 3e-9


def test_word_heights():
    h = canonical_height_word(S_POWERS, [0], parse_point("2"), 1e-8, CTX)
    assert h.value == pytest.approx(math.log(2), abs=1e-8)
    h2 = canonical_height_word(S_POWERS, [0, 1], parse_point("2"), 1e-8, CTX)
    assert h2.value == pytest.approx(math.log(2), abs=1e-8)
    h3 = canonical_height_word(S_MIX, [1, 0], parse_point("0"), 1e-8, CTX)
    assert abs(h3.value) <= 1e-8


def test_word_height_cyclotomic_fallback():
    fz = m("z4*X1^2", order=4)
    S = SemigroupSystem([fz])
    h = canonical_height_map(S, AffinePoint([C.zeta(8)]), 1e-4, CTX)
    assert abs(h.value) <= 1e-4
    h2 = canonical_height_map(S, AffinePoint([C.from_rational(3) * C.zeta(4)]), 1e-3, CTX)
    assert h2.value == pytest.approx(math.log(3), abs=1e-3)


def test_cyclotomic_fallback_cap():
    fz = m("z4*X1^2 + 1/2", order=4)
    S = SemigroupSystem([fz])
    with pytest.raises(OrbitCapExceeded):
        canonical_height_map(S, AffinePoint([C.zeta(8) + 2]), 1e-9, CTX, bit_cap=4000)


def test_semigroup_height_powers():
    r = canonical_height_semigroup(S_POWERS, parse_point("2"), 1e-6, depth=6, ctx=CTX)
    assert r.estimate.value == pytest.approx(math.log(2), abs=1e-9)
    r0 = canonical_height_semigroup(S_POWERS, AffinePoint([C.zeta(3)]), 1e-6, depth=8, ctx=CTX)
    assert abs(r0.estimate.value) <= 1e-9


def test_semigroup_height_preperiodic_mixed():
    r = canonical_height_semigroup(S_MIX, parse_point("0"), 1e-8, ctx=CTX)
    assert abs(r.estimate.value) <= 1e-12
    assert r.estimate.error <= 1e-8 + 1e-12
    assert r.distinct_points <= 3


def test_semigroup_exact_sum_depth12_example():
    r = canonical_height_semigroup(S_MIX, parse_point("0"), 1e-4, depth=12, ctx=CTX)
    drift = drift_bound(S_MIX, CTX).combined
    assert r.estimate.error <= 2 * drift / 2 ** 12 + 1e-12
    assert r.distinct_points == 3


def test_semigroup_cap_suggests_monte_carlo():
    with pytest.raises(OrbitCapExceeded) as e:
        canonical_height_semigroup(S_MIX, parse_point("1/2"), 1e-8, cap_points=100, ctx=CTX)
    assert "monte-carlo" in str(e.value)


def test_monte_carlo_mode():
    r_exact = canonical_height_semigroup(S_MIX, parse_point("1/2"), 1e-4, depth=13, ctx=CTX)
    r_mc = canonical_height_semigroup(
        S_MIX, parse_point("1/2"), 1e-8, mode="monte-carlo", seed=11, samples=200, ctx=CTX
    )
    assert r_mc.mc is not None and r_mc.mc.seed == 11
    spread = 3 * r_mc.mc.stderr + r_exact.estimate.error + 1e-8
    assert abs(r_mc.estimate.value - r_exact.estimate.value) <= spread
    # reproducibility
    again = canonical_height_semigroup(
        S_MIX, parse_point("1/2"), 1e-8, mode="monte-carlo", seed=11, samples=200, ctx=CTX
    )
    assert again.estimate.value == r_mc.estimate.value
    with pytest.raises(ValueError):
        canonical_height_semigroup(S_MIX, parse_point("1/2"), 1e-8, mode="monte-carlo", ctx=CTX)


def test_word_measure():
    wm = WordMeasure.of(S_POWERS)
    assert wm.weights == (Fraction(2, 5), Fraction(3, 5))
    assert sum(wm.weights) == 1


def test_kawaguchi_identity_single_map():
    rng = random.Random(13)
    for _ in range(6):
        x = AffinePoint([Fraction(rng.randint(-9, 9), rng.randint(1, 4))])
        hx = canonical_height_map(S_MINK, x, 1e-9, CTX)
        hfx = canonical_height_map(S_MINK, MINK.evaluate(x), 1e-9, CTX)
        assert abs(hfx.value - 2 * hx.value) <= (1 + 2) * 1e-9


def test_kawaguchi_identity_mixed_preperiodic():
    for src in ("0", "1", "-1"):
        x = parse_point(src)
        d_total = sum(S_MIX.degrees)
        lhs = 0.0
        for g in S_MIX.generators:
            lhs += canonical_height_semigroup(S_MIX, g.evaluate(x), 1e-8, ctx=CTX).estimate.value
        rhs = d_total * canonical_height_semigroup(S_MIX, x, 1e-8, ctx=CTX).estimate.value
        assert abs(lhs - rhs) <= (2 + d_total) * 1e-8


def test_semigroup_vs_word_bound():
    drift = drift_bound(S_MIX, CTX).combined
    rng = random.Random(17)
    for _ in range(5):
        x = AffinePoint([Fraction(rng.randint(-3, 3), rng.randint(1, 2))])
        hw = canonical_height_word(S_MIX, [rng.randrange(2) for _ in range(16)], x, 1e-8, CTX)
        hs = canonical_height_semigroup(S_MIX, x, 1e-4, depth=12, ctx=CTX)
        assert abs(hs.estimate.value - hw.value) <= 4 * drift + 2e-4


def test_preperiodic_by_height_examples():
    v = preperiodic_by_height(S_MINK, parse_point("0"), 1e-8, ctx=CTX)
    assert v.status == "preperiodic-confirmed"
    v2 = preperiodic_by_height(S_POWERS, parse_point("2"), 1e-8, ctx=CTX)
    assert v2.status == "nonpreperiodic-certified"
    assert v2.estimate.value == pytest.approx(math.log(2), abs=1e-4)
    v3 = preperiodic_by_height(S_MIX, parse_point("3"), 1e-8, ctx=CTX)
    assert v3.status == "nonpreperiodic-certified"
    v4 = preperiodic_by_height(S_MIX, parse_point("0"), 1e-8, ctx=CTX)
    assert v4.status == "preperiodic-confirmed"


def test_collision_experiment_fixture():
    box = RationalBox(1, 3, 3)
    exp = collision_bound_experiment(S_MINK, box, 5, ctx=CTX)
    colliding = sorted(str(r.point) for r in exp.colliding_rows())
    assert colliding == ["(-1)", "(0)", "(1)"]
    assert exp.max_collision_height() <= 1e-9
    exp2 = collision_bound_experiment(SemigroupSystem([SQ, CUBE]), box, 4, ctx=CTX)
    assert all(r.height.value <= 1e-9 for r in exp2.colliding_rows())


def test_collision_experiment_records_degree_hypothesis():
    exp = collision_bound_experiment(SemigroupSystem([SQ, CUBE]), RationalBox(1, 1, 1), 3, ctx=CTX)
    assert not exp.equal_degrees
    exp2 = collision_bound_experiment(S_MINK, RationalBox(1, 1, 1), 3, ctx=CTX)
    assert exp2.equal_degrees


def test_split_form_eval_examples():
    sub = SplitMultilinearForm(2, 1, ((1,), (2,)), (AffinePoint([1]), AffinePoint([-1])))
    assert split_form_eval(sub, [parse_point("5"), parse_point("5")]) == parse_point("0")
    prod3 = SplitMultilinearForm(3, 1, ((1, 2), (3,)), (AffinePoint([1]), AffinePoint([-1])))
    assert split_form_eval(prod3, [parse_point("2"), parse_point("3"), parse_point("6")]) == parse_point("0")
    times2 = SplitMultilinearForm(1, 1, ((1,),), (AffinePoint([2]),))
    assert split_form_eval(times2, [parse_point("5")]) == parse_point("10")


def test_split_form_validation():
    with pytest.raises(ValueError):
        SplitMultilinearForm(2, 1, ((1,), (1,)), (AffinePoint([1]), AffinePoint([1])))
    with pytest.raises(ValueError):
        SplitMultilinearForm(2, 1, ((1,),), (AffinePoint([1]),))
    with pytest.raises(ValueError):
        SplitMultilinearForm(1, 1, ((1,),), (AffinePoint([0]),))


def test_split_form_zero_search_collision_analogue():
    sub = SplitMultilinearForm(2, 1, ((1,), (2,)), (AffinePoint([1]), AffinePoint([-1])))
    res = split_form_zero_search(
        SemigroupSystem([MINK]), sub, RationalBox(1, 1, 1, exclude_zero_coords=True), 3, ctx=CTX
    )
    assert any(str(h.point) == "(-1)" for h in res.hits)
    assert any(str(h.point) == "(1)" for h in res.hits)


def test_split_form_binomial_example():
    form = SplitMultilinearForm(2, 1, ((1,), (2,)), (AffinePoint([1]), AffinePoint([-2])))
    res = split_form_zero_search(
        S_SQ, form, RationalBox(1, 3, 3, exclude_zero_coords=True), 3, ctx=CTX
    )
    assert [(str(h.point), h.levels) for h in res.hits] == [("(2)", (1, 0))]
    assert all(h.within_bound for h in res.hits)


def test_split_form_empty_box():
    form = SplitMultilinearForm(2, 1, ((1,), (2,)), (AffinePoint([1]), AffinePoint([-1])))
    res = split_form_zero_search(S_SQ, form, RationalBox(1, 0, 1, exclude_zero_coords=True), 2, ctx=CTX)
    assert res.hits == []


def test_split_form_hypothesis_errors():
    two_dim = SemigroupSystem([m("X1^2", "X2^2")])
    form = SplitMultilinearForm(
        2, 2, ((1,), (2,)), (AffinePoint([1, 1]), AffinePoint([-1, -1]))
    )
    with pytest.raises(HypothesisError):
        split_form_zero_search(two_dim, form, RationalBox(2, 1, 1, exclude_zero_coords=True), 2, ctx=CTX)
    with pytest.raises(HypothesisError):
        split_form_zero_search(
            two_dim, form, RationalBox(2, 1, 1, exclude_zero_coords=True), 2,
            mode="multi-sequence", ctx=CTX,
        )


def test_split_form_multi_sequence():
    # degree 3 >= (3*1+2)/2 for the two-sequence hypothesis
    form = SplitMultilinearForm(2, 1, ((1,), (2,)), (AffinePoint([1]), AffinePoint([-1])))
    res = split_form_zero_search(
        SemigroupSystem([CUBE, m("X1^3 - 1")]), form,
        RationalBox(1, 1, 1, exclude_zero_coords=True), 2,
        mode="multi-sequence", ctx=CTX,
    )
    assert any(str(h.point) == "(1)" for h in res.hits)
