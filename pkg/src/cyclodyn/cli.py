"""Command-line driver: every library operation behind one dispatcher.

Reports are JSON documents with a fixed key layout; identical inputs
(config, flags, seed) produce byte-identical output.  Wall time is
only included with --timing, keeping the default output deterministic.

Exit codes: 0 success, 2 resource cap exceeded, 3 theorem hypothesis
violated, 4 configuration/parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

from .canonical import (
    SplitMultilinearForm,
    canonical_height_map,
    canonical_height_semigroup,
    canonical_height_word,
    collision_bound_experiment,
    drift_bound,
    preperiodic_by_height,
    split_form_zero_search,
)
from .certificates import (
    NoCertificate,
    certificate_to_json,
    effective_constants,
    find_certificate,
)
from .config import ConfigError, SystemConfig, parse_config
from .cyclotomic import CyclotomicElement
from .heights import AffinePoint, HeightEstimate, RationalPlace, house, weil_height
from .intervals import RigorousContext
from .morphisms import is_unitary_monomial_form
from .orbits import (
    HypothesisError,
    OrbitCapExceeded,
    RationalBox,
    SemigroupSystem,
    Word,
    backward_house_bound,
    collision_search,
    growth_check,
    orbit_levels,
    preperiodicity_search,
    relation_house_bound,
    sigma_relation_search,
)
from .parsing import PolyParseError, parse_element, parse_point
from .verify import run_suite

EXIT_OK = 0
EXIT_CAPS = 2
EXIT_HYPOTHESIS = 3
EXIT_PARSE = 4


def _jsonable(value):
    if isinstance(value, HeightEstimate):
        return {"value": value.value, "error": value.error}
    if isinstance(value, Fraction):
        return {"exact": str(value)}
    if isinstance(value, CyclotomicElement):
        return str(value)
    if isinstance(value, AffinePoint):
        return repr(value)
    if isinstance(value, Word):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _report(command, inputs, outputs, bounds=None, caps_hit=None, hypotheses=None, timing=None):
    return {
        "command": command,
        "inputs": _jsonable(inputs),
        "outputs": _jsonable(outputs),
        "bounds_used": _jsonable(bounds or {}),
        "caps_hit": caps_hit or [],
        "hypotheses_checked": hypotheses or [],
        "wall_time_ms": timing,
    }


def _emit(report, fmt):
    if fmt == "json":
        print(json.dumps(report, indent=2))
        return
    out = io.StringIO()
    writer = csv.writer(out)
    outputs = report["outputs"]
    if isinstance(outputs, list) and outputs and isinstance(outputs[0], dict):
        header = list(outputs[0].keys())
        writer.writerow(header)
        for row in outputs:
            writer.writerow([json.dumps(row.get(h)) if isinstance(row.get(h), (dict, list)) else row.get(h) for h in header])
    else:
        writer.writerow(["key", "value"])

        def walk(prefix, value):
            if isinstance(value, dict):
                for k, v in value.items():
                    walk(f"{prefix}.{k}" if prefix else k, v)
            elif isinstance(value, list):
                writer.writerow([prefix, json.dumps(value)])
            else:
                writer.writerow([prefix, value])

        walk("", outputs)
    sys.stdout.write(out.getvalue())


def _system(cfg: SystemConfig, names=None) -> SemigroupSystem:
    if names:
        missing = [n for n in names if n not in cfg.maps]
        if missing:
            raise ConfigError(f"unknown map name(s): {', '.join(missing)}")
        gens = [cfg.maps[n] for n in names]
        return SemigroupSystem(gens, names=names)
    return SemigroupSystem(list(cfg.maps.values()), names=list(cfg.maps))


def _point(cfg: SystemConfig, text: str) -> AffinePoint:
    p = parse_point(text, cfg.order)
    if p.dim != cfg.dim:
        raise ConfigError(f"point has {p.dim} coordinates, config N={cfg.dim}")
    return p


def _word(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) - 1 for t in text.replace(".", " ").replace(",", " ").split()]


def _box(cfg: SystemConfig, args, exclude_zero=False) -> RationalBox:
    return RationalBox(
        cfg.dim,
        args.box_num if args.box_num is not None else cfg.caps["box_num"],
        args.box_den if args.box_den is not None else cfg.caps["box_den"],
        exclude_zero_coords=exclude_zero,
    )


def _estimate_dict(h: HeightEstimate):
    return {"value": h.value, "error": h.error}


# ---------------------------------------------------------------------------
# command handlers: each returns (outputs, bounds, hypotheses)

def cmd_orbit(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    point = _point(cfg, args.point)
    depth = args.depth if args.depth is not None else cfg.caps["depth"]
    levels = orbit_levels(sys_, point, depth, cap=cfg.caps["points"])
    return (
        {
            "levels": [[repr(p) for p in lv] for lv in levels.levels],
            "sizes": [len(lv) for lv in levels.levels],
        },
        {},
        [],
    )


def cmd_height(cfg, args, ctx):
    point = _point(cfg, args.point)
    return {"height": _estimate_dict(weil_height(point, ctx))}, {}, []


def cmd_house(cfg, args, ctx):
    point = _point(cfg, args.point)
    return {"house": _estimate_dict(house(point, ctx))}, {}, []


def cmd_canh(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    point = _point(cfg, args.point)
    tol = args.tol or cfg.tolerance
    if args.word:
        word = _word(args.word)
        h = canonical_height_word(sys_, word, point, tol, ctx)
        src = {"word-cycle": args.word}
    else:
        if sys_.size != 1:
            raise ConfigError("canh needs a single map (use --maps) or --word")
        h = canonical_height_map(sys_, point, tol, ctx)
        src = {"map": sys_.names[0]}
    drift = drift_bound(sys_, ctx)
    return (
        {"canonical_height": _estimate_dict(h), **src},
        {"drift_bound": drift.combined, "tolerance": tol},
        [],
    )


def cmd_canh_semigroup(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    point = _point(cfg, args.point)
    tol = args.tol or cfg.tolerance
    mode = args.mode or "exact-sum"
    res = canonical_height_semigroup(
        sys_,
        point,
        tol,
        mode=mode,
        seed=args.seed if args.seed is not None else cfg.seed,
        samples=args.samples,
        depth=args.depth,
        cap_points=cfg.caps["points"],
        ctx=ctx,
    )
    out = {
        "canonical_height": _estimate_dict(res.estimate),
        "mode": res.mode,
        "depth": res.depth,
    }
    if res.distinct_points is not None:
        out["distinct_points"] = res.distinct_points
    if res.mc is not None:
        out["monte_carlo"] = {
            "samples": res.mc.samples,
            "seed": res.mc.seed,
            "stderr": res.mc.stderr,
        }
    return out, {"tolerance": tol}, []


def cmd_certify(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    outputs = []
    for i, name in enumerate(sys_.names):
        comps = sys_.generators[i].lift().components
        cert = find_certificate(comps, args.e_max)
        if isinstance(cert, NoCertificate):
            outputs.append({"map": name, "certificate": None, "e_max": cert.e_max})
            continue
        consts = effective_constants(comps, cert, ctx)
        outputs.append(
            {
                "map": name,
                "e": cert.degree,
                "residual": "exact-zero",
                "lower_c": {"exact": str(consts.lower_c)},
                "upper_d": consts.upper_d,
                "f_norm_upper": consts.f_norm_upper(),
                "g_norm_upper": consts.g_norm_upper(),
                "certificate": json.loads(certificate_to_json(cert)),
            }
        )
    return outputs, {}, []


def cmd_growth(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    point = _point(cfg, args.point)
    place = (
        RationalPlace.archimedean()
        if args.place in (None, "inf")
        else RationalPlace.finite(int(args.place))
    )
    word = _word(args.word) or [0]
    rep = growth_check(sys_, point, place, word, embedding=args.embedding, ctx=ctx)
    sizes = [
        {"exact": str(s)} if isinstance(s, Fraction) else {"interval": list(s)}
        for s in rep.sizes
    ]
    return (
        {
            "place": str(rep.place),
            "precondition_met": rep.precondition_met,
            "threshold": _jsonable(rep.threshold)
            if isinstance(rep.threshold, Fraction)
            else rep.threshold,
            "sizes": sizes,
            "strictly_increasing": rep.strictly_increasing,
        },
        {},
        ["start size exceeds the certificate threshold"
         if rep.precondition_met else "below threshold: lemma silent"],
    )


def cmd_bounds(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    a = args.A if args.A is not None else 1.0
    out = {"A": a, "backward_house_bound_L": backward_house_bound(sys_, a, ctx)}
    hyp = []
    try:
        rel = relation_house_bound(sys_, a, ctx)
        out["relation_house_bound_M"] = rel.bound
        out["m"] = rel.m
        hyp.append("common degree >= 3: satisfied")
    except HypothesisError as e:
        out["relation_house_bound_M"] = None
        hyp.append(f"common degree >= 3: violated ({e})")
    return out, {}, hyp


def cmd_search_collisions(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    n_max = args.n_max or cfg.caps["depth"]
    if args.point:
        point = _point(cfg, args.point)
        cols = collision_search(sys_, point, n_max, cap=cfg.caps["points"])
        return (
            [
                {"n": c.n, "m": c.m, "witness": repr(c.witness)}
                for c in cols
            ],
            {},
            [],
        )
    box = _box(cfg, args)
    exp = collision_bound_experiment(sys_, box, n_max, cap=cfg.caps["points"], ctx=ctx)
    rows = [
        {
            "point": repr(r.point),
            "height": _estimate_dict(r.height),
            "collisions": [{"n": c.n, "m": c.m, "witness": repr(c.witness)} for c in r.collisions],
        }
        for r in exp.rows
    ]
    summary = {
        "colliding_points": len(exp.colliding_rows()),
        "max_collision_height": exp.max_collision_height(),
        "max_first_level": exp.max_first_level(),
        "box": exp.box,
    }
    hyp = (
        "equal degrees: satisfied"
        if exp.equal_degrees
        else "equal degrees: violated (experiment ran; boundedness statement not asserted)"
    )
    return {"rows": rows, "summary": summary}, {}, [hyp]


def cmd_search_sigma(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    a = args.A if args.A is not None else 1.0
    gammas = [parse_element(g, cfg.order) for g in (args.gamma or "1").split(";")]
    box = _box(cfg, args)
    n_max = args.n_max or 2
    res = sigma_relation_search(
        sys_, a, gammas, box, n_max,
        slice_mode=args.slice_mode or "single",
        cap=cfg.caps["points"], ctx=ctx,
    )
    hits = [
        {
            "point": repr(h.point),
            "n": h.n,
            "level_word": str(h.level_word),
            "combination": h.combination,
            "house": _estimate_dict(h.house_estimate),
            "house_within_bound": h.house_bounded,
            "scaled_point_integral": h.scaled_integral,
        }
        for h in res.hits
    ]
    bounds = {"integrality_scaler_E": res.scaler}
    hyp = []
    if res.bound is not None:
        bounds["relation_house_bound_M"] = res.bound.bound
        bounds["empirical_max_house"] = res.empirical_max_house()
        hyp.append("common degree >= 3: satisfied")
    else:
        hyp.append("common degree >= 3: violated; house bound unavailable")
    return (
        {"hits": hits, "skipped_gammas": res.skipped_gammas, "box": res.box},
        bounds,
        hyp,
    )


def cmd_search_pi(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    point = _point(cfg, args.point)
    k_max = args.k_max if args.k_max is not None else cfg.caps["depth"]
    l_max = args.l_max if args.l_max is not None else cfg.caps["depth"]
    w = preperiodicity_search(sys_, point, k_max, l_max, cap=cfg.caps["points"])
    out = {
        "preperiodic_found": w.found,
        "caps": {"k_max": w.k_max, "l_max": w.l_max},
    }
    if w.found:
        out["path_length"] = w.k
        out["path_word"] = str(w.path_word)
        out["return_length"] = w.l
        out["return_word"] = str(w.return_word)
    if args.tol or args.verdict:
        verdict = preperiodic_by_height(
            sys_, point, args.tol or cfg.tolerance, k_max, l_max, ctx=ctx
        )
        out["height_verdict"] = verdict.status
        out["height_estimate"] = _estimate_dict(verdict.estimate)
    return out, {}, []


def cmd_search_splitform(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    blocks = tuple(
        tuple(int(x) for x in block.split(",")) for block in (args.partition or "1").split("|")
    )
    arity = max(max(b) for b in blocks)
    coeff_points = [
        parse_point(c, cfg.order) for c in (args.coeffs or "1").split(";")
    ]
    form = SplitMultilinearForm(arity, cfg.dim, blocks, tuple(coeff_points))
    box = _box(cfg, args, exclude_zero=True)
    res = split_form_zero_search(
        sys_, form, box, args.n_max or 3,
        mode=args.mode or "single-sequence",
        cap_words=cfg.caps["words"], ctx=ctx,
    )
    hits = [
        {
            "point": repr(h.point),
            "levels": list(h.levels),
            "words": [str(w) for w in h.words],
            "height": _estimate_dict(h.height),
            "within_bound": h.within_bound,
        }
        for h in res.hits
    ]
    return (
        {"hits": hits, "mode": res.mode, "box": res.box},
        {"height_bound": res.height_bound},
        ["degrees exceed the dimension"
         if res.mode == "single-sequence" else "common degree >= (3N+2)/2"],
    )


def cmd_detect_monomial_form(cfg, args, ctx):
    sys_ = _system(cfg, args.maps)
    outputs = []
    for i, name in enumerate(sys_.names):
        form = is_unitary_monomial_form(sys_.generators[i])
        if form is None:
            outputs.append({"map": name, "unitary_monomial_form": None})
        else:
            outputs.append(
                {
                    "map": name,
                    "unitary_monomial_form": {
                        "permutation": [p + 1 for p in form.permutation],
                        "roots": [str(r) for r in form.roots],
                        "exponent": form.exponent,
                    },
                }
            )
    return outputs, {}, []


def cmd_verify_suite(cfg, args, ctx):
    res = run_suite(threads=args.threads or 1)
    ok = res["failed"] == 0
    return res, {}, [] if ok else ["self-check failures present"]


COMMANDS = {
    "orbit": cmd_orbit,
    "height": cmd_height,
    "house": cmd_house,
    "canh": cmd_canh,
    "canh-semigroup": cmd_canh_semigroup,
    "certify": cmd_certify,
    "growth": cmd_growth,
    "bounds": cmd_bounds,
    "search-collisions": cmd_search_collisions,
    "search-sigma": cmd_search_sigma,
    "search-pi": cmd_search_pi,
    "search-splitform": cmd_search_splitform,
    "detect-monomial-form": cmd_detect_monomial_form,
    "verify-suite": cmd_verify_suite,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cyclodyn",
        description="semigroup dynamics over cyclotomic fields: exact heights, "
        "certificates, orbit searches",
    )
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="path to a JSON system configuration")
    ap.add_argument("--config-json", help="inline JSON configuration")
    ap.add_argument("--point", help="comma-separated coordinates")
    ap.add_argument("--maps", help="comma-separated map names (default: all)", type=lambda s: s.split(","))
    ap.add_argument("--word", help="generator indices like 1.2.1")
    ap.add_argument("--place", help="finite prime p, or 'inf'")
    ap.add_argument("--embedding", type=int, default=1)
    ap.add_argument("--depth", type=int)
    ap.add_argument("--n-max", dest="n_max", type=int)
    ap.add_argument("--k-max", dest="k_max", type=int)
    ap.add_argument("--l-max", dest="l_max", type=int)
    ap.add_argument("--e-max", dest="e_max", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--precision", type=int)
    ap.add_argument("--A", type=float)
    ap.add_argument("--gamma", help="semicolon-separated gamma elements")
    ap.add_argument("--slice", dest="slice_mode", choices=["single", "uniform"])
    ap.add_argument("--mode", help="canh-semigroup / splitform mode")
    ap.add_argument("--partition", help="split form blocks like '1,2|3'")
    ap.add_argument("--coeffs", help="split form coefficients like '1;-2'")
    ap.add_argument("--box-num", dest="box_num", type=int)
    ap.add_argument("--box-den", dest="box_den", type=int)
    ap.add_argument("--coeff-bound", dest="coeff_bound", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--cap-words", dest="cap_words", type=int)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    ap.add_argument("--timing", action="store_true")
    ap.add_argument("--verdict", action="store_true",
                    help="search-pi: add the height-based verdict")
    return ap


_DEFAULT_CONFIG = """{"n": 1, "N": 1, "maps": [{"name": "f", "components": ["X1^2 - 1"]}]}"""


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.monotonic()
    try:
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = parse_config(args.config_json or _DEFAULT_CONFIG)
        if args.precision:
            cfg.precision = args.precision
        if args.cap_words:
            cfg.caps["words"] = args.cap_words
        ctx = RigorousContext(cfg.precision)
        handler = COMMANDS[args.command]
        outputs, bounds, hypotheses = handler(cfg, args, ctx)
    except (ConfigError, PolyParseError) as e:
        print(json.dumps({"error": str(e), "kind": "parse"}, indent=2))
        return EXIT_PARSE
    except HypothesisError as e:
        print(json.dumps({"error": str(e), "kind": "hypothesis"}, indent=2))
        return EXIT_HYPOTHESIS
    except OrbitCapExceeded as e:
        print(json.dumps({"error": str(e), "kind": "cap"}, indent=2))
        return EXIT_CAPS
    timing = round((time.monotonic() - start) * 1000.0, 3) if args.timing else None
    report = _report(args.command, _inputs_echo(args), outputs, bounds, [], hypotheses, timing)
    _emit(report, args.format)
    if args.command == "verify-suite" and outputs.get("failed"):
        return 1
    return EXIT_OK


def _inputs_echo(args) -> dict:
    # threads and timing are execution details: reports must be byte-identical
    # across worker counts
    keep = (
        "command point maps word place depth n_max k_max l_max e_max tol "
        "A gamma mode partition coeffs box_num box_den seed samples"
    ).split()
    return {k: getattr(args, k, None) for k in keep if getattr(args, k, None) is not None}


if __name__ == "__main__":
    sys.exit(main())
