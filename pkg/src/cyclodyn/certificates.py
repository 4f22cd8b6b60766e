"""Certificates that a homogeneous system has no common projective zero.

A certificate of degree e for homogeneous f_1, ..., f_m of degree d is
a matrix (g_ij) of homogeneous polynomials of degree e-d with

    sum_j g_ij * f_j = X_i^e        for every i,

verified symbolically.  From the certificate we derive the explicit
two-sided size constants: for every point z with homogeneous sup size
|z|_v = max(|z_1|_v, ..., |z_m|_v),

    C^eps(v) * |G|_v^-1 * |z|_v^d  <=  |f(z)|_v  <=  D^eps(v) * |f|_v * |z|_v^d

with D = max_i #terms(f_i), C = 1 / (m * max_ij #terms(g_ij)), and
eps(v) = 1 at archimedean places, 0 at finite ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from .cyclotomic import CyclotomicElement
from .heights import RationalPlace, poly_sup_norm, rational_abs
from .intervals import RigorousContext, interval_max, upper
from .polynomials import MultiPoly


@dataclass(frozen=True)
class NoCertificate:
    """Search outcome: no certificate up to e_max (common zero, or cap too
    small)."""

    e_max: int
    reason: str = "no representation found; common zero or e_max too small"


@dataclass(frozen=True)
class Certificate:
    degree: int  # e: each X_i^degree lies in the degree-e graded piece
    matrix: tuple[tuple[MultiPoly, ...], ...]  # g[i][j]

    def max_cofactor_terms(self) -> int:
        return max((g.nterms() for row in self.matrix for g in row), default=0)

    def cofactor_polys(self) -> list[MultiPoly]:
        return [g for row in self.matrix for g in row if g]


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent tuples of the given total degree, deterministic order."""
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        expo = [0] * nvars
        for i in combo:
            expo[i] += 1
        out.append(tuple(expo))
    out.sort(reverse=True)
    return out


def _rref_solve(matrix, rhs_columns):
    """Exact reduced row echelon solve over the cyclotomic field.

    Returns one particular solution per RHS column (free unknowns 0), or
    None entries for inconsistent columns.
    """
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    nrhs = len(rhs_columns)
    rows = [list(matrix[i]) + [col[i] for col in rhs_columns] for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    zero = CyclotomicElement.from_rational(0)
    solutions = []
    for t in range(nrhs):
        consistent = all(not rows[i][ncols + t] for i in range(r, nrows))
        if not consistent:
            solutions.append(None)
            continue
        sol = [zero] * ncols
        for i, c in enumerate(pivots):
            sol[c] = rows[i][ncols + t]
        solutions.append(sol)
    return solutions


def find_certificate(
    components: Sequence[MultiPoly], e_max: int | None = None
) -> Certificate | NoCertificate:
    """Search e = d, d+1, ... for an exact certificate via the Macaulay
    linear system for each target monomial X_i^e."""
    comps = list(components)
    m = len(comps)
    nvars = comps[0].nvars
    if m != nvars:
        raise ValueError("expected a square homogeneous system")
    degrees = {c.total_degree() for c in comps if c}
    if len(degrees) != 1:
        raise ValueError("components must share one degree")
    d = degrees.pop()
    for c in comps:
        if not c.is_homogeneous(d):
            raise ValueError("components must be homogeneous")
    if e_max is None:
        e_max = 2 * d * nvars
    if e_max < d:
        raise ValueError("e_max below the common degree")
    zero = CyclotomicElement.from_rational(0)
    for e in range(d, e_max + 1):
        cof_monos = monomials(nvars, e - d)
        row_monos = monomials(nvars, e)
        row_index = {mono: i for i, mono in enumerate(row_monos)}
        ncols = m * len(cof_monos)
        matrix = [[zero] * ncols for _ in row_monos]
        for j, f in enumerate(comps):
            for mi, mono in enumerate(cof_monos):
                col = j * len(cof_monos) + mi
                for expo, c in f.terms.items():
                    target = tuple(a + b for a, b in zip(expo, mono))
                    matrix[row_index[target]][col] = (
                        matrix[row_index[target]][col] + c
                    )
        rhs_columns = []
        for i in range(m):
            target = tuple(e if t == i else 0 for t in range(nvars))
            col = [zero] * len(row_monos)
            col[row_index[target]] = CyclotomicElement.from_rational(1)
            rhs_columns.append(col)
        solutions = _rref_solve(matrix, rhs_columns)
        if any(sol is None for sol in solutions):
            continue
        rows = []
        for sol in solutions:
            row = []
            for j in range(m):
                terms = {}
                for mi, mono in enumerate(cof_monos):
                    c = sol[j * len(cof_monos) + mi]
                    if c:
                        terms[mono] = c
                row.append(MultiPoly(nvars, terms))
            rows.append(tuple(row))
        cert = Certificate(e, tuple(rows))
        if not verify_certificate(comps, cert):
            raise AssertionError("solver produced an invalid certificate")
        return cert
    return NoCertificate(e_max)


def verify_certificate(components: Sequence[MultiPoly], cert: Certificate) -> bool:
    comps = list(components)
    m = len(comps)
    if len(cert.matrix) != m or any(len(row) != m for row in cert.matrix):
        return False
    nvars = comps[0].nvars
    for i in range(m):
        acc = MultiPoly.zero(nvars)
        for j in range(m):
            acc = acc + cert.matrix[i][j] * comps[j]
        target = MultiPoly(
            nvars, {tuple(cert.degree if t == i else 0 for t in range(nvars)): 1}
        )
        if acc != target:
            return False
    return True


@dataclass(frozen=True)
class EffectiveConstants:
    """Explicit constants of the two-sided bound, plus per-embedding sup
    norms of the system and of the certificate cofactors."""

    lower_c: Fraction  # archimedean loss on the lower bound, <= 1
    upper_d: int  # archimedean gain on the upper bound, >= 1
    f_norms: dict[int, object]  # embedding index -> interval |sigma(f)|
    g_norms: dict[int, object]  # embedding index -> interval |sigma(G)|

    def f_norm_upper(self) -> float:
        return max(upper(x) for x in self.f_norms.values())

    def g_norm_upper(self) -> float:
        return max(upper(x) for x in self.g_norms.values())


def effective_constants(
    components: Sequence[MultiPoly],
    cert: Certificate,
    ctx: RigorousContext | None = None,
    embeddings: Sequence[int] | None = None,
) -> EffectiveConstants:
    comps = list(components)
    m = len(comps)
    if not verify_certificate(comps, cert):
        raise ValueError("certificate does not verify against the system")
    upper_d = max(c.nterms() for c in comps)
    lower_c = Fraction(1, m * max(1, cert.max_cofactor_terms()))
    n = 1
    for poly in list(comps) + cert.cofactor_polys():
        for c in poly.terms.values():
            n = n * c.order // math.gcd(n, c.order)
    from .cyclotomic import units

    ks = list(embeddings) if embeddings is not None else list(units(n))
    ctx = ctx or RigorousContext()
    f_norms = {k: poly_sup_norm(comps, k, ctx) for k in ks}
    gpolys = cert.cofactor_polys()
    g_norms = {k: poly_sup_norm(gpolys, k, ctx) for k in ks}
    return EffectiveConstants(lower_c, upper_d, f_norms, g_norms)


def finite_place_norm(polys: Sequence[MultiPoly], place: RationalPlace) -> Fraction:
    """Exact |.|_p sup norm of rational-coefficient polynomials."""
    if not place.is_finite:
        raise ValueError("use poly_sup_norm for archimedean places")
    best = Fraction(0)
    for poly in polys:
        for c in poly.terms.values():
            if not c.is_rational:
                raise ValueError("finite-place norms require rational coefficients")
            if c:
                best = max(best, rational_abs(c.rational_value(), place))
    return best


# ---------------------------------------------------------------------------
# JSON round-trip for golden-file tests

def _element_to_json(c: CyclotomicElement):
    return {"order": c.order, "coeffs": [str(x) for x in c.coeffs]}


def _element_from_json(obj) -> CyclotomicElement:
    return CyclotomicElement(obj["order"], [Fraction(s) for s in obj["coeffs"]])


def _poly_to_json(p: MultiPoly):
    return {
        "nvars": p.nvars,
        "terms": [
            {"exponents": list(e), "coefficient": _element_to_json(p.terms[e])}
            for e in p.sorted_exponents()
        ],
    }


def _poly_from_json(obj) -> MultiPoly:
    return MultiPoly(
        obj["nvars"],
        {
            tuple(t["exponents"]): _element_from_json(t["coefficient"])
            for t in obj["terms"]
        },
    )


def certificate_to_json(cert: Certificate) -> str:
    payload = {
        "degree": cert.degree,
        "matrix": [[_poly_to_json(g) for g in row] for row in cert.matrix],
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def certificate_from_json(text: str) -> Certificate:
    obj = json.loads(text)
    matrix = tuple(tuple(_poly_from_json(g) for g in row) for row in obj["matrix"])
    return Certificate(obj["degree"], matrix)
