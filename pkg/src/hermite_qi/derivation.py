"""Exact reconstruction of the mask family from first principles.

The 189 unknowns are the mask entries, indexed as
``21 * mask + 7 * channel + stencil_index`` with masks in
:data:`~hermite_qi.masks.MASK_NAMES` order and channels ``f, fx, fy``.
Three row families constrain them:

* C1 rows: the nine coefficient identities, expanded over every Hermite data
  functional they touch (each coefficient uses the stencil of its own anchor);
* exactness rows: each of the 16 coefficients of the two triangles at the
  origin reproduces the BB-coefficient of every monomial of degree <= 2;
* superconvergence rows: the error of every cubic monomial vanishes at the
  three edge midpoints of the lower triangle at the origin.

Everything is rational; there is no floating point in this module.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from . import bernstein as bb
from .linform import LinearForm
from .masks import AS_PRINTED, MASK_NAMES, MONOMIALS_P2, affine_table, format_affine, Affine
from .mesh import CoeffId, Lower, Upper, hexagon_stencil, patch_coeff_ids, patch_points, vertex_position
from .quasi_interp import c1_identities, coeff_anchor, format_identity, mask_name

N_UNKNOWNS = 21 * len(MASK_NAMES)
CHANNELS = ("f", "fx", "fy")
_SUBSCRIPT = {"f": "0,0", "fx": "1,0", "fy": "0,1"}

CUBIC_MONOMIALS = ((3, 0), (2, 1), (1, 2), (0, 3))
# Midpoints of the lower triangle at the origin, as barycentric coordinates.
MIDPOINTS = {
    "e(0,0;1,1)": (Fraction(1, 2), Fraction(1, 2), Fraction(0)),
    "e(0,0;0,1)": (Fraction(1, 2), Fraction(0), Fraction(1, 2)),
    "e(1,0;0,1)": (Fraction(0), Fraction(1, 2), Fraction(1, 2)),
}

# The five free coordinates of the C1 + exactness family, and the parameter
# left after superconvergence.
NAMED_FREE_PARAMS = ("alpha[f,2]", "alpha[fx,2]", "alpha[fy,2]", "alpha[f,3]", "alpha[fx,3]")
LAMBDA_PARAM = "alpha[f,2]"


def unknown_index(mask: str, channel: int, ell: int) -> int:
    return 21 * MASK_NAMES.index(mask) + 7 * channel + ell


def unknown_name(idx: int) -> str:
    n, rest = divmod(idx, 21)
    ch, ell = divmod(rest, 7)
    return f"{MASK_NAMES[n]}[{CHANNELS[ch]},{ell}]"


def subscript_name(idx: int) -> str:
    """Subscript-style name such as ``alpha_{0,0,2}``."""
    n, rest = divmod(idx, 21)
    ch, ell = divmod(rest, 7)
    name = MASK_NAMES[n]
    sub = f"{_SUBSCRIPT[CHANNELS[ch]]},{ell}"
    if name.startswith("beta"):
        return f"beta^{name[4:]}_{{{sub}}}"
    return f"{name}_{{{sub}}}"


UNKNOWN_NAMES = tuple(unknown_name(i) for i in range(N_UNKNOWNS))


@dataclass(frozen=True)
class Row:
    coeffs: dict[int, Fraction]
    rhs: Fraction
    tag: str

    def residual(self, x) -> Fraction:
        return sum((c * x[k] for k, c in self.coeffs.items()), Fraction(0)) - self.rhs


@dataclass
class LinearSystem:
    rows: list[Row] = field(default_factory=list)

    def __add__(self, other: "LinearSystem") -> "LinearSystem":
        return LinearSystem(self.rows + other.rows)

    def __len__(self):
        return len(self.rows)


# --- row builders -------------------------------------------------------------

def _mask_form(cid: CoeffId, datum) -> LinearForm:
    """``cid``'s coefficient as a linear form in the unknowns, given ``datum(vertex, channel)``."""
    name = mask_name(cid)
    terms = {}
    for ell, v in enumerate(hexagon_stencil(coeff_anchor(cid))):
        for ch in range(3):
            val = datum(v, ch)
            if val:
                terms[unknown_index(name, ch, ell)] = val
    return LinearForm(terms)


def build_c1_rows() -> LinearSystem:
    """One homogeneous row per (identity, data functional) with a nonzero coefficient.

    A data functional is a pair ``(vertex, channel)``; each coefficient id in an
    identity contributes its mask entries at the stencil slots that land on
    that vertex.
    """
    rows = []
    for n, ident in enumerate(c1_identities()):
        per_functional: dict[tuple, dict[int, Fraction]] = {}
        for cid, sign in ident.terms.items():
            name = mask_name(cid)
            for ell, v in enumerate(hexagon_stencil(coeff_anchor(cid))):
                for ch in range(3):
                    row = per_functional.setdefault((tuple(v), ch), {})
                    k = unknown_index(name, ch, ell)
                    row[k] = row.get(k, 0) + sign
        for (v, ch), coeffs in sorted(per_functional.items()):
            coeffs = {k: Fraction(c) for k, c in coeffs.items() if c}
            if coeffs:
                rows.append(Row(coeffs, Fraction(0), f"C1[{n}] {CHANNELS[ch]}{v}"))
    return LinearSystem(rows)


def data_functional_vertices() -> set[tuple[int, int]]:
    """Vertices whose data enter the C1 identities (derived, not hard-coded)."""
    out = set()
    for ident in c1_identities():
        for cid in ident.terms:
            out.update(tuple(v) for v in hexagon_stencil(coeff_anchor(cid)))
    return out


def monomial_datum(mu, h):
    """``datum(vertex, channel)`` for ``x**mu[0] y**mu[1]``, derivatives scaled by ``h``."""
    px, py = mu

    def datum(v, ch):
        x, y = vertex_position(v, h)
        if ch == 0:
            return x ** px * y ** py
        if ch == 1:
            return h * px * x ** (px - 1) * y ** py if px else 0
        return h * py * x ** px * y ** (py - 1) if py else 0

    return datum


def build_exactness_rows(h=Fraction(1)) -> LinearSystem:
    """Rows forcing every coefficient of the two origin triangles to match the
    BB-coefficients of each monomial of degree <= 2 (16 coefficients x 6 monomials)."""
    h = Fraction(h)
    rows = []
    for mu in MONOMIALS_P2:
        targets: dict[CoeffId, Fraction] = {}
        for patch in (Lower(0, 0), Upper(0, 0)):
            bez = bb.monomial_to_bb(mu, patch_points(patch, h))
            for cid, val in zip(patch_coeff_ids(patch), bez.as_list()):
                if targets.setdefault(cid, val) != val:
                    raise AssertionError(f"inconsistent BB-coefficient for {cid!r}")
        datum = monomial_datum(mu, h)
        for cid in sorted(targets):
            form = _mask_form(cid, datum)
            rows.append(Row(form.terms, targets[cid], f"exact m{mu} {cid!r}"))
    return LinearSystem(rows)


def quasi_interpolant_forms(patch, mu, h) -> list[LinearForm]:
    datum = monomial_datum(mu, h)
    return [_mask_form(cid, datum) for cid in patch_coeff_ids(patch)]


def error_form(mu, patch, tau, h=Fraction(1)) -> LinearForm:
    """``m_mu(q) - Q[m_mu](q)`` at barycentric ``tau`` of ``patch``, affine in the unknowns."""
    h = Fraction(h)
    bez = bb.BezierPatch.from_list(3, quasi_interpolant_forms(patch, mu, h))
    pts = patch_points(patch, h)
    q = tuple(sum(tau[r] * pts[r][c] for r in range(3)) for c in range(2))
    return (q[0] ** mu[0] * q[1] ** mu[1]) - bb.de_casteljau(bez, tau)


def build_superconvergence_rows(h=Fraction(1)) -> LinearSystem:
    """Zero error for each cubic monomial at each midpoint of the lower origin triangle (12 rows)."""
    rows = []
    for mid, tau in MIDPOINTS.items():
        for mu in CUBIC_MONOMIALS:
            form = error_form(mu, Lower(0, 0), tau, h)
            rows.append(Row(form.terms, -form.const, f"superconv m{mu} {mid}"))
    return LinearSystem(rows)


# --- solver ---------------------------------------------------------------------

class InfeasibleSystem(ValueError):
    def __init__(self, tag: str):
        super().__init__(f"inconsistent linear system; violated row: {tag}")
        self.tag = tag


@dataclass
class SolutionFamily:
    particular: list[Fraction]
    basis: list[list[Fraction]]
    free_params: list[str]
    rank: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def point(self, params) -> list[Fraction]:
        """Member with the given values of the free parameters."""
        x = list(self.particular)
        for t, vec in zip(params, self.basis, strict=True):
            t = Fraction(t)
            x = [a + t * b for a, b in zip(x, vec)]
        return x

    def contains(self, x) -> bool:
        """Whether ``x`` lies in the affine family (free coordinates pin the member)."""
        idx = [UNKNOWN_NAMES.index(n) for n in self.free_params]
        return list(x) == self.point([x[i] for i in idx])


def _integer_row(coeffs: dict[int, Fraction], rhs: Fraction) -> dict[int, int]:
    """Scale a rational row to a primitive integer row; the rhs is stored at key -1."""
    row = dict(coeffs)
    if rhs:
        row[-1] = rhs
    row = {k: Fraction(v) for k, v in row.items() if v}
    if not row:
        return {}
    den = lcm(*(v.denominator for v in row.values()))
    ints = {k: int(v * den) for k, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    return {k: v // g for k, v in ints.items()}


def solve(system: LinearSystem, prefer_free=()) -> SolutionFamily:
    """Affine solution set of ``system`` by fraction-free Gauss-Jordan elimination.

    Columns named in ``prefer_free`` are eliminated last, so they become the
    free parameters whenever the system allows it.  Rows are integer vectors
    throughout; each combination step is divided by its content.
    """
    prefer = [UNKNOWN_NAMES.index(n) for n in prefer_free]
    order = [c for c in range(N_UNKNOWNS) if c not in prefer] + prefer
    rank_of = {c: r for r, c in enumerate(order)}

    pivots: dict[int, dict[int, int]] = {}  # pivot column -> integer row
    for row in system.rows:
        r = _integer_row(row.coeffs, row.rhs)
        # reduce against existing pivots
        for pc, prow in pivots.items():
            if pc in r:
                r = _combine(r, prow, pc)
        cols = [c for c in r if c >= 0]
        if not cols:
            if r.get(-1):
                raise InfeasibleSystem(row.tag)
            continue
        pc = min(cols, key=rank_of.__getitem__)
        # eliminate the new pivot from older rows (Gauss-Jordan)
        for oc in list(pivots):
            if pc in pivots[oc]:
                pivots[oc] = _combine(pivots[oc], r, pc)
        pivots[pc] = r

    free = [c for c in order if c not in pivots]
    free.sort(key=rank_of.__getitem__)
    particular = [Fraction(0)] * N_UNKNOWNS
    basis = []
    for pc, prow in pivots.items():
        particular[pc] = Fraction(prow.get(-1, 0), prow[pc])
    for fc in free:
        vec = [Fraction(0)] * N_UNKNOWNS
        vec[fc] = Fraction(1)
        for pc, prow in pivots.items():
            if fc in prow:
                vec[pc] = Fraction(-prow[fc], prow[pc])
        basis.append(vec)
    return SolutionFamily(particular, basis, [UNKNOWN_NAMES[c] for c in free], len(pivots))


def _combine(r: dict[int, int], p: dict[int, int], col: int) -> dict[int, int]:
    a, b = p[col], r[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {}
    for k in set(r) | set(p):
        v = a * r.get(k, 0) - b * p.get(k, 0)
        if v:
            out[k] = v
    g = 0
    for v in out.values():
        g = gcd(g, v)
    if g > 1:
        out = {k: v // g for k, v in out.items()}
    return out


def rank(system: LinearSystem) -> int:
    return solve(system).rank


# --- stages and comparison ---------------------------------------------------------

def stage1_system(h=Fraction(1)) -> LinearSystem:
    return build_c1_rows() + build_exactness_rows(h)


def stage2_system(h=Fraction(1)) -> LinearSystem:
    return stage1_system(h) + build_superconvergence_rows(h)


def family_affine(family: SolutionFamily) -> list[Affine]:
    """A one-parameter family as affine functions of ``lam = alpha[f,2]``."""
    if family.dimension != 1:
        raise ValueError("family must be one-dimensional")
    lam_idx = UNKNOWN_NAMES.index(LAMBDA_PARAM)
    vec = family.basis[0]
    if vec[lam_idx] == 0:
        raise ValueError("alpha[f,2] does not parameterise the family")
    slope = [b / vec[lam_idx] for b in vec]
    base = [p - family.particular[lam_idx] * s for p, s in zip(family.particular, slope)]
    return [Affine(b, s) for b, s in zip(base, slope)]


@dataclass
class Mismatch:
    mask: str
    channel: str
    index: int
    printed: str
    derived: str


def compare_with_published(family: SolutionFamily, published=None) -> list[Mismatch]:
    """Entries where the one-parameter ``family`` differs from the published tables.

    ``published`` defaults to the as-printed tables; pass any table with the same
    layout (e.g. the family's own affine form) to compare against something else.
    """
    derived = family_affine(family)
    table = published if published is not None else affine_table(AS_PRINTED)
    out = []
    for n, name in enumerate(MASK_NAMES):
        for ch in range(3):
            for ell in range(7):
                d = derived[21 * n + 7 * ch + ell]
                p = Affine.lift(table[name][ch][ell])
                if d != p:
                    out.append(Mismatch(name, CHANNELS[ch], ell, format_affine(p), format_affine(d)))
    return out


def table_from_family(family: SolutionFamily) -> dict:
    derived = family_affine(family)
    return {
        name: tuple(tuple(derived[21 * n + 7 * ch: 21 * n + 7 * ch + 7]) for ch in range(3))
        for n, name in enumerate(MASK_NAMES)
    }


def free_param_projection_rank(family: SolutionFamily, names) -> int:
    """Rank of the family's basis restricted to the coordinates ``names``."""
    idx = [UNKNOWN_NAMES.index(n) for n in names]
    sub = LinearSystem([Row({k: vec[i] for k, i in enumerate(idx) if vec[i]}, Fraction(0), "proj")
                        for vec in family.basis])
    return solve(sub).rank


LAMBDA_PROBES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(-2, 3))


def derive_report(superconvergence: bool = True, compare: bool = True) -> dict:
    """Deterministic summary of the derivation (JSON-serialisable)."""
    s1 = stage1_system()
    fam1 = solve(s1, prefer_free=NAMED_FREE_PARAMS)
    report = {
        "rows_stage1": {"c1": len(build_c1_rows()), "exactness": len(build_exactness_rows())},
        "rank_stage1": fam1.rank,
        "dimension_stage1": fam1.dimension,
        "free_params": fam1.free_params,
        "c1_identities": [format_identity(f) for f in c1_identities()],
    }
    if superconvergence or compare:
        sc = build_superconvergence_rows()
        fam2 = solve(s1 + sc, prefer_free=(LAMBDA_PARAM,))
        first_mid = LinearSystem([r for r in sc.rows if "e(0,0;1,1)" in r.tag])
        fam_first = solve(s1 + first_mid, prefer_free=(LAMBDA_PARAM,))
        report.update({
            "rows_superconvergence": len(sc),
            "rank_stage2": fam2.rank,
            "dimension_stage2": fam2.dimension,
            "free_params_stage2": fam2.free_params,
            "extra_midpoints_add_rank": fam_first.rank != fam2.rank,
        })
        if compare:
            mism = compare_with_published(fam2)
            report["mismatches"] = [m.__dict__ for m in mism]
            probes = []
            for lam in LAMBDA_PROBES:
                x = fam2.point([lam])
                probes.append({
                    "lambda": str(lam),
                    "max_row_residual": str(max(abs(r.residual(x)) for r in (s1 + sc).rows)),
                })
            report["lambda_probes"] = probes
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
