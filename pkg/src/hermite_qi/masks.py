"""The one-parameter family of cubic Hermite masks.

A mask triple ``(m_f, m_x, m_y)`` turns hexagon data into one BB-coefficient::

    coeff = m_f . f_stencil + h * m_x . fx_stencil + h * m_y . fy_stencil

There are nine triples: ``alpha`` (vertices), six ``beta`` (one per u-direction,
in :data:`~hermite_qi.mesh.DIRECTIONS` order), ``gamma`` and ``gamma_t``
(barycenters of the lower and upper triangles).  Each entry is affine in the
free parameter ``lam``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .bernstein import blossom
from .mesh import DIRECTIONS, STENCIL_OFFSETS, vertex_position

CORRECTED = "corrected"
AS_PRINTED = "as-printed"
VARIANTS = (CORRECTED, AS_PRINTED)

DEFAULT_LAMBDA = Fraction(1, 2)

MONOMIALS_P2 = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
CHECK_NAMES = {
    (0, 0): "partition_of_unity",
    (1, 0): "moment_x",
    (0, 1): "moment_y",
    (2, 0): "moment_xx",
    (1, 1): "moment_xy",
    (0, 2): "moment_yy",
}


class Affine:
    """``c0 + c1 * lam`` with exact coefficients; only used to write down the tables."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0=0, c1=0):
        self.c0 = Fraction(c0)
        self.c1 = Fraction(c1)

    @staticmethod
    def lift(x) -> "Affine":
        return x if isinstance(x, Affine) else Affine(x)

    def __add__(self, o):
        o = Affine.lift(o)
        return Affine(self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __neg__(self):
        return Affine(-self.c0, -self.c1)

    def __sub__(self, o):
        return self + (-Affine.lift(o))

    def __rsub__(self, o):
        return Affine.lift(o) - self

    def __mul__(self, s):
        s = Fraction(s)
        return Affine(self.c0 * s, self.c1 * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self * (1 / Fraction(s))

    def __eq__(self, o):
        o = Affine.lift(o)
        return self.c0 == o.c0 and self.c1 == o.c1

    def __hash__(self):
        return hash((self.c0, self.c1))

    def at(self, lam) -> Fraction:
        return self.c0 + self.c1 * Fraction(lam)

    def __repr__(self):
        return format_affine(self)


def format_affine(a: Affine, var: str = "l") -> str:
    """Reduced text form such as ``(12*l-5)/6`` or ``1-l``."""
    if a.c1 == 0:
        return str(a.c0)
    den = (a.c0.denominator * a.c1.denominator) // math.gcd(a.c0.denominator, a.c1.denominator)
    n0, n1 = int(a.c0 * den), int(a.c1 * den)
    lin = f"{var}" if n1 == 1 else f"-{var}" if n1 == -1 else f"{n1}*{var}"
    if n0 == 0:
        num = lin
    elif n1 > 0:
        num = f"{lin}{n0:+d}"
    else:
        num = f"{n0}{lin}"
    return num if den == 1 else f"({num})/{den}"


L = Affine(0, 1)
_F = Fraction

# Stencil index order: center, right, upper-right, upper-left, left, lower-left, lower-right.
PRINTED: dict[str, tuple[tuple, tuple, tuple]] = {
    "alpha": (
        (_F(1, 3), 0, L, (12 * L - 5) / 6, _F(-2, 3), -(7 + 12 * L) / 6, 1 - L),
        (_F(-2, 3), 0, (1 - 18 * L) / 36, (5 - 18 * L) / 12, _F(-2, 9), (18 * L - 13) / 12, (18 * L - 17) / 36),
        (1 - 2 * L, 0, _F(-1, 9), (5 - 18 * L) / 18, 1 - 2 * L, (13 - 18 * L) / 18, _F(1, 9)),
    ),
    "beta(1,1)": (
        (_F(-1, 3), 0, 2 * L, (6 * L - 5) / 6, 0, (1 - 6 * L) / 6, 2 * (1 - L)),
        (_F(-8, 9), 0, (1 - 18 * L) / 18, (7 - 18 * L) / 18, 0, (18 * L - 11) / 18, (18 * L - 17) / 18),
        (2 * (1 - 2 * L), 0, _F(-2, 9), (7 - 18 * L) / 18, 0, (11 - 18 * L) / 18, _F(2, 9)),
    ),
    "beta(1,0)": (
        (_F(3, 2) * (1 - 2 * L), 0, 2 * L, (9 * L - 5) / 3, (1 - 6 * L) / 6, 0, 1 - L),
        (2 * (9 * L - 8) / 9, 0, (1 - 18 * L) / 18, (29 - 90 * L) / 36, (18 * L - 1) / 18, 0, (18 * L - 17) / 36),
        ((11 - 18 * L) / 6, 0, _F(-2, 9), 2 * (1 - 3 * L) / 3, (11 - 18 * L) / 18, 0, _F(1, 9)),
    ),
    "beta(0,-1)": (
        ((13 - 18 * L) / 6, 0, L, (12 * L - 5) / 3, -(2 * L + 1) / 2, 1 - L, 0),
        (2 * (9 * L - 7) / 9, 0, (1 - 18 * L) / 36, (5 - 18 * L) / 6, (6 * L - 5) / 6, (18 * L - 17) / 36, 0),
        ((5 - 6 * L) / 6, 0, _F(-1, 9), (5 - 18 * L) / 9, (29 - 54 * L) / 18, _F(1, 9), 0),
    ),
    "beta(-1,-1)": (
        (1, 0, 0, (18 * L - 5) / 6, _F(-4, 3), (13 - 18 * L) / 6, 0),
        (_F(-4, 9), 0, 0, 2 * (2 - 9 * L) / 9, _F(-4, 9), 2 * (9 * L - 7) / 9, 0),
        (0, 0, 0, (1 - 6 * L) / 6, 2 * (1 - 2 * L), (5 - 6 * L) / 6, 0),
    ),
    "beta(-1,0)": (
        ((18 * L - 5) / 6, 0, 0, L, (2 * L - 3) / 2, (7 - 12 * L) / 3, 1 - L),
        (2 * (2 - 9 * L) / 9, 0, 0, (1 - 18 * L) / 36, (1 - 6 * L) / 6, (18 * L - 13) / 6, (18 * L - 17) / 36),
        ((1 - 6 * L) / 6, 0, 0, _F(-1, 9), (25 - 54 * L) / 18, (13 - 18 * L) / 9, _F(1, 9)),
    ),
    "beta(0,1)": (
        (_F(3, 2) * (2 * L - 1), 0, L, 0, (6 * L - 5) / 6, (4 - 9 * L) / 3, 2 * (1 - L)),
        (2 * (1 - 9 * L) / 9, 0, (1 - 18 * L) / 36, 0, (7 - 18 * L) / 18, (90 * L - 61) / 36, (18 * L - 17) / 18),
        ((7 - 18 * L) / 6, 0, _F(-1, 9), 0, (7 - 18 * L) / 18, 2 * (2 - 2 * L) / 3, _F(2, 9)),
    ),
    "gamma": (
        ((2 - 9 * L) / 3, 1 - L, (24 * L - 5) / 6, (6 * L - 5) / 6, 0, 0, 1 - L),
        ((30 * L - 23) / 12, (18 * L - 17) / 36, (17 - 90 * L) / 36, (7 - 18 * L) / 18, 0, 0, (18 * L - 17) / 36),
        ((7 - 12 * L) / 3, _F(1, 9), (1 - 18 * L) / 18, (7 - 18 * L) / 18, 0, 0, _F(1, 9)),
    ),
    "gamma_t": (
        ((9 * L - 7) / 3, L, L, 0, 0, (1 - 6 * L) / 6, (19 - 24 * L) / 6),
        ((7 - 30 * L) / 12, (1 - 18 * L) / 36, (1 - 18 * L) / 36, 0, 0, (18 * L - 11) / 18, (90 * L - 73) / 36),
        ((5 - 12 * L) / 3, _F(-1, 9), _F(-1, 9), 0, 0, (11 - 18 * L) / 18, (17 - 18 * L) / 18),
    ),
}

# Entries whose printed value breaks reproduction of P2 (and C1 smoothness).
# The replacements are the unique values of the solved one-parameter family;
# see hermite_qi.derivation.  Key: (mask, channel, stencil index).
ERRATA = {
    ("alpha", 0, 5): (7 - 12 * L) / 6,  # printed -(7+12l)/6
    ("beta(1,0)", 1, 4): (18 * L - 11) / 18,  # printed (18l-1)/18
    ("beta(0,1)", 2, 5): 2 * (2 - 3 * L) / 3,  # printed 2(2-2l)/3
}

MASK_NAMES: tuple[str, ...] = ("alpha",) + tuple(f"beta({k},{m})" for k, m in DIRECTIONS) + ("gamma", "gamma_t")


def affine_table(variant: str = CORRECTED) -> dict[str, tuple[tuple[Affine, ...], ...]]:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    table = {
        name: tuple(tuple(Affine.lift(e) for e in vec) for vec in triple)
        for name, triple in PRINTED.items()
    }
    if variant == CORRECTED:
        for (name, ch, ell), value in ERRATA.items():
            vecs = [list(v) for v in table[name]]
            vecs[ch][ell] = value
            table[name] = tuple(tuple(v) for v in vecs)
    return table


Triple = tuple[tuple[Fraction, ...], tuple[Fraction, ...], tuple[Fraction, ...]]


@dataclass(frozen=True)
class MaskSet:
    """Exact masks for one value of the free parameter."""

    alpha: Triple
    beta: dict[tuple[int, int], Triple]
    gamma: Triple
    gamma_t: Triple
    lam: Fraction
    variant: str = CORRECTED
    _by_name: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        named = {"alpha": self.alpha, "gamma": self.gamma, "gamma_t": self.gamma_t}
        for (k, m), t in self.beta.items():
            named[f"beta({k},{m})"] = t
        object.__setattr__(self, "_by_name", named)

    def triple(self, name: str) -> Triple:
        return self._by_name[name]

    def triples(self) -> list[tuple[str, Triple]]:
        return [(name, self._by_name[name]) for name in MASK_NAMES]

    def for_coeff(self, kind: str, k: int = 0, m: int = 0) -> Triple:
        if kind == "V":
            return self.alpha
        if kind == "U":
            return self.beta[(k, m)]
        if kind == "C":
            return self.gamma
        if kind == "Ct":
            return self.gamma_t
        raise ValueError(f"unknown coefficient kind {kind!r}")

    def flat(self) -> list[Fraction]:
        """All 189 entries in mask order, channel f/fx/fy, stencil index 0..6."""
        return [e for _, t in self.triples() for vec in t for e in vec]

    @classmethod
    def from_flat(cls, values, lam, variant: str = CORRECTED) -> "MaskSet":
        values = [Fraction(v) for v in values]
        if len(values) != 21 * len(MASK_NAMES):
            raise ValueError("expected 189 mask entries")
        triples = {}
        for n, name in enumerate(MASK_NAMES):
            block = values[21 * n: 21 * (n + 1)]
            triples[name] = (tuple(block[0:7]), tuple(block[7:14]), tuple(block[14:21]))
        beta = {(k, m): triples[f"beta({k},{m})"] for k, m in DIRECTIONS}
        return cls(triples["alpha"], beta, triples["gamma"], triples["gamma_t"], Fraction(lam), variant)


def mask_set(lam=DEFAULT_LAMBDA, variant: str = CORRECTED) -> MaskSet:
    lam = Fraction(lam)
    table = affine_table(variant)
    flat = [e.at(lam) for name in MASK_NAMES for vec in table[name] for e in vec]
    return MaskSet.from_flat(flat, lam, variant)


def polar_arguments(name: str, h=1) -> list:
    """The three points whose blossom gives the BB-coefficient a mask of ``name`` targets,
    for the copy centred at vertex (0, 0)."""
    v0 = vertex_position((0, 0), h)
    if name == "alpha":
        return [v0, v0, v0]
    if name.startswith("beta"):
        k, m = (int(t) for t in name[5:-1].split(","))
        return [v0, v0, vertex_position((k, m), h)]
    far = (0, 1) if name == "gamma_t" else (1, 0)
    return [v0, vertex_position((1, 1), h), vertex_position(far, h)]


def hermite_data(mu: tuple[int, int], h=1):
    """Exact stencil data ``(f, h*fx, h*fy)`` of ``x**mu[0] * y**mu[1]`` around vertex (0, 0)."""
    px, py = mu
    f, fx, fy = [], [], []
    for di, dj in STENCIL_OFFSETS:
        x, y = vertex_position((di, dj), h)
        f.append(Fraction(x) ** px * Fraction(y) ** py)
        fx.append(h * px * Fraction(x) ** (px - 1) * Fraction(y) ** py if px else Fraction(0))
        fy.append(h * py * Fraction(x) ** px * Fraction(y) ** (py - 1) if py else Fraction(0))
    return f, fx, fy


def apply_triple(triple: Triple, data) -> Fraction:
    return sum((a * b for vec, dat in zip(triple, data) for a, b in zip(vec, dat)), Fraction(0))


@dataclass
class CheckResult:
    mask: str
    check: str
    passed: bool
    value: Fraction  # mask applied to the monomial data
    target: Fraction  # exact BB-coefficient of the monomial


@dataclass
class ValidationReport:
    lam: Fraction
    variant: str
    results: list[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def get(self, mask: str, check: str) -> CheckResult:
        for r in self.results:
            if r.mask == mask and r.check == check:
                return r
        raise KeyError((mask, check))

    def to_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "variant": self.variant,
            "ok": self.ok,
            "checks": [
                {"mask": r.mask, "check": r.check, "passed": r.passed,
                 "value": str(r.value), "target": str(r.target)}
                for r in self.results
            ],
        }


def validate(masks: MaskSet) -> ValidationReport:
    """Check every mask triple reproduces the BB-coefficients of 1, x, y, x^2, xy, y^2.

    The checks are exact and done at h = 1; masks are dimensionless so the
    result does not depend on h.  Failures are reported, never raised.
    """
    results = []
    for name, triple in masks.triples():
        args = polar_arguments(name)
        for mu in MONOMIALS_P2:
            value = apply_triple(triple, hermite_data(mu))
            target = blossom(mu, args)
            results.append(CheckResult(name, CHECK_NAMES[mu], value == target, value, target))
    return ValidationReport(masks.lam, masks.variant, results)


def operator_norm_bound(masks: MaskSet) -> Fraction:
    """Largest ``|m_f|_1 + |m_x|_1 + |m_y|_1`` over the nine mask triples."""
    return max(sum(abs(e) for vec in t for e in vec) for _, t in masks.triples())


def to_json_dict(masks: MaskSet) -> dict:
    def triple_dict(t):
        return {ch: [str(e) for e in vec] for ch, vec in zip(("f", "fx", "fy"), t)}

    return {
        "metadata": {"lambda": str(masks.lam), "variant": masks.variant},
        "alpha": triple_dict(masks.alpha),
        "beta": {f"{k},{m}": triple_dict(masks.beta[(k, m)]) for k, m in DIRECTIONS},
        "gamma": triple_dict(masks.gamma),
        "gamma_t": triple_dict(masks.gamma_t),
    }


def from_json_dict(data: dict) -> MaskSet:
    def triple(d):
        return tuple(tuple(Fraction(e) for e in d[ch]) for ch in ("f", "fx", "fy"))

    beta = {}
    for key, val in data["beta"].items():
        k, m = (int(t) for t in key.split(","))
        beta[(k, m)] = triple(val)
    meta = data["metadata"]
    return MaskSet(triple(data["alpha"]), beta, triple(data["gamma"]), triple(data["gamma_t"]),
                   Fraction(meta["lambda"]), meta.get("variant", CORRECTED))


def dumps(masks: MaskSet, report: ValidationReport | None = None) -> str:
    out = to_json_dict(masks)
    if report is not None:
        out["validation"] = report.to_dict()
    return json.dumps(out, indent=2)
