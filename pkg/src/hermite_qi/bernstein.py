"""Bernstein-Bezier calculus on a single triangle.

Everything here only uses ``+``, ``-`` and ``*`` on coefficients, so patches may
carry floats, :class:`~fractions.Fraction` values, or any other object that
supports linear arithmetic (the derivation engine feeds in symbolic linear
forms).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

MultiIndex = tuple[int, int, int]


def multi_indices(d: int) -> list[MultiIndex]:
    """All multi-indices of length ``d`` in the order (d,0,0), (d-1,1,0), (d-1,0,1), ..."""
    return [(a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a, -1, -1)]


@dataclass(frozen=True)
class BezierPatch:
    degree: int
    coeffs: Mapping[MultiIndex, object]

    def __post_init__(self):
        if set(self.coeffs) != set(multi_indices(self.degree)):
            raise ValueError(
                f"degree-{self.degree} patch needs exactly "
                f"{(self.degree + 1) * (self.degree + 2) // 2} coefficients"
            )

    @classmethod
    def from_list(cls, degree: int, values) -> "BezierPatch":
        values = list(values)
        return cls(degree, dict(zip(multi_indices(degree), values, strict=True)))

    def as_list(self) -> list:
        return [self.coeffs[a] for a in multi_indices(self.degree)]

    def __getitem__(self, alpha: MultiIndex):
        return self.coeffs[alpha]


def bernstein_value(alpha: MultiIndex, d: int, tau):
    if sum(alpha) != d or min(alpha) < 0:
        raise ValueError(f"multi-index {alpha} does not have length {d}")
    a1, a2, a3 = alpha
    mult = math.factorial(d) // (math.factorial(a1) * math.factorial(a2) * math.factorial(a3))
    return mult * tau[0] ** a1 * tau[1] ** a2 * tau[2] ** a3


def de_casteljau(patch: BezierPatch, tau):
    """Evaluate ``patch`` at barycentric ``tau`` by repeated convex combination."""
    t1, t2, t3 = tau
    level = dict(patch.coeffs)
    for r in range(patch.degree - 1, -1, -1):
        level = {
            (a, b, c): t1 * level[(a + 1, b, c)] + t2 * level[(a, b + 1, c)] + t3 * level[(a, b, c + 1)]
            for a, b, c in multi_indices(r)
        }
    return level[(0, 0, 0)]


def direct_sum(patch: BezierPatch, tau):
    """Evaluate ``patch`` as the explicit sum of coefficients times Bernstein basis values."""
    terms = [patch.coeffs[a] * bernstein_value(a, patch.degree, tau) for a in multi_indices(patch.degree)]
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def bary_direction(vec, vertices):
    """Barycentric direction ``a`` (summing to 0) of Cartesian vector ``vec``."""
    (x1, y1), (x2, y2), (x3, y3) = vertices
    det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
    a2 = (vec[0] * (y3 - y1) - (x3 - x1) * vec[1]) / det
    a3 = ((x2 - x1) * vec[1] - vec[0] * (y2 - y1)) / det
    return (-a2 - a3, a2, a3)


def directional_derivative_patch(patch: BezierPatch, a) -> BezierPatch:
    """Degree d-1 patch of the derivative along barycentric direction ``a``."""
    d = patch.degree
    if d < 1:
        raise ValueError("cannot differentiate a degree-0 patch")
    a1, a2, a3 = a
    b = patch.coeffs
    out = {}
    for i, j, k in multi_indices(d - 1):
        out[(i, j, k)] = d * (a1 * b[(i + 1, j, k)] + a2 * b[(i, j + 1, k)] + a3 * b[(i, j, k + 1)])
    return BezierPatch(d - 1, out)


def domain_points(vertices, d: int):
    """Domain points ``(a1 v1 + a2 v2 + a3 v3) / d`` in multi-index order."""
    return [
        tuple(_div(sum(a[r] * vertices[r][c] for r in range(3)), d) for c in range(2))
        for a in multi_indices(d)
    ]


def _div(x, n: int):
    # keep integer input exact
    return Fraction(x, n) if isinstance(x, int) else x / n


def blossom(mu: tuple[int, int], args):
    """Polar form of ``x**mu[0] * y**mu[1]`` (as a degree ``len(args)`` polynomial) at ``args``.

    The average, over all placements of the ``x`` and ``y`` factors among the
    arguments, of the product of the selected coordinates.
    """
    px, py = mu
    d = len(args)
    if px < 0 or py < 0 or px + py > d:
        raise ValueError(f"monomial exponent {mu} not of degree <= {d}")
    placements = set(itertools.permutations("x" * px + "y" * py + "1" * (d - px - py)))
    total = 0
    for lab in sorted(placements):
        term = 1
        for which, pt in zip(lab, args):
            if which == "x":
                term = term * pt[0]
            elif which == "y":
                term = term * pt[1]
        total = total + term
    return _div(total, len(placements))


def monomial_to_bb(mu: tuple[int, int], vertices, d: int = 3) -> BezierPatch:
    """Exact BB coefficients of ``x**mu[0] * y**mu[1]`` on the triangle ``vertices``.

    Coefficient ``b_alpha`` is the blossom at ``alpha[r]`` copies of vertex ``r``.
    """
    return BezierPatch(d, {
        alpha: blossom(mu, [vertices[r] for r in range(3) for _ in range(alpha[r])])
        for alpha in multi_indices(d)
    })


def reorient(patch: BezierPatch, perm) -> BezierPatch:
    """Re-express ``patch`` over the vertex order ``[w[perm[0]], w[perm[1]], w[perm[2]]]``."""
    out = {}
    for alpha in multi_indices(patch.degree):
        old = [0, 0, 0]
        for r in range(3):
            old[perm[r]] = alpha[r]
        out[alpha] = patch.coeffs[tuple(old)]
    return BezierPatch(patch.degree, out)


def c1_join_residuals(left: BezierPatch, right: BezierPatch, tau_opp) -> list:
    """Signed residuals of the C0 and C1 join conditions across a shared edge.

    ``left`` is over ``[v1, v2, v3]`` and ``right`` over ``[v4, v3, v2]``, so the
    shared edge is ``v2 v3``.  ``tau_opp`` are the barycentric coordinates of
    ``v4`` w.r.t. the left triangle.  Returns the ``d+1`` value residuals
    ``bt[0,j,k] - b[0,k,j]`` followed by the ``d`` first-derivative residuals
    ``bt[1,j,k] - (t1 b[1,k,j] + t2 b[0,k+1,j] + t3 b[0,k,j+1])``.
    """
    d = left.degree
    if right.degree != d:
        raise ValueError("patches must have the same degree")
    b, bt = left.coeffs, right.coeffs
    t1, t2, t3 = tau_opp
    res = [bt[(0, j, d - j)] - b[(0, d - j, j)] for j in range(d + 1)]
    for j in range(d):
        k = d - 1 - j
        res.append(bt[(1, j, k)] - (t1 * b[(1, k, j)] + t2 * b[(0, k + 1, j)] + t3 * b[(0, k, j + 1)]))
    return res
