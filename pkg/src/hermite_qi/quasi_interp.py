"""Assembly and evaluation of the C1 cubic Hermite quasi-interpolant.

Each shared BB-coefficient is a mask applied to Hermite data on the hexagon
around its anchor vertex (derivative data scaled by ``h``).  Coefficients are
stored once per :class:`~hermite_qi.mesh.CoeffId`, so neighbouring patches
agree on their common edge by construction.

Two assembly routes exist: :func:`assemble` works on any scalar type (exact
:class:`~fractions.Fraction` when ``h`` is rational, float otherwise) and
returns a dict-backed :class:`Spline`; :class:`GridSpline` is the vectorised
float route used for large benchmark scans.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, NamedTuple

import numpy as np

from . import bernstein as bb
from .linform import LinearForm
from .masks import MASK_NAMES, MaskSet
from .mesh import (
    LOWER, STENCIL_OFFSETS, UPPER, CoeffId, Lower, PatchId, Upper, VertexId,
    barycentric, barycentric_wrt, hexagon_stencil, interior_edges, locate, patch_coeff_ids, patch_points, patch_vertices,
    shared_edge, vertex_position,
)


class HermiteSample(NamedTuple):
    f: object
    fx: object
    fy: object


HermiteSource = Callable[[VertexId], HermiteSample]


class OutOfRegionError(ValueError):
    pass


def rect_region(i0: int, i1: int, j0: int, j1: int) -> frozenset[PatchId]:
    """Lower and upper patches of all cells ``i0 <= i <= i1``, ``j0 <= j <= j1``."""
    return frozenset(
        PatchId(kind, i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1) for kind in (LOWER, UPPER)
    )


def region_covering(xmin, xmax, ymin, ymax, h) -> frozenset[PatchId]:
    """Patches whose closed triangle meets the box ``[xmin, xmax] x [ymin, ymax]``."""
    n_lo = math.floor((xmin + ymin) / (2 * h)) - 1
    n_hi = math.ceil((xmax + ymax) / (2 * h)) + 1
    m_lo = math.floor((xmin - ymax) / (2 * h)) - 1
    m_hi = math.ceil((xmax - ymin) / (2 * h)) + 1
    out = set()
    for p in rect_region(n_lo, n_hi, m_lo, m_hi):
        if _triangle_meets_box(patch_points(p, h), xmin, xmax, ymin, ymax):
            out.add(p)
    return frozenset(out)


def _triangle_meets_box(tri, xmin, xmax, ymin, ymax) -> bool:
    # separating axis test: box axes, then the three triangle edge normals
    xs = [q[0] for q in tri]
    ys = [q[1] for q in tri]
    if max(xs) < xmin or min(xs) > xmax or max(ys) < ymin or min(ys) > ymax:
        return False
    corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
    for r in range(3):
        a, b, c = tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]
        nx, ny = b[1] - a[1], a[0] - b[0]
        side = nx * (c[0] - a[0]) + ny * (c[1] - a[1])
        if all((nx * (q[0] - a[0]) + ny * (q[1] - a[1])) * side < 0 for q in corners):
            return False
    return True


def coeff_anchor(cid: CoeffId) -> VertexId:
    return VertexId(cid.i, cid.j)


def coeff_mask(masks: MaskSet, cid: CoeffId):
    return masks.for_coeff(cid.kind, cid.k, cid.m)


def mask_name(cid: CoeffId) -> str:
    if cid.kind == "V":
        return "alpha"
    if cid.kind == "U":
        return f"beta({cid.k},{cid.m})"
    return "gamma" if cid.kind == "C" else "gamma_t"


def shift(cid: CoeffId, di: int, dj: int) -> CoeffId:
    return cid._replace(i=cid.i + di, j=cid.j + dj)


def _is_exact(h) -> bool:
    return isinstance(h, Rational)


@dataclass(frozen=True)
class Spline:
    h: object
    coeffs: dict[CoeffId, object]
    region: frozenset[PatchId]

    def patch(self, patch: PatchId) -> bb.BezierPatch:
        if patch not in self.region:
            raise OutOfRegionError(f"{patch!r} is outside the spline region")
        return bb.BezierPatch.from_list(3, [self.coeffs[c] for c in patch_coeff_ids(patch)])

    def _locate(self, p) -> PatchId:
        patch = locate(p, self.h)
        if patch not in self.region:
            raise OutOfRegionError(f"point {p!r} lies in {patch!r}, outside the spline region")
        return patch

    def evaluate(self, p, patch: PatchId | None = None):
        """Value at ``p``; ``patch`` overrides point location (for edge checks)."""
        patch = patch or self._locate(p)
        tau = barycentric(p, patch, self.h)
        return bb.de_casteljau(self.patch(patch), tau)

    def gradient(self, p, patch: PatchId | None = None):
        patch = patch or self._locate(p)
        pts = patch_points(patch, self.h)
        bez = self.patch(patch)
        tau = barycentric(p, patch, self.h)
        one, zero = (1, 0) if _is_exact(self.h) else (1.0, 0.0)
        dx = bb.de_casteljau(bb.directional_derivative_patch(bez, bb.bary_direction((one, zero), pts)), tau)
        dy = bb.de_casteljau(bb.directional_derivative_patch(bez, bb.bary_direction((zero, one), pts)), tau)
        return dx, dy


def needed_coeffs(region: Iterable[PatchId]) -> set[CoeffId]:
    return {c for p in region for c in patch_coeff_ids(p)}


def assemble(src: HermiteSource, masks: MaskSet, h, region: Iterable[PatchId]) -> Spline:
    """Quasi-interpolant of the Hermite data ``src`` on ``region``.

    With rational ``h`` everything is exact; otherwise floats are used.
    """
    region = frozenset(region)
    if not region:
        raise ValueError("empty region")
    if not h > 0:
        raise ValueError("h must be positive")
    exact = _is_exact(h)
    conv = Fraction if exact else float
    h = Fraction(h) if exact else float(h)
    cache: dict[VertexId, tuple] = {}

    def sample(v: VertexId):
        if v not in cache:
            try:
                s = src(v)
                vals = tuple(conv(x) for x in s)
            except Exception as exc:
                raise ValueError(f"Hermite source failed at vertex {tuple(v)}: {exc}") from exc
            if not exact and not all(math.isfinite(x) for x in vals):
                raise ValueError(f"non-finite Hermite sample at vertex {tuple(v)}: {vals}")
            cache[v] = (vals[0], h * vals[1], h * vals[2])
        return cache[v]

    triples = {name: tuple(tuple(conv(e) for e in vec) for vec in masks.triple(name)) for name in MASK_NAMES}
    coeffs = {}
    for cid in needed_coeffs(region):
        tri = triples[mask_name(cid)]
        data = [sample(v) for v in hexagon_stencil(coeff_anchor(cid))]
        total = conv(0)
        for ch in range(3):
            vec = tri[ch]
            for ell in range(7):
                if vec[ell]:
                    total += vec[ell] * data[ell][ch]
        coeffs[cid] = total
    return Spline(h, coeffs, region)


def evaluate(s: Spline, p):
    return s.evaluate(p)


def gradient(s: Spline, p):
    return s.gradient(p)


# --- C1 checks --------------------------------------------------------------

def edge_residuals(p: PatchId, q: PatchId, coeff: Callable[[CoeffId], object], h=1) -> list:
    """The 7 signed C0/C1 join residuals between patches ``p`` and ``q``.

    ``coeff`` maps coefficient ids to values; any linear arithmetic type works.
    """
    perm_p, perm_q = shared_edge(p, q)
    left = bb.reorient(bb.BezierPatch.from_list(3, [coeff(c) for c in patch_coeff_ids(p)]), perm_p)
    right = bb.reorient(bb.BezierPatch.from_list(3, [coeff(c) for c in patch_coeff_ids(q)]), perm_q)
    pts_p = patch_points(p, h)
    left_pts = [pts_p[r] for r in perm_p]
    off_q = vertex_position(patch_vertices(q)[perm_q[0]], h)
    tau = barycentric_wrt(off_q, *left_pts)
    return bb.c1_join_residuals(left, right, tau)


# The three edges leaving v(0,0) in distinct directions, as (left, right) patch pairs.
ORIGIN_EDGES: tuple[tuple[PatchId, PatchId], ...] = (
    (Lower(0, 0), Upper(0, 0)),
    (Lower(0, 0), Upper(0, -1)),
    (Upper(0, 0), Lower(-1, 0)),
)


def c1_identities() -> list[LinearForm]:
    """The nine coefficient identities equivalent to C1 smoothness of any spline
    built from translation-invariant coefficients, derived from the edge join
    conditions at the three edge directions through v(0,0).

    Each is a linear form over coefficient ids that must vanish; the C0 parts
    vanish identically because neighbouring patches share coefficient ids.
    """
    out = []
    for p, q in ORIGIN_EDGES:
        res = edge_residuals(p, q, LinearForm.var, Fraction(1))
        if not all(r.is_zero() for r in res[:4]):
            raise AssertionError("C0 conditions must hold structurally")
        out.extend(res[4:])
    return out


def format_identity(form: LinearForm) -> str:
    lhs = [repr(k) for k, v in form.terms.items() if v > 0 for _ in range(int(v))]
    rhs = [repr(k) for k, v in form.terms.items() if v < 0 for _ in range(int(-v))]
    return " + ".join(sorted(lhs)) + " = " + " + ".join(sorted(rhs))


@dataclass
class C1Audit:
    max_edge_residual: object
    max_identity_residual: object
    edges_checked: int
    identities_checked: int

    @property
    def max_residual(self):
        return max(self.max_edge_residual, self.max_identity_residual)


def c1_audit(s: Spline) -> C1Audit:
    """Worst C0/C1 residual over all interior edges of the region, and worst
    violation of the nine coefficient identities over every translate whose
    coefficients are all present."""
    coeff = s.coeffs.__getitem__
    worst_edge = 0
    edges = interior_edges(s.region)
    for p, q in edges:
        for r in edge_residuals(p, q, coeff, s.h):
            worst_edge = max(worst_edge, abs(r))
    worst_id = 0
    n_ids = 0
    anchors = {coeff_anchor(c) for c in s.coeffs}
    idents = c1_identities()
    for v in anchors:
        for form in idents:
            ids = [shift(c, v.i, v.j) for c in form.terms]
            if not all(c in s.coeffs for c in ids):
                continue
            val = sum(coef * s.coeffs[shift(c, v.i, v.j)] for c, coef in form.terms.items())
            worst_id = max(worst_id, abs(val))
            n_ids += 1
    return C1Audit(worst_edge, worst_id, len(edges), n_ids)


# --- vectorised float route ---------------------------------------------------


class GridSpline:
    """Float quasi-interpolant on all cells ``i0 <= i < i1``, ``j0 <= j < j1``.

    ``data`` is a callable ``(x, y) -> (f, fx, fy)`` on numpy arrays.
    """

    def __init__(self, data, masks: MaskSet, h: float, i0: int, i1: int, j0: int, j1: int):
        self.h = float(h)
        self.i0, self.i1, self.j0, self.j1 = i0, i1, j0, j1
        # anchors reach one cell beyond the cells, stencils one vertex further
        ii, jj = np.meshgrid(np.arange(i0 - 1, i1 + 3), np.arange(j0 - 1, j1 + 3), indexing="ij")
        x, y = (ii + jj) * self.h, (ii - jj) * self.h
        f, fx, fy = (np.asarray(a, dtype=float) for a in data(x, y))
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(fx)) and np.all(np.isfinite(fy))):
            bad = np.argwhere(~(np.isfinite(f) & np.isfinite(fx) & np.isfinite(fy)))[0]
            raise ValueError(f"non-finite Hermite sample at vertex ({ii[tuple(bad)]}, {jj[tuple(bad)]})")
        chans = (f, self.h * fx, self.h * fy)
        ni, nj = ii.shape
        self._coef = {}
        for name in MASK_NAMES:
            tri = masks.triple(name)
            acc = np.zeros((ni - 2, nj - 2))
            for ch in range(3):
                for ell, (di, dj) in enumerate(STENCIL_OFFSETS):
                    w = float(tri[ch][ell])
                    if w:
                        acc += w * chans[ch][1 + di: ni - 1 + di, 1 + dj: nj - 1 + dj]
            self._coef[name] = acc  # acc[a, b] belongs to anchor (i0 + a, j0 + b)

    def coeff(self, cid: CoeffId) -> float:
        a = self._coef[mask_name(cid)]
        return float(a[cid.i - self.i0, cid.j - self.j0])

    def patch_coefficients(self, kind: str) -> np.ndarray:
        """Array ``[i, j, 10]`` of BB-coefficients for all cells of one patch kind."""
        ni, nj = self.i1 - self.i0, self.j1 - self.j0
        proto = Lower(0, 0) if kind == LOWER else Upper(0, 0)
        out = np.empty((ni, nj, 10))
        for slot, cid in enumerate(patch_coeff_ids(proto)):
            a = self._coef[mask_name(cid)]
            out[:, :, slot] = a[cid.i: cid.i + ni, cid.j: cid.j + nj]
        return out

    def patch_ids(self) -> list[PatchId]:
        return [PatchId(k, i, j) for k in (LOWER, UPPER)
                for i in range(self.i0, self.i1) for j in range(self.j0, self.j1)]


def bernstein_matrix(taus: np.ndarray, d: int = 3) -> np.ndarray:
    """Rows of Bernstein basis values (multi-index order) at barycentric points."""
    taus = np.asarray(taus, dtype=float)
    cols = [bb.bernstein_value(a, d, (taus[:, 0], taus[:, 1], taus[:, 2])) for a in bb.multi_indices(d)]
    return np.stack(cols, axis=1)


# --- CSV interfaces -------------------------------------------------------------

def read_hermite_csv(path) -> dict[VertexId, HermiteSample]:
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["i", "j", "f", "fx", "fy"]:
            raise ValueError("Hermite CSV header must be i,j,f,fx,fy")
        for lineno, row in enumerate(reader, start=2):
            try:
                v = VertexId(int(row["i"]), int(row["j"]))
                out[v] = HermiteSample(float(row["f"]), float(row["fx"]), float(row["fy"]))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
    return out


def table_source(table: dict[VertexId, HermiteSample]) -> HermiteSource:
    def src(v: VertexId) -> HermiteSample:
        try:
            return table[VertexId(*v)]
        except KeyError:
            raise KeyError(f"no Hermite data for vertex {tuple(v)}") from None

    return src


def read_points_csv(path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["x", "y"]:
            raise ValueError("evaluation CSV header must be x,y")
        return [(float(r["x"]), float(r["y"])) for r in reader]


def write_values_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "value", "dx", "dy"])
        for x, y, val, dx, dy in rows:
            w.writerow([repr(float(x)), repr(float(y)), repr(float(val)), repr(float(dx)), repr(float(dy))])


def covered_region(table: dict[VertexId, HermiteSample]) -> frozenset[PatchId]:
    """Patches whose every coefficient stencil is fully covered by ``table``."""
    have = set(table)
    cand = set()
    for v in have:
        cand.add(Lower(v.i, v.j))
        cand.add(Upper(v.i, v.j))
    ok = set()
    for p in cand:
        if all(all(w in have for w in hexagon_stencil(coeff_anchor(c))) for c in patch_coeff_ids(p)):
            ok.add(p)
    return frozenset(ok)
