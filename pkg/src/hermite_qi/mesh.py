"""Geometry of the uniform three-direction triangulation.

Vertices live on the lattice ``v(i, j) = i*e1 + j*e2`` with ``e1 = (h, h)`` and
``e2 = (h, -h)``.  Every lattice cell splits into a *lower* triangle with
vertices ``[v(i,j), v(i+1,j+1), v(i+1,j)]`` and an *upper* triangle whose BB
vertex order is ``[v(i,j+1), v(i+1,j+1), v(i,j)]``.  These orders fix the
barycentric index positions used by :func:`patch_coeff_ids` and everywhere
else in the package.

All functions are generic over the scalar type: pass ``h`` as a
:class:`fractions.Fraction` (and rational points) to stay exact.
"""
from __future__ import annotations

import math
from typing import NamedTuple

LOWER = "L"
UPPER = "U"

# Directions (k, m) of the u-type domain points, in mask order.
DIRECTIONS: tuple[tuple[int, int], ...] = ((1, 1), (1, 0), (0, -1), (-1, -1), (-1, 0), (0, 1))

# Lattice offsets of the hexagon stencil, index order l = 0..6.
STENCIL_OFFSETS: tuple[tuple[int, int], ...] = (
    (0, 0), (1, 1), (1, 0), (0, -1), (-1, -1), (-1, 0), (0, 1),
)


class VertexId(NamedTuple):
    i: int
    j: int


class PatchId(NamedTuple):
    kind: str  # LOWER or UPPER
    i: int
    j: int

    def __repr__(self) -> str:
        name = "Lower" if self.kind == LOWER else "Upper"
        return f"{name}({self.i},{self.j})"


def Lower(i: int, j: int) -> PatchId:
    return PatchId(LOWER, i, j)


def Upper(i: int, j: int) -> PatchId:
    return PatchId(UPPER, i, j)


class CoeffId(NamedTuple):
    """Address of one shared BB-coefficient.

    ``kind`` is ``"V"`` (vertex), ``"U"`` (point ``(2 v(i,j) + v(i+k,j+m)) / 3``),
    ``"C"`` (barycenter of the lower triangle) or ``"Ct"`` (barycenter of the
    upper triangle).  ``k`` and ``m`` are only meaningful for ``"U"``.
    """

    kind: str
    i: int
    j: int
    k: int = 0
    m: int = 0

    def __repr__(self) -> str:
        if self.kind == "U":
            return f"U({self.i},{self.j};{self.k},{self.m})"
        return f"{self.kind}({self.i},{self.j})"


def V(i: int, j: int) -> CoeffId:
    return CoeffId("V", i, j)


def U(i: int, j: int, k: int, m: int) -> CoeffId:
    if (k, m) not in DIRECTIONS:
        raise ValueError(f"invalid u-direction ({k},{m})")
    return CoeffId("U", i, j, k, m)


def C(i: int, j: int) -> CoeffId:
    return CoeffId("C", i, j)


def Ct(i: int, j: int) -> CoeffId:
    return CoeffId("Ct", i, j)


def vertex_position(v, h):
    """Cartesian position ``((i+j) h, (i-j) h)`` of lattice vertex ``v``."""
    if not h > 0:
        raise ValueError("h must be positive")
    i, j = v
    return ((i + j) * h, (i - j) * h)


def patch_vertices(patch: PatchId) -> tuple[VertexId, VertexId, VertexId]:
    kind, i, j = patch
    if kind == LOWER:
        return (VertexId(i, j), VertexId(i + 1, j + 1), VertexId(i + 1, j))
    return (VertexId(i, j + 1), VertexId(i + 1, j + 1), VertexId(i, j))


def patch_points(patch: PatchId, h):
    return tuple(vertex_position(v, h) for v in patch_vertices(patch))


def locate(p, h) -> PatchId:
    """Patch containing ``p``, computed arithmetically in O(1).

    Ties on shared edges are broken half-open: with ``u = (x+y)/2h`` and
    ``w = (x-y)/2h`` the cell is ``(floor(u), floor(w))`` and the point goes to
    the lower triangle when ``frac(u) >= frac(w)``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    x, y = p
    if not (_finite(x) and _finite(y)):
        raise ValueError(f"non-finite point {p!r}")
    u = (x + y) / (2 * h)
    w = (x - y) / (2 * h)
    i = math.floor(u)
    j = math.floor(w)
    if u - i >= w - j:
        return PatchId(LOWER, i, j)
    return PatchId(UPPER, i, j)


def _finite(t) -> bool:
    try:
        return math.isfinite(t)
    except (TypeError, OverflowError):
        return True


def barycentric_wrt(p, a, b, c):
    """Barycentric coordinates of ``p`` with respect to triangle ``(a, b, c)``."""
    x, y = p
    det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
    t2 = ((x - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (y - a[1])) / det
    t3 = ((b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])) / det
    return (1 - t2 - t3, t2, t3)


def barycentric(p, patch: PatchId, h):
    """Barycentric coordinates of ``p`` w.r.t. ``patch`` (may be negative)."""
    return barycentric_wrt(p, *patch_points(patch, h))


def hexagon_stencil(v) -> list[VertexId]:
    """The seven stencil vertices around ``v`` in mask index order."""
    i, j = v
    return [VertexId(i + di, j + dj) for di, dj in STENCIL_OFFSETS]


def patch_coeff_ids(patch: PatchId) -> list[CoeffId]:
    """The 10 coefficient ids of ``patch`` in BB index order
    (3,0,0),(2,1,0),(2,0,1),(1,2,0),(1,1,1),(1,0,2),(0,3,0),(0,2,1),(0,1,2),(0,0,3).
    """
    kind, i, j = patch
    if kind == LOWER:
        return [
            V(i, j), U(i, j, 1, 1), U(i, j, 1, 0), U(i + 1, j + 1, -1, -1),
            C(i, j), U(i + 1, j, -1, 0), V(i + 1, j + 1), U(i + 1, j + 1, 0, -1),
            U(i + 1, j, 0, 1), V(i + 1, j),
        ]
    return [
        V(i, j + 1), U(i, j + 1, 1, 0), U(i, j + 1, 0, -1), U(i + 1, j + 1, -1, 0),
        Ct(i, j), U(i, j, 0, 1), V(i + 1, j + 1), U(i + 1, j + 1, -1, -1),
        U(i, j, 1, 1), V(i, j),
    ]


def domain_point(cid: CoeffId, h):
    """Cartesian location of the domain point carried by ``cid``."""
    kind, i, j, k, m = cid
    if kind == "V":
        return vertex_position((i, j), h)
    if kind == "U":
        a = vertex_position((i, j), h)
        b = vertex_position((i + k, j + m), h)
        return ((2 * a[0] + b[0]) / 3, (2 * a[1] + b[1]) / 3)
    patch = Lower(i, j) if kind == "C" else Upper(i, j)
    pts = patch_points(patch, h)
    return (sum(q[0] for q in pts) / 3, sum(q[1] for q in pts) / 3)


def shared_edge(p: PatchId, q: PatchId):
    """Orient two patches sharing an edge for the C0/C1 join test.

    Returns ``(perm_p, perm_q)`` such that ``p`` re-expressed over
    ``[w1, w2, w3]`` and ``q`` over ``[w4, w3, w2]`` share the edge ``w2 w3``;
    each permutation lists indices into :func:`patch_vertices`.
    """
    vp, vq = patch_vertices(p), patch_vertices(q)
    common = [v for v in vp if v in vq]
    if len(common) != 2:
        raise ValueError(f"{p!r} and {q!r} do not share an edge")
    a, b = common
    off_p = next(v for v in vp if v not in common)
    off_q = next(v for v in vq if v not in common)
    perm_p = (vp.index(off_p), vp.index(a), vp.index(b))
    perm_q = (vq.index(off_q), vq.index(b), vq.index(a))
    return perm_p, perm_q


def interior_edges(patches) -> list[tuple[PatchId, PatchId]]:
    """All pairs of patches in ``patches`` that share an edge (each pair once)."""
    patches = set(patches)
    pairs = []
    for p in sorted(patches):
        kind, i, j = p
        if kind == LOWER:
            nbrs = [Upper(i, j), Upper(i, j - 1), Upper(i + 1, j)]
        else:
            nbrs = [Lower(i, j), Lower(i - 1, j), Lower(i, j + 1)]
        for q in nbrs:
            if q in patches and p < q:
                pairs.append((p, q))
    return pairs
