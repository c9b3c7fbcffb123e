"""Test functions, sup-norm error scans and convergence tables on the unit square."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bernstein as bb
from .masks import DEFAULT_LAMBDA, mask_set
from .mesh import LOWER, UPPER
from .quasi_interp import GridSpline, bernstein_matrix

SAMPLE_DEGREE = 6  # principal lattice of degree 6: 28 points per triangle
BENCHMARK_NS = (8, 16, 32, 64, 128)


@dataclass(frozen=True)
class TestFunction:
    name: str
    value: Callable
    gradient: Callable

    __test__ = False  # not a pytest class

    def hermite(self, x, y):
        gx, gy = self.gradient(x, y)
        return self.value(x, y), gx, gy


def _franke_terms(x, y):
    e1 = 0.5 * np.exp(-((9 * x - 7) ** 2 + 0.25 * (9 * y - 3) ** 2))
    e2 = 0.75 * np.exp(-((9 * x + 1) ** 2) / 49 - (9 * y + 1) / 10)
    e3 = -0.2 * np.exp(-((9 * x - 4) ** 2) - (9 * y - 7) ** 2)
    e4 = 0.75 * np.exp(-((9 * x - 2) ** 2 + (9 * y - 2) ** 2))
    return e1, e2, e3, e4


def franke_value(x, y):
    # the second exponential is linear in y, as printed for this benchmark
    e1, e2, e3, e4 = _franke_terms(x, y)
    return e1 + e2 + e3 + e4


def franke_gradient(x, y):
    e1, e2, e3, e4 = _franke_terms(x, y)
    gx = (e1 * (-18 * (9 * x - 7)) + e2 * (-18 * (9 * x + 1) / 49)
          + e3 * (-18 * (9 * x - 4)) + e4 * (-18 * (9 * x - 2)))
    gy = (e1 * (-4.5 * (9 * y - 3)) + e2 * (-0.9)
          + e3 * (-18 * (9 * y - 7)) + e4 * (-18 * (9 * y - 2)))
    return gx, gy


def nielson_value(x, y):
    return 0.5 * y * np.cos(4 * (x ** 2 + y - 1)) ** 4


def nielson_gradient(x, y):
    u = 4 * (x ** 2 + y - 1)
    c, s = np.cos(u), np.sin(u)
    gx = -16 * x * y * c ** 3 * s
    gy = 0.5 * c ** 4 - 8 * y * c ** 3 * s
    return gx, gy


FRANKE = TestFunction("franke", franke_value, franke_gradient)
NIELSON = TestFunction("nielson", nielson_value, nielson_gradient)
TEST_FUNCTIONS = {"franke": FRANKE, "nielson": NIELSON}


def polynomial_function(coeffs, name: str = "poly") -> TestFunction:
    """Quadratic ``c0 + c1 x + c2 y + c3 x^2 + c4 xy + c5 y^2`` as a test function."""
    c0, c1, c2, c3, c4, c5 = (float(c) for c in coeffs)

    def value(x, y):
        return c0 + c1 * x + c2 * y + c3 * x * x + c4 * x * y + c5 * y * y

    def grad(x, y):
        return c1 + 2 * c3 * x + c4 * y, c2 + c4 * x + 2 * c5 * y

    return TestFunction(name, value, grad)


def sample_barycentrics(degree: int = SAMPLE_DEGREE) -> np.ndarray:
    return np.array([[a / degree for a in alpha] for alpha in bb.multi_indices(degree)])


def omega_spline(tf: TestFunction, n: int, lam=DEFAULT_LAMBDA, variant: str = "corrected") -> GridSpline:
    """Float quasi-interpolant covering every triangle that meets the unit square.

    Vertices outside the square feed the boundary stencils directly.
    """
    h = 1.0 / n
    # lattice coordinates u = (x+y)/2h in [0, n], w = (x-y)/2h in [-n/2, n/2]
    i0, i1 = 0, n
    j0, j1 = math.floor(-n / 2), math.ceil(n / 2)

    def data(x, y):
        return tf.hermite(x, y)

    return GridSpline(data, mask_set(lam, variant), h, i0, i1, j0, j1)


def error_scan(tf: TestFunction, n: int, lam=DEFAULT_LAMBDA, sample_degree: int = SAMPLE_DEGREE,
               variant: str = "corrected", gradient: bool = False):
    """Estimated ``max |tf - Q tf|`` over the unit square, ``h = 1/n``.

    Each triangle contributes its principal-lattice points of ``sample_degree``
    that lie in the square.  With ``gradient=True`` returns
    ``(value_error, gradient_error)`` where the latter is the max Euclidean norm
    of the gradient error.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    spl = omega_spline(tf, n, lam, variant)
    taus = sample_barycentrics(sample_degree)
    B = bernstein_matrix(taus)
    h = spl.h
    ii, jj = np.meshgrid(np.arange(spl.i0, spl.i1), np.arange(spl.j0, spl.j1), indexing="ij")
    worst = 0.0
    worst_grad = 0.0
    eps = 1e-12
    for kind in (LOWER, UPPER):
        coef = spl.patch_coefficients(kind)  # [ni, nj, 10]
        if kind == LOWER:
            verts = [(ii, jj), (ii + 1, jj + 1), (ii + 1, jj)]
        else:
            verts = [(ii, jj + 1), (ii + 1, jj + 1), (ii, jj)]
        vx = [(a + b) * h for a, b in verts]
        vy = [(a - b) * h for a, b in verts]
        # sample points [ni, nj, S]
        px = sum(vx[r][..., None] * taus[None, None, :, r] for r in range(3))
        py = sum(vy[r][..., None] * taus[None, None, :, r] for r in range(3))
        inside = (px >= -eps) & (px <= 1 + eps) & (py >= -eps) & (py <= 1 + eps)
        if not inside.any():
            continue
        approx = coef @ B.T
        err = np.abs(tf.value(px, py) - approx)
        worst = max(worst, float(err[inside].max()))
        if gradient:
            worst_grad = max(worst_grad, _gradient_error(tf, coef, vx, vy, taus, px, py, inside))
    return (worst, worst_grad) if gradient else worst


def _gradient_error(tf, coef, vx, vy, taus, px, py, inside) -> float:
    # Cartesian gradient from barycentric partials: grad = J^-T [d/dt2 - d/dt1, d/dt3 - d/dt1]
    dB = []
    for r in range(3):
        cols = []
        for alpha in bb.multi_indices(3):
            if alpha[r] == 0:
                cols.append(np.zeros(len(taus)))
                continue
            beta = list(alpha)
            beta[r] -= 1
            cols.append(3 * bb.bernstein_value(tuple(beta), 2, (taus[:, 0], taus[:, 1], taus[:, 2])))
        dB.append(np.stack(cols, axis=1))
    d1, d2, d3 = (coef @ m.T for m in dB)
    a = d2 - d1
    b = d3 - d1
    x21, y21 = (vx[1] - vx[0])[..., None], (vy[1] - vy[0])[..., None]
    x31, y31 = (vx[2] - vx[0])[..., None], (vy[2] - vy[0])[..., None]
    det = x21 * y31 - x31 * y21
    gx = (y31 * a - y21 * b) / det
    gy = (-x31 * a + x21 * b) / det
    tx, ty = tf.gradient(px, py)
    err = np.hypot(tx - gx, ty - gy)
    return float(err[inside].max())


def nco(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> float:
    """Numerical convergence order ``log(e_fine/e_coarse) / log(h_fine/h_coarse)``."""
    for name, v in (("e_coarse", e_coarse), ("e_fine", e_fine), ("h_coarse", h_coarse), ("h_fine", h_fine)):
        if not v > 0:
            raise ValueError(f"{name} must be positive, got {v}")
    return math.log(e_fine / e_coarse) / math.log(h_fine / h_coarse)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    h: float
    error: float
    nco: float | None


def convergence_table(tf: TestFunction, ns, lam=DEFAULT_LAMBDA, **scan_kw) -> list[ConvergenceRow]:
    ns = list(ns)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    rows: list[ConvergenceRow] = []
    for n in ns:
        err = error_scan(tf, n, lam, **scan_kw)
        rate = None
        if rows and rows[-1].error > 0 and err > 0:
            rate = nco(rows[-1].error, err, rows[-1].h, 1.0 / n)
        rows.append(ConvergenceRow(n, 1.0 / n, err, rate))
    return rows


def write_table_csv(path, rows: list[ConvergenceRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "error", "nco"])
        for r in rows:
            w.writerow([r.n, f"{r.error:.3e}", "" if r.nco is None else f"{r.nco:.3f}"])


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())
