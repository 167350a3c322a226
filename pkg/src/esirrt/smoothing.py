"""Hybrid path smoothing: subsample, natural cubic spline, collision repair.

The spline stage fits one natural cubic interpolant per coordinate axis
over a uniform normalized parameter in [0, 1], solving the tridiagonal
second-derivative system with the Thomas algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidParameter
from .gridmap import OccupancyGrid, Path, Point, obstacle_free

DEFAULT_SUBSAMPLE_D = 10.0
DEFAULT_SPLINE_N = 200
_EPS = 1e-9


@dataclass(frozen=True)
class SplineCoeffs:
    """Per-segment cubic coefficients over uniform knots u_i = i/m."""

    knots: Tuple[float, ...]
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    d: Tuple[float, ...]
    h: float

    @property
    def segments(self) -> int:
        return len(self.a)

    def _segment(self, u: float) -> int:
        return min(max(int((u - self.knots[0]) // self.h), 0), self.segments - 1)

    def evaluate(self, u: float) -> float:
        i = self._segment(u)
        delta = u - self.knots[i]
        return self.a[i] + delta * (
            self.b[i] + delta * (self.c[i] + delta * self.d[i])
        )

    def derivative(self, u: float) -> float:
        i = self._segment(u)
        delta = u - self.knots[i]
        return self.b[i] + delta * (2.0 * self.c[i] + 3.0 * self.d[i] * delta)

    def second_derivative(self, u: float) -> float:
        i = self._segment(u)
        delta = u - self.knots[i]
        return 2.0 * self.c[i] + 6.0 * self.d[i] * delta


def subsample_path(path: Path, d: float) -> Path:
    """Resample a polyline at fixed arc-length spacing ``d``.

    Keeps the first point, emits a point every ``d`` pixels of arc length
    (interpolated on the polyline), and always appends the final point.
    """
    if d <= 0:
        raise InvalidParameter("subsample distance must be positive")
    if len(path) < 2:
        raise InvalidParameter("subsample requires a path with >= 2 points")
    pts = path.points
    out: List[Point] = [pts[0]]
    since_last = 0.0
    for a, b in zip(pts, pts[1:]):
        seg = math.hypot(b.x - a.x, b.y - a.y)
        pos = 0.0
        while since_last + (seg - pos) >= d:
            step = d - since_last
            pos += step
            t = pos / seg
            out.append(Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
            since_last = 0.0
        since_last += seg - pos
    last = pts[-1]
    if math.hypot(last.x - out[-1].x, last.y - out[-1].y) <= _EPS:
        out[-1] = last
    else:
        out.append(last)
    if len(out) < 2:
        out = [pts[0], pts[-1]]
    return Path(out)


def thomas_solve(
    sub: Sequence[float],
    diag: Sequence[float],
    sup: Sequence[float],
    rhs: Sequence[float],
) -> np.ndarray:
    """Solve a tridiagonal system in O(n) by forward elimination/back substitution."""
    n = len(diag)
    if not (len(sub) == len(sup) == n - 1 and len(rhs) == n):
        raise InvalidParameter("inconsistent tridiagonal system dimensions")
    dp = np.empty(n)
    dp_rhs = np.empty(n)
    dp[0] = diag[0]
    dp_rhs[0] = rhs[0]
    for i in range(1, n):
        m = sub[i - 1] / dp[i - 1]
        dp[i] = diag[i] - m * (sup[i - 1] if i - 1 < n - 1 else 0.0)
        dp_rhs[i] = rhs[i] - m * dp_rhs[i - 1]
    x = np.empty(n)
    x[-1] = dp_rhs[-1] / dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (dp_rhs[i] - sup[i] * x[i + 1]) / dp[i]
    return x


def cubic_spline_fit(values: Sequence[float], knots: Sequence[float]) -> SplineCoeffs:
    """Natural cubic spline interpolant of one coordinate axis.

    Solves h(M_{i-1} + 4 M_i + M_{i+1}) = 3(D_i - D_{i-1}) for the interior
    knots (D_i = (z_{i+1} - z_i)/h) with M_0 = M_m = 0, then converts the
    second-derivative values into per-segment cubic coefficients.
    """
    z = np.asarray(values, dtype=np.float64)
    u = np.asarray(knots, dtype=np.float64)
    m = len(z) - 1
    if m < 1:
        raise InvalidParameter("spline fit needs at least two data points")
    if len(u) != len(z):
        raise InvalidParameter("values and knots must have equal length")
    h = (u[-1] - u[0]) / m
    if h <= 0 or np.max(np.abs(np.diff(u) - h)) > 1e-9 * max(1.0, abs(h)):
        raise InvalidParameter("knots must be uniformly spaced and increasing")

    big_m = np.zeros(m + 1)
    if m >= 2:
        delta = np.diff(z) / h
        rhs = 3.0 * (delta[1:] - delta[:-1])
        k = m - 1
        big_m[1:m] = thomas_solve(
            [h] * (k - 1), [4.0 * h] * k, [h] * (k - 1), rhs
        )

    a = z[:-1]
    c = big_m[:-1]
    d = (big_m[1:] - big_m[:-1]) / (3.0 * h)
    b = np.diff(z) / h - (h / 3.0) * (2.0 * big_m[:-1] + big_m[1:])
    return SplineCoeffs(
        knots=tuple(float(v) for v in u),
        a=tuple(float(v) for v in a),
        b=tuple(float(v) for v in b),
        c=tuple(float(v) for v in c),
        d=tuple(float(v) for v in d),
        h=float(h),
    )


def evaluate_spline(coeffs_x: SplineCoeffs, coeffs_y: SplineCoeffs, n: int) -> Path:
    """Sample the two-axis spline at n+1 uniform parameter values in [0, 1].

    Consecutive duplicates (possible on degenerate data) are dropped to keep
    the Path invariant.
    """
    if n < 1:
        raise InvalidParameter("interval count must be >= 1")
    pts: List[Point] = []
    u0 = coeffs_x.knots[0]
    span = coeffs_x.knots[-1] - u0
    for k in range(n + 1):
        u = u0 + span * (k / n)
        p = Point(coeffs_x.evaluate(u), coeffs_y.evaluate(u))
        if not pts or math.hypot(p.x - pts[-1].x, p.y - pts[-1].y) > _EPS:
            pts.append(p)
    return Path(pts)


def collision_aware_correction(
    spline_path: Path, fallback_path: Path, grid: OccupancyGrid
) -> Path:
    """Replace infeasible spline segments with points from the fallback path.

    Walks the spline keeping every point reachable by a free segment from
    the last kept point; otherwise appends the fallback point (a) visible
    from the last kept point and (b) nearest to the blocked spline point,
    first index winning ties.  Points with no feasible fallback are skipped.
    """
    out: List[Point] = [spline_path[0]]
    prev = spline_path[0]
    for curr in spline_path.points[1:]:
        if obstacle_free(grid, prev, curr):
            if math.hypot(curr.x - prev.x, curr.y - prev.y) > _EPS:
                out.append(curr)
                prev = curr
            continue
        best = None
        best_dist = math.inf
        for f in fallback_path:
            if obstacle_free(grid, prev, f):
                dist = math.hypot(f.x - curr.x, f.y - curr.y)
                if dist < best_dist:
                    best, best_dist = f, dist
        if best is not None and math.hypot(best.x - prev.x, best.y - prev.y) > _EPS:
            out.append(best)
            prev = best
    return Path(out)


def hybrid_path_smoothing(
    init_path: Path,
    d: float = DEFAULT_SUBSAMPLE_D,
    n: int = DEFAULT_SPLINE_N,
    grid: OccupancyGrid = None,
) -> Path:
    """Subsample, spline-fit per axis, densely evaluate, then repair collisions."""
    if grid is None:
        raise InvalidParameter("hybrid smoothing requires a grid")
    sub = subsample_path(init_path, d)
    m = len(sub) - 1
    knots = [i / m for i in range(m + 1)]
    cx = cubic_spline_fit([p.x for p in sub], knots)
    cy = cubic_spline_fit([p.y for p in sub], knots)
    spline = evaluate_spline(cx, cy, n)
    return collision_aware_correction(spline, init_path, grid)
