"""Synthesis of the multi-linear-spring compensator for a magnet curve.

The compensator approximates a convex decreasing force curve F from below by
the upper envelope of tangent lines. A tangent at X_i has stiffness magnitude
K_i = -dF/dx|_{X_i}; consecutive tangents intersect at break points

    b_i = (K_{i+1} X_{i+1} - K_i X_i + F(X_{i+1}) - F(X_i)) / (K_{i+1} - K_i),

and the envelope is realized physically by preloaded compression springs that
disengage one by one: spring i has incremental stiffness k_i = K_i - K_{i+1}
(with K_{N+1} = 0) and engagement end e_i, the displacement at which its force
reaches zero, so the summed characteristic is

    S(x) = sum_j k_j * max(0, e_j - x)  =  max(0, max_i T_i(x)).

Engagement ends sit at the break points (e_i = b_i for i < N) and at the last
tangent's zero crossing (e_N), which keeps the total force continuous: a cam
releases each spring exactly where its force vanishes. The residual energy
loss dE = integral of (F - S) over the stroke is the figure the optimizer
minimizes over tangent-point placements.
"""

from __future__ import annotations

import csv
import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import CatalogError, DomainError, ShapeError
from .force_curve import ForceCurve, PowerLawCurve, SampledCurve

__all__ = [
    "TangentLine",
    "Spring",
    "SpringDesign",
    "SpringCatalog",
    "tangent_at",
    "break_point",
    "build_design",
    "spring_force",
    "delta_e",
    "optimize_tangent_points",
    "snap_to_catalog",
    "write_design_csv",
]

# All force/length comparisons in N, mm, N·mm use this absolute tolerance
# unless a contract states otherwise.
TOL = 1e-9

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TangentLine:
    """Tangent to a decreasing curve: T(q) = value - stiffness * (q - x)."""

    x: float  # tangent point, mm
    value: float  # curve value at x, N
    stiffness: float  # slope magnitude K = -dF/dx at x, N/mm

    def value_at(self, q: float) -> float:
        return self.value - self.stiffness * (q - self.x)

    @property
    def zero_crossing(self) -> float:
        return self.x + self.value / self.stiffness


@dataclass(frozen=True)
class Spring:
    """One linear spring: force k * max(0, e - x), zero at the engagement end e."""

    stiffness: float  # N/mm
    engagement_end: float  # mm


@dataclass(frozen=True)
class SpringDesign:
    """A cam-limited spring set realizing a piecewise-linear under-approximation.

    `clamped` is set when the last engagement end exceeds the stroke: the cam
    cannot release that spring within x_max, so its cam depth is clamped to
    x_max and `residual_force` records the step force S(x_max) left there.
    """

    springs: tuple[Spring, ...]
    break_points: tuple[float, ...]  # interior intersections, len = N - 1
    cam_depths: tuple[float, ...]  # release positions, min(e_j, x_max)
    x_max: float
    delta_e: float  # N·mm, energy loss over [0, x_max]
    tangent_points: tuple[float, ...] = ()
    clamped: bool = False
    residual_force: float = 0.0
    residual_negative: bool = False  # S exceeded F beyond 1e-9 N somewhere


@dataclass(frozen=True)
class SpringCatalog:
    """Stiffnesses of commercially available linear springs."""

    stiffnesses: tuple[float, ...]

    def __init__(self, stiffnesses: Sequence[float]):
        vals = tuple(float(k) for k in stiffnesses)
        if any(not (k > 0 and math.isfinite(k)) for k in vals):
            raise ValueError("catalog stiffnesses must be positive and finite")
        object.__setattr__(self, "stiffnesses", vals)


def tangent_at(curve: ForceCurve, X: float) -> TangentLine:
    """Tangent line at X; ShapeError unless the curve strictly decreases there."""
    f = curve.force(X)
    s = curve.slope(X)
    if s >= 0:
        raise ShapeError(f"curve not strictly decreasing at x={X} (slope {s})")
    return TangentLine(float(X), float(f), float(-s))


def break_point(t_prev: TangentLine, t_next: TangentLine) -> float:
    """Intersection abscissa of two tangent lines.

    For tangents to a convex decreasing curve (K_prev > K_next) the result is
    bracketed by the two tangent points. Parallel lines have no intersection.
    """
    dk = t_next.stiffness - t_prev.stiffness
    if abs(dk) < 1e-15:
        raise ShapeError("tangent lines are parallel; no unique intersection")
    num = (t_next.stiffness * t_next.x - t_prev.stiffness * t_prev.x
           + t_next.value - t_prev.value)
    return num / dk


def _check_convex_decreasing(curve: ForceCurve, x_max: float, grid: int = 1001) -> None:
    """ShapeError unless the curve is convex and non-increasing on [0, x_max].

    PowerLawCurve is strictly convex decreasing by construction; sampled
    curves are checked by first/second differences on a uniform grid.
    """
    if isinstance(curve, PowerLawCurve):
        return
    if x_max > curve.x_max:
        raise DomainError(f"x_max={x_max} beyond sampled domain {curve.x_max}")
    xs = np.linspace(0.0, x_max, grid)
    vals = np.asarray(curve.force(xs))
    if np.any(np.diff(vals) > TOL):
        raise ShapeError("curve is not non-increasing over the stroke")
    if np.any(np.diff(vals, 2) < -TOL):
        raise ShapeError("curve is not convex over the stroke")


def _design_from_lines(
    curve: ForceCurve,
    lines: Sequence[TangentLine],
    x_max: float,
    tangent_points: Sequence[float],
) -> SpringDesign:
    """Assemble the spring set whose summed force is the envelope of `lines`."""
    n = len(lines)
    if n == 0:
        return SpringDesign((), (), (), float(x_max),
                            curve.integral(0.0, x_max), ())

    K = [t.stiffness for t in lines]
    for i in range(n - 1):
        if K[i] <= K[i + 1]:
            raise ShapeError(
                "tangent stiffnesses must strictly decrease; curve is not "
                f"strictly convex between x={lines[i].x} and x={lines[i + 1].x}")

    breaks = [break_point(lines[i], lines[i + 1]) for i in range(n - 1)]
    ends = breaks + [lines[-1].zero_crossing]
    if any(ends[i] >= ends[i + 1] for i in range(n - 1)) or ends[0] < -TOL:
        raise ShapeError("engagement ends are not increasing; envelope degenerate")

    springs = tuple(
        Spring(K[i] - (K[i + 1] if i + 1 < n else 0.0), ends[i]) for i in range(n)
    )
    clamped = ends[-1] > x_max
    residual = lines[-1].value_at(x_max) if clamped else 0.0
    cam_depths = tuple(min(e, x_max) for e in ends)
    de = curve.integral(0.0, x_max) - _spring_work(springs, x_max)
    return SpringDesign(
        springs=springs,
        break_points=tuple(breaks),
        cam_depths=cam_depths,
        x_max=float(x_max),
        delta_e=max(de, 0.0) if de > -1e-12 else de,
        tangent_points=tuple(float(x) for x in tangent_points),
        clamped=clamped,
        residual_force=float(residual),
    )


def build_design(
    curve: ForceCurve,
    tangent_points: Sequence[float],
    x_max: float,
) -> SpringDesign:
    """Spring set from tangent lines at the given points over stroke [0, x_max].

    N tangent points produce exactly N springs and N-1 interior break points.
    """
    if not (x_max > 0 and math.isfinite(x_max)):
        raise ValueError(f"x_max must be positive and finite, got {x_max}")
    pts = [float(x) for x in tangent_points]
    if any(not (0.0 <= x < x_max) for x in pts):
        raise ValueError(f"tangent points must lie in [0, x_max={x_max})")
    if any(pts[i] >= pts[i + 1] for i in range(len(pts) - 1)):
        raise ValueError("tangent points must be strictly increasing")
    _check_convex_decreasing(curve, x_max)
    lines = [tangent_at(curve, x) for x in pts]
    return _design_from_lines(curve, lines, x_max, pts)


def spring_force(design: SpringDesign, x):
    """Summed spring force S(x) = sum_j k_j * max(0, e_j - x)."""
    if not design.springs:
        return 0.0 if np.ndim(x) == 0 else np.zeros(np.shape(x))
    k = np.array([s.stiffness for s in design.springs])
    e = np.array([s.engagement_end for s in design.springs])
    xs = np.asarray(x, dtype=float)
    total = k @ np.maximum(e[:, None] - xs.ravel()[None, :], 0.0)
    return float(total[0]) if np.ndim(x) == 0 else total.reshape(xs.shape)


def _spring_work(springs: Sequence[Spring], upper: float) -> float:
    """Exact integral of S over [0, upper]: each hinge term integrates to
    (e^2 - max(e - upper, 0)^2) / 2."""
    return sum(
        s.stiffness * (s.engagement_end ** 2 - max(s.engagement_end - upper, 0.0) ** 2) / 2.0
        for s in springs
    )


def delta_e(curve: ForceCurve, design: SpringDesign, x_max: float) -> float:
    """Energy loss dE = integral of (F - S) over [0, x_max], closed form.

    ShapeError if the spring characteristic crosses above the curve by more
    than 1e-9 N anywhere on a dense grid (the envelope must under-approximate).
    """
    xs = np.linspace(0.0, x_max, 2001)
    residual = np.asarray(curve.force(xs)) - np.asarray(spring_force(design, xs))
    worst = residual.min()
    if worst < -TOL:
        raise ShapeError(f"spring characteristic exceeds the curve by {-worst:.3e} N")
    de = curve.integral(0.0, x_max) - _spring_work(design.springs, x_max)
    return max(de, 0.0) if de > -1e-12 else de


# ---------------------------------------------------------------------------
# Tangent-point optimization
# ---------------------------------------------------------------------------

def _scalar_eval(curve: ForceCurve):
    """Fast scalar (force, slope) callables for the optimizer hot loop."""
    if isinstance(curve, PowerLawCurve):
        A, c, p = curve.amplitude, curve.offset, curve.exponent

        def force(x: float) -> float:
            return A / (x + c) ** p

        def slope(x: float) -> float:
            return -p * A / (x + c) ** (p + 1.0)
    else:
        pchip, deriv = curve._pchip, curve._pchip_deriv

        def force(x: float) -> float:
            return float(pchip(x))

        def slope(x: float) -> float:
            return float(deriv(x))

    return force, slope


def _make_objective(curve: ForceCurve, x_max: float, curve_work: float):
    """dE as a pure-float function of the tangent points.

    Returns +inf where the construction degenerates (non-negative slope or
    non-decreasing stiffness ordering), which steers the search back inside
    the feasible region.
    """
    force, slope = _scalar_eval(curve)

    def objective(pts: Sequence[float]) -> float:
        F = [force(x) for x in pts]
        K = []
        for x in pts:
            s = slope(x)
            if s >= 0:
                return math.inf
            K.append(-s)
        n = len(pts)
        work = 0.0
        for i in range(n):
            if i + 1 < n:
                dk = K[i + 1] - K[i]
                if dk >= 0:
                    return math.inf
                e = (K[i + 1] * pts[i + 1] - K[i] * pts[i] + F[i + 1] - F[i]) / dk
                k = K[i] - K[i + 1]
            else:
                e = pts[i] + F[i] / K[i]
                k = K[i]
            work += k * (e * e - max(e - x_max, 0.0) ** 2) / 2.0
        return curve_work - work

    return objective


def _golden_section(f: Callable[[float], float], lo: float, hi: float,
                    tol: float) -> tuple[float, float]:
    """Deterministic golden-section minimization on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _coordinate_descent(objective, pts, x_max, gap, max_sweeps=60):
    """Golden-section line search per coordinate; never accepts a worse point."""
    pts = list(pts)
    n = len(pts)
    hi_edge = x_max * (1.0 - 1e-12)
    best = objective(pts)
    for _ in range(max_sweeps):
        before = best
        for i in range(n):
            lo = pts[i - 1] + gap if i > 0 else 0.0
            hi = pts[i + 1] - gap if i + 1 < n else hi_edge
            if hi <= lo:
                continue

            def f(x, i=i):
                return objective(pts[:i] + [x] + pts[i + 1:])

            x_new, f_new = _golden_section(f, lo, hi, tol=1e-7 * x_max)
            if f_new < best:
                pts[i], best = x_new, f_new
        if before - best < 1e-10:
            break
    return pts, best


def _spread_start(pts: Sequence[float], x_max: float, gap: float) -> list[float]:
    """Sort and nudge a candidate start so points are separated and in range."""
    out = sorted(float(x) for x in pts)
    for i in range(1, len(out)):
        out[i] = max(out[i], out[i - 1] + gap)
    hi = x_max * (1.0 - 1e-9)
    for i in range(len(out) - 1, -1, -1):
        out[i] = min(out[i], hi - (len(out) - 1 - i) * gap)
    return out


def optimize_tangent_points(
    curve: ForceCurve,
    n: int,
    x_max: float,
    seed: int = 0,
) -> SpringDesign:
    """Minimize dE over placements of n tangent points on [0, x_max).

    Deterministic multistart coordinate search: an equispaced start, 10 starts
    drawn from a seeded RNG, and (for n > 1) a warm start that inserts one
    point into the optimum for n - 1, which guarantees dE never increases with
    n. Ties within 1e-12 N·mm resolve to the lexicographically smallest
    tangent-point vector.
    """
    if n < 1:
        raise ValueError(f"need at least one tangent point, got n={n}")
    _check_convex_decreasing(curve, x_max)
    objective = _make_objective(curve, x_max, curve.integral(0.0, x_max))
    gap = 1e-7 * x_max

    starts: list[list[float]] = []
    starts.append([x_max * (i + 1) / (n + 1) for i in range(n)])
    if n > 1:
        prev = optimize_tangent_points(curve, n - 1, x_max, seed).tangent_points
        anchors = [0.0, *prev, x_max * (1.0 - 1e-9)]
        candidates = [(anchors[i] + anchors[i + 1]) / 2.0 for i in range(len(anchors) - 1)]
        ins = min(
            (_spread_start([*prev, c], x_max, gap) for c in candidates),
            key=objective,
        )
        starts.append(ins)
    rng = np.random.default_rng(seed)
    for _ in range(10):
        starts.append(_spread_start(rng.uniform(0.0, x_max * 0.98, n), x_max, gap))

    results = []
    for s in starts:
        pts, val = _coordinate_descent(objective, s, x_max, gap)
        results.append((val, tuple(pts)))
    best_val = min(v for v, _ in results)
    best_pts = min(p for v, p in results if v <= best_val + 1e-12)
    return build_design(curve, best_pts, x_max)


# ---------------------------------------------------------------------------
# Catalog snapping
# ---------------------------------------------------------------------------

def _tangent_with_stiffness(curve: ForceCurve, K: float, x_max: float) -> TangentLine:
    """Line of slope -K kept on or below the curve over [0, x_max].

    Tangency point solves |F'(X)| = K; when K falls outside the curve's slope
    range the line is anchored at the nearer stroke boundary, where it is
    secant-free: steeper lines through (0, F(0)) and shallower lines through
    (x_max, F(x_max)) stay below a convex decreasing curve.
    """
    k_at_0 = -curve.slope(0.0)
    k_at_end = -curve.slope(x_max)
    if K >= k_at_0:
        x_t = 0.0
    elif K <= k_at_end:
        x_t = x_max
    elif isinstance(curve, PowerLawCurve):
        p, A = curve.exponent, curve.amplitude
        x_t = (p * A / K) ** (1.0 / (p + 1.0)) - curve.offset
        x_t = min(max(x_t, 0.0), x_max)
    else:
        x_t = brentq(lambda x: -curve.slope(x) - K, 0.0, x_max, xtol=1e-13)
    return TangentLine(float(x_t), float(curve.force(x_t)), float(K))


def snap_to_catalog(
    design: SpringDesign,
    catalog: SpringCatalog,
    curve: ForceCurve,
) -> SpringDesign:
    """Replace each stiffness by its nearest catalog value and re-solve.

    Engagement ends are re-derived so every segment's line is again tangent to
    (or boundary-anchored below) the curve, keeping S <= F. The re-solved
    design's dE is recomputed and can only be >= the pre-snap optimum.
    """
    if not catalog.stiffnesses:
        raise CatalogError("catalog is empty")
    if not design.springs:
        raise CatalogError("design has no springs to snap")

    snapped = [
        min(catalog.stiffnesses, key=lambda c, k=s.stiffness: (abs(c - k), c))
        for s in design.springs
    ]
    x_max = design.x_max
    n = len(snapped)
    cum = [sum(snapped[i:]) for i in range(n)]  # K_i = sum of k_j, j >= i
    lines = [_tangent_with_stiffness(curve, K, x_max) for K in cum]
    try:
        result = _design_from_lines(curve, lines, x_max, [t.x for t in lines])
    except ShapeError as exc:
        raise CatalogError(f"catalog stiffnesses admit no feasible envelope: {exc}") from exc

    xs = np.linspace(0.0, x_max, 2001)
    worst = float(np.min(np.asarray(curve.force(xs)) - np.asarray(spring_force(result, xs))))
    if worst < -1e-6:
        raise CatalogError(f"snapped design exceeds the curve by {-worst:.3e} N")
    if worst < -TOL:
        result = dataclasses.replace(result, residual_negative=True)
    return result


def write_design_csv(design: SpringDesign, path: str | Path) -> None:
    """Design report: one row per spring plus a dE summary line."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["spring_index", "k_N_per_mm", "engagement_end_mm", "cam_depth_mm"])
        for i, (s, depth) in enumerate(zip(design.springs, design.cam_depths), start=1):
            writer.writerow([i, f"{s.stiffness:.12g}", f"{s.engagement_end:.12g}", f"{depth:.12g}"])
        writer.writerow(["delta_e_Nmm", f"{design.delta_e:.12g}"])
