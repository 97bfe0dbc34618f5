"""Force-displacement characteristics of magnets and springs.

Two representations share one evaluation interface: a parametric power-law
family F(x) = A / (x + c)^p for magnet adhesion curves, and a monotone
piecewise-cubic interpolant through measured samples. All curves store
positive force magnitudes; direction signs are applied by the consumers.
Units are fixed at mm and N.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import curve_fit

from .errors import DomainError, FitError

__all__ = [
    "PowerLawCurve",
    "SampledCurve",
    "ForceCurve",
    "eval_force",
    "eval_slope",
    "fit_power_law",
    "work_integral",
    "read_samples_csv",
    "curve_to_dict",
    "curve_from_dict",
]

SAMPLES_CSV_HEADER = ("x_mm", "force_N")


@dataclass(frozen=True)
class PowerLawCurve:
    """F(x) = amplitude / (x + offset)^exponent on x >= 0.

    Positive, strictly decreasing and strictly convex for amplitude > 0,
    offset > 0, exponent >= 1. The offset absorbs cover thickness and
    effective pole gap; it is fitted, never hardcoded.
    """

    amplitude: float  # N·mm^p
    offset: float  # mm
    exponent: float = 2.0

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")
        if not self.offset > 0:
            raise ValueError(f"offset must be > 0, got {self.offset}")
        if not self.exponent >= 1:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")

    @property
    def x_max(self) -> float:
        return math.inf

    def force(self, x):
        x = _check_domain(x, 0.0, math.inf)
        return self.amplitude / (x + self.offset) ** self.exponent

    def slope(self, x):
        x = _check_domain(x, 0.0, math.inf)
        return -self.exponent * self.amplitude / (x + self.offset) ** (self.exponent + 1.0)

    def integral(self, a: float, b: float) -> float:
        """Exact integral of F over [a, b] via the closed-form antiderivative."""
        _check_interval(a, b, self.x_max)
        A, c, p = self.amplitude, self.offset, self.exponent
        if p == 1.0:
            return A * math.log((b + c) / (a + c))
        return A / (p - 1.0) * ((a + c) ** (1.0 - p) - (b + c) ** (1.0 - p))


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Measured force samples with a monotone piecewise-cubic interpolant.

    PCHIP is used because it cannot overshoot: monotone input samples give a
    monotone interpolant, so a convex decreasing measurement is not ruined by
    oscillation. Convexity itself is checked by consumers, not enforced here.
    Queries outside the sampled range are domain errors.
    """

    x: np.ndarray
    f: np.ndarray

    def __init__(self, points: Sequence[tuple[float, float]]):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
            raise ValueError("need at least 3 (x, F) samples")
        x, f = pts[:, 0], pts[:, 1]
        if not np.all(np.diff(x) > 0):
            raise ValueError("sample x values must be strictly increasing")
        if np.any(f < 0):
            raise ValueError("force samples must be non-negative")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    @cached_property
    def _pchip(self) -> PchipInterpolator:
        return PchipInterpolator(self.x, self.f)

    @cached_property
    def _pchip_deriv(self) -> PchipInterpolator:
        return self._pchip.derivative()

    @property
    def x_min(self) -> float:
        return float(self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    def force(self, x):
        x = _check_domain(x, self.x_min, self.x_max)
        return _scalarize(self._pchip(x))

    def slope(self, x):
        x = _check_domain(x, self.x_min, self.x_max)
        return _scalarize(self._pchip_deriv(x))

    def integral(self, a: float, b: float) -> float:
        """Integral of the interpolant over [a, b].

        The piecewise-cubic antiderivative is exact, which more than meets the
        1e-9 relative accuracy required of this operation.
        """
        _check_interval(a, b, self.x_max, self.x_min)
        return float(self._pchip.integrate(a, b))


ForceCurve = Union[PowerLawCurve, SampledCurve]


def _check_domain(x, lo: float, hi: float):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < lo) or np.any(arr > hi):
        raise DomainError(f"x={x} outside evaluation domain [{lo}, {hi}]")
    return float(arr) if arr.ndim == 0 else arr


def _check_interval(a: float, b: float, hi: float, lo: float = 0.0):
    if not (lo <= a <= b <= hi):
        raise DomainError(f"interval [{a}, {b}] invalid or outside [{lo}, {hi}]")


def _scalarize(v):
    return float(v) if np.ndim(v) == 0 else v


def eval_force(curve: ForceCurve, x):
    """Force magnitude F(x) in N at displacement x in mm."""
    return curve.force(x)


def eval_slope(curve: ForceCurve, x):
    """dF/dx in N/mm at x; negative wherever the curve decreases."""
    return curve.slope(x)


def work_integral(curve: ForceCurve, a: float, b: float) -> float:
    """Work ∫F dx over [a, b] in N·mm; closed form for both curve kinds."""
    return curve.integral(a, b)


def _two_point_solve(x1: float, f1: float, x2: float, f2: float, p: float) -> tuple[float, float]:
    """Exact (A, c) through two samples at fixed exponent.

    From A/(x1+c)^p = F1 and A/(x2+c)^p = F2:
        r = (F1/F2)^(1/p),  c = (x2 - r*x1) / (r - 1),  A = F1 * (x1 + c)^p.
    Requires F1 > F2 for x1 < x2 (decreasing data), else c <= 0.
    """
    r = (f1 / f2) ** (1.0 / p)
    if r <= 1.0:
        raise FitError("samples are not strictly decreasing; no power-law curve fits")
    c = (x2 - r * x1) / (r - 1.0)
    if c <= 0:
        raise FitError(f"two-point solve produced non-positive offset c={c}")
    return f1 * (x1 + c) ** p, c


def fit_power_law(
    samples: Sequence[tuple[float, float]],
    p_fixed: float | None = None,
) -> PowerLawCurve:
    """Least-squares fit of a PowerLawCurve to (x, F) samples.

    With exactly two samples and a fixed exponent the unique interpolating
    curve is returned in closed form. Otherwise scipy's bounded least squares
    refines (A, c) and, when `p_fixed` is None, the exponent as well, starting
    from the two-point solve through the first and last samples. Free
    exponents are constrained to [1, 8]: the family models inverse-power
    magnet decay, and beyond that range the fit rides an ill-conditioned
    ridge toward an exponential limit (A and c diverge together).
    """
    pts = sorted((float(x), float(f)) for x, f in samples)
    if len(pts) < 2:
        raise FitError("need at least 2 samples")
    xs = np.array([x for x, _ in pts])
    fs = np.array([f for _, f in pts])
    if np.any(np.diff(xs) <= 0):
        raise FitError("sample x values must be distinct")
    if np.any(fs <= 0) or np.any(xs < 0):
        raise FitError("samples must have x >= 0 and F > 0")

    if p_fixed is not None and not p_fixed >= 1:
        raise FitError(f"exponent must be >= 1, got {p_fixed}")

    if len(pts) == 2 and p_fixed is not None:
        A, c = _two_point_solve(xs[0], fs[0], xs[1], fs[1], p_fixed)
        return PowerLawCurve(float(A), float(c), float(p_fixed))

    p0 = p_fixed if p_fixed is not None else 2.0
    try:
        A0, c0 = _two_point_solve(xs[0], fs[0], xs[-1], fs[-1], p0)
    except FitError:
        A0, c0 = float(fs[0]), 1.0

    tiny = 1e-12
    p_cap = 8.0
    try:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if p_fixed is not None:
                popt, _ = curve_fit(
                    lambda x, A, c: A / (x + c) ** p_fixed,
                    xs, fs, p0=[A0, c0],
                    bounds=([tiny, tiny], [np.inf, np.inf]),
                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=10000,
                )
                A, c, p = popt[0], popt[1], p_fixed
            else:
                popt, _ = curve_fit(
                    lambda x, A, c, p: A / (x + c) ** p,
                    xs, fs, p0=[A0, c0, min(p0, p_cap)],
                    bounds=([tiny, tiny, 1.0], [np.inf, np.inf, p_cap]),
                    xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=10000,
                )
                A, c, p = popt
    except RuntimeError as exc:
        raise FitError(f"least-squares fit did not converge: {exc}") from exc

    if c <= 0:
        raise FitError(f"fit produced non-positive offset c={c}")
    return PowerLawCurve(float(A), float(c), float(p))


def read_samples_csv(path: str | Path) -> list[tuple[float, float]]:
    """Read measurement samples from a CSV with header `x_mm,force_N`."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != SAMPLES_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(SAMPLES_CSV_HEADER)}")
        samples = []
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            samples.append((float(row[0]), float(row[1])))
    return samples


def curve_to_dict(curve: ForceCurve) -> dict:
    """Tagged JSON-ready representation of a curve."""
    if isinstance(curve, PowerLawCurve):
        return {
            "type": "power_law",
            "amplitude": curve.amplitude,
            "offset": curve.offset,
            "exponent": curve.exponent,
        }
    return {"type": "sampled", "points": [[float(x), float(f)] for x, f in zip(curve.x, curve.f)]}


def curve_from_dict(d: dict) -> ForceCurve:
    """Inverse of curve_to_dict."""
    kind = d.get("type")
    if kind == "power_law":
        return PowerLawCurve(d["amplitude"], d["offset"], d.get("exponent", 2.0))
    if kind == "sampled":
        return SampledCurve([(p[0], p[1]) for p in d["points"]])
    raise ValueError(f"unknown curve type {kind!r}")
