"""Balancing by a paired magnetic spring.

A like-pole magnet pair (repulsion) mirrors the unlike-pole attraction pair;
with both gaps kept equal along the rod axis, the signed internal force on
the control rod is repulsion minus attraction and vanishes for identical
characteristics. Real pairs deviate because the two magnetic circuits differ
in shape, so the deviation is represented by two independently fitted curves
rather than an analytic correction term.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .force_curve import ForceCurve

__all__ = [
    "MagneticSpringPair",
    "BalanceProfile",
    "internal_force",
    "deviation_profile",
    "peak_control_force",
    "reduction_ratio",
    "write_balance_csv",
    "REFERENCE_REDUCTION_RATIOS",
]

# Published reduction ratios of conventional compensators, for report context:
# a six-kind coil-spring set and a ring-shaped rubber spring.
REFERENCE_REDUCTION_RATIOS = {
    "coil_springs_6_kinds": 0.118,
    "rubber_ring_spring": 0.154,
}

DEFAULT_SWEEP_GRID = 1001


@dataclass(frozen=True)
class MagneticSpringPair:
    """Attraction/repulsion characteristics sharing one gap coordinate.

    Both curves are positive magnitudes defined on [0, stroke]; the geometry
    contract is that at rod displacement x the attraction gap and repulsion
    gap are equal.
    """

    attraction: ForceCurve
    repulsion: ForceCurve
    stroke: float  # mm
    rod_weight: float = 0.0  # N
    unit_weight: float = 0.0  # N

    def __post_init__(self):
        if not self.stroke > 0:
            raise ValueError(f"stroke must be > 0, got {self.stroke}")
        if self.rod_weight < 0 or self.unit_weight < 0:
            raise ValueError("weights must be >= 0")
        for name, curve in (("attraction", self.attraction), ("repulsion", self.repulsion)):
            if curve.x_max < self.stroke:
                raise ValueError(f"{name} curve covers [0, {curve.x_max}], stroke is {self.stroke}")

    def swapped(self) -> "MagneticSpringPair":
        return MagneticSpringPair(self.repulsion, self.attraction, self.stroke,
                                  self.rod_weight, self.unit_weight)


@dataclass(frozen=True, eq=False)
class BalanceProfile:
    """Sweep of the signed internal force over the stroke."""

    x: np.ndarray
    internal_force: np.ndarray  # repulsion - attraction, + pushes rod outward
    deviation: np.ndarray  # |internal force|
    peak_deviation: float
    peak_position: float  # location of max |deviation|, first on ties


def internal_force(pair: MagneticSpringPair, x):
    """Signed net force on the rod at x: repulsion(x) - attraction(x)."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > pair.stroke):
        raise DomainError(f"x={x} outside stroke [0, {pair.stroke}]")
    return pair.repulsion.force(x) - pair.attraction.force(x)


def deviation_profile(pair: MagneticSpringPair, grid: int = DEFAULT_SWEEP_GRID) -> BalanceProfile:
    """Uniform sweep of internal_force over [0, stroke] with grid points."""
    if grid < 2:
        raise DomainError(f"grid must be >= 2, got {grid}")
    x = np.linspace(0.0, pair.stroke, int(grid))
    f = np.asarray(internal_force(pair, x), dtype=float)
    dev = np.abs(f)
    i_peak = int(np.argmax(dev))
    return BalanceProfile(x, f, dev, float(dev[i_peak]), float(x[i_peak]))


def peak_control_force(pair: MagneticSpringPair, bias: float = 0.0,
                       grid: int = DEFAULT_SWEEP_GRID) -> float:
    """Peak control force over the stroke: bias plus the grid maximum of
    |internal force|. The net value is the returned value minus the bias.

    The peak is taken on the sweep grid, no sub-grid refinement: that matches
    measurement resolution and makes the value reproducible.
    """
    if bias < 0:
        raise ValueError(f"bias must be >= 0, got {bias}")
    return bias + deviation_profile(pair, grid).peak_deviation


def reduction_ratio(rod_peak_net: float, frame_peak_net: float) -> float:
    """Rod-pull net peak divided by frame-pull net peak; the figure of merit."""
    if frame_peak_net <= 0:
        raise DomainError(f"frame peak must be > 0, got {frame_peak_net}")
    return rod_peak_net / frame_peak_net


def write_balance_csv(profile: BalanceProfile, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x_mm", "internal_force_N"])
        for x, f in zip(profile.x, profile.internal_force):
            writer.writerow([f"{x:.12g}", f"{f:.12g}"])
