"""Quasi-static pull-test simulation.

A testing machine sweeps a crosshead displacement and records the control
force needed to detach the unit from the target, either by pulling the frame
or by pulling the control rod. Inertia plays no role at the measurement
rates used, so the pull rate is metadata only.

Frame pull: the hook must overcome the full attraction at zero gap plus the
suspended weight, then the force decays along the attraction curve toward
the weight plateau.

Rod pull: while the rod travels its stroke the hook carries only the rod and
jig against the (ideally zero) internal force. At the stroke end the rod
contacts the frame; the model switches instantly to frame-pull behavior at
the already-opened gap, producing the characteristic single rising edge.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmptyProfile
from .magnetic_spring import MagneticSpringPair, internal_force, reduction_ratio

__all__ = [
    "UnitConfig",
    "PullTestProfile",
    "simulate_pull",
    "detach_summary",
    "write_profile_csv",
]


@dataclass(frozen=True)
class UnitConfig:
    """One balanced unit plus the weights a pull test suspends."""

    pair: MagneticSpringPair
    frame_weight: float = 0.0  # N
    rod_weight: float = 0.0  # N
    jig_weight: float = 0.0  # N
    stroke: float | None = None  # mm, defaults to the pair's stroke

    def __post_init__(self):
        if self.stroke is None:
            object.__setattr__(self, "stroke", self.pair.stroke)
        if min(self.frame_weight, self.rod_weight, self.jig_weight) < 0:
            raise ConfigError("weights must be >= 0")
        if not 0 < self.stroke <= self.pair.stroke:
            raise ConfigError(
                f"stroke {self.stroke} outside the pair's curve domain (0, {self.pair.stroke}]")

    @property
    def total_weight(self) -> float:
        return self.frame_weight + self.rod_weight + self.jig_weight

    @property
    def rod_carry(self) -> float:
        """Weight on the hook while only the rod moves."""
        return self.rod_weight + self.jig_weight


@dataclass(frozen=True, eq=False)
class PullTestProfile:
    """Displacement sweep of hook force; `carried` is the suspended weight at
    each sample so net values derive exactly."""

    mode: str  # "frame" | "rod"
    displacement: np.ndarray  # mm
    force: np.ndarray  # N
    carried: np.ndarray  # N

    @cached_property
    def peak_net(self) -> float:
        return float(np.max(self.force - self.carried))

    @cached_property
    def peak_position(self) -> float:
        return float(self.displacement[int(np.argmax(self.force - self.carried))])

    @property
    def plateau(self) -> float:
        """Force after full detach: everything hangs on the hook."""
        return float(self.carried[-1])


def _sweep_grid(stroke: float, sweep_end: float, step: float) -> np.ndarray:
    n = int(np.ceil(sweep_end / step - 1e-12))
    u = np.arange(n + 1) * step
    if u[-1] < sweep_end:
        u = np.append(u, sweep_end)
    # the contact edge must be sampled at exactly the stroke value
    near = np.flatnonzero(np.isclose(u, stroke, rtol=0.0, atol=1e-9))
    if near.size:
        u[near[0]] = stroke
    else:
        u = np.sort(np.append(u, stroke))
    return u


def simulate_pull(
    config: UnitConfig,
    mode: str,
    sweep_end: float | None = None,
    step: float = 0.05,
    lead_in: float = 0.0,
) -> PullTestProfile:
    """Sweep the crosshead from 0 to sweep_end (default twice the stroke).

    `lead_in` models hook slack before engagement as a leading segment at jig
    weight; it shifts the profile, default off.
    """
    if mode not in ("frame", "rod"):
        raise ValueError(f"mode must be 'frame' or 'rod', got {mode!r}")
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    stroke = config.stroke
    if sweep_end is None:
        sweep_end = 2.0 * stroke
    if sweep_end < stroke:
        raise ConfigError(f"sweep_end {sweep_end} shorter than the stroke {stroke}")
    attraction = config.pair.attraction
    if attraction.x_max < sweep_end:
        raise ConfigError(
            f"attraction curve covers [0, {attraction.x_max}]; sweep needs {sweep_end}")

    u = _sweep_grid(stroke, sweep_end, step)
    total = config.total_weight

    if mode == "frame":
        force = total + np.asarray(attraction.force(u), dtype=float)
        carried = np.full_like(u, total)
    else:
        pre = u < stroke
        force = np.empty_like(u)
        carried = np.empty_like(u)
        # hook tension cannot go negative: slack instead of pushing
        f_inter = np.asarray(internal_force(config.pair, u[pre]), dtype=float)
        force[pre] = np.maximum(0.0, config.rod_carry - f_inter)
        carried[pre] = config.rod_carry
        force[~pre] = total + np.asarray(attraction.force(u[~pre]), dtype=float)
        carried[~pre] = total

    if lead_in > 0:
        n_lead = max(int(np.ceil(lead_in / step)), 1)
        u_lead = np.arange(n_lead) * (lead_in / n_lead)
        u = np.concatenate([u_lead, u + lead_in])
        force = np.concatenate([np.full(n_lead, config.jig_weight), force])
        carried = np.concatenate([np.full(n_lead, config.jig_weight), carried])

    return PullTestProfile(mode=mode, displacement=u, force=force, carried=carried)


def detach_summary(
    profile: PullTestProfile,
    reference: PullTestProfile | None = None,
) -> tuple[float, float, float | None]:
    """(net peak, its position, reduction ratio vs a frame-pull reference)."""
    if profile.displacement.size == 0:
        raise EmptyProfile("profile has no samples")
    ratio = None
    if reference is not None:
        ratio = reduction_ratio(profile.peak_net, reference.peak_net)
    return profile.peak_net, profile.peak_position, ratio


def write_profile_csv(profile: PullTestProfile, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["displacement_mm", "force_N"])
        for x, f in zip(profile.displacement, profile.force):
            writer.writerow([f"{x:.12g}", f"{f:.12g}"])
