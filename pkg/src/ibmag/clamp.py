"""Clamp-amplification evaluation around the force-displacement converter.

A spring and an inverse-spring joined at a floating equilibrium point form a
converter: shifting the connection point with a small control force commands
a large force at either end. A balanced magnetic unit is such a converter,
with the attraction magnet acting as the inverse-spring and the control rod
as the equilibrium point. Embedding the unit in a clamp lets the magnet's
spontaneously growing attraction amplify the clamping force.

Two evaluation modes: `replay` returns the measured scenario values shipped
with the fixture; `model` predicts them from the applied control force and
the attraction curve, and requires the transmission/compliance parameters
explicitly because no measured values exist for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from scipy.optimize import brentq

from .errors import DomainError, ModeError
from .force_curve import ForceCurve
from .magnetic_spring import MagneticSpringPair
from .unit_sim import UnitConfig

__all__ = [
    "Converter",
    "ClampScenario",
    "converter_internal_force",
    "clamp_force",
    "amplification_ratio",
    "read_scenario",
    "SCENARIO_KEYS",
]

SCENARIO_KEYS = ("bias_N", "control_force_N", "net_without_N", "net_with_N", "interference_mm")


@dataclass(frozen=True)
class Converter:
    """Spring / inverse-spring pair with a floating equilibrium point."""

    forward: ForceCurve  # spring characteristic magnitude
    inverse: ForceCurve  # inverse-spring magnitude, ideally identical
    equilibrium_position: float = 0.0  # mm

    @classmethod
    def from_pair(cls, pair: MagneticSpringPair) -> "Converter":
        """View a balanced magnetic unit as a converter: the repulsion pair is
        the spring, the attraction magnet the inverse-spring."""
        return cls(forward=pair.repulsion, inverse=pair.attraction)


def converter_internal_force(conv: Converter, x):
    """Net force at the connection point: forward(x) - inverse(x)."""
    return conv.forward.force(x) - conv.inverse.force(x)


@dataclass(frozen=True)
class ClampScenario:
    """Geometry, gravity bias and force record of one clamp evaluation."""

    unit: UnitConfig
    finger_weight_bias: float  # N, constant offset from the active finger
    control_force_applied: float  # N
    measured_net_without: float  # N, bias subtracted, rod disengaged
    measured_net_with: float  # N, bias subtracted, rod engaged
    grasp_interference: float  # mm, object thickness beyond the free width

    def __post_init__(self):
        forces = (self.finger_weight_bias, self.control_force_applied,
                  self.measured_net_without, self.measured_net_with)
        if min(forces) < 0 or self.grasp_interference < 0:
            raise ValueError("scenario forces and interference must be >= 0")


def _engaged_model_force(scenario: ClampScenario, compliance: float) -> float:
    """Attraction at the gap the interference allows under linear compliance.

    The magnet closes its gap g until the pull F_m(g) balances the strain
    force compliance * (interference - g); if the pull wins everywhere the
    magnet adheres fully and the strain force limits the clamp.
    """
    attraction = scenario.unit.pair.attraction
    d0 = scenario.grasp_interference
    if d0 == 0.0:
        return 0.0
    if attraction.force(0.0) >= compliance * d0:
        return compliance * d0
    g = brentq(lambda q: attraction.force(q) - compliance * (d0 - q), 0.0, d0, xtol=1e-13)
    return compliance * (d0 - g)


def clamp_force(
    scenario: ClampScenario,
    rod_engaged: bool,
    mode: str = "replay",
    transmission_efficiency: float | None = None,
    contact_compliance: float | None = None,
) -> float:
    """Net clamping force (gravity bias always reported separately).

    replay: the scenario's measured values. model: disengaged transmits the
    applied control force scaled by `transmission_efficiency`; engaged uses
    the attraction at the interference gap under `contact_compliance` (N/mm).
    """
    if mode == "replay":
        return scenario.measured_net_with if rod_engaged else scenario.measured_net_without
    if mode != "model":
        raise ModeError(f"mode must be 'replay' or 'model', got {mode!r}")
    if rod_engaged:
        if contact_compliance is None:
            raise ModeError("model mode with the rod engaged needs contact_compliance [N/mm]")
        return _engaged_model_force(scenario, contact_compliance)
    if transmission_efficiency is None:
        raise ModeError("model mode needs transmission_efficiency (no measured value exists)")
    return scenario.control_force_applied * transmission_efficiency


def amplification_ratio(scenario: ClampScenario) -> float:
    """Net clamp force with the spontaneous reduction over the force without."""
    if scenario.measured_net_without <= 0:
        raise DomainError(
            f"net force without reduction must be > 0, got {scenario.measured_net_without}")
    return scenario.measured_net_with / scenario.measured_net_without


def read_scenario(path: str | Path, unit: UnitConfig | None = None) -> ClampScenario:
    """Parse a key-value scenario file (`key = value`, `#` comments).

    The unit defaults to the enlarged built-in prototype, the one sized for
    the clamp.
    """
    path = Path(path)
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = float(val.strip())
    missing = [k for k in SCENARIO_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing keys: {', '.join(missing)}")

    if unit is None:
        from .fixtures import load_unit_config
        unit = load_unit_config("prototype_large")
    return ClampScenario(
        unit=unit,
        finger_weight_bias=values["bias_N"],
        control_force_applied=values["control_force_N"],
        measured_net_without=values["net_without_N"],
        measured_net_with=values["net_with_N"],
        grasp_interference=values["interference_mm"],
    )
