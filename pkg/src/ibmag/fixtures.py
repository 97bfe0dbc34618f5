"""Built-in prototype fixtures and fixture-file loading.

Two calibrated units ship with the package: `prototype_small` (18/12/3 mm
ring magnets, 7.5 mm stroke) and `prototype_large` (54/38/5 mm, 20 mm
stroke). Loaders accept either a built-in name or a path to a JSON file with
the same schema.
"""

from __future__ import annotations

import json
from pathlib import Path

from .force_curve import curve_from_dict
from .magnetic_spring import MagneticSpringPair
from .unit_sim import UnitConfig

__all__ = [
    "FIXTURE_DIR",
    "available_fixtures",
    "resolve_fixture",
    "load_fixture",
    "load_pair",
    "load_unit_config",
]

FIXTURE_DIR = Path(__file__).parent / "fixtures"


def available_fixtures() -> list[str]:
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.json"))


def resolve_fixture(name_or_path: str | Path) -> Path:
    """Resolve a built-in fixture name or an explicit file path."""
    p = Path(name_or_path)
    if p.exists():
        return p
    for candidate in (FIXTURE_DIR / p.name, FIXTURE_DIR / f"{p.name}.json"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError(
        f"no fixture {name_or_path!r}; built-ins: {', '.join(available_fixtures())}")


def load_fixture(name_or_path: str | Path) -> dict:
    with resolve_fixture(name_or_path).open(encoding="utf-8") as fh:
        return json.load(fh)


def load_pair(name_or_path: str | Path) -> MagneticSpringPair:
    d = load_fixture(name_or_path)
    w = d.get("weights_N", {})
    return MagneticSpringPair(
        attraction=curve_from_dict(d["attraction"]),
        repulsion=curve_from_dict(d["repulsion"]),
        stroke=float(d["stroke_mm"]),
        rod_weight=float(w.get("rod", 0.0)),
        unit_weight=float(w.get("unit", 0.0)),
    )


def load_unit_config(name_or_path: str | Path) -> UnitConfig:
    d = load_fixture(name_or_path)
    w = d.get("weights_N", {})
    return UnitConfig(
        pair=load_pair(name_or_path),
        frame_weight=float(w.get("frame", 0.0)),
        rod_weight=float(w.get("rod", 0.0)),
        jig_weight=float(w.get("jig", 0.0)),
        stroke=float(d["stroke_mm"]),
    )
