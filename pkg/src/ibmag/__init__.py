"""Toolkit for internally-balanced magnetic units.

Fit magnet force-displacement curves, synthesize the multi-linear-spring
compensator by energy-loss-minimizing tangent construction, model the
magnetic-spring balancing with its measured imperfection, and simulate
pull-test and clamp-amplification scenarios.
"""

from .errors import (
    CatalogError,
    ConfigError,
    DomainError,
    EmptyProfile,
    FitError,
    IbmagError,
    ModeError,
    ShapeError,
)
from .force_curve import (
    ForceCurve,
    PowerLawCurve,
    SampledCurve,
    curve_from_dict,
    curve_to_dict,
    eval_force,
    eval_slope,
    fit_power_law,
    read_samples_csv,
    work_integral,
)
from .spring_synthesis import (
    Spring,
    SpringCatalog,
    SpringDesign,
    TangentLine,
    break_point,
    build_design,
    delta_e,
    optimize_tangent_points,
    snap_to_catalog,
    spring_force,
    tangent_at,
    write_design_csv,
)
from .magnetic_spring import (
    REFERENCE_REDUCTION_RATIOS,
    BalanceProfile,
    MagneticSpringPair,
    deviation_profile,
    internal_force,
    peak_control_force,
    reduction_ratio,
    write_balance_csv,
)
from .unit_sim import (
    PullTestProfile,
    UnitConfig,
    detach_summary,
    simulate_pull,
    write_profile_csv,
)
from .clamp import (
    ClampScenario,
    Converter,
    amplification_ratio,
    clamp_force,
    converter_internal_force,
    read_scenario,
)
from .fixtures import (
    available_fixtures,
    load_fixture,
    load_pair,
    load_unit_config,
    resolve_fixture,
)

__version__ = "0.1.0"
