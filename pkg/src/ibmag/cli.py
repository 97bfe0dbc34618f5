"""Command-line front end: fit, synth, balance, pulltest, clamp.

CSV outputs are the contract and are byte-deterministic for fixed inputs and
seed; SVG plots are presentational extras behind --plot. Exit codes: 0
success, 1 internal error, 2 user-input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .clamp import amplification_ratio, clamp_force, read_scenario
from .errors import IbmagError
from .force_curve import (
    curve_from_dict,
    curve_to_dict,
    eval_force,
    fit_power_law,
    read_samples_csv,
)
from .magnetic_spring import (
    REFERENCE_REDUCTION_RATIOS,
    deviation_profile,
    write_balance_csv,
)
from .spring_synthesis import (
    SpringCatalog,
    optimize_tangent_points,
    snap_to_catalog,
    spring_force,
    write_design_csv,
)
from .unit_sim import detach_summary, simulate_pull, write_profile_csv

__all__ = ["main"]


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_curve_file(path: str | Path):
    with Path(path).open(encoding="utf-8") as fh:
        return curve_from_dict(json.load(fh))


def _read_catalog(path: str | Path) -> SpringCatalog:
    values = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            values.extend(float(tok) for tok in line.replace(",", " ").split())
    return SpringCatalog(values)


def _savefig(fig, path: Path) -> None:
    fig.savefig(path, format="svg")
    print(f"plot: {path}")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_fit(args) -> int:
    samples = read_samples_csv(args.samples)
    curve = fit_power_law(samples, p_fixed=args.p_fixed)
    residuals = [f - eval_force(curve, x) for x, f in samples]

    out = _out_dir(args)
    curve_path = out / f"{Path(args.samples).stem}_curve.json"
    with curve_path.open("w", encoding="utf-8") as fh:
        json.dump(curve_to_dict(curve), fh, indent=2)
        fh.write("\n")

    print("fitted: F(x) = A / (x + c)^p")
    print(f"  amplitude A [N·mm^p]: {curve.amplitude:.12g}")
    print(f"  offset c [mm]:        {curve.offset:.12g}")
    print(f"  exponent p:           {curve.exponent:.12g}")
    print(f"residuals [N]: max |r| = {max(abs(r) for r in residuals):.3e}")
    for (x, _), r in zip(samples, residuals):
        print(f"  x = {x:g} mm: r = {r:.3e}")
    print(f"curve file: {curve_path}")

    if args.plot:
        plt = _pyplot()
        xs = np.linspace(0.0, max(x for x, _ in samples), 300)
        fig, ax = plt.subplots()
        ax.plot(xs, eval_force(curve, xs), label="fit")
        ax.plot(*zip(*samples), "o", label="samples")
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("force [N]")
        ax.legend()
        _savefig(fig, out / "fit.svg")
    return 0


def cmd_synth(args) -> int:
    if args.n < 1:
        raise ValueError(f"--n must be >= 1, got {args.n}")
    curve = _load_curve_file(args.curve)
    design = optimize_tangent_points(curve, args.n, args.x_max, seed=args.seed)
    out = _out_dir(args)

    print(f"optimized {args.n}-spring design over [0, {args.x_max:g}] mm")
    print(f"  tangent points [mm]: {', '.join(f'{x:.6g}' for x in design.tangent_points)}")
    print(f"  delta_e [N·mm]: {design.delta_e:.12g}")
    if design.clamped:
        print(f"  last spring held to stroke end; residual step force {design.residual_force:.6g} N")

    final = design
    if args.catalog:
        catalog = _read_catalog(args.catalog)
        final = snap_to_catalog(design, catalog, curve)
        print(f"snapped to catalog {args.catalog}")
        print(f"  k [N/mm]: {', '.join(f'{s.stiffness:g}' for s in final.springs)}")
        print(f"  delta_e before snap [N·mm]: {design.delta_e:.12g}")
        print(f"  delta_e after snap  [N·mm]: {final.delta_e:.12g}")
        snapped_path = out / "design_snapped.csv"
        write_design_csv(final, snapped_path)
        print(f"snapped design file: {snapped_path}")

    design_path = out / "design.csv"
    write_design_csv(design, design_path)
    print(f"design file: {design_path}")

    if args.plot:
        plt = _pyplot()
        xs = np.linspace(0.0, args.x_max, 500)
        fig, ax = plt.subplots()
        ax.plot(xs, eval_force(curve, xs), label="magnet curve")
        ax.plot(xs, spring_force(design, xs), label="spring sum S(x)")
        if final is not design:
            ax.plot(xs, spring_force(final, xs), "--", label="snapped S(x)")
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("force [N]")
        ax.legend()
        _savefig(fig, out / "synth.svg")
    return 0


def cmd_balance(args) -> int:
    pair = fixtures.load_pair(args.fixture)
    profile = deviation_profile(pair, args.grid)
    out = _out_dir(args)
    csv_path = out / "balance.csv"
    write_balance_csv(profile, csv_path)

    print(f"balance sweep: {args.grid} points over [0, {pair.stroke:g}] mm")
    print(f"  peak |internal force| [N]: {profile.peak_deviation:.6g}")
    print(f"  at x [mm]: {profile.peak_position:.6g}")
    print(f"profile file: {csv_path}")

    if args.plot:
        plt = _pyplot()
        fig, ax = plt.subplots()
        ax.plot(profile.x, profile.internal_force)
        ax.axhline(0.0, color="k", lw=0.5)
        ax.set_xlabel("x [mm]")
        ax.set_ylabel("internal force [N]")
        _savefig(fig, out / "balance.svg")
    return 0


def cmd_pulltest(args) -> int:
    config = fixtures.load_unit_config(args.fixture)
    modes = ["frame", "rod"] if args.mode == "both" else [args.mode]
    out = _out_dir(args)

    profiles = {}
    for mode in modes:
        profile = simulate_pull(config, mode, sweep_end=args.sweep_end, step=args.step)
        profiles[mode] = profile
        csv_path = out / f"pulltest_{mode}.csv"
        write_profile_csv(profile, csv_path)
        peak_net, peak_pos, _ = detach_summary(profile)
        print(f"{mode} pull: peak net {peak_net:.6g} N at {peak_pos:.6g} mm, "
              f"plateau {profile.plateau:.6g} N")
        print(f"profile file: {csv_path}")

    if "frame" in profiles and "rod" in profiles:
        _, _, ratio = detach_summary(profiles["rod"], profiles["frame"])
        print(f"reduction ratio: {100.0 * ratio:.1f}% "
              f"(rod {profiles['rod'].peak_net:.6g} N / frame {profiles['frame'].peak_net:.6g} N)")
        for name, ref in REFERENCE_REDUCTION_RATIOS.items():
            print(f"reference {name.replace('_', ' ')}: {100.0 * ref:.1f}%")

    if args.plot:
        plt = _pyplot()
        fig, ax = plt.subplots()
        for mode, profile in profiles.items():
            ax.plot(profile.displacement, profile.force, label=f"{mode} pull")
        ax.set_xlabel("displacement [mm]")
        ax.set_ylabel("control force [N]")
        ax.legend()
        _savefig(fig, out / "pulltest.svg")
    return 0


def cmd_clamp(args) -> int:
    scenario = read_scenario(fixtures.resolve_fixture(args.scenario))
    kwargs = dict(mode=args.mode,
                  transmission_efficiency=args.efficiency,
                  contact_compliance=args.compliance)
    without = clamp_force(scenario, rod_engaged=False, **kwargs)
    with_ = clamp_force(scenario, rod_engaged=True, **kwargs)
    ratio = amplification_ratio(scenario)

    print(f"gravity bias [N]: {scenario.finger_weight_bias:.6g} (reported separately)")
    print(f"applied control force [N]: {scenario.control_force_applied:.6g}")
    print(f"net clamp force without reduction [N]: {without:.6g}")
    print(f"net clamp force with reduction [N]:    {with_:.6g}")
    print(f"amplification: {ratio:.1f}x ({ratio:.6g})")

    if args.plot:
        plt = _pyplot()
        fig, ax = plt.subplots()
        ax.bar(["without", "with"], [without, with_])
        ax.set_ylabel("net clamp force [N]")
        _savefig(fig, _out_dir(args) / "clamp.svg")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")
    common.add_argument("--seed", type=int, default=0, help="optimizer seed (default: 0)")

    parser = argparse.ArgumentParser(
        prog="ibmag",
        description="Design and analysis toolkit for internally-balanced magnetic units.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common],
                       help="fit a power-law curve to measured samples")
    p.add_argument("samples", help="CSV with header x_mm,force_N")
    p.add_argument("--p-fixed", type=float, default=None,
                   help="hold the exponent fixed (e.g. 2)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("synth", parents=[common],
                       help="synthesize the multi-spring compensator")
    p.add_argument("curve", help="curve JSON file (from `fit`)")
    p.add_argument("--n", type=int, required=True, help="number of springs")
    p.add_argument("--x-max", type=float, required=True, help="stroke [mm]")
    p.add_argument("--catalog", default=None,
                   help="file of available stiffnesses [N/mm] to snap to")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("balance", parents=[common],
                       help="sweep the internal-force balance of a unit")
    p.add_argument("fixture", help="built-in fixture name or fixture JSON path")
    p.add_argument("--grid", type=int, default=1001, help="sweep points (default: 1001)")
    p.set_defaults(func=cmd_balance)

    p = sub.add_parser("pulltest", parents=[common],
                       help="simulate the frame/rod pull test")
    p.add_argument("fixture", help="built-in fixture name or fixture JSON path")
    p.add_argument("--mode", choices=["frame", "rod", "both"], default="both")
    p.add_argument("--step", type=float, default=0.05, help="sweep step [mm]")
    p.add_argument("--sweep-end", type=float, default=None,
                   help="sweep end [mm] (default: twice the stroke)")
    p.set_defaults(func=cmd_pulltest)

    p = sub.add_parser("clamp", parents=[common],
                       help="evaluate a clamp-amplification scenario")
    p.add_argument("scenario", help="scenario .cfg path or built-in name")
    p.add_argument("--mode", choices=["replay", "model"], default="replay")
    p.add_argument("--efficiency", type=float, default=None,
                   help="transmission efficiency for model mode, disengaged")
    p.add_argument("--compliance", type=float, default=None,
                   help="contact compliance [N/mm] for model mode, engaged")
    p.set_defaults(func=cmd_clamp)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IbmagError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
