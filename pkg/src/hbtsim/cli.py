"""Command-line interface.

Subcommands: ``simulate`` (one experiment, correlation CSV + summary line),
``sweep`` (1D/2D parameter grids, grid CSV plus contour CSV for 2D),
``theory`` (closed-form values), and ``contour`` (re-extract a level contour
from an existing grid CSV).

Option precedence: command-line flag, then ``--config`` file entry, then
environment (``HBTSIM_SEED``, ``HBTSIM_JOBS``), then built-in default.  All
outputs are deterministic given the full flag set, including ``--seed``.

Exit codes: 0 success, 2 invalid usage or parameters, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .correlator import DEFAULT_SIDEBANDS, LagWindow, g2_curve, write_correlation_csv
from .errors import HbtSimError, InvalidParameterError
from .model import DEFAULT_PULSES, SimParams, analytic_g2_zero, fock_g2
from .streams import generate_streams, write_streams_csv
from .sweep import (
    DEFAULT_CONTOUR_LEVEL,
    DEFAULT_REPLICATES,
    AxisSpec,
    extract_contour,
    fill_grid_analytic,
    read_grid_csv,
    run_sweep,
    write_contour_csv,
    write_grid_csv,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

_DEFAULTS = {
    "sigma": 0.0,
    "xi": 0.0,
    "chi": 0.0,
    "efficiency": 1.0,
    "pulses": DEFAULT_PULSES,
    "sidebands": DEFAULT_SIDEBANDS,
    "replicates": DEFAULT_REPLICATES,
    "level": DEFAULT_CONTOUR_LEVEL,
    "seed": 0,
    "jobs": 1,
}


def parse_axis(text: str) -> AxisSpec:
    """Parse an axis flag of the form ``name=start:stop:steps``."""
    name, eq, rest = text.partition("=")
    parts = rest.split(":")
    if not eq or len(parts) != 3:
        raise InvalidParameterError(
            f"axis must look like name=start:stop:steps, got {text!r}"
        )
    try:
        start, stop = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError as exc:
        raise InvalidParameterError(f"malformed axis {text!r}: {exc}") from None
    return AxisSpec(name.strip(), start, stop, steps)


def _read_config(path: str) -> dict[str, object]:
    """Parse a plain ``key=value`` config file; repeated ``axis`` keys stack."""
    values: dict[str, object] = {}
    axes: list[str] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise InvalidParameterError(
                f"{path}:{lineno}: expected key=value, got {raw!r}"
            )
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "axis":
            axes.append(value)
        else:
            values[key] = value
    if axes:
        values["axis"] = axes
    return values


_CONVERTERS = {
    "sigma": float,
    "xi": float,
    "chi": float,
    "efficiency": float,
    "level": float,
    "pulses": int,
    "sidebands": int,
    "replicates": int,
    "seed": int,
    "jobs": int,
    "fock": int,
    "analytic": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
}


def _resolve(args: argparse.Namespace, names: list[str]) -> None:
    """Fill unset options from config file, environment, then defaults."""
    config = _read_config(args.config) if getattr(args, "config", None) else {}
    env = {"seed": os.environ.get("HBTSIM_SEED"), "jobs": os.environ.get("HBTSIM_JOBS")}
    for name in names:
        if getattr(args, name, None) is not None:
            continue
        convert = _CONVERTERS.get(name, str)
        if name in config:
            raw = config[name]
            setattr(args, name, [parse_axis(a) for a in raw] if name == "axis" else convert(raw))
        elif env.get(name) is not None:
            setattr(args, name, convert(env[name]))
        elif name in _DEFAULTS:
            setattr(args, name, _DEFAULTS[name])


def _sim_params(args: argparse.Namespace) -> SimParams:
    return SimParams(
        sigma=args.sigma,
        xi=args.xi,
        chi=args.chi,
        quantum_efficiency=args.efficiency,
        pulses=args.pulses,
    )


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", type=float, help="noise factor, >= 0 (default 0)")
    parser.add_argument(
        "--xi", type=float, help="signal-split asymmetry in (-1/2, 1/2) (default 0)"
    )
    parser.add_argument(
        "--chi", type=float, help="background-split asymmetry in [-1/2, 1/2] (default 0)"
    )
    parser.add_argument(
        "--efficiency", type=float, help="detection efficiency in (0, 1] (default 1)"
    )
    parser.add_argument(
        "--pulses", type=int, help=f"pulse periods (default {DEFAULT_PULSES})"
    )
    parser.add_argument(
        "--sidebands",
        type=int,
        help=f"sideband periods per side for normalization (default {DEFAULT_SIDEBANDS})",
    )


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="master seed (default 0 or $HBTSIM_SEED)")
    parser.add_argument("--config", help="key=value config file; flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hbtsim",
        description="Simulate single-photon-emitter coincidence measurements "
        "with noisy, asymmetric detectors.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sim = sub.add_parser("simulate", help="run one experiment, write g2(tau) CSV")
    _add_param_flags(sim)
    _add_common_flags(sim)
    sim.add_argument("--output", "-o", help="correlation CSV path (default g2.csv)")
    sim.add_argument("--dump-streams", help="also dump the raw streams to this CSV")

    swp = sub.add_parser("sweep", help="sweep g2(0) over one or two parameters")
    swp.add_argument(
        "--axis",
        action="append",
        type=parse_axis,
        metavar="NAME=START:STOP:STEPS",
        help="swept parameter (sigma, xi, or chi); give twice for a 2D grid",
    )
    _add_param_flags(swp)
    _add_common_flags(swp)
    swp.add_argument("--replicates", type=int, help=f"runs per cell (default {DEFAULT_REPLICATES})")
    swp.add_argument("--jobs", type=int, help="worker processes (default 1 or $HBTSIM_JOBS)")
    swp.add_argument(
        "--analytic",
        action="store_const",
        const=True,
        help="fill the grid with closed-form expectations instead of Monte Carlo",
    )
    swp.add_argument("--level", type=float, help="contour level for 2D grids (default 0.5)")
    swp.add_argument("--output", "-o", help="grid CSV path (default sweep.csv)")
    swp.add_argument(
        "--contour-output",
        help="contour CSV path for 2D grids (default <output stem>_contour.csv)",
    )

    thy = sub.add_parser("theory", help="print closed-form g2 values")
    thy.add_argument("--fock", type=int, help="photon number for the number-state g2")
    _add_param_flags(thy)
    _add_common_flags(thy)

    ctr = sub.add_parser("contour", help="extract a level contour from a grid CSV")
    ctr.add_argument("--grid", required=True, help="grid CSV produced by the sweep subcommand")
    ctr.add_argument("--level", type=float, help="contour level (default 0.5)")
    ctr.add_argument("--output", "-o", help="contour CSV path (default contour.csv)")
    ctr.add_argument("--config", help="key=value config file; flags take precedence")

    return parser


def cmd_simulate(args: argparse.Namespace) -> int:
    _resolve(args, ["sigma", "xi", "chi", "efficiency", "pulses", "sidebands", "seed",
                    "output", "dump_streams"])
    params = _sim_params(args)
    window = LagWindow(args.sidebands)
    streams = generate_streams(params, args.seed)
    result = g2_curve(streams, window)
    output = args.output or "g2.csv"
    write_correlation_csv(result, output)
    if args.dump_streams:
        write_streams_csv(streams, args.dump_streams)
    print(
        f"g2_zero={result.g2_zero!r} center={result.center_counts!r} "
        f"sidebands={result.sideband_mean!r}"
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    _resolve(args, ["axis", "sigma", "xi", "chi", "efficiency", "pulses", "sidebands",
                    "seed", "replicates", "jobs", "analytic", "level", "output",
                    "contour_output"])
    if not args.axis:
        raise InvalidParameterError("sweep needs at least one --axis")
    template = _sim_params(args)
    output = args.output or "sweep.csv"
    if args.analytic:
        grid = fill_grid_analytic(args.axis, template)
    else:
        grid = run_sweep(
            args.axis,
            template,
            LagWindow(args.sidebands),
            replicates=args.replicates,
            master_seed=args.seed,
            jobs=args.jobs,
            contour_level=args.level,
        )
        for failure in grid.failures:
            coords = f"cell ({failure.index1}, {failure.index2})"
            print(
                f"warning: {coords} replicate {failure.replicate}: {failure.message}",
                file=sys.stderr,
            )
    write_grid_csv(grid, output)
    if grid.ndim == 2:
        polylines = (
            extract_contour(grid, args.level) if args.analytic else grid.contour
        )
        contour_path = args.contour_output or str(
            Path(output).with_name(Path(output).stem + "_contour.csv")
        )
        write_contour_csv(polylines, contour_path)
    return EXIT_OK


def cmd_theory(args: argparse.Namespace) -> int:
    wants_model = any(
        getattr(args, name) is not None for name in ("sigma", "xi", "chi", "efficiency")
    )
    _resolve(args, ["fock", "sigma", "xi", "chi", "efficiency", "pulses", "seed"])
    if args.fock is not None:
        print(f"fock_g2={fock_g2(args.fock)!r}")
    if wants_model or args.fock is None:
        params = _sim_params(args)
        print(f"analytic_g2_zero={analytic_g2_zero(params)!r}")
    return EXIT_OK


def cmd_contour(args: argparse.Namespace) -> int:
    _resolve(args, ["level", "output", "grid"])
    grid = read_grid_csv(args.grid)
    polylines = extract_contour(grid, args.level)
    write_contour_csv(polylines, args.output or "contour.csv")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "theory": cmd_theory,
    "contour": cmd_contour,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args)
    except HbtSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
