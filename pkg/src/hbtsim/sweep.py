"""Deterministic 1D/2D parameter sweeps of the g2(0) estimate.

Every (cell, replicate) stream is seeded by a fixed 64-bit mix of the master
seed and the cell/replicate indices, so cells can be evaluated in any order,
serially or across processes, with bit-identical results.

Seed mixing function (also documented in the README):

    mix64(z)  = splitmix64 finalizer:
                z ^= z >> 30; z *= 0xBF58476D1CE4E5B9  (mod 2^64)
                z ^= z >> 27; z *= 0x94D049BB133111EB  (mod 2^64)
                return z ^ (z >> 31)

    mix_seed(master, i1, i2, r):
                z = mix64(master mod 2^64)
                for v in (i1, i2, r):
                    z = mix64((z + 0x9E3779B97F4A7C15 + v) mod 2^64)
                return z

The master seed is mixed before the first index is absorbed so that, e.g.,
(master=0, i1=1) and (master=1, i1=0) cannot collide by plain addition.

1D sweeps use i2 = 0.  The golden vector mix_seed(1, 2, 3, 4) is frozen in
the test suite.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import contour as _contour
from .correlator import LagWindow, g2_zero_estimate
from .errors import EmptySidebandError, HbtSimError, InvalidParameterError
from .model import SimParams, analytic_g2_zero
from .streams import generate_streams

DEFAULT_STEPS = 51
DEFAULT_REPLICATES = 8
DEFAULT_CONTOUR_LEVEL = 0.5

SWEEPABLE = ("sigma", "xi", "chi")

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index1: int, index2: int, replicate: int) -> int:
    """Derive a per-(cell, replicate) seed; see the module docstring."""
    z = _mix64(master_seed & _MASK64)
    for v in (index1, index2, replicate):
        z = _mix64((z + _GOLDEN + (v & _MASK64)) & _MASK64)
    return z


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: inclusive linear grid from start to stop."""

    parameter: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise InvalidParameterError(
                f"sweep parameter must be one of {SWEEPABLE}, got {self.parameter!r}"
            )
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "stop", float(self.stop))
        if isinstance(self.steps, bool) or int(self.steps) != self.steps:
            raise InvalidParameterError(f"steps must be an integer, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        if self.steps < 2:
            raise InvalidParameterError(f"steps must be >= 2, got {self.steps}")
        if not self.start < self.stop:
            raise InvalidParameterError(
                f"axis needs start < stop, got {self.start}..{self.stop}"
            )
        lo, hi = self.start, self.stop
        if self.parameter == "sigma" and lo < 0.0:
            raise InvalidParameterError(f"sigma axis must stay >= 0, got start {lo}")
        if self.parameter == "xi" and not (-0.5 < lo and hi < 0.5):
            raise InvalidParameterError(
                f"xi axis bounds must lie strictly inside (-1/2, 1/2), got {lo}..{hi}"
            )
        if self.parameter == "chi" and not (-0.5 <= lo and hi <= 0.5):
            raise InvalidParameterError(
                f"chi axis bounds must lie inside [-1/2, 1/2], got {lo}..{hi}"
            )

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class CellFailure:
    """One failed replicate, tagged with its cell coordinates."""

    index1: int
    index2: int
    replicate: int
    message: str


@dataclass(frozen=True)
class SweepGrid:
    """Per-cell g2(0) statistics over a 1D or 2D parameter grid.

    ``g2_mean``/``g2_std`` have shape (steps1,) or (steps1, steps2).  Cells
    where any replicate's estimator was undefined are recorded as NaN
    (missing), with the number of successful replicates in
    ``valid_replicates``.  ``contour`` holds the level-0.5 polylines for 2D
    Monte Carlo grids.
    """

    axes: tuple[AxisSpec, ...]
    axis_values: tuple[np.ndarray, ...]
    fixed: SimParams
    window: LagWindow | None
    replicates: int
    master_seed: int | None
    g2_mean: np.ndarray
    g2_std: np.ndarray
    valid_replicates: np.ndarray
    failures: tuple[CellFailure, ...] = ()
    contour: tuple[np.ndarray, ...] = ()

    @property
    def ndim(self) -> int:
        return len(self.axes)


def _check_axes(axes) -> tuple[AxisSpec, ...]:
    axes = tuple(axes)
    if len(axes) not in (1, 2):
        raise InvalidParameterError(f"sweeps take 1 or 2 axes, got {len(axes)}")
    if len(axes) == 2 and axes[0].parameter == axes[1].parameter:
        raise InvalidParameterError(
            f"the two axes must sweep different parameters, both are "
            f"{axes[0].parameter!r}"
        )
    return axes


def _cell_params(template: SimParams, axes, values, index1: int, index2: int):
    updates = {axes[0].parameter: float(values[0][index1])}
    if len(axes) == 2:
        updates[axes[1].parameter] = float(values[1][index2])
    return replace(template, **updates)


def _evaluate_cell(template, axes, values, window, replicates, master_seed, i1, i2):
    """Mean/std/count of g2(0) over replicates, in fixed replicate order."""
    params = _cell_params(template, axes, values, i1, i2)
    samples = []
    failures = []
    for r in range(replicates):
        seed = mix_seed(master_seed, i1, i2, r)
        try:
            streams = generate_streams(params, seed)
            samples.append(g2_zero_estimate(streams, window))
        except EmptySidebandError as exc:
            failures.append(CellFailure(i1, i2, r, str(exc)))
    if failures:
        return float("nan"), float("nan"), len(samples), failures
    arr = np.asarray(samples)
    mean = float(np.mean(arr))
    std = float(np.std(arr, ddof=1)) if replicates > 1 else 0.0
    return mean, std, len(samples), failures


def _evaluate_block(args):
    template, axes, values, window, replicates, master_seed, cells = args
    out = []
    for i1, i2 in cells:
        out.append(
            (
                i1,
                i2,
                *_evaluate_cell(
                    template, axes, values, window, replicates, master_seed, i1, i2
                ),
            )
        )
    return out


def run_sweep(
    axes,
    template: SimParams,
    window: LagWindow,
    replicates: int = DEFAULT_REPLICATES,
    master_seed: int = 0,
    *,
    jobs: int = 1,
    contour_level: float = DEFAULT_CONTOUR_LEVEL,
) -> SweepGrid:
    """Monte Carlo g2(0) over the grid, with replicate statistics per cell.

    Cells are independent work units; ``jobs`` > 1 distributes them over
    worker processes.  Results do not depend on the worker count: each
    replicate's seed comes from :func:`mix_seed` and each cell aggregates its
    replicates in index order.
    """
    axes = _check_axes(axes)
    if replicates < 1:
        raise InvalidParameterError(f"replicates must be >= 1, got {replicates}")
    if jobs < 1:
        raise InvalidParameterError(f"jobs must be >= 1, got {jobs}")
    if not isinstance(template, SimParams):
        raise InvalidParameterError("template must be a SimParams instance")
    values = tuple(axis.values() for axis in axes)
    shape = tuple(axis.steps for axis in axes)
    n2 = shape[1] if len(shape) == 2 else 1
    cells = [(i1, i2) for i1 in range(shape[0]) for i2 in range(n2)]

    mean = np.full(shape, np.nan)
    std = np.full(shape, np.nan)
    valid = np.zeros(shape, dtype=np.int64)
    failures: list[CellFailure] = []

    def store(i1, i2, m, s, count, cell_failures):
        idx = (i1, i2) if len(shape) == 2 else i1
        mean[idx] = m
        std[idx] = s
        valid[idx] = count
        failures.extend(cell_failures)

    common = (template, axes, values, window, int(replicates), int(master_seed))
    if jobs == 1:
        for i1, i2 in cells:
            store(i1, i2, *_evaluate_cell(*common, i1, i2))
    else:
        n_blocks = min(len(cells), jobs * 4)
        blocks = [
            common + (cells[b::n_blocks],) for b in range(n_blocks)
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for block_result in pool.map(_evaluate_block, blocks):
                for i1, i2, m, s, count, cell_failures in block_result:
                    store(i1, i2, m, s, count, cell_failures)

    grid = SweepGrid(
        axes=axes,
        axis_values=values,
        fixed=template,
        window=window,
        replicates=int(replicates),
        master_seed=int(master_seed),
        g2_mean=mean,
        g2_std=std,
        valid_replicates=valid,
        failures=tuple(failures),
    )
    if grid.ndim == 2:
        grid = replace(
            grid, contour=tuple(extract_contour(grid, contour_level))
        )
    return grid


def fill_grid_analytic(axes, template: SimParams) -> SweepGrid:
    """Oracle twin of :func:`run_sweep`: exact expectation values, zero spread."""
    axes = _check_axes(axes)
    if not isinstance(template, SimParams):
        raise InvalidParameterError("template must be a SimParams instance")
    values = tuple(axis.values() for axis in axes)
    shape = tuple(axis.steps for axis in axes)
    n2 = shape[1] if len(shape) == 2 else 1
    mean = np.zeros(shape)
    for i1 in range(shape[0]):
        for i2 in range(n2):
            idx = (i1, i2) if len(shape) == 2 else i1
            mean[idx] = analytic_g2_zero(
                _cell_params(template, axes, values, i1, i2)
            )
    return SweepGrid(
        axes=axes,
        axis_values=values,
        fixed=template,
        window=None,
        replicates=0,
        master_seed=None,
        g2_mean=mean,
        g2_std=np.zeros(shape),
        valid_replicates=np.zeros(shape, dtype=np.int64),
    )


def extract_contour(
    grid: SweepGrid, level: float = DEFAULT_CONTOUR_LEVEL
) -> list[np.ndarray]:
    """Iso-level polylines of the cell means of a 2D grid, in axis units."""
    if grid.ndim != 2:
        raise InvalidParameterError("contour extraction needs a 2D grid")
    return _contour.marching_squares(
        grid.axis_values[0], grid.axis_values[1], grid.g2_mean, level
    )


def write_grid_csv(grid: SweepGrid, path) -> None:
    """Grid CSV: ``# key=value`` metadata, then one row per cell.

    Header is ``axis1,axis2,g2_mean,g2_std,replicates`` (axis2 omitted for 1D
    sweeps); rows are row-major in axis order.  Missing cells carry ``nan``.
    """
    swept = {axis.parameter for axis in grid.axes}
    with open(path, "w", newline="") as fh:
        for pos, axis in enumerate(grid.axes, start=1):
            fh.write(f"# axis{pos}={axis.parameter}\n")
        for name in SWEEPABLE:
            if name not in swept:
                fh.write(f"# {name}={getattr(grid.fixed, name)!r}\n")
        fh.write(f"# quantum_efficiency={grid.fixed.quantum_efficiency!r}\n")
        fh.write(f"# pulses={grid.fixed.pulses}\n")
        if grid.window is not None:
            fh.write(f"# sidebands={grid.window.n_sidebands}\n")
        fh.write(f"# replicates={grid.replicates}\n")
        if grid.master_seed is not None:
            fh.write(f"# master_seed={grid.master_seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        if grid.ndim == 1:
            writer.writerow(["axis1", "g2_mean", "g2_std", "replicates"])
            for i1, v1 in enumerate(grid.axis_values[0]):
                writer.writerow(
                    [
                        repr(float(v1)),
                        repr(float(grid.g2_mean[i1])),
                        repr(float(grid.g2_std[i1])),
                        int(grid.valid_replicates[i1]),
                    ]
                )
        else:
            writer.writerow(["axis1", "axis2", "g2_mean", "g2_std", "replicates"])
            for i1, v1 in enumerate(grid.axis_values[0]):
                for i2, v2 in enumerate(grid.axis_values[1]):
                    writer.writerow(
                        [
                            repr(float(v1)),
                            repr(float(v2)),
                            repr(float(grid.g2_mean[i1, i2])),
                            repr(float(grid.g2_std[i1, i2])),
                            int(grid.valid_replicates[i1, i2]),
                        ]
                    )


def read_grid_csv(path) -> SweepGrid:
    """Rebuild a :class:`SweepGrid` from :func:`write_grid_csv` output.

    Axis values are taken verbatim from the rows, so the round trip is exact.
    """
    meta: dict[str, str] = {}
    rows: list[list[str]] = []
    with open(Path(path), newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
            else:
                data_lines.append(line)
    reader = csv.reader(data_lines)
    header = next(reader)
    if header not in (
        ["axis1", "g2_mean", "g2_std", "replicates"],
        ["axis1", "axis2", "g2_mean", "g2_std", "replicates"],
    ):
        raise InvalidParameterError(f"unexpected grid CSV header: {header}")
    two_d = len(header) == 5
    for row in reader:
        rows.append(row)
    if not rows:
        raise InvalidParameterError("grid CSV contains no data rows")

    def _axis_values(column: int) -> np.ndarray:
        seen: list[float] = []
        for row in rows:
            value = float(row[column])
            if value not in seen:
                seen.append(value)
        return np.asarray(seen)

    values1 = _axis_values(0)
    values2 = _axis_values(1) if two_d else None
    shape = (values1.size, values2.size) if two_d else (values1.size,)
    expected_rows = values1.size * (values2.size if two_d else 1)
    if len(rows) != expected_rows:
        raise InvalidParameterError(
            f"grid CSV has {len(rows)} rows, expected {expected_rows}"
        )
    mean = np.empty(shape)
    std = np.empty(shape)
    valid = np.empty(shape, dtype=np.int64)
    offset = 1 if not two_d else 2
    for r, row in enumerate(rows):
        idx = divmod(r, values2.size) if two_d else r
        mean[idx] = float(row[offset])
        std[idx] = float(row[offset + 1])
        valid[idx] = int(row[offset + 2])

    def _axis_spec(pos: int, observed: np.ndarray) -> AxisSpec:
        name = meta.get(f"axis{pos}", SWEEPABLE[0])
        return AxisSpec(name, float(observed[0]), float(observed[-1]), observed.size)

    axes = [_axis_spec(1, values1)]
    axis_values = [values1]
    if two_d:
        axes.append(_axis_spec(2, values2))
        axis_values.append(values2)

    fixed_kwargs = {}
    for name in SWEEPABLE:
        if name in meta:
            fixed_kwargs[name] = float(meta[name])
        else:
            fixed_kwargs[name] = 0.0
    for axis in axes:
        fixed_kwargs[axis.parameter] = float(axis.start)
    fixed = SimParams(
        quantum_efficiency=float(meta.get("quantum_efficiency", 1.0)),
        pulses=int(meta.get("pulses", 1)),
        **fixed_kwargs,
    )
    window = LagWindow(int(meta["sidebands"])) if "sidebands" in meta else None
    seed = int(meta["master_seed"]) if "master_seed" in meta else None
    return SweepGrid(
        axes=tuple(axes),
        axis_values=tuple(axis_values),
        fixed=fixed,
        window=window,
        replicates=int(meta.get("replicates", 0)),
        master_seed=seed,
        g2_mean=mean,
        g2_std=std,
        valid_replicates=valid,
    )


def write_contour_csv(polylines, path) -> None:
    """Contour CSV: header ``polyline_id,axis1,axis2``, one row per vertex."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["polyline_id", "axis1", "axis2"])
        for pid, line in enumerate(polylines):
            for v1, v2 in line:
                writer.writerow([pid, repr(float(v1)), repr(float(v2))])


def read_contour_csv(path) -> list[np.ndarray]:
    """Parse a file written by :func:`write_contour_csv`."""
    polylines: dict[int, list[tuple[float, float]]] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["polyline_id", "axis1", "axis2"]:
            raise InvalidParameterError(f"unexpected contour CSV header: {header}")
        for row in reader:
            polylines.setdefault(int(row[0]), []).append(
                (float(row[1]), float(row[2]))
            )
    return [np.asarray(polylines[pid]) for pid in sorted(polylines)]
