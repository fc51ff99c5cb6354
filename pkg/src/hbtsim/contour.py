"""Level-contour extraction from a rectangular grid of cell values.

Plain marching squares over grid-point values with linear interpolation along
cell edges.  Crossing points on an edge shared by two cells are computed from
the same endpoint values in the same order, so adjacent cells produce
bit-identical vertices and segments join by exact coordinate equality.
Cells touching a NaN value are skipped.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidParameterError

# Edge ids within a cell: S/N run along axis 1, W/E along axis 2.
_S, _E, _N, _W = 0, 1, 2, 3

# Corner-occupancy case -> list of (edge, edge) segments.  Bits: 1 = (i, j),
# 2 = (i+1, j), 4 = (i+1, j+1), 8 = (i, j+1), set when value >= level.
_SEGMENTS = {
    0: [],
    1: [(_S, _W)],
    2: [(_S, _E)],
    3: [(_W, _E)],
    4: [(_E, _N)],
    6: [(_S, _N)],
    7: [(_W, _N)],
    8: [(_W, _N)],
    9: [(_S, _N)],
    11: [(_E, _N)],
    12: [(_W, _E)],
    13: [(_S, _E)],
    14: [(_S, _W)],
    15: [],
}
# Saddles (5 and 10) are resolved at runtime from the cell-center mean.


def _cross(level, coord_lo, coord_hi, value_lo, value_hi):
    t = (level - value_lo) / (value_hi - value_lo)
    return coord_lo + t * (coord_hi - coord_lo)


def marching_squares(
    axis1_values: np.ndarray,
    axis2_values: np.ndarray,
    values: np.ndarray,
    level: float,
) -> list[np.ndarray]:
    """Extract iso-level polylines from ``values[i, j]`` sampled at
    ``(axis1_values[i], axis2_values[j])``.

    Returns a list of (M, 2) arrays of (axis1, axis2) vertices; empty when the
    level is never crossed.
    """
    x = np.asarray(axis1_values, dtype=np.float64)
    y = np.asarray(axis2_values, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 2 or v.shape != (x.size, y.size):
        raise InvalidParameterError(
            f"values shape {v.shape} does not match axes ({x.size}, {y.size})"
        )
    if x.size < 2 or y.size < 2:
        raise InvalidParameterError("contour extraction needs at least a 2x2 grid")
    level = float(level)

    segments: list[tuple[tuple[float, float], tuple[float, float]]] = []
    for i in range(x.size - 1):
        for j in range(y.size - 1):
            v00 = v[i, j]
            v10 = v[i + 1, j]
            v11 = v[i + 1, j + 1]
            v01 = v[i, j + 1]
            if math.isnan(v00) or math.isnan(v10) or math.isnan(v11) or math.isnan(v01):
                continue
            case = (
                (v00 >= level)
                | (v10 >= level) << 1
                | (v11 >= level) << 2
                | (v01 >= level) << 3
            )
            if case == 0 or case == 15:
                continue
            if case == 5:
                center_in = (v00 + v10 + v11 + v01) / 4.0 >= level
                segs = [(_S, _E), (_W, _N)] if center_in else [(_S, _W), (_E, _N)]
            elif case == 10:
                center_in = (v00 + v10 + v11 + v01) / 4.0 >= level
                segs = [(_S, _W), (_E, _N)] if center_in else [(_S, _E), (_W, _N)]
            else:
                segs = _SEGMENTS[case]
            points = {}
            for e1, e2 in segs:
                for e in (e1, e2):
                    if e in points:
                        continue
                    if e == _S:
                        points[e] = (_cross(level, x[i], x[i + 1], v00, v10), y[j])
                    elif e == _N:
                        points[e] = (
                            _cross(level, x[i], x[i + 1], v01, v11),
                            y[j + 1],
                        )
                    elif e == _W:
                        points[e] = (x[i], _cross(level, y[j], y[j + 1], v00, v01))
                    else:
                        points[e] = (
                            x[i + 1],
                            _cross(level, y[j], y[j + 1], v10, v11),
                        )
                segments.append((points[e1], points[e2]))

    return _chain_segments(segments)


def _chain_segments(segments) -> list[np.ndarray]:
    """Join segments sharing endpoints into polylines, deterministically.

    Segments are consumed in creation order; at junction vertices the
    lowest-index unused segment wins, so identical input yields identical
    polylines.
    """
    adjacency: dict[tuple[float, float], list[int]] = {}
    for idx, (p1, p2) in enumerate(segments):
        adjacency.setdefault(p1, []).append(idx)
        adjacency.setdefault(p2, []).append(idx)

    used = [False] * len(segments)
    polylines: list[np.ndarray] = []

    def extend(chain: list[tuple[float, float]]) -> None:
        while True:
            tail = chain[-1]
            next_idx = next(
                (s for s in adjacency[tail] if not used[s]), None
            )
            if next_idx is None:
                return
            used[next_idx] = True
            p1, p2 = segments[next_idx]
            chain.append(p2 if p1 == tail else p1)

    for idx, (p1, p2) in enumerate(segments):
        if used[idx]:
            continue
        used[idx] = True
        chain = [p1, p2]
        extend(chain)
        # The seed segment may sit mid-curve; grow the other end too.
        chain.reverse()
        extend(chain)
        polylines.append(np.asarray(chain, dtype=np.float64))

    return polylines
