"""Coincidence counting and the sideband-normalized g2 estimator.

Lags are whole pulse periods.  The zero-lag coincidence sum is normalized by
the mean of the 2n surrounding sideband lags:

    g2(0) = 2n * C[0] / (sum of C[k] over 0 < |k| <= n)

which puts uncorrelated (Poissonian) streams at 1 and an ideal single-photon
source at 0.  The curve is the same counts divided by the sideband mean, so
its zero-lag value coincides with the scalar estimate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backend
from .errors import (
    EmptySidebandError,
    InvalidParameterError,
    WindowTooLargeError,
)
from .streams import PhotonStreams

DEFAULT_SIDEBANDS = 10


@dataclass(frozen=True)
class LagWindow:
    """Number of sideband pulse periods on each side of zero lag."""

    n_sidebands: int = DEFAULT_SIDEBANDS

    def __post_init__(self):
        if (
            isinstance(self.n_sidebands, bool)
            or int(self.n_sidebands) != self.n_sidebands
        ):
            raise InvalidParameterError(
                f"n_sidebands must be an integer, got {self.n_sidebands!r}"
            )
        object.__setattr__(self, "n_sidebands", int(self.n_sidebands))
        if self.n_sidebands < 1:
            raise InvalidParameterError(
                f"n_sidebands must be >= 1, got {self.n_sidebands}"
            )


@dataclass(frozen=True)
class CorrelationResult:
    """Raw and normalized coincidences per lag plus the g2(0) estimate."""

    lags: np.ndarray
    coincidences: np.ndarray
    g2_curve: np.ndarray
    g2_zero: float
    center_counts: float
    sideband_mean: float

    def __post_init__(self):
        for name in ("lags", "coincidences", "g2_curve"):
            arr = getattr(self, name)
            arr.flags.writeable = False


def _check_window(streams: PhotonStreams, window: LagWindow) -> int:
    n = window.n_sidebands
    if 2 * n + 1 > len(streams):
        raise WindowTooLargeError(
            f"window of 2*{n}+1 lags does not fit in {len(streams)} pulse periods"
        )
    return n


def coincidence_counts(streams: PhotonStreams, window: LagWindow) -> np.ndarray:
    """Raw coincidence sums C[k] = sum_i a[i]*b[i+k] for k in [-n, +n].

    Out-of-range stream elements count as zero, matching the central slice of
    the full zero-padded cross-correlation of the two arrays.  No per-lag
    length renormalization is applied.
    """
    n = _check_window(streams, window)
    return backend.windowed_xcorr(streams.a, streams.b, n)


def g2_curve(streams: PhotonStreams, window: LagWindow) -> CorrelationResult:
    """Full correlation result: counts, normalized curve, and g2(0)."""
    n = _check_window(streams, window)
    counts = backend.windowed_xcorr(streams.a, streams.b, n)
    sideband_sum = float(np.sum(counts[:n]) + np.sum(counts[n + 1 :]))
    if sideband_sum <= 0.0:
        raise EmptySidebandError(
            "all sideband coincidence counts are zero; "
            "increase the number of pulses or the window"
        )
    # One shared scale factor keeps g2_zero bit-identical to g2_curve[0].
    scale = (2.0 * n) / sideband_sum
    curve = counts * scale
    return CorrelationResult(
        lags=np.arange(-n, n + 1, dtype=np.int64),
        coincidences=counts,
        g2_curve=curve,
        g2_zero=float(curve[n]),
        center_counts=float(counts[n]),
        sideband_mean=sideband_sum / (2.0 * n),
    )


def g2_zero_estimate(streams: PhotonStreams, window: LagWindow) -> float:
    """Sideband-normalized zero-lag coincidence estimate, 2n*C[0] / sum C[k!=0]."""
    return g2_curve(streams, window).g2_zero


def write_correlation_csv(result: CorrelationResult, path) -> None:
    """Emit ``lag,coincidences,g2`` rows with summary ``# key=value`` comments."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# g2_zero={result.g2_zero!r}\n")
        fh.write(f"# center_counts={result.center_counts!r}\n")
        fh.write(f"# sideband_mean={result.sideband_mean!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lag", "coincidences", "g2"])
        for lag, count, g2 in zip(result.lags, result.coincidences, result.g2_curve):
            writer.writerow([int(lag), repr(float(count)), repr(float(g2))])


def read_correlation_csv(path) -> CorrelationResult:
    """Parse a file written by :func:`write_correlation_csv`."""
    meta: dict[str, float] = {}
    lags: list[int] = []
    counts: list[float] = []
    curve: list[float] = []
    with open(Path(path), newline="") as fh:
        rows = []
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = float(value)
            else:
                rows.append(line)
        reader = csv.reader(rows)
        header = next(reader)
        if header != ["lag", "coincidences", "g2"]:
            raise InvalidParameterError(f"unexpected correlation CSV header: {header}")
        for row in reader:
            lags.append(int(row[0]))
            counts.append(float(row[1]))
            curve.append(float(row[2]))
    return CorrelationResult(
        lags=np.asarray(lags, dtype=np.int64),
        coincidences=np.asarray(counts),
        g2_curve=np.asarray(curve),
        g2_zero=meta["g2_zero"],
        center_counts=meta["center_counts"],
        sideband_mean=meta["sideband_mean"],
    )
