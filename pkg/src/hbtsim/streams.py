"""Per-pulse detector stream generation.

Each excitation pulse produces exactly one photon.  Streams are dense arrays
indexed by pulse period: three uniform draws per period decide which detector
the photon reaches and whether each detector also logs a background event.
Background events add amplitude ``sigma * quantum_efficiency`` so that the
total background stays a fixed fraction sigma of the detected signal.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backend
from .errors import CapacityError, InvalidParameterError
from .model import SimParams

# Per-stream memory cap (2**27 float64 elements = 1 GiB per detector array).
MAX_PULSES = 2**27

# Fixed spawn-key offsets of the logical draw streams below the run seed.
# Each branch owns its own child generator, so changing how many values one
# branch consumes never perturbs the others.
_STREAM_SIGNAL = 0
_STREAM_NOISE_A = 1
_STREAM_NOISE_B = 2
_STREAM_DETECTION = 3


@dataclass(frozen=True)
class RandomDraws:
    """The three per-pulse uniform draw arrays, one value in [0, 1) each.

    rho routes the signal photon, rho_prime triggers background on detector A,
    rho_double_prime triggers background on detector B.  The three arrays come
    from independent generator streams.
    """

    rho: np.ndarray
    rho_prime: np.ndarray
    rho_double_prime: np.ndarray


@dataclass(frozen=True)
class PhotonStreams:
    """Per-pulse amplitude arrays for the two detectors.

    ``params`` and ``seed`` record how the streams were produced; they are
    None for streams built from external data (CSV fixtures, Poisson
    references).  Arrays are read-only after construction.
    """

    a: np.ndarray
    b: np.ndarray
    params: SimParams | None = None
    seed: int | None = None

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
            raise InvalidParameterError(
                "stream arrays must be 1-D and equally long, got shapes "
                f"{np.shape(self.a)} and {np.shape(self.b)}"
            )
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return self.a.shape[0]


def _check_capacity(n: int) -> None:
    if n > MAX_PULSES:
        raise CapacityError(
            f"requested {n} pulse periods exceeds the maximum of {MAX_PULSES}"
        )


def _stream_generators(seed: int, count: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(int(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def draw_uniforms(pulses: int, seed: int) -> RandomDraws:
    """Draw the three per-pulse uniform arrays for a given run seed."""
    _check_capacity(pulses)
    gens = _stream_generators(seed, 3)
    return RandomDraws(
        rho=gens[_STREAM_SIGNAL].random(pulses),
        rho_prime=gens[_STREAM_NOISE_A].random(pulses),
        rho_double_prime=gens[_STREAM_NOISE_B].random(pulses),
    )


def generate_streams(params: SimParams, seed: int) -> PhotonStreams:
    """Simulate the two detector streams for one experiment.

    Per pulse: the photon lands on A if rho < 1/2 + xi, else on B (skipped
    entirely with probability 1 - quantum_efficiency).  Background of
    amplitude sigma * quantum_efficiency is added to A where
    rho_prime < 1/2 + chi and to B where rho_double_prime > 1/2 + chi, from
    independent draws so the two detectors' background is uncorrelated.

    Identical (params, seed) pairs reproduce identical arrays.
    """
    if not isinstance(params, SimParams):
        raise InvalidParameterError("params must be a SimParams instance")
    _check_capacity(params.pulses)
    n = params.pulses
    gens = _stream_generators(seed, 4)
    rho = gens[_STREAM_SIGNAL].random(n)
    rho_prime = gens[_STREAM_NOISE_A].random(n)
    rho_double_prime = gens[_STREAM_NOISE_B].random(n)
    if params.quantum_efficiency < 1.0:
        detected = gens[_STREAM_DETECTION].random(n) < params.quantum_efficiency
    else:
        detected = None
    noise_amp = params.sigma * params.quantum_efficiency
    a, b = backend.populate_streams(
        rho, rho_prime, rho_double_prime, detected, noise_amp, params.xi, params.chi
    )
    return PhotonStreams(a=a, b=b, params=params, seed=int(seed))


def poisson_reference_streams(
    rate_a: float, rate_b: float, pulses: int, seed: int
) -> PhotonStreams:
    """Two independent Poisson count streams, the coherent-light baseline.

    Per-period counts are drawn independently for the two detectors, so every
    normalized correlation lag sits at 1 in expectation.  Test fixture only.
    """
    if rate_a < 0.0 or rate_b < 0.0:
        raise InvalidParameterError(
            f"rates must be >= 0, got ({rate_a}, {rate_b})"
        )
    if pulses < 1:
        raise InvalidParameterError(f"pulses must be >= 1, got {pulses}")
    _check_capacity(pulses)
    gen_a, gen_b = _stream_generators(seed, 2)
    a = gen_a.poisson(rate_a, pulses).astype(np.float64)
    b = gen_b.poisson(rate_b, pulses).astype(np.float64)
    return PhotonStreams(a=a, b=b, params=None, seed=int(seed))


def write_streams_csv(streams: PhotonStreams, path) -> None:
    """Dump streams as CSV with header ``index,a,b``, full-precision amplitudes."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "a", "b"])
        for i in range(len(streams)):
            writer.writerow([i, repr(float(streams.a[i])), repr(float(streams.b[i]))])


def read_streams_csv(path) -> PhotonStreams:
    """Load a stream dump written by :func:`write_streams_csv`."""
    a: list[float] = []
    b: list[float] = []
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["index", "a", "b"]:
            raise InvalidParameterError(f"unexpected stream CSV header: {header}")
        for row in reader:
            a.append(float(row[1]))
            b.append(float(row[2]))
    return PhotonStreams(a=np.asarray(a), b=np.asarray(b))
