"""Rate algebra and closed-form expectations for the detector model.

The physical picture: a pulsed source drives an ideal single-photon emitter,
one photon per pulse.  A lossless beamsplitter routes each photon to detector
A with probability 1/2 + xi, otherwise to detector B.  Uncorrelated background
counts land on A with probability 1/2 + chi and on B with probability
1/2 - chi, each carrying amplitude sigma relative to a signal count.  The
noise factor sigma is the ratio of the total background rate to the detected
signal rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateDenominatorError, InvalidParameterError

DEFAULT_PULSES = 20_000


@dataclass(frozen=True)
class SimParams:
    """Scalar parameters of one simulated coincidence experiment.

    sigma: noise factor, total background rate over detected signal rate (>= 0).
    xi: signal-split asymmetry, strictly inside (-1/2, +1/2).
    chi: background-split asymmetry, inside [-1/2, +1/2] (endpoints allowed;
        chi = +1/2 puts all background on detector A).
    quantum_efficiency: probability that an emitted photon is detected at all,
        in (0, 1].
    pulses: number of excitation pulse periods, >= 1.
    """

    sigma: float
    xi: float = 0.0
    chi: float = 0.0
    quantum_efficiency: float = 1.0
    pulses: int = DEFAULT_PULSES

    def __post_init__(self):
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "xi", float(self.xi))
        object.__setattr__(self, "chi", float(self.chi))
        object.__setattr__(
            self, "quantum_efficiency", float(self.quantum_efficiency)
        )
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise InvalidParameterError(
                f"sigma must be a finite value >= 0, got {self.sigma}"
            )
        if not math.isfinite(self.xi) or not -0.5 < self.xi < 0.5:
            raise InvalidParameterError(
                f"xi must lie strictly inside (-1/2, 1/2), got {self.xi}"
            )
        if not math.isfinite(self.chi) or not -0.5 <= self.chi <= 0.5:
            raise InvalidParameterError(
                f"chi must lie inside [-1/2, 1/2], got {self.chi}"
            )
        if not math.isfinite(self.quantum_efficiency) or not (
            0.0 < self.quantum_efficiency <= 1.0
        ):
            raise InvalidParameterError(
                "quantum_efficiency must lie inside (0, 1], got "
                f"{self.quantum_efficiency}"
            )
        if isinstance(self.pulses, bool) or int(self.pulses) != self.pulses:
            raise InvalidParameterError(
                f"pulses must be an integer, got {self.pulses!r}"
            )
        object.__setattr__(self, "pulses", int(self.pulses))
        if self.pulses < 1:
            raise InvalidParameterError(f"pulses must be >= 1, got {self.pulses}")


@dataclass(frozen=True)
class DetectorRates:
    """Per-pulse signal and background rates at the two detectors.

    Background rates are amplitude-weighted: a background event adds
    sigma * quantum_efficiency to the stream, so dark_a + dark_b equals
    sigma * quantum_efficiency * k_s.
    """

    signal_a: float
    signal_b: float
    dark_a: float
    dark_b: float


def derive_rates(params: SimParams, k_s: float) -> DetectorRates:
    """Split a total emission rate ``k_s`` into per-detector rates.

    The beamsplitter is lossless: signal_a + signal_b = quantum_efficiency * k_s,
    and the total background is sigma * quantum_efficiency * k_s, split by chi.
    """
    if not isinstance(params, SimParams):
        params = SimParams(**params)  # type: ignore[arg-type]
    if not (math.isfinite(k_s) and k_s > 0.0):
        raise InvalidParameterError(f"k_s must be a finite rate > 0, got {k_s}")
    eff = params.quantum_efficiency
    k_d = params.sigma * eff * k_s
    return DetectorRates(
        signal_a=eff * (0.5 + params.xi) * k_s,
        signal_b=eff * (0.5 - params.xi) * k_s,
        dark_a=(0.5 + params.chi) * k_d,
        dark_b=(0.5 - params.chi) * k_d,
    )


def fock_g2(n: int) -> float:
    """Second-order coherence of an n-photon number state: 1 - 1/n.

    Equals 0 for a single photon, 1/2 for two photons, and approaches the
    classical value 1 as n grows.
    """
    if isinstance(n, bool) or int(n) != n:
        raise InvalidParameterError(f"photon number must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise InvalidParameterError(f"photon number must be >= 1, got {n}")
    return 1.0 - 1.0 / n


def analytic_g2_zero(params: SimParams) -> float:
    """Large-N expectation of the sideband-normalized g2(0) estimator.

    With s = sigma, p = 1/2 + xi the signal-to-A probability and q = 1/2 + chi
    the background-to-A probability (background-to-B probability 1 - q):

        numerator   = p(1-q)s + q(1-p)s + q(1-q)s^2
        denominator = (p + qs)(1-p + (1-q)s)

    The numerator is the expected zero-lag coincidence amplitude per pulse,
    the denominator the product of the two mean stream amplitudes (the
    sideband expectation).  The quantum efficiency cancels from the ratio.
    The estimator itself carries an O(1/N) ratio bias that this expectation
    ignores; Monte Carlo comparisons must absorb it in their tolerance.

    The complement probabilities are formed as 1/2 - xi and 1/2 - chi rather
    than 1 - p and 1 - q so that relabeling the detectors,
    (xi, chi) -> (-xi, -chi), reproduces the result bit-for-bit.
    """
    if not isinstance(params, SimParams):
        raise InvalidParameterError("params must be a SimParams instance")
    s = params.sigma
    p = 0.5 + params.xi
    p_b = 0.5 - params.xi
    q = 0.5 + params.chi
    q_b = 0.5 - params.chi
    numerator = (p * q_b + q * p_b) * s + (q * q_b) * (s * s)
    denominator = (p + q * s) * (p_b + q_b * s)
    if denominator == 0.0:
        raise DegenerateDenominatorError(
            "mean amplitude vanishes on one detector; g2(0) expectation undefined"
        )
    return numerator / denominator
