"""NumPy implementations of the hot kernels.

Fallback used when the compiled extension is unavailable.  Both backends
implement the same two operations with identical semantics:

* ``populate_streams`` turns per-pulse uniform draws into the two detector
  amplitude arrays (signal amplitude 1, background amplitude ``noise_amp``).
* ``windowed_xcorr`` computes the zero-padded lag coincidence sums
  C[k] = sum_i a[i] * b[i+k] for k in [-n, +n].

Stream population is branch-free comparisons, so the two backends agree
bit-for-bit on the amplitude arrays.  The lag sums may differ between
backends in the last few ULPs because the summation order differs.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def populate_streams(rho, rho_prime, rho_double_prime, detected, noise_amp, xi, chi):
    """Build detector amplitude arrays from per-pulse uniform draws.

    rho decides which detector receives the signal photon (A iff
    rho < 1/2 + xi; ties go to B).  rho_prime adds ``noise_amp`` to A where
    rho_prime < 1/2 + chi; rho_double_prime adds ``noise_amp`` to B where
    rho_double_prime > 1/2 + chi.  ``detected`` (optional boolean mask) gates
    the signal photon for sub-unity quantum efficiency.
    """
    signal_a = rho < (0.5 + xi)
    if detected is None:
        signal_b = ~signal_a
    else:
        signal_b = ~signal_a & detected
        signal_a = signal_a & detected
    a = signal_a.astype(np.float64)
    b = signal_b.astype(np.float64)
    if noise_amp != 0.0:
        a += noise_amp * (rho_prime < (0.5 + chi))
        b += noise_amp * (rho_double_prime > (0.5 + chi))
    return a, b


def windowed_xcorr(a, b, n_sidebands):
    """Coincidence sums per integer lag, out-of-range elements treated as zero."""
    n = int(n_sidebands)
    size = a.shape[0]
    counts = np.empty(2 * n + 1, dtype=np.float64)
    for k in range(-n, n + 1):
        if k >= 0:
            counts[k + n] = np.dot(a[: size - k], b[k:])
        else:
            counts[k + n] = np.dot(a[-k:], b[: size + k])
    return counts
