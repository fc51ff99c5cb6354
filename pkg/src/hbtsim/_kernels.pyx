# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: per-pulse stream population and windowed lag correlation.

Semantics match hbtsim._pykernels exactly; see that module for the contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def populate_streams(
    const double[::1] rho,
    const double[::1] rho_prime,
    const double[::1] rho_double_prime,
    detected,
    double noise_amp,
    double xi,
    double chi,
):
    cdef Py_ssize_t n = rho.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b = np.zeros(n, dtype=np.float64)
    cdef double[::1] av = a
    cdef double[::1] bv = b
    cdef const cnp.uint8_t[::1] det
    cdef double sig_cut = 0.5 + xi
    cdef double noise_cut = 0.5 + chi
    cdef Py_ssize_t i
    cdef bint has_thinning = detected is not None

    if has_thinning:
        det = detected.view(np.uint8)
        for i in range(n):
            if det[i]:
                if rho[i] < sig_cut:
                    av[i] = 1.0
                else:
                    bv[i] = 1.0
    else:
        for i in range(n):
            if rho[i] < sig_cut:
                av[i] = 1.0
            else:
                bv[i] = 1.0

    if noise_amp != 0.0:
        for i in range(n):
            if rho_prime[i] < noise_cut:
                av[i] += noise_amp
            if rho_double_prime[i] > noise_cut:
                bv[i] += noise_amp
    return a, b


cdef double _lag_sum(const double* x, const double* y, Py_ssize_t m) noexcept nogil:
    # Four independent accumulators break the serial FP dependency chain so
    # the loop can pipeline/vectorize; order within a backend stays fixed.
    cdef double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0
    cdef Py_ssize_t i = 0
    while i + 4 <= m:
        acc0 += x[i] * y[i]
        acc1 += x[i + 1] * y[i + 1]
        acc2 += x[i + 2] * y[i + 2]
        acc3 += x[i + 3] * y[i + 3]
        i += 4
    while i < m:
        acc0 += x[i] * y[i]
        i += 1
    return (acc0 + acc1) + (acc2 + acc3)


def windowed_xcorr(const double[::1] a, const double[::1] b, Py_ssize_t n_sidebands):
    cdef Py_ssize_t size = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] counts = np.zeros(
        2 * n_sidebands + 1, dtype=np.float64
    )
    cdef double[::1] cv = counts
    cdef Py_ssize_t k
    with nogil:
        for k in range(-n_sidebands, n_sidebands + 1):
            if k >= 0:
                cv[k + n_sidebands] = _lag_sum(&a[0], &b[k], size - k)
            else:
                cv[k + n_sidebands] = _lag_sum(&a[-k], &b[0], size + k)
    return counts
