# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled triangular memory-convolution kernel.

Computes, for every target node i on a uniform grid, the product-
quadrature sum of kernel-weighted, lag-dependent eigenfactors against a
per-mode integrand history.  This is the O(n^2 * N) hot loop of the
mild solver and the Grammian; everything else in the library is linear
in the grid size.
"""

import numpy as np


def memory_convolve(double[::1] first, double[::1] lag, double last,
                    double[:, ::1] efac, double[:, ::1] g):
    """Triangular lag convolution with edge-corrected weights.

    out[i, m] = first[i] * efac[i, m] * g[0, m]
              + sum_{j=1}^{i-1} lag[j] * efac[j, m] * g[i-j, m]
              + last * efac[0, m] * g[i, m]          for i >= 1;
    out[0, :] = 0.
    """
    cdef Py_ssize_t n = g.shape[0] - 1
    cdef Py_ssize_t nm = g.shape[1]
    out_arr = np.zeros((n + 1, nm))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, m
    cdef double lj
    for i in range(1, n + 1):
        for m in range(nm):
            out[i, m] = (first[i] * efac[i, m] * g[0, m]
                         + last * efac[0, m] * g[i, m])
        for j in range(1, i):
            lj = lag[j]
            for m in range(nm):
                out[i, m] += lj * efac[j, m] * g[i - j, m]
    return out_arr
