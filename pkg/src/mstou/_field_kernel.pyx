# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled shot-noise accumulation.

For every spatial point the squared distances to all jumps are computed once,
then each time slice sums the precomputed weights of the jumps whose squared
distance does not exceed the squared ambit radius. Sums run in jump-index
order so the result matches the numpy path bit for bit.
"""

import numpy as np


def accumulate(
    const double[:, ::1] points,
    const double[:, ::1] xi,
    const double[:, ::1] radius2,
    const double[:, ::1] weight,
    double[:, ::1] out,
    Py_ssize_t start,
    Py_ssize_t stop,
):
    cdef Py_ssize_t n_jumps = xi.shape[0]
    cdef Py_ssize_t dim = xi.shape[1]
    cdef Py_ssize_t n_times = radius2.shape[0]
    cdef double[::1] dist2 = np.empty(n_jumps, dtype=np.float64)
    cdef Py_ssize_t i, j, k, a
    cdef double a0, a1, a2, a3, diff, s
    with nogil:
        for i in range(start, stop):
            for k in range(n_jumps):
                diff = points[i, 0] - xi[k, 0]
                s = diff * diff
                for a in range(1, dim):
                    diff = points[i, a] - xi[k, a]
                    s = s + diff * diff
                dist2[k] = s
            # four time slices at once: independent chains, each still in jump order
            j = 0
            while j + 4 <= n_times:
                a0 = 0.0
                a1 = 0.0
                a2 = 0.0
                a3 = 0.0
                for k in range(n_jumps):
                    s = dist2[k]
                    # branch-free; adding +-0.0 leaves the sum unchanged
                    a0 = a0 + weight[j, k] * (s <= radius2[j, k])
                    a1 = a1 + weight[j + 1, k] * (s <= radius2[j + 1, k])
                    a2 = a2 + weight[j + 2, k] * (s <= radius2[j + 2, k])
                    a3 = a3 + weight[j + 3, k] * (s <= radius2[j + 3, k])
                out[i, j] = a0
                out[i, j + 1] = a1
                out[i, j + 2] = a2
                out[i, j + 3] = a3
                j += 4
            while j < n_times:
                a0 = 0.0
                for k in range(n_jumps):
                    a0 = a0 + weight[j, k] * (dist2[k] <= radius2[j, k])
                out[i, j] = a0
                j += 1
