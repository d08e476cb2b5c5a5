# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled gather/scatter-sum used by graph message passing."""

import numpy as np

cimport numpy as cnp


def gather_segment_sum(double[:, ::1] x, long[::1] src, long[::1] dst,
                       Py_ssize_t n_out):
    """out[dst[e]] += x[src[e]] for every edge e."""
    cdef Py_ssize_t n_edges = src.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    out_arr = np.zeros((n_out, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t e, j, s, t
    for e in range(n_edges):
        s = src[e]
        t = dst[e]
        for j in range(d):
            out[t, j] += x[s, j]
    return out_arr
