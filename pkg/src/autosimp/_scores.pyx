# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpolation kernel.

Mirrors ``_scores_py.interpolated_scores`` operation for operation; the two
must stay in lockstep so kernel selection never changes results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "cython"


def interpolated_scores(int ext_size, list layers, double[:] lams, int[:] copy_ids, double gamma):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.zeros(ext_size, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef int[:] ids
    cdef double[:] counts
    cdef double total, scale, keep, unit
    cdef Py_ssize_t i, j, li
    cdef tuple layer

    for li in range(len(layers)):
        layer = layers[li]
        ids = layer[0]
        counts = layer[1]
        total = layer[2]
        scale = lams[li] / total
        for j in range(ids.shape[0]):
            out[ids[j]] += counts[j] * scale

    if gamma != 0.0:
        keep = 1.0 - gamma
        for i in range(ext_size):
            out[i] *= keep
        unit = gamma / copy_ids.shape[0]
        for j in range(copy_ids.shape[0]):
            out[copy_ids[j]] += unit

    return out_arr
