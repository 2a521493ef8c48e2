# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: nearest-centroid assignment and greedy frame picking.

Semantics must stay in lockstep with ``_kernels_py``; both compute squared
distances by direct per-dimension differences so ties resolve identically.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def nearest_centroids(double[:, ::1] points, double[:, ::1] centroids):
    """For each point, index of and squared distance to the closest centroid.

    Ties go to the lowest centroid index.
    """
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]
    if centroids.shape[1] != d:
        raise ValueError("dimension mismatch")
    labels_arr = np.empty(n, dtype=np.int64)
    dists_arr = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] dists = dists_arr
    cdef Py_ssize_t i, c, j, best_c
    cdef double best, acc, diff
    with nogil:
        for i in range(n):
            best = INFINITY
            best_c = 0
            for c in range(k):
                acc = 0.0
                for j in range(d):
                    diff = points[i, j] - centroids[c, j]
                    acc += diff * diff
                    if acc >= best:
                        break
                if acc < best:
                    best = acc
                    best_c = c
            labels[i] = best_c
            dists[i] = best
    return labels_arr, dists_arr


def sampler_select(double[:, ::1] frames_w, double[:, ::1] draws_w,
                   Py_ssize_t n_select, bint mean_shift):
    """Greedy nearest-frame selection in whitened coordinates.

    Each step matches one pre-drawn sample (minus the running difference
    vector when ``mean_shift`` is on) to the closest unselected frame by
    Euclidean distance, which equals Mahalanobis distance in the original
    space. Ties go to the lowest frame index.
    """
    cdef Py_ssize_t n = frames_w.shape[0]
    cdef Py_ssize_t d = frames_w.shape[1]
    if draws_w.shape[0] < n_select or draws_w.shape[1] != d:
        raise ValueError("draws shape does not cover the selection")
    if n_select > n:
        raise ValueError("cannot select more frames than exist")
    out_arr = np.empty(n_select, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    taken_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] taken = taken_arr
    adj_arr = np.zeros(d, dtype=np.float64)
    diff_arr = np.zeros(d, dtype=np.float64)
    cdef double[::1] adj = adj_arr
    cdef double[::1] diff = diff_arr
    cdef Py_ssize_t t, i, j, best_i
    cdef double best, acc, delta
    with nogil:
        for t in range(n_select):
            for j in range(d):
                adj[j] = draws_w[t, j] - diff[j]
            best = INFINITY
            best_i = 0
            for i in range(n):
                if taken[i]:
                    continue
                acc = 0.0
                for j in range(d):
                    delta = adj[j] - frames_w[i, j]
                    acc += delta * delta
                    if acc >= best:
                        break
                if acc < best:
                    best = acc
                    best_i = i
            out[t] = best_i
            taken[best_i] = 1
            if mean_shift:
                for j in range(d):
                    diff[j] = adj[j] - frames_w[best_i, j]
    return out_arr
