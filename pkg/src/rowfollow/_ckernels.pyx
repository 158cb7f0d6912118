# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics mirror ``_pykernels`` exactly."""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


def raycast_discs(const double[::1] cos_a, const double[::1] sin_a,
                  double ox, double oy,
                  const double[::1] cx, const double[::1] cy,
                  const double[::1] radius, double max_range):
    cdef Py_ssize_t n_rays = cos_a.shape[0]
    cdef Py_ssize_t n_discs = cx.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n_rays, dtype=np.float64)
    cdef double[::1] ranges = out
    cdef Py_ssize_t i, k
    cdef double c, s, dx, dy, t, perp, rr, p2, half, near, hit, best

    for i in range(n_rays):
        c = cos_a[i]
        s = sin_a[i]
        best = INFINITY
        for k in range(n_discs):
            dx = cx[k] - ox
            dy = cy[k] - oy
            t = c * dx + s * dy
            perp = c * dy - s * dx
            rr = radius[k] * radius[k]
            p2 = perp * perp
            if p2 > rr:
                continue
            half = sqrt(rr - p2)
            near = t - half
            if near >= 0.0:
                hit = near
            elif t + half >= 0.0:
                hit = 0.0
            else:
                continue
            if hit < best:
                best = hit
        ranges[i] = best if best <= max_range else INFINITY
    return out


def zero_runs(const cnp.int64_t[::1] bins):
    cdef Py_ssize_t n = bins.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] starts = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ends = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t j, count = 0, start = -1

    for j in range(n):
        if bins[j] == 0:
            if start < 0:
                start = j
        elif start >= 0:
            starts[count] = start
            ends[count] = j - 1
            count += 1
            start = -1
    if start >= 0:
        starts[count] = start
        ends[count] = n - 1
        count += 1
    return starts[:count].copy(), ends[:count].copy()
