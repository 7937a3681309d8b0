# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


cdef void _prominence(const double[:] y, const cnp.int64_t[:] peaks, double sign,
                      double[:] out) noexcept nogil:
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t m, p, i
    cdef double h, left_min, right_min, v
    for m in range(peaks.shape[0]):
        p = peaks[m]
        h = sign * y[p]
        left_min = h
        i = p - 1
        while i >= 0:
            v = sign * y[i]
            if v > h:
                break
            if v < left_min:
                left_min = v
            i -= 1
        right_min = h
        i = p + 1
        while i < n:
            v = sign * y[i]
            if v > h:
                break
            if v < right_min:
                right_min = v
            i += 1
        out[m] = h - (left_min if left_min > right_min else right_min)


def feature_points(y_in):
    cdef const double[:] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    if n < 3:
        return np.empty(0, np.int64), np.empty(0, np.int8), np.empty(0)
    idx_arr = np.empty(n, np.int64)
    kind_arr = np.empty(n, np.int8)
    cdef cnp.int64_t[:] idx = idx_arr
    cdef cnp.int8_t[:] kind = kind_arr
    cdef Py_ssize_t i, count = 0
    with nogil:
        for i in range(1, n - 1):
            if y[i] > y[i - 1] and y[i] > y[i + 1]:
                idx[count] = i
                kind[count] = 1
                count += 1
            elif y[i] < y[i - 1] and y[i] < y[i + 1]:
                idx[count] = i
                kind[count] = -1
                count += 1
    idx_arr = idx_arr[:count].copy()
    kind_arr = kind_arr[:count].copy()
    prom_arr = np.empty(count)
    maxima = idx_arr[kind_arr > 0]
    minima = idx_arr[kind_arr < 0]
    pmax = np.empty(maxima.size)
    pmin = np.empty(minima.size)
    _prominence(y, maxima, 1.0, pmax)
    _prominence(y, minima, -1.0, pmin)
    prom_arr[kind_arr > 0] = pmax
    prom_arr[kind_arr < 0] = pmin
    return idx_arr, kind_arr, prom_arr


cdef double _score(const double[:] t, const cnp.int8_t[:] kind, const double[:] amp,
                   Py_ssize_t i, Py_ssize_t j, double window, double delta,
                   double eps) noexcept nogil:
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t k = i, l
    cdef double total = 0.0, best, off, sim
    cdef Py_ssize_t m = 0
    while k < n and t[k] - t[i] <= window:
        m += 1
        off = t[k] - t[i]
        best = 0.0
        l = j
        while l < n and t[l] - t[j] <= window:
            if kind[l] == kind[k] and fabs((t[l] - t[j]) - off) <= delta:
                sim = 1.0 - fabs(amp[k] - amp[l]) / (fabs(amp[k]) + fabs(amp[l]) + eps)
                if sim > best:
                    best = sim
            l += 1
        total += best
        k += 1
    return total / m


def topology_scan(t_in, kind_in, amp_in, double tau_min, double tau_max, double window,
                  double delta, double threshold, double eps):
    cdef const double[:] t = np.ascontiguousarray(t_in, dtype=np.float64)
    cdef const cnp.int8_t[:] kind = np.ascontiguousarray(kind_in, dtype=np.int8)
    cdef const double[:] amp = np.ascontiguousarray(amp_in, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    out_idx_arr = np.empty(n, np.int64)
    out_lag_arr = np.empty(n, np.float64)
    cdef cnp.int64_t[:] out_idx = out_idx_arr
    cdef double[:] out_lag = out_lag_arr
    cdef Py_ssize_t i, j, best_j, count = 0
    cdef double tau, s, best_score, last = -1e300
    with nogil:
        for i in range(n):
            best_score = -1.0
            best_j = -1
            for j in range(i + 1, n):
                tau = t[j] - t[i]
                if tau > tau_max:
                    break
                if tau < tau_min or kind[j] != kind[i]:
                    continue
                s = _score(t, kind, amp, i, j, window, delta, eps)
                if s > best_score + 1e-12:
                    best_score = s
                    best_j = j
            if best_j >= 0 and best_score >= threshold and t[best_j] > last:
                out_idx[count] = best_j
                out_lag[count] = t[best_j] - t[i]
                last = t[best_j]
                count += 1
    return out_idx_arr[:count].copy(), out_lag_arr[:count].copy()
