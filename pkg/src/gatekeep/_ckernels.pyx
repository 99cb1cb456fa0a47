# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled replicate-counting kernels; bitwise twin of ``_pykernels``.

Per-replicate loops over the p-value matrix with no float accumulation, so
the tallies match the numpy fallback exactly.  Inner loops release the GIL.
"""

import numpy as np

from libc.stdlib cimport free, malloc

NAME = "c"


def count_threshold(double[:, ::1] P, double[::1] thresholds):
    cdef Py_ssize_t B = P.shape[0], m = P.shape[1]
    per = np.zeros(m, dtype=np.int64)
    cdef long long[::1] pe = per
    cdef long long any_count = 0, all_count = 0
    cdef Py_ssize_t i, j
    cdef bint anyr, allr
    with nogil:
        for i in range(B):
            anyr = 0
            allr = 1
            for j in range(m):
                if P[i, j] <= thresholds[j]:
                    pe[j] += 1
                    anyr = 1
                else:
                    allr = 0
            if anyr:
                any_count += 1
            if allr:
                all_count += 1
    return per, None, int(any_count), int(all_count)


cdef inline void _insertion_sort(double* buf, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, m):
        v = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > v:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = v


def count_holm(double[:, ::1] P, double alpha):
    cdef Py_ssize_t B = P.shape[0], m = P.shape[1]
    per = np.zeros(m, dtype=np.int64)
    cdef long long[::1] pe = per
    cdef long long any_count = 0, all_count = 0
    cdef Py_ssize_t i, j, k
    cdef double cut
    cdef double* buf = <double*> malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(B):
                for j in range(m):
                    buf[j] = P[i, j]
                _insertion_sort(buf, m)
                k = 0
                while k < m and buf[k] <= alpha / (m - k):
                    k += 1
                if k > 0:
                    any_count += 1
                    if k == m:
                        all_count += 1
                    # Ties never straddle the step-down cut, so the k-th
                    # smallest value identifies the rejected set exactly.
                    cut = buf[k - 1]
                    for j in range(m):
                        if P[i, j] <= cut:
                            pe[j] += 1
    finally:
        free(buf)
    return per, None, int(any_count), int(all_count)


def count_hochberg(double[:, ::1] P, double alpha):
    cdef Py_ssize_t B = P.shape[0], m = P.shape[1]
    per = np.zeros(m, dtype=np.int64)
    cdef long long[::1] pe = per
    cdef long long any_count = 0, all_count = 0
    cdef Py_ssize_t i, j, k
    cdef double cut
    cdef double* buf = <double*> malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(B):
                for j in range(m):
                    buf[j] = P[i, j]
                _insertion_sort(buf, m)
                k = m - 1
                while k >= 0 and buf[k] > alpha / (m - k):
                    k -= 1
                if k >= 0:
                    any_count += 1
                    if k == m - 1:
                        all_count += 1
                    cut = buf[k]
                    for j in range(m):
                        if P[i, j] <= cut:
                            pe[j] += 1
    finally:
        free(buf)
    return per, None, int(any_count), int(all_count)


def count_fixed_sequence(double[:, ::1] P, long long[::1] level_offsets,
                         double[::1] thresholds,
                         unsigned char[::1] gate_split):
    cdef Py_ssize_t B = P.shape[0], m = P.shape[1]
    cdef Py_ssize_t K = level_offsets.shape[0] - 1
    per = np.zeros(m, dtype=np.int64)
    lev = np.zeros(K, dtype=np.int64)
    cdef long long[::1] pe = per
    cdef long long[::1] pl = lev
    cdef long long any_count = 0, all_count = 0
    cdef Py_ssize_t i, j, k, lo, hi
    cdef bint reached, level_pass, claimed_any
    with nogil:
        for i in range(B):
            reached = 1
            claimed_any = 0
            for k in range(K):
                lo = <Py_ssize_t> level_offsets[k]
                hi = <Py_ssize_t> level_offsets[k + 1]
                if gate_split[k]:
                    level_pass = 0
                    for j in range(lo, hi):
                        if P[i, j] <= thresholds[j]:
                            level_pass = 1
                            if reached:
                                pe[j] += 1
                else:
                    level_pass = 1
                    for j in range(lo, hi):
                        if P[i, j] > thresholds[j]:
                            level_pass = 0
                if not reached:
                    continue
                if level_pass:
                    pl[k] += 1
                    claimed_any = 1
                    if not gate_split[k]:
                        for j in range(lo, hi):
                            pe[j] += 1
                else:
                    reached = 0
            if claimed_any:
                any_count += 1
            if reached:
                all_count += 1
    return per, lev, int(any_count), int(all_count)
