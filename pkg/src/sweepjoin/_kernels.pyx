# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernel backend: the hot loops for partitioning, sorting and sweeping.

Signature-compatible with ``_kernels_py``. Every loop releases the GIL, so
the engine's worker threads run these kernels truly in parallel.
"""

from libcpp.vector cimport vector
from libcpp.pair cimport pair
from libcpp.algorithm cimport sort as cpp_sort

import numpy as np

BACKEND_NAME = "compiled"

ctypedef long long i64


cdef inline long tile_of(double p, long k) noexcept nogil:
    # Keep in sync with geometry.axis_tile_index.
    cdef long i = <long>(p * k)
    if i < 0:
        i = 0
    elif i > k - 1:
        i = k - 1
    while i > 0 and p < (<double>i) / (<double>k):
        i -= 1
    while i < k - 1 and p >= (<double>(i + 1)) / (<double>k):
        i += 1
    return i


def count_tiles(double[::1] xl, double[::1] xu, double[::1] yl, double[::1] yu,
                long k, int kind, int axis, Py_ssize_t start, Py_ssize_t stop,
                i64[::1] counts):
    """Add each rectangle in [start, stop) to the count of every tile it overlaps."""
    cdef Py_ssize_t i
    cdef long a0, a1, r0, r1, row, col, t
    with nogil:
        for i in range(start, stop):
            if kind == 0:
                if axis == 0:
                    a0 = tile_of(xl[i], k)
                    a1 = tile_of(xu[i], k)
                else:
                    a0 = tile_of(yl[i], k)
                    a1 = tile_of(yu[i], k)
                for t in range(a0, a1 + 1):
                    counts[t] += 1
            else:
                a0 = tile_of(xl[i], k)
                a1 = tile_of(xu[i], k)
                r0 = tile_of(yl[i], k)
                r1 = tile_of(yu[i], k)
                for row in range(r0, r1 + 1):
                    for col in range(a0, a1 + 1):
                        counts[row * k + col] += 1


def write_tiles(i64[::1] ids, double[::1] xl, double[::1] xu, double[::1] yl,
                double[::1] yu, long k, int kind, int axis,
                Py_ssize_t start, Py_ssize_t stop, i64[::1] cursors,
                i64[::1] out_ids, double[::1] out_xl, double[::1] out_xu,
                double[::1] out_yl, double[::1] out_yu):
    """Copy each rectangle in [start, stop) into the buffers of its tiles.

    ``cursors`` holds this writer's next free position per tile and is
    advanced in place.
    """
    cdef Py_ssize_t i, pos
    cdef long a0, a1, r0, r1, row, col, t
    with nogil:
        for i in range(start, stop):
            if kind == 0:
                if axis == 0:
                    a0 = tile_of(xl[i], k)
                    a1 = tile_of(xu[i], k)
                else:
                    a0 = tile_of(yl[i], k)
                    a1 = tile_of(yu[i], k)
                r0 = 0
                r1 = 0
            else:
                a0 = tile_of(xl[i], k)
                a1 = tile_of(xu[i], k)
                r0 = tile_of(yl[i], k)
                r1 = tile_of(yu[i], k)
            for row in range(r0, r1 + 1):
                for col in range(a0, a1 + 1):
                    t = row * k + col if kind == 1 else col
                    pos = cursors[t]
                    cursors[t] = pos + 1
                    out_ids[pos] = ids[i]
                    out_xl[pos] = xl[i]
                    out_xu[pos] = xu[i]
                    out_yl[pos] = yl[i]
                    out_yu[pos] = yu[i]


cdef inline void bucket_span(double lo, double width, long kb,
                             double vlo, double vhi,
                             long* b0, long* b1) noexcept nogil:
    # Clip the projection to the tile, then map to half-open buckets.
    cdef double a = vlo if vlo > lo else lo
    cdef double b = vhi if vhi < lo + width else lo + width
    cdef long g0 = <long>((a - lo) * kb / width)
    cdef long g1 = <long>((b - lo) * kb / width)
    if g0 < 0:
        g0 = 0
    if g1 > kb - 1:
        g1 = kb - 1
    if g0 > g1:
        g0 = g1
    b0[0] = g0
    b1[0] = g1


def write_tiles_hist(i64[::1] ids, double[::1] xl, double[::1] xu, double[::1] yl,
                     double[::1] yu, long k, int kind, int axis,
                     Py_ssize_t start, Py_ssize_t stop, i64[::1] cursors,
                     i64[::1] out_ids, double[::1] out_xl, double[::1] out_xu,
                     double[::1] out_yl, double[::1] out_yu,
                     i64[::1] tile_offsets, long phi, long kb_x, long kb_y,
                     i64[::1] hist_x, i64[::1] hist_y):
    """write_tiles plus per-tile histogram sampling.

    Every rectangle landing at a buffer position divisible by ``phi``
    (position counted from the start of the tile's buffer, so the sample is
    identical no matter how the input was sliced across writers) increments
    the x/y histogram buckets its clipped projections overlap.
    """
    cdef Py_ssize_t i, pos
    cdef long a0, a1, r0, r1, row, col, t, g, g0, g1
    cdef double x_lo, x_w, y_lo, y_w
    with nogil:
        for i in range(start, stop):
            if kind == 0:
                if axis == 0:
                    a0 = tile_of(xl[i], k)
                    a1 = tile_of(xu[i], k)
                else:
                    a0 = tile_of(yl[i], k)
                    a1 = tile_of(yu[i], k)
                r0 = 0
                r1 = 0
            else:
                a0 = tile_of(xl[i], k)
                a1 = tile_of(xu[i], k)
                r0 = tile_of(yl[i], k)
                r1 = tile_of(yu[i], k)
            for row in range(r0, r1 + 1):
                for col in range(a0, a1 + 1):
                    t = row * k + col if kind == 1 else col
                    pos = cursors[t]
                    cursors[t] = pos + 1
                    out_ids[pos] = ids[i]
                    out_xl[pos] = xl[i]
                    out_xu[pos] = xu[i]
                    out_yl[pos] = yl[i]
                    out_yu[pos] = yu[i]
                    if (pos - tile_offsets[t]) % phi != 0:
                        continue
                    if kind == 0:
                        if axis == 0:
                            x_lo = (<double>t) / (<double>k)
                            x_w = 1.0 / (<double>k)
                            y_lo = 0.0
                            y_w = 1.0
                        else:
                            x_lo = 0.0
                            x_w = 1.0
                            y_lo = (<double>t) / (<double>k)
                            y_w = 1.0 / (<double>k)
                    else:
                        x_lo = (<double>col) / (<double>k)
                        x_w = 1.0 / (<double>k)
                        y_lo = (<double>row) / (<double>k)
                        y_w = 1.0 / (<double>k)
                    bucket_span(x_lo, x_w, kb_x, xl[i], xu[i], &g0, &g1)
                    for g in range(g0, g1 + 1):
                        hist_x[t * kb_x + g] += 1
                    bucket_span(y_lo, y_w, kb_y, yl[i], yu[i], &g0, &g1)
                    for g in range(g0, g1 + 1):
                        hist_y[t * kb_y + g] += 1


def sort_segment(i64[::1] ids, double[::1] xl, double[::1] xu, double[::1] yl,
                 double[::1] yu, Py_ssize_t lo, Py_ssize_t hi, int axis):
    """Stable in-place sort of slice [lo, hi) by lower endpoint on ``axis``."""
    cdef Py_ssize_t n = hi - lo
    if n <= 1:
        return
    cdef vector[pair[double, i64]] order
    cdef vector[i64] tmp_i
    cdef vector[double] tmp_d
    cdef Py_ssize_t i, src
    with nogil:
        order.reserve(n)
        for i in range(n):
            if axis == 0:
                order.push_back(pair[double, i64](xl[lo + i], <i64>i))
            else:
                order.push_back(pair[double, i64](yl[lo + i], <i64>i))
        # pair ordering breaks key ties by original index: a stable sort
        cpp_sort(order.begin(), order.end())
        tmp_i.resize(n)
        for i in range(n):
            tmp_i[i] = ids[lo + order[i].second]
        for i in range(n):
            ids[lo + i] = tmp_i[i]
        tmp_d.resize(n)
        for i in range(n):
            tmp_d[i] = xl[lo + order[i].second]
        for i in range(n):
            xl[lo + i] = tmp_d[i]
        for i in range(n):
            tmp_d[i] = xu[lo + order[i].second]
        for i in range(n):
            xu[lo + i] = tmp_d[i]
        for i in range(n):
            tmp_d[i] = yl[lo + order[i].second]
        for i in range(n):
            yl[lo + i] = tmp_d[i]
        for i in range(n):
            tmp_d[i] = yu[lo + order[i].second]
        for i in range(n):
            yu[lo + i] = tmp_d[i]


cdef i64 do_sweep(const i64* r_ids, const double* r_alo, const double* r_ahi,
                  const double* r_blo, const double* r_bhi, Py_ssize_t n_r,
                  const i64* s_ids, const double* s_alo, const double* s_ahi,
                  const double* s_blo, const double* s_bhi, Py_ssize_t n_s,
                  int dup_mode, double t_alo, double t_blo,
                  vector[i64]* out_r, vector[i64]* out_s, bint collect) noexcept nogil:
    # Forward-scan plane sweep; inputs sorted by lower sweep endpoint.
    # Equal lower sweep endpoints advance the S cursor.
    cdef bint test_a = (dup_mode & 1) != 0
    cdef bint test_b = (dup_mode & 2) != 0
    cdef i64 count = 0
    cdef Py_ssize_t i = 0, j = 0, kk
    cdef double hi, lo_a, lo_b, hi_b, m
    while i < n_r and j < n_s:
        if r_alo[i] < s_alo[j]:
            hi = r_ahi[i]
            lo_a = r_alo[i]
            lo_b = r_blo[i]
            hi_b = r_bhi[i]
            kk = j
            while kk < n_s and hi >= s_alo[kk]:
                if lo_b <= s_bhi[kk] and s_blo[kk] <= hi_b:
                    if test_a:
                        m = lo_a if lo_a > s_alo[kk] else s_alo[kk]
                        if m < t_alo:
                            kk += 1
                            continue
                    if test_b:
                        m = lo_b if lo_b > s_blo[kk] else s_blo[kk]
                        if m < t_blo:
                            kk += 1
                            continue
                    count += 1
                    if collect:
                        out_r.push_back(r_ids[i])
                        out_s.push_back(s_ids[kk])
                kk += 1
            i += 1
        else:
            hi = s_ahi[j]
            lo_a = s_alo[j]
            lo_b = s_blo[j]
            hi_b = s_bhi[j]
            kk = i
            while kk < n_r and hi >= r_alo[kk]:
                if lo_b <= r_bhi[kk] and r_blo[kk] <= hi_b:
                    if test_a:
                        m = lo_a if lo_a > r_alo[kk] else r_alo[kk]
                        if m < t_alo:
                            kk += 1
                            continue
                    if test_b:
                        m = lo_b if lo_b > r_blo[kk] else r_blo[kk]
                        if m < t_blo:
                            kk += 1
                            continue
                    count += 1
                    if collect:
                        out_r.push_back(r_ids[kk])
                        out_s.push_back(s_ids[j])
                kk += 1
            j += 1
    return count


cdef inline const double* dptr(double[::1] v) noexcept nogil:
    return &v[0] if v.shape[0] > 0 else NULL


cdef inline const i64* iptr(i64[::1] v) noexcept nogil:
    return &v[0] if v.shape[0] > 0 else NULL


def sweep_count(double[::1] r_alo, double[::1] r_ahi, double[::1] r_blo,
                double[::1] r_bhi, double[::1] s_alo, double[::1] s_ahi,
                double[::1] s_blo, double[::1] s_bhi,
                int dup_mode, double t_alo, double t_blo):
    cdef i64 count
    with nogil:
        count = do_sweep(NULL, dptr(r_alo), dptr(r_ahi), dptr(r_blo), dptr(r_bhi),
                         r_alo.shape[0],
                         NULL, dptr(s_alo), dptr(s_ahi), dptr(s_blo), dptr(s_bhi),
                         s_alo.shape[0],
                         dup_mode, t_alo, t_blo, NULL, NULL, 0)
    return count


def sweep_collect(i64[::1] r_ids, double[::1] r_alo, double[::1] r_ahi,
                  double[::1] r_blo, double[::1] r_bhi,
                  i64[::1] s_ids, double[::1] s_alo, double[::1] s_ahi,
                  double[::1] s_blo, double[::1] s_bhi,
                  int dup_mode, double t_alo, double t_blo):
    cdef vector[i64] out_r
    cdef vector[i64] out_s
    with nogil:
        do_sweep(iptr(r_ids), dptr(r_alo), dptr(r_ahi), dptr(r_blo), dptr(r_bhi),
                 r_alo.shape[0],
                 iptr(s_ids), dptr(s_alo), dptr(s_ahi), dptr(s_blo), dptr(s_bhi),
                 s_alo.shape[0],
                 dup_mode, t_alo, t_blo, &out_r, &out_s, 1)
    cdef Py_ssize_t n = out_r.size()
    res_r = np.empty(n, dtype=np.int64)
    res_s = np.empty(n, dtype=np.int64)
    cdef i64[::1] vr = res_r
    cdef i64[::1] vs = res_s
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            vr[i] = out_r[i]
            vs[i] = out_s[i]
    return res_r, res_s
