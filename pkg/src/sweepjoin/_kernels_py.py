"""Pure-Python kernel backend.

Mirrors the signatures of the compiled ``_kernels`` extension so the engine
can swap backends freely. Used when the extension is unavailable or when a
caller asks for it explicitly; correctness-equivalent, much slower, and does
not release the GIL (thread counts above 1 will not speed it up).

Layout codes shared with the compiled backend:
  kind: 0 = 1D stripes, 1 = 2D grid
  axis: 0 = x, 1 = y (split axis for stripes; sweep axis is handled by the
        caller, which passes projections already swapped into sweep/other order)
  dup_mode bits: 1 = reference-point test on the sweep axis,
                 2 = reference-point test on the other axis
"""

from __future__ import annotations

import numpy as np

from .geometry import axis_tile_index

BACKEND_NAME = "python"


def _ranges(xl, xu, yl, yu, k, kind, axis, i):
    if kind == 0:
        if axis == 0:
            return axis_tile_index(xl[i], k), axis_tile_index(xu[i], k), 0, 0
        return axis_tile_index(yl[i], k), axis_tile_index(yu[i], k), 0, 0
    c0 = axis_tile_index(xl[i], k)
    c1 = axis_tile_index(xu[i], k)
    r0 = axis_tile_index(yl[i], k)
    r1 = axis_tile_index(yu[i], k)
    return c0, c1, r0, r1


def count_tiles(xl, xu, yl, yu, k, kind, axis, start, stop, counts):
    """Add each rectangle in [start, stop) to the count of every tile it overlaps."""
    xl, xu, yl, yu = xl.tolist(), xu.tolist(), yl.tolist(), yu.tolist()
    for i in range(start, stop):
        a0, a1, b0, b1 = _ranges(xl, xu, yl, yu, k, kind, axis, i)
        if kind == 0:
            for t in range(a0, a1 + 1):
                counts[t] += 1
        else:
            for row in range(b0, b1 + 1):
                base = row * k
                for col in range(a0, a1 + 1):
                    counts[base + col] += 1


def write_tiles(ids, xl, xu, yl, yu, k, kind, axis, start, stop,
                cursors, out_ids, out_xl, out_xu, out_yl, out_yu):
    """Copy each rectangle in [start, stop) into the buffers of its tiles.

    ``cursors`` holds this writer's next free position per tile and is
    advanced in place.
    """
    lxl, lxu, lyl, lyu = xl.tolist(), xu.tolist(), yl.tolist(), yu.tolist()
    lids = ids.tolist()
    for i in range(start, stop):
        a0, a1, b0, b1 = _ranges(lxl, lxu, lyl, lyu, k, kind, axis, i)
        if kind == 0:
            tiles = range(a0, a1 + 1)
        else:
            tiles = (row * k + col
                     for row in range(b0, b1 + 1)
                     for col in range(a0, a1 + 1))
        for t in tiles:
            pos = cursors[t]
            cursors[t] = pos + 1
            out_ids[pos] = lids[i]
            out_xl[pos] = lxl[i]
            out_xu[pos] = lxu[i]
            out_yl[pos] = lyl[i]
            out_yu[pos] = lyu[i]


def _bucket_span(lo, width, kb, vlo, vhi):
    # Clip the projection to the tile, then map to half-open buckets.
    a = vlo if vlo > lo else lo
    b = vhi if vhi < lo + width else lo + width
    b0 = int((a - lo) * kb / width)
    b1 = int((b - lo) * kb / width)
    if b0 < 0:
        b0 = 0
    if b1 > kb - 1:
        b1 = kb - 1
    if b0 > b1:
        b0 = b1
    return b0, b1


def write_tiles_hist(ids, xl, xu, yl, yu, k, kind, axis, start, stop,
                     cursors, out_ids, out_xl, out_xu, out_yl, out_yu,
                     tile_offsets, phi, kb_x, kb_y, hist_x, hist_y):
    """write_tiles plus per-tile histogram sampling.

    Every rectangle landing at a buffer position divisible by ``phi``
    (position counted from the start of the tile's buffer, so the sample is
    identical no matter how the input was sliced across writers) increments
    the x/y histogram buckets its clipped projections overlap.
    """
    lxl, lxu, lyl, lyu = xl.tolist(), xu.tolist(), yl.tolist(), yu.tolist()
    lids = ids.tolist()
    for i in range(start, stop):
        a0, a1, b0, b1 = _ranges(lxl, lxu, lyl, lyu, k, kind, axis, i)
        if kind == 0:
            tiles = range(a0, a1 + 1)
        else:
            tiles = (row * k + col
                     for row in range(b0, b1 + 1)
                     for col in range(a0, a1 + 1))
        for t in tiles:
            pos = cursors[t]
            cursors[t] = pos + 1
            out_ids[pos] = lids[i]
            out_xl[pos] = lxl[i]
            out_xu[pos] = lxu[i]
            out_yl[pos] = lyl[i]
            out_yu[pos] = lyu[i]
            if (pos - tile_offsets[t]) % phi != 0:
                continue
            if kind == 0:
                if axis == 0:
                    x_lo, x_w = t / k, 1.0 / k
                    y_lo, y_w = 0.0, 1.0
                else:
                    x_lo, x_w = 0.0, 1.0
                    y_lo, y_w = t / k, 1.0 / k
            else:
                x_lo, x_w = (t % k) / k, 1.0 / k
                y_lo, y_w = (t // k) / k, 1.0 / k
            g0, g1 = _bucket_span(x_lo, x_w, kb_x, lxl[i], lxu[i])
            base = t * kb_x
            for g in range(g0, g1 + 1):
                hist_x[base + g] += 1
            g0, g1 = _bucket_span(y_lo, y_w, kb_y, lyl[i], lyu[i])
            base = t * kb_y
            for g in range(g0, g1 + 1):
                hist_y[base + g] += 1


def sort_segment(ids, xl, xu, yl, yu, lo, hi, axis):
    """Stable in-place sort of slice [lo, hi) by lower endpoint on ``axis``."""
    key = xl[lo:hi] if axis == 0 else yl[lo:hi]
    order = np.argsort(key, kind="stable")
    for arr in (ids, xl, xu, yl, yu):
        arr[lo:hi] = arr[lo:hi][order]


def _sweep(r_ids, r_alo, r_ahi, r_blo, r_bhi,
           s_ids, s_alo, s_ahi, s_blo, s_bhi,
           dup_mode, t_alo, t_blo, out_r, out_s):
    """Forward-scan plane sweep over segments sorted by lower sweep endpoint.

    Appends qualifying id pairs to out_r/out_s when collecting (out_r is not
    None), and always returns the qualifying pair count. Equal lower sweep
    endpoints advance the S cursor.
    """
    n_r, n_s = len(r_alo), len(s_alo)
    test_a = bool(dup_mode & 1)
    test_b = bool(dup_mode & 2)
    collect = out_r is not None
    count = 0
    i = j = 0
    while i < n_r and j < n_s:
        if r_alo[i] < s_alo[j]:
            r_hi = r_ahi[i]
            rb_lo, rb_hi, ra_lo = r_blo[i], r_bhi[i], r_alo[i]
            kk = j
            while kk < n_s and r_hi >= s_alo[kk]:
                if rb_lo <= s_bhi[kk] and s_blo[kk] <= rb_hi:
                    if test_a and max(ra_lo, s_alo[kk]) < t_alo:
                        kk += 1
                        continue
                    if test_b and max(rb_lo, s_blo[kk]) < t_blo:
                        kk += 1
                        continue
                    count += 1
                    if collect:
                        out_r.append(r_ids[i])
                        out_s.append(s_ids[kk])
                kk += 1
            i += 1
        else:
            s_hi = s_ahi[j]
            sb_lo, sb_hi, sa_lo = s_blo[j], s_bhi[j], s_alo[j]
            kk = i
            while kk < n_r and s_hi >= r_alo[kk]:
                if sb_lo <= r_bhi[kk] and r_blo[kk] <= sb_hi:
                    if test_a and max(sa_lo, r_alo[kk]) < t_alo:
                        kk += 1
                        continue
                    if test_b and max(sb_lo, r_blo[kk]) < t_blo:
                        kk += 1
                        continue
                    count += 1
                    if collect:
                        out_r.append(r_ids[kk])
                        out_s.append(s_ids[j])
                kk += 1
            j += 1
    return count


def sweep_count(r_alo, r_ahi, r_blo, r_bhi,
                s_alo, s_ahi, s_blo, s_bhi,
                dup_mode, t_alo, t_blo):
    return _sweep(None, r_alo.tolist(), r_ahi.tolist(), r_blo.tolist(), r_bhi.tolist(),
                  None, s_alo.tolist(), s_ahi.tolist(), s_blo.tolist(), s_bhi.tolist(),
                  dup_mode, t_alo, t_blo, None, None)


def sweep_collect(r_ids, r_alo, r_ahi, r_blo, r_bhi,
                  s_ids, s_alo, s_ahi, s_blo, s_bhi,
                  dup_mode, t_alo, t_blo):
    out_r: list[int] = []
    out_s: list[int] = []
    _sweep(r_ids.tolist(), r_alo.tolist(), r_ahi.tolist(), r_blo.tolist(), r_bhi.tolist(),
           s_ids.tolist(), s_alo.tolist(), s_ahi.tolist(), s_blo.tolist(), s_bhi.tolist(),
           dup_mode, t_alo, t_blo, out_r, out_s)
    return (np.asarray(out_r, dtype=np.int64),
            np.asarray(out_s, dtype=np.int64))
