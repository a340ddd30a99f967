"""Forward-scan plane sweep over rectangle sequences.

This is the object-level API: convenient for small inputs, callbacks and
tests. The join engine drives the same algorithm through the array kernels
in ``backends`` instead.
"""

from __future__ import annotations

from typing import Callable, Literal, Sequence

import numpy as np

from .axismodel import MAX_BUCKETS, bucket_count_for_tile, build_histograms, select_axis
from .geometry import Axis, Rect, TileExtent, as_batch

SinkMode = Literal["count-only", "collect-pairs"]
AxisPolicy = Literal["x", "y", "adaptive"]

DupFilter = Callable[[Rect, Rect], bool]


class ResultSink:
    """Join-result accumulator: always counts, optionally stores id pairs."""

    __slots__ = ("mode", "count", "pairs")

    def __init__(self, mode: SinkMode = "count-only"):
        if mode not in ("count-only", "collect-pairs"):
            raise ValueError(f"unknown sink mode {mode!r}")
        self.mode = mode
        self.count = 0
        self.pairs: list[tuple[int, int]] | None = (
            [] if mode == "collect-pairs" else None
        )

    def add(self, r_id: int, s_id: int) -> None:
        self.count += 1
        if self.pairs is not None:
            self.pairs.append((r_id, s_id))

    def __repr__(self) -> str:
        return f"ResultSink(mode={self.mode!r}, count={self.count})"


def sort_by_lower(rects: Sequence[Rect], axis: Axis) -> list[Rect]:
    """Rectangles ordered by lower endpoint on ``axis`` (ties arbitrary)."""
    if axis is Axis.X:
        return sorted(rects, key=lambda r: r.xl)
    return sorted(rects, key=lambda r: r.yl)


def forward_scan_join(r_sorted: Sequence[Rect], s_sorted: Sequence[Rect],
                      sweep_axis: Axis, dup_filter: DupFilter | None = None,
                      sink: ResultSink | None = None) -> ResultSink:
    """Merge two sequences sorted by lower endpoint on ``sweep_axis``.

    Whichever side currently has the strictly smaller lower endpoint scans
    the other side forward while sweep-axis projections still overlap; pairs
    that also overlap on the other axis (and pass ``dup_filter``, when given)
    reach the sink exactly once. Equal lower endpoints advance the S cursor.
    """
    if sink is None:
        sink = ResultSink()
    if sweep_axis is Axis.X:
        def proj(rect):  # (sweep lo, sweep hi, other lo, other hi)
            return rect.xl, rect.xu, rect.yl, rect.yu
    else:
        def proj(rect):
            return rect.yl, rect.yu, rect.xl, rect.xu

    r_p = [proj(rect) for rect in r_sorted]
    s_p = [proj(rect) for rect in s_sorted]
    n_r, n_s = len(r_p), len(s_p)
    i = j = 0
    while i < n_r and j < n_s:
        if r_p[i][0] < s_p[j][0]:
            r_hi = r_p[i][1]
            _, _, rb_lo, rb_hi = r_p[i]
            k = j
            while k < n_s and r_hi >= s_p[k][0]:
                if rb_lo <= s_p[k][3] and s_p[k][2] <= rb_hi:
                    if dup_filter is None or dup_filter(r_sorted[i], s_sorted[k]):
                        sink.add(r_sorted[i].id, s_sorted[k].id)
                k += 1
            i += 1
        else:
            s_hi = s_p[j][1]
            _, _, sb_lo, sb_hi = s_p[j]
            k = i
            while k < n_r and s_hi >= r_p[k][0]:
                if sb_lo <= r_p[k][3] and r_p[k][2] <= sb_hi:
                    if dup_filter is None or dup_filter(r_sorted[k], s_sorted[j]):
                        sink.add(r_sorted[k].id, s_sorted[j].id)
                k += 1
            j += 1
    return sink


_UNIT_TILE = TileExtent(0.0, 1.0, 0.0, 1.0, row=0)


def _default_bucket_count(r: Sequence[Rect], s: Sequence[Rect]) -> int:
    rb, sb = as_batch(r), as_batch(s)
    n = len(rb) + len(sb)
    if n == 0:
        return 1
    total = (np.sum(rb.xu - rb.xl) + np.sum(rb.yu - rb.yl)
             + np.sum(sb.xu - sb.xl) + np.sum(sb.yu - sb.yl))
    avg = float(total) / (2 * n)
    if avg <= 0.0:  # pure point data: finest resolution
        return MAX_BUCKETS
    return bucket_count_for_tile(1.0, avg)


def choose_sweep_axis(r: Sequence[Rect], s: Sequence[Rect],
                      phi: int = 1, k_buckets: int | None = None) -> Axis:
    """Model-chosen sweep axis for joining ``r`` and ``s`` without partitioning."""
    if k_buckets is None:
        k_buckets = _default_bucket_count(r, s)
    hist = build_histograms(r, s, _UNIT_TILE, k_buckets, phi)
    return select_axis(hist)


def choose_and_sweep(r: Sequence[Rect], s: Sequence[Rect],
                     axis_policy: AxisPolicy | Axis = "adaptive",
                     sink: ResultSink | None = None,
                     phi: int = 1, k_buckets: int | None = None) -> ResultSink:
    """Sort both inputs on the policy's axis and run the forward scan.

    Policy "x"/"y" forces the axis; "adaptive" asks the histogram model.
    The emitted pair set does not depend on the axis, only the runtime does.
    """
    if isinstance(axis_policy, Axis):
        axis = axis_policy
    elif axis_policy == "x":
        axis = Axis.X
    elif axis_policy == "y":
        axis = Axis.Y
    elif axis_policy == "adaptive":
        axis = choose_sweep_axis(r, s, phi=phi, k_buckets=k_buckets)
    else:
        raise ValueError(f"unknown axis policy {axis_policy!r}")
    return forward_scan_join(sort_by_lower(r, axis), sort_by_lower(s, axis),
                             axis, sink=sink)
