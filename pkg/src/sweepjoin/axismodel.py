"""Histogram model for picking the sweeping axis of a partition.

For each axis, the expected number of candidate pairs (pairs whose
projections overlap on that axis) is estimated as the dot product of two
bucketed projection histograms, one per input. Sweeping along the axis with
the smaller estimate means fewer candidates survive to the cross-axis check,
which is where plane sweep spends its time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor
from typing import Sequence

import numpy as np

from .errors import InvalidHistogramError, InvalidStatisticsError
from .geometry import Axis, Rect, TileExtent, as_batch

DEFAULT_PHI = 100
MAX_BUCKETS = 1000


@dataclass
class AxisHistograms:
    """Sampled per-axis projection histograms for the two inputs of one tile."""

    k_buckets: int
    h_r_x: np.ndarray
    h_r_y: np.ndarray
    h_s_x: np.ndarray
    h_s_y: np.ndarray
    phi: int


def _axis_histogram(lo_vals: np.ndarray, hi_vals: np.ndarray,
                    lo: float, hi: float, k_buckets: int) -> np.ndarray:
    """Count, per bucket of [lo, hi), the projections overlapping it.

    Projections are clipped to the tile; buckets are half-open like tiles.
    """
    hist = np.zeros(k_buckets, dtype=np.int64)
    if len(lo_vals) == 0:
        return hist
    keep = (hi_vals >= lo) & (lo_vals <= hi)
    lo_vals, hi_vals = lo_vals[keep], hi_vals[keep]
    if len(lo_vals) == 0:
        return hist
    width = hi - lo
    scale = k_buckets / width
    b0 = np.floor((np.clip(lo_vals, lo, hi) - lo) * scale).astype(np.int64)
    b1 = np.floor((np.clip(hi_vals, lo, hi) - lo) * scale).astype(np.int64)
    np.clip(b0, 0, k_buckets - 1, out=b0)
    np.clip(b1, 0, k_buckets - 1, out=b1)
    # range increment via difference array: +1 at b0, -1 past b1, then prefix sum
    delta = np.zeros(k_buckets + 1, dtype=np.int64)
    np.add.at(delta, b0, 1)
    np.add.at(delta, b1 + 1, -1)
    np.cumsum(delta[:-1], out=hist)
    return hist


def build_histograms(r_tile: Sequence[Rect], s_tile: Sequence[Rect],
                     extent: TileExtent, k_buckets: int,
                     phi: int = DEFAULT_PHI) -> AxisHistograms:
    """Histograms from every phi-th rectangle of each tile buffer.

    Sampling is deterministic: buffer positions 0, phi, 2*phi, ...
    """
    if k_buckets < 1:
        raise InvalidHistogramError("k_buckets must be >= 1")
    if phi < 1:
        raise InvalidStatisticsError("phi must be >= 1")
    r = as_batch(r_tile)
    s = as_batch(s_tile)
    return AxisHistograms(
        k_buckets=k_buckets,
        h_r_x=_axis_histogram(r.xl[::phi], r.xu[::phi], extent.xl, extent.xu, k_buckets),
        h_r_y=_axis_histogram(r.yl[::phi], r.yu[::phi], extent.yl, extent.yu, k_buckets),
        h_s_x=_axis_histogram(s.xl[::phi], s.xu[::phi], extent.xl, extent.xu, k_buckets),
        h_s_y=_axis_histogram(s.yl[::phi], s.yu[::phi], extent.yl, extent.yu, k_buckets),
        phi=phi,
    )


def candidate_count(h_a: np.ndarray, h_b: np.ndarray) -> int:
    """Estimated overlapping-projection pairs: the histogram dot product."""
    h_a = np.asarray(h_a, dtype=np.int64)
    h_b = np.asarray(h_b, dtype=np.int64)
    if h_a.shape != h_b.shape:
        raise InvalidHistogramError(
            f"histogram length mismatch: {h_a.shape} vs {h_b.shape}"
        )
    return int(h_a @ h_b)


def select_axis(hist: AxisHistograms) -> Axis:
    """Axis with the fewer estimated candidates; ties go to X."""
    i_x = candidate_count(hist.h_r_x, hist.h_s_x)
    i_y = candidate_count(hist.h_r_y, hist.h_s_y)
    return Axis.X if i_x <= i_y else Axis.Y


def bucket_count_for_tile(tile_extent_len: float, avg_rect_extent_len: float) -> int:
    """Bucket count: tile length over average rectangle length, capped at 1000."""
    if not tile_extent_len > 0.0:
        raise InvalidStatisticsError("tile extent must be positive")
    if not avg_rect_extent_len > 0.0:
        raise InvalidStatisticsError("average rectangle extent must be positive")
    return min(MAX_BUCKETS, max(1, floor(tile_extent_len / avg_rect_extent_len)))
