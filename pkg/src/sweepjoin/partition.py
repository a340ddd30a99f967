"""Space partitioning: K stripes or a K x K grid over the unit square.

Every rectangle is copied into every partition it overlaps (replication), so
each tile can be joined independently; the reference-point duplicate test in
the sweep later keeps each result pair unique. Partitioning is two-pass:
count, then write into pre-sized contiguous per-tile buffers, which lets any
number of writer threads fill disjoint ranges without coordination.
"""

from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from . import backends
from .errors import InvalidStatisticsError
from .geometry import Axis, Rect, RectBatch, TileExtent, as_batch, axis_tile_index, tile_boundary

DEFAULT_K_MAX = 20000

PartitionKind = Literal["1d", "2d"]


@dataclass(frozen=True)
class PartitionLayout:
    """A k-way stripe split ("1d") or k x k grid ("2d") of the unit square."""

    kind: PartitionKind
    k: int
    partition_axis: Axis = Axis.X  # stripes only; ignored for grids

    def __post_init__(self) -> None:
        if self.kind not in ("1d", "2d"):
            raise ValueError(f"unknown partition kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @property
    def n_tiles(self) -> int:
        return self.k if self.kind == "1d" else self.k * self.k

    @property
    def kind_code(self) -> int:
        return 0 if self.kind == "1d" else 1

    @property
    def axis_code(self) -> int:
        return int(self.partition_axis)

    def tile_extent(self, t: int) -> TileExtent:
        """Extent of flat tile index ``t`` (grid tiles are numbered row * k + col)."""
        k = self.k
        if not 0 <= t < self.n_tiles:
            raise IndexError(f"tile {t} out of range for {self.n_tiles} tiles")
        if self.kind == "1d":
            lo = tile_boundary(t, k)
            hi = tile_boundary(t + 1, k)
            if self.partition_axis is Axis.X:
                return TileExtent(lo, hi, 0.0, 1.0, row=t)
            return TileExtent(0.0, 1.0, lo, hi, row=t)
        row, col = divmod(t, k)
        return TileExtent(
            tile_boundary(col, k), tile_boundary(col + 1, k),
            tile_boundary(row, k), tile_boundary(row + 1, k),
            row=row, col=col,
        )

    def tile_extents(self) -> list[TileExtent]:
        return [self.tile_extent(t) for t in range(self.n_tiles)]


@dataclass
class PartitionedDataset:
    """Per-tile contiguous rectangle buffers for one join input.

    ``offsets`` is a CSR-style array of length n_tiles + 1; tile ``t`` owns
    rows [offsets[t], offsets[t+1]) of the parallel coordinate arrays.
    ``hist_x``/``hist_y`` hold per-tile sampled projection histograms
    (flattened (n_tiles, buckets)) when the partitioning pass was asked to
    collect them.
    """

    layout: PartitionLayout
    offsets: np.ndarray
    ids: np.ndarray
    xl: np.ndarray
    xu: np.ndarray
    yl: np.ndarray
    yu: np.ndarray
    source_count: int
    hist_x: np.ndarray | None = None
    hist_y: np.ndarray | None = None

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def total_assigned(self) -> int:
        return int(self.offsets[-1])

    def tile_bounds(self, t: int) -> tuple[int, int]:
        return int(self.offsets[t]), int(self.offsets[t + 1])

    def tile_batch(self, t: int) -> RectBatch:
        lo, hi = self.tile_bounds(t)
        return RectBatch(self.ids[lo:hi], self.xl[lo:hi], self.xu[lo:hi],
                         self.yl[lo:hi], self.yu[lo:hi])


def tiles_overlapping(r: Rect, layout: PartitionLayout) -> list[int]:
    """Flat indices of every tile the closed rectangle overlaps, ascending."""
    k = layout.k
    if layout.kind == "1d":
        if layout.partition_axis is Axis.X:
            lo, hi = r.xl, r.xu
        else:
            lo, hi = r.yl, r.yu
        return list(range(axis_tile_index(lo, k), axis_tile_index(hi, k) + 1))
    c0, c1 = axis_tile_index(r.xl, k), axis_tile_index(r.xu, k)
    r0, r1 = axis_tile_index(r.yl, k), axis_tile_index(r.yu, k)
    return [row * k + col
            for row in range(r0, r1 + 1)
            for col in range(c0, c1 + 1)]


def split_slices(n: int, m: int) -> list[tuple[int, int]]:
    """Divide range(n) into m near-equal contiguous [start, stop) slices."""
    bounds = np.linspace(0, n, m + 1).astype(np.int64)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(m)]


def count_pass(rects: RectBatch | Sequence[Rect], layout: PartitionLayout,
               start: int = 0, stop: int | None = None,
               kernels=None) -> np.ndarray:
    """Per-tile assignment counts for rows [start, stop) of the input."""
    batch = as_batch(rects)
    if stop is None:
        stop = len(batch)
    kern = kernels if kernels is not None else backends.get_kernels()
    counts = np.zeros(layout.n_tiles, dtype=np.int64)
    kern.count_tiles(batch.xl, batch.xu, batch.yl, batch.yu,
                     layout.k, layout.kind_code, layout.axis_code,
                     start, stop, counts)
    return counts


def compute_segment_offsets(per_slice_counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Turn an (m, n_tiles) count matrix into write positions.

    Returns (tile_offsets, segment_starts): tile_offsets is the CSR array of
    tile buffer boundaries; segment_starts[i, t] is the absolute position at
    which writer i starts writing into tile t.
    """
    per_slice_counts = np.atleast_2d(np.asarray(per_slice_counts, dtype=np.int64))
    totals = per_slice_counts.sum(axis=0)
    tile_offsets = np.zeros(len(totals) + 1, dtype=np.int64)
    np.cumsum(totals, out=tile_offsets[1:])
    within = np.zeros_like(per_slice_counts)
    np.cumsum(per_slice_counts[:-1], axis=0, out=within[1:])
    return tile_offsets, within + tile_offsets[:-1]


@dataclass(frozen=True)
class HistogramSpec:
    """Ask the write pass to sample per-tile projection histograms."""

    phi: int
    kb_x: int
    kb_y: int


def write_pass(rects: RectBatch | Sequence[Rect], layout: PartitionLayout,
               counts: np.ndarray, segment_offsets: np.ndarray,
               executor: Executor | None = None, kernels=None,
               hist: HistogramSpec | None = None) -> PartitionedDataset:
    """Fill per-tile buffers; each writer owns the ranges in ``segment_offsets``.

    ``counts`` are the full per-tile counts from the count pass;
    ``segment_offsets`` has one row of per-tile start positions per writer
    (the input is split into the same number of contiguous slices).
    """
    batch = as_batch(rects)
    kern = kernels if kernels is not None else backends.get_kernels()
    seg = np.atleast_2d(np.asarray(segment_offsets, dtype=np.int64))
    m = seg.shape[0]
    n_tiles = layout.n_tiles
    tile_offsets = np.zeros(n_tiles + 1, dtype=np.int64)
    np.cumsum(np.asarray(counts, dtype=np.int64), out=tile_offsets[1:])
    total = int(tile_offsets[-1])

    out_ids = np.empty(total, dtype=np.int64)
    out_xl = np.empty(total, dtype=np.float64)
    out_xu = np.empty(total, dtype=np.float64)
    out_yl = np.empty(total, dtype=np.float64)
    out_yu = np.empty(total, dtype=np.float64)

    slices = split_slices(len(batch), m)
    cursors = [seg[i].copy() for i in range(m)]
    hists = None
    if hist is not None:
        hists = [(np.zeros(n_tiles * hist.kb_x, dtype=np.int64),
                  np.zeros(n_tiles * hist.kb_y, dtype=np.int64)) for _ in range(m)]

    def write_slice(i: int) -> None:
        start, stop = slices[i]
        if hist is None:
            kern.write_tiles(batch.ids, batch.xl, batch.xu, batch.yl, batch.yu,
                             layout.k, layout.kind_code, layout.axis_code,
                             start, stop, cursors[i],
                             out_ids, out_xl, out_xu, out_yl, out_yu)
        else:
            kern.write_tiles_hist(batch.ids, batch.xl, batch.xu, batch.yl, batch.yu,
                                  layout.k, layout.kind_code, layout.axis_code,
                                  start, stop, cursors[i],
                                  out_ids, out_xl, out_xu, out_yl, out_yu,
                                  tile_offsets, hist.phi, hist.kb_x, hist.kb_y,
                                  hists[i][0], hists[i][1])

    if executor is not None and m > 1:
        list(executor.map(write_slice, range(m)))
    else:
        for i in range(m):
            write_slice(i)

    # Bug guard: every writer must land exactly on the next segment start.
    expected = np.vstack([seg[1:], tile_offsets[1:].reshape(1, -1)])
    final = np.vstack(cursors)
    if not np.array_equal(final, expected):
        raise RuntimeError("partition write overflow: count and write passes disagree")

    pd = PartitionedDataset(layout, tile_offsets, out_ids, out_xl, out_xu,
                            out_yl, out_yu, source_count=len(batch))
    if hists is not None:
        pd.hist_x = np.sum([h[0] for h in hists], axis=0).reshape(n_tiles, hist.kb_x)
        pd.hist_y = np.sum([h[1] for h in hists], axis=0).reshape(n_tiles, hist.kb_y)
    return pd


def partition(rects: RectBatch | Sequence[Rect], layout: PartitionLayout,
              m: int = 1, executor: Executor | None = None, kernels=None,
              hist: HistogramSpec | None = None) -> PartitionedDataset:
    """Two-pass parallel partitioning: count, plan offsets, write."""
    batch = as_batch(rects)
    m = max(1, min(m, max(1, len(batch))))
    slices = split_slices(len(batch), m)

    def count_slice(i: int) -> np.ndarray:
        start, stop = slices[i]
        return count_pass(batch, layout, start, stop, kernels=kernels)

    if executor is not None and m > 1:
        per_slice = list(executor.map(count_slice, range(m)))
    else:
        per_slice = [count_slice(i) for i in range(m)]
    per_slice_counts = np.vstack(per_slice)
    totals = per_slice_counts.sum(axis=0)
    _, seg_starts = compute_segment_offsets(per_slice_counts)
    return write_pass(batch, layout, totals, seg_starts,
                      executor=executor, kernels=kernels, hist=hist)


def recommend_k(avg_extent_split_axis: float, kind: PartitionKind = "1d",
                k_max: int = DEFAULT_K_MAX) -> int:
    """Division count whose partitions are ~10x wider than the average rectangle.

    The same per-axis rule applies to stripes and grids.
    """
    if not avg_extent_split_axis > 0.0:
        raise InvalidStatisticsError(
            f"average extent must be positive, got {avg_extent_split_axis!r}"
        )
    return int(np.clip(round(1.0 / (10.0 * avg_extent_split_axis)), 1, k_max))
