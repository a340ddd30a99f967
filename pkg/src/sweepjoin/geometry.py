"""Rectangles, tiles and the intersection / duplicate-test predicates.

Coordinates are normalized 64-bit floats in [0, 1]. Rectangles are closed
intervals on both axes (a shared boundary point counts as an intersection);
tiles are half-open, closed only where they touch the domain boundary at 1.0.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np


class Axis(IntEnum):
    X = 0
    Y = 1

    @property
    def other(self) -> "Axis":
        return Axis.Y if self is Axis.X else Axis.X


class Rect(NamedTuple):
    """Axis-aligned rectangle with an opaque 64-bit id.

    Degenerate (zero-extent) rectangles are valid and model points.
    """

    id: int
    xl: float
    xu: float
    yl: float
    yu: float


class TileExtent(NamedTuple):
    """Spatial extent of one partition tile.

    ``row`` indexes the y-division and ``col`` the x-division of a grid;
    1D stripes keep their stripe index in ``row`` and leave ``col`` at 0.
    A point p lies inside iff xl <= p.x < xu and yl <= p.y < yu, except on
    the domain boundary at 1.0 where the tile is closed.
    """

    xl: float
    xu: float
    yl: float
    yu: float
    row: int
    col: int = 0

    def lower(self, axis: Axis) -> float:
        return self.xl if axis is Axis.X else self.yl


def intersects(r: Rect, s: Rect) -> bool:
    """True iff the closed rectangles share at least one point."""
    return r.xl <= s.xu and s.xl <= r.xu and r.yl <= s.yu and s.yl <= r.yu


def duplicate_test_2d(r: Rect, s: Rect, t: TileExtent) -> bool:
    """True iff tile ``t`` owns the pair (r, s).

    The owner is the tile containing the top-left reference point of the
    intersection region, i.e. (max of the lower x bounds, max of the lower
    y bounds). Callers guarantee both rectangles are assigned to ``t`` and
    intersect, which makes the upper-bound checks redundant.
    """
    return max(r.xl, s.xl) >= t.xl and max(r.yl, s.yl) >= t.yl


def duplicate_test_1d(r: Rect, s: Rect, t: TileExtent, partition_axis: Axis) -> bool:
    """Single-comparison variant of the duplicate test for 1D stripes."""
    if partition_axis is Axis.X:
        return max(r.xl, s.xl) >= t.xl
    return max(r.yl, s.yl) >= t.yl


def tile_boundary(i: int, k: int) -> float:
    """Lower coordinate of division ``i`` in a k-way split of [0, 1]."""
    return i / k


def axis_tile_index(p: float, k: int) -> int:
    """Index of the half-open division of [0, 1] containing point ``p``.

    floor(p * k) clamped to [0, k-1], then nudged so the result is exactly
    consistent with comparisons against the materialized boundaries i / k.
    Without the nudge, floor arithmetic and boundary comparisons can
    disagree by one division for points within a rounding error of a
    boundary, which would break the one-owner-tile guarantee.
    Keep in sync with the kernel implementations in ``_kernels.pyx``.
    """
    i = int(p * k)
    if i < 0:
        i = 0
    elif i > k - 1:
        i = k - 1
    while i > 0 and p < i / k:
        i -= 1
    while i < k - 1 and p >= (i + 1) / k:
        i += 1
    return i


@dataclass
class RectBatch:
    """Column-store of rectangles: the bulk form consumed by the engine.

    Arrays are parallel, C-contiguous, float64 / int64.
    """

    ids: np.ndarray
    xl: np.ndarray
    xu: np.ndarray
    yl: np.ndarray
    yu: np.ndarray

    def __post_init__(self) -> None:
        self.ids = np.ascontiguousarray(self.ids, dtype=np.int64)
        self.xl = np.ascontiguousarray(self.xl, dtype=np.float64)
        self.xu = np.ascontiguousarray(self.xu, dtype=np.float64)
        self.yl = np.ascontiguousarray(self.yl, dtype=np.float64)
        self.yu = np.ascontiguousarray(self.yu, dtype=np.float64)
        n = len(self.ids)
        if not (len(self.xl) == len(self.xu) == len(self.yl) == len(self.yu) == n):
            raise ValueError("RectBatch arrays must have equal length")

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[Rect]:
        for i in range(len(self)):
            yield self.rect(i)

    def rect(self, i: int) -> Rect:
        return Rect(
            int(self.ids[i]),
            float(self.xl[i]),
            float(self.xu[i]),
            float(self.yl[i]),
            float(self.yu[i]),
        )

    @classmethod
    def empty(cls) -> "RectBatch":
        z = np.empty(0)
        return cls(z, z, z, z, z)

    @classmethod
    def from_rects(cls, rects: Iterable[Rect]) -> "RectBatch":
        rows = list(rects)
        if not rows:
            return cls.empty()
        # ids must not round-trip through float64 (precision ends at 2**53)
        ids = np.fromiter((r.id for r in rows), dtype=np.int64, count=len(rows))
        arr = np.array([(r.xl, r.xu, r.yl, r.yu) for r in rows], dtype=np.float64)
        return cls(ids, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])

    def to_rects(self) -> list[Rect]:
        return list(self)

    def validate(self) -> None:
        """Raise if any rectangle is inverted or outside the unit square."""
        if len(self) == 0:
            return
        if not (np.all(self.xl <= self.xu) and np.all(self.yl <= self.yu)):
            raise ValueError("inverted rectangle: lower bound exceeds upper bound")
        lo = min(self.xl.min(), self.yl.min())
        hi = max(self.xu.max(), self.yu.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(
                "coordinates outside [0, 1]; normalize the datasets first"
            )


def as_batch(data: RectBatch | Sequence[Rect]) -> RectBatch:
    if isinstance(data, RectBatch):
        return data
    return RectBatch.from_rects(data)
