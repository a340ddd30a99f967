"""Brute-force reference joins used for verification.

These evaluate every pair in R x S directly and share no code with the sweep
kernels or the partitioner, so they can arbitrate correctness. O(|R|*|S|):
keep inputs small.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .geometry import Rect, RectBatch, as_batch

_BLOCK = 512  # rows of R per broadcast block, bounds peak memory


def nested_loop_join(r: RectBatch | Sequence[Rect],
                     s: RectBatch | Sequence[Rect]) -> set[tuple[int, int]]:
    """All id pairs whose closed rectangles share at least one point."""
    a, b = as_batch(r), as_batch(s)
    if len(a) == 0 or len(b) == 0:
        return set()
    out: set[tuple[int, int]] = set()
    for lo in range(0, len(a), _BLOCK):
        hi = lo + _BLOCK
        overlap = (
            (a.xl[lo:hi, None] <= b.xu[None, :])
            & (b.xl[None, :] <= a.xu[lo:hi, None])
            & (a.yl[lo:hi, None] <= b.yu[None, :])
            & (b.yl[None, :] <= a.yu[lo:hi, None])
        )
        ri, si = np.nonzero(overlap)
        out.update(zip(a.ids[lo:hi][ri].tolist(), b.ids[si].tolist()))
    return out


def nested_loop_distance(p: RectBatch | Sequence[Rect],
                         q: RectBatch | Sequence[Rect],
                         eps: float) -> set[tuple[int, int]]:
    """All id pairs of points within Euclidean distance ``eps``.

    Point coordinates are taken from the lower corners of the inputs.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    a, b = as_batch(p), as_batch(q)
    if len(a) == 0 or len(b) == 0:
        return set()
    out: set[tuple[int, int]] = set()
    for lo in range(0, len(a), _BLOCK):
        hi = lo + _BLOCK
        dist = np.hypot(a.xl[lo:hi, None] - b.xl[None, :],
                        a.yl[lo:hi, None] - b.yl[None, :])
        ri, si = np.nonzero(dist <= eps)
        out.update(zip(a.ids[lo:hi][ri].tolist(), b.ids[si].tolist()))
    return out
