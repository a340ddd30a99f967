"""Shared random-instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from sweepjoin import Rect, RectBatch

# extent scales drawn per instance side; 0.0 makes degenerate point data
EXTENT_SCALES = (0.0, 0.002, 0.02, 0.08)


def random_batch(rng: np.random.Generator, n: int, extent: float,
                 point_fraction: float = 0.0, id_base: int = 0) -> RectBatch:
    """Uniform rectangles with exponential extents, clipped to the unit square."""
    cx, cy = rng.random(n), rng.random(n)
    if extent > 0.0:
        ex = rng.exponential(extent, n)
        ey = rng.exponential(extent, n)
    else:
        ex = np.zeros(n)
        ey = np.zeros(n)
    if point_fraction > 0.0:
        pts = rng.random(n) < point_fraction
        ex[pts] = 0.0
        ey[pts] = 0.0
    return RectBatch(
        np.arange(id_base, id_base + n, dtype=np.int64),
        np.clip(cx - ex / 2, 0.0, 1.0), np.clip(cx + ex / 2, 0.0, 1.0),
        np.clip(cy - ey / 2, 0.0, 1.0), np.clip(cy + ey / 2, 0.0, 1.0),
    )


def random_instance(rng: np.random.Generator, n_max: int = 500
                    ) -> tuple[RectBatch, RectBatch]:
    """A join instance with mixed extents, including degenerate points."""
    n_r = int(rng.integers(1, n_max + 1))
    n_s = int(rng.integers(1, n_max + 1))
    ext_r = float(rng.choice(EXTENT_SCALES))
    ext_s = float(rng.choice(EXTENT_SCALES))
    mix = float(rng.choice([0.0, 0.3]))
    r = random_batch(rng, n_r, ext_r, point_fraction=mix, id_base=0)
    s = random_batch(rng, n_s, ext_s, point_fraction=mix, id_base=1_000_000)
    return r, s


def random_points(rng: np.random.Generator, n: int, id_base: int = 0) -> RectBatch:
    x, y = rng.random(n), rng.random(n)
    return RectBatch(np.arange(id_base, id_base + n, dtype=np.int64), x, x, y, y)


def pair_set(report_pairs) -> set[tuple[int, int]]:
    return set(map(tuple, report_pairs.tolist()))


def rect_list(batch: RectBatch) -> list[Rect]:
    return batch.to_rects()
