import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepjoin import (
    Axis,
    PartitionLayout,
    Rect,
    RectBatch,
    axis_tile_index,
    duplicate_test_1d,
    duplicate_test_2d,
    intersects,
    tile_boundary,
    tiles_overlapping,
)


def rect(xl, xu, yl, yu, rid=0):
    return Rect(rid, xl, xu, yl, yu)


coord = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def rects(draw):
    x1, x2 = sorted((draw(coord), draw(coord)))
    y1, y2 = sorted((draw(coord), draw(coord)))
    return rect(x1, x2, y1, y2)


class TestIntersects:
    def test_disjoint_x_projections(self):
        assert not intersects(rect(0, 0.4, 0, 0.4), rect(0.5, 0.9, 0, 0.4))

    def test_boundary_touch_counts(self):
        assert intersects(rect(0, 0.4, 0, 0.4), rect(0.4, 0.9, 0.4, 0.9))

    def test_containment(self):
        assert intersects(rect(0.1, 0.3, 0.1, 0.3), rect(0.15, 0.2, 0.15, 0.2))

    def test_degenerate_point_on_edge(self):
        assert intersects(rect(0.2, 0.2, 0.2, 0.2), rect(0.2, 0.5, 0.1, 0.3))

    @given(rects(), rects())
    def test_symmetric(self, r, s):
        assert intersects(r, s) == intersects(s, r)


class TestDuplicateTests:
    def _tile(self, layout, t):
        return layout.tile_extent(t)

    def test_reference_point_inside(self):
        r = rect(0.05, 0.15, 0.05, 0.15)
        s = rect(0.08, 0.2, 0.08, 0.2)
        t = PartitionLayout("2d", 10).tile_extent(0)  # [0,0.1) x [0,0.1)
        assert duplicate_test_2d(r, s, t)

    def test_reference_point_outside(self):
        r = rect(0.05, 0.15, 0.05, 0.15)
        s = rect(0.08, 0.2, 0.08, 0.2)
        t = PartitionLayout("2d", 10).tile_extent(1)  # [0.1,0.2) x [0,0.1)
        assert not duplicate_test_2d(r, s, t)

    def test_1d_stripe_examples(self):
        r = rect(0.05, 0.15, 0.0, 1.0)
        s = rect(0.08, 0.2, 0.0, 1.0)
        layout = PartitionLayout("1d", 10, Axis.X)
        assert duplicate_test_1d(r, s, layout.tile_extent(0), Axis.X)
        assert not duplicate_test_1d(r, s, layout.tile_extent(1), Axis.X)

    @pytest.mark.parametrize("kind,k", [("2d", 2), ("2d", 5), ("1d", 3), ("1d", 8)])
    def test_exactly_one_owner_tile_random(self, kind, k):
        rng = np.random.default_rng(7)
        layout = PartitionLayout(kind, k)
        for _ in range(400):
            vals = rng.random(8)
            r = rect(*sorted(vals[0:2]), *sorted(vals[2:4]))
            s = rect(*sorted(vals[4:6]), *sorted(vals[6:8]))
            if not intersects(r, s):
                continue
            common = set(tiles_overlapping(r, layout)) & set(tiles_overlapping(s, layout))
            assert common, "intersecting pair must share at least one tile"
            passing = [
                t for t in common
                if (duplicate_test_2d(r, s, layout.tile_extent(t)) if kind == "2d"
                    else duplicate_test_1d(r, s, layout.tile_extent(t), Axis.X))
            ]
            assert len(passing) == 1

    @given(rects(), rects(), st.integers(min_value=1, max_value=9))
    @settings(max_examples=200)
    def test_exactly_one_owner_tile_adversarial(self, r, s, k):
        # hypothesis likes boundary floats, which stress the index arithmetic
        if not intersects(r, s):
            return
        layout = PartitionLayout("2d", k)
        common = set(tiles_overlapping(r, layout)) & set(tiles_overlapping(s, layout))
        passing = [t for t in common if duplicate_test_2d(r, s, layout.tile_extent(t))]
        assert len(passing) == 1


class TestTileIndexing:
    @given(coord, st.integers(min_value=1, max_value=10_000))
    def test_index_matches_boundaries(self, p, k):
        i = axis_tile_index(p, k)
        assert 0 <= i < k
        assert tile_boundary(i, k) <= p
        if i < k - 1:
            assert p < tile_boundary(i + 1, k)

    def test_plain_floor_on_typical_values(self):
        assert axis_tile_index(0.0, 10) == 0
        assert axis_tile_index(0.1, 10) == 1
        assert axis_tile_index(0.35, 10) == 3
        assert axis_tile_index(1.0, 10) == 9  # domain boundary clamps

    @pytest.mark.parametrize("k", [1, 2, 7, 100])
    def test_boundaries_cover_unit_interval(self, k):
        bounds = [tile_boundary(i, k) for i in range(k + 1)]
        assert bounds[0] == 0.0
        assert bounds[-1] == 1.0
        assert all(a < b for a, b in zip(bounds, bounds[1:]))

    def test_tile_extents_partition_unit_square(self):
        layout = PartitionLayout("2d", 4)
        extents = layout.tile_extents()
        assert len(extents) == 16
        for t, e in enumerate(extents):
            assert e.row * 4 + e.col == t
            assert e.xl < e.xu and e.yl < e.yu


class TestRectBatch:
    def test_round_trip(self):
        rs = [rect(0.1, 0.2, 0.3, 0.4, rid=5), rect(0.0, 1.0, 0.0, 1.0, rid=9)]
        batch = RectBatch.from_rects(rs)
        assert batch.to_rects() == rs
        assert len(batch) == 2

    def test_validate_rejects_out_of_range(self):
        batch = RectBatch(np.array([1]), np.array([-0.1]), np.array([0.2]),
                          np.array([0.0]), np.array([0.5]))
        with pytest.raises(ValueError):
            batch.validate()

    def test_validate_rejects_inverted(self):
        batch = RectBatch(np.array([1]), np.array([0.5]), np.array([0.2]),
                          np.array([0.0]), np.array([0.5]))
        with pytest.raises(ValueError):
            batch.validate()
