import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulus.errors import GeometryError
from annulus.floorplan import (
    Floorplan,
    FloorplanConfig,
    TileCoord,
    all_data_tiles,
    auto_config,
    build,
    capacity,
    density,
    is_corner,
    min_grid,
    nearest_lane,
    project_angle,
    ring_dist,
)


def fp_of(n, outer_rings=0, lanes=4):
    return build(FloorplanConfig(n=n, outer_rings=outer_rings, lanes=lanes))


class TestBudgets:
    def test_n8_reference_numbers(self):
        fp = fp_of(8)
        assert fp.data_tiles_ring0 == 27
        assert fp.usable_ancilla_tiles == 19
        assert fp.cr_capacity == 16

    def test_minimum_grid(self):
        assert fp_of(6).cr_capacity == 4

    def test_stacked_ring_sizes_n15(self):
        fp = fp_of(15, outer_rings=2)
        assert fp.ring_sizes[1] == 64
        assert fp.ring_sizes[2] == 72

    @pytest.mark.parametrize("n", range(6, 65))
    def test_budget_identity(self, n):
        fp = fp_of(n)
        total = (
            fp.data_tiles_ring0
            + 1  # MSF channel on the border
            + fp.usable_ancilla_tiles
            + 1  # inner MSF channel
            + fp.cr_capacity
        )
        assert total == n * n

    def test_rejects_small_grid(self):
        with pytest.raises(GeometryError):
            FloorplanConfig(n=5)

    def test_rejects_too_many_lanes(self):
        with pytest.raises(GeometryError):
            FloorplanConfig(n=6, lanes=16)


class TestRingDist:
    def test_wraparound_size8_example(self):
        # abstract 8-tile ring: min((1-7) mod 8, (7-1) mod 8) = min(2, 6)
        from annulus._kernels.pure import _ring_dist

        assert _ring_dist(1, 7, 8) == 2

    def test_wraparound_on_real_ring(self):
        assert ring_dist(fp_of(8), 0, 1, 7) == 6
        assert ring_dist(fp_of(8), 0, 1, 25) == 3

    def test_identity(self):
        fp = fp_of(8)
        assert ring_dist(fp, 0, 5, 5) == 0

    def test_symmetry_and_bound_exhaustive(self):
        fp = fp_of(8, outer_rings=1)
        for r, size in enumerate(fp.ring_sizes):
            for a in range(size):
                for b in range(size):
                    d = ring_dist(fp, r, a, b)
                    assert d == ring_dist(fp, r, b, a)
                    assert d <= size // 2

    @settings(max_examples=80, deadline=None)
    @given(st.integers(6, 20), st.data())
    def test_triangle_inequality(self, n, data):
        fp = fp_of(n)
        size = fp.ring_sizes[0]
        a = data.draw(st.integers(0, size - 1))
        b = data.draw(st.integers(0, size - 1))
        c = data.draw(st.integers(0, size - 1))
        assert ring_dist(fp, 0, a, c) <= (
            ring_dist(fp, 0, a, b) + ring_dist(fp, 0, b, c)
        )

    def test_invalid_coordinates(self):
        fp = fp_of(8)
        with pytest.raises(GeometryError):
            ring_dist(fp, 0, 0, 27)
        with pytest.raises(GeometryError):
            ring_dist(fp, 1, 0, 0)


class TestLanes:
    def test_four_lanes_on_n8(self):
        fp = fp_of(8)
        assert len(fp.lanes) == 4
        assert len(set(fp.lanes)) == 4
        for lane in fp.lanes:
            assert not is_corner(fp, TileCoord(0, lane))

    def test_lane_tile_distance_zero(self):
        fp = fp_of(8)
        lane = fp.lanes[0]
        idx, d = nearest_lane(fp, TileCoord(0, lane))
        assert (idx, d) == (0, 0)

    def test_worst_case_distance_k4(self):
        fp = fp_of(8)
        worst = max(
            nearest_lane(fp, TileCoord(0, t))[1] for t in range(27)
        )
        assert worst <= 4  # ceil(27 / 8)

    def test_single_lane_worst_case(self):
        fp = fp_of(8, lanes=1)
        worst = max(
            nearest_lane(fp, TileCoord(0, t))[1] for t in range(27)
        )
        assert worst == 13  # floor(27 / 2), the antipodal tile

    def test_outer_ring_distance_bound(self):
        fp = fp_of(8, outer_rings=2)
        for r in range(fp.num_rings):
            size = fp.ring_sizes[r]
            for theta in range(size):
                _, d = nearest_lane(fp, TileCoord(r, theta))
                assert d <= size // 2

    def test_ties_break_to_lowest_lane(self):
        fp = fp_of(8, lanes=2)
        # midpoint between two lanes must pick the lower index
        a, b = fp.lanes
        mid = (a + ring_dist(fp, 0, a, b) // 2) % 27
        idx, _ = nearest_lane(fp, TileCoord(0, mid))
        d_a = ring_dist(fp, 0, mid, a)
        d_b = ring_dist(fp, 0, mid, b)
        if d_a == d_b:
            assert idx == 0

    def test_non_ring_tile_rejected(self):
        fp = fp_of(8)
        with pytest.raises(GeometryError):
            nearest_lane(fp, TileCoord(0, 0, kind="msf"))


class TestCorners:
    @pytest.mark.parametrize("n", [6, 8, 11, 15])
    def test_exactly_four_corners_per_ring(self, n):
        fp = fp_of(n, outer_rings=2)
        for r in range(fp.num_rings):
            count = sum(
                is_corner(fp, TileCoord(r, t)) for t in range(fp.ring_sizes[r])
            )
            assert count == 4

    def test_lane_never_corner(self):
        for n in (6, 8, 13):
            fp = fp_of(n)
            for lane in fp.lanes:
                assert not is_corner(fp, TileCoord(0, lane))


class TestDensity:
    def test_single_ring_formula(self):
        assert density(8, 0) == pytest.approx(27 / 64)

    def test_monotone_decreasing_in_n(self):
        values = [density(n, 0) for n in range(6, 60)]
        assert all(a > b for a, b in zip(values, values[1:]))
        # n * density(n) -> 4
        assert 3.5 < 59 * density(59, 0) < 4.0

    def test_stacked_example(self):
        assert density(15, 2) == pytest.approx(191 / 361)

    def test_stacking_raises_density(self):
        for n in (6, 8, 15):
            values = [density(n, ell) for ell in range(4)]
            assert all(a < b for a, b in zip(values, values[1:]))


class TestMinGridAndCapacity:
    @pytest.mark.parametrize("s_max,expected", [(4, 6), (16, 8), (100, 14),
                                                (1, 6), (101, 15)])
    def test_min_grid(self, s_max, expected):
        assert min_grid(s_max) == expected

    def test_capacity_n8(self):
        assert capacity(fp_of(8)) == 27
        assert capacity(fp_of(8, outer_rings=1)) == 27 + 36

    def test_capacity_increasing_in_rings(self):
        caps = [capacity(fp_of(8, outer_rings=ell)) for ell in range(4)]
        assert all(a < b for a, b in zip(caps, caps[1:]))

    def test_all_data_tiles_matches_capacity(self):
        fp = fp_of(9, outer_rings=2)
        assert len(all_data_tiles(fp)) == capacity(fp)


class TestProjection:
    def test_projection_preserves_lane_zero(self):
        fp = fp_of(8, outer_rings=2)
        assert project_angle(fp, 0, 1) == 0

    def test_projection_in_range(self):
        fp = fp_of(8, outer_rings=3)
        for r in range(fp.num_rings):
            for theta in range(fp.ring_sizes[0]):
                assert 0 <= project_angle(fp, theta, r) < fp.ring_sizes[r]


class TestAutoConfig:
    def test_respects_cr_bound(self):
        cfg = auto_config(10, s_max=30)
        assert (cfg.n - 4) ** 2 >= 30

    def test_pinned_rings_grow_grid(self):
        cfg0 = auto_config(120, s_max=20, outer_rings=0, fasty_headroom=False)
        cfg2 = auto_config(120, s_max=20, outer_rings=2, fasty_headroom=False)
        assert cfg0.n > cfg2.n
        assert capacity(build(cfg0)) >= 120
        assert capacity(build(cfg2)) >= 120

    def test_min_ring0(self):
        cfg = auto_config(10, s_max=4, min_ring0=60)
        assert 4 * (cfg.n - 1) - 1 >= 60


class TestSummary:
    def test_summary_fields(self):
        fp = fp_of(8, outer_rings=1)
        s = fp.summary()
        assert s["n"] == 8
        assert s["ring_sizes"] == [27, 36]
        assert s["capacity"] == 63
        assert s["cr_capacity"] == 16
