from __future__ import annotations

import math

import numpy as np
import pytest

from beliefgraph.worldmap import FREE, OCCUPIED, UNKNOWN, CoverageGrid, GridMap, StairZone


def small_grid(rows=None, cell=1.0) -> GridMap:
    rows = rows or [
        "##########",
        "#........#",
        "#...##...#",
        "#...##...#",
        "#........#",
        "##########",
    ]
    return GridMap.from_rows(cell, {0: rows})


class TestGridBasics:
    def test_rows_roundtrip(self):
        g = small_grid()
        assert g.to_rows()[0] == [
            "##########",
            "#........#",
            "#...##...#",
            "#...##...#",
            "#........#",
            "##########",
        ]

    def test_cell_charset(self):
        g = GridMap.from_rows(1.0, {0: ["###", "#?#", "###"]})
        assert g.value_at(1.5, 1.5, 0) == UNKNOWN

    def test_bounds_and_values(self):
        g = small_grid()
        assert g.value_at(-1.0, 0.0, 0) == OCCUPIED
        assert g.value_at(1.5, 1.5, 0) == FREE
        assert not g.is_free(4.5, 2.5, 0)
        assert g.value_at(1.0, 1.0, 99) == OCCUPIED  # unknown floor blocks

    def test_cell_size_validation(self):
        with pytest.raises(ValueError):
            GridMap.from_rows(0.0, {0: ["#"]})


class TestLineOfSight:
    def test_clear(self):
        g = small_grid()
        assert g.line_of_sight(1.5, 1.5, 8.5, 1.5, 0)

    def test_blocked_by_pillar(self):
        g = small_grid()
        assert not g.line_of_sight(1.5, 3.5, 8.5, 3.5, 0)

    def test_endpoint_in_wall_blocked(self):
        g = small_grid()
        assert not g.line_of_sight(1.5, 1.5, 4.5, 2.5, 0)

    def test_symmetric(self):
        g = small_grid()
        for a, b in [((1.5, 1.5), (8.5, 4.5)), ((2.5, 4.5), (7.5, 1.5))]:
            assert g.line_of_sight(*a, *b, 0) == g.line_of_sight(*b, *a, 0)


class TestAStar:
    def test_straight_path(self):
        g = small_grid()
        path = g.astar((1.5, 1.5), (8.5, 1.5), 0)
        assert path is not None
        assert path[-1] == (8.5, 1.5)

    def test_routes_around_pillar(self):
        g = small_grid()
        path = g.astar((1.5, 3.5), (8.5, 3.5), 0)
        assert path is not None
        # every waypoint free, and consecutive waypoints adjacent
        for (x0, y0), (x1, y1) in zip(path, path[1:]):
            assert g.is_free(x1, y1, 0)
            assert max(abs(x1 - x0), abs(y1 - y0)) <= 1.0 + 1e-9

    def test_unreachable_returns_none(self):
        rows = ["#####", "#.#.#", "#####"]
        g = GridMap.from_rows(1.0, {0: rows})
        assert g.astar((1.5, 1.5), (3.5, 1.5), 0) is None

    def test_goal_in_wall_returns_none(self):
        g = small_grid()
        assert g.astar((1.5, 1.5), (4.5, 2.5), 0) is None

    def test_avoids_stair_zones_by_default(self):
        rows = ["#######", "#.....#", "#.....#", "#.....#", "#######"]
        zone = StairZone(1, 0, 1, 2.5, 1.5, 0.0, 5.5, 1.5, 3.0, 1.0, 4.0, 1.9)
        g = GridMap.from_rows(1.0, {0: rows, 1: rows}, (zone,))
        path = g.astar((1.5, 1.5), (5.5, 1.5), 0)
        assert path is not None
        for x, y in path:
            assert g.zone_at(x, y, 0) is None
        direct = g.astar((1.5, 1.5), (5.5, 1.5), 0, avoid_zones=False)
        assert direct is not None
        assert any(g.zone_at(x, y, 0) is not None for x, y in direct)


class TestCoverage:
    def test_marking_respects_los(self):
        g = small_grid()
        cov = CoverageGrid(g, footprint_radius=20.0)
        cov.mark_from(1.5, 3.5, 0)
        mask = cov.covered[0]
        assert mask[3, 1]          # own cell
        assert not mask[3, 8]      # behind the pillar
        assert 0.0 < cov.covered_fraction(0) < 1.0

    def test_radius_bound(self):
        g = small_grid()
        cov = CoverageGrid(g, footprint_radius=1.0)
        cov.mark_from(1.5, 1.5, 0)
        ys, xs = np.nonzero(cov.covered[0])
        for iy, ix in zip(ys, xs):
            px, py = g.center_of(ix, iy)
            assert math.hypot(px - 1.5, py - 1.5) <= 1.0 + 1e-9

    def test_complete_after_full_sweep(self):
        g = small_grid()
        cov = CoverageGrid(g, footprint_radius=4.0)
        for x in (1.5, 4.5, 8.0):
            for y in (1.5, 4.5):
                cov.mark_from(x, y, 0)
        assert cov.is_complete(0, target_fraction=0.95)
        cov.reset()
        assert cov.covered_fraction(0) == 0.0

    def test_zone_cells_precovered(self):
        rows = ["#####", "#...#", "#...#", "#####"]
        zone = StairZone(1, 0, 1, 1.0, 1.5, 0.0, 3.5, 1.5, 2.0, 1.0, 3.0, 2.0)
        g = GridMap.from_rows(1.0, {0: rows, 1: rows}, (zone,))
        cov = CoverageGrid(g, footprint_radius=0.5)
        for ix, iy in g.zone_cells(0):
            assert cov.covered[0][iy, ix]
