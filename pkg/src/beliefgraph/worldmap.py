"""Occupancy grid with per-floor layers: line of sight, A* paths, coverage mask.

Cells are addressed as (col, row) = (ix, iy); world coordinates map to cells
by integer division with the cell size. Cell values: FREE, OCCUPIED, UNKNOWN.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

FREE = 0
OCCUPIED = 1
UNKNOWN = 2

_CELL_CHARS = {".": FREE, "#": OCCUPIED, "?": UNKNOWN}
_CHAR_OF = {FREE: ".", OCCUPIED: "#", UNKNOWN: "?"}


@dataclass(frozen=True)
class StairZone:
    """Rectangular zone connecting two floors through an entry/exit pose pair."""

    object_id: int                  # the stair object this zone belongs to
    from_floor: int
    to_floor: int
    entry_x: float
    entry_y: float
    entry_heading: float
    exit_x: float
    exit_y: float
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "from_floor": self.from_floor,
            "to_floor": self.to_floor,
            "entry": {"x": self.entry_x, "y": self.entry_y, "heading": self.entry_heading},
            "exit": {"x": self.exit_x, "y": self.exit_y},
            "rect": [self.x_min, self.y_min, self.x_max, self.y_max],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StairZone":
        return cls(
            object_id=d["object_id"],
            from_floor=d["from_floor"],
            to_floor=d["to_floor"],
            entry_x=d["entry"]["x"],
            entry_y=d["entry"]["y"],
            entry_heading=d["entry"]["heading"],
            exit_x=d["exit"]["x"],
            exit_y=d["exit"]["y"],
            x_min=d["rect"][0],
            y_min=d["rect"][1],
            x_max=d["rect"][2],
            y_max=d["rect"][3],
        )


class GridMap:
    """Multi-floor occupancy grid over a shared (width x height) footprint."""

    def __init__(self, cell_size: float, floors: dict[int, np.ndarray],
                 stair_zones: tuple[StairZone, ...] = ()):
        if cell_size <= 0:
            raise ValueError("cell size must be > 0")
        if not floors:
            raise ValueError("grid needs at least one floor layer")
        shapes = {layer.shape for layer in floors.values()}
        if len(shapes) != 1:
            raise ValueError(f"floor layers must share one shape, got {shapes}")
        self.cell_size = cell_size
        self.floors = {f: np.asarray(layer, dtype=np.int8) for f, layer in floors.items()}
        self.stair_zones = tuple(stair_zones)
        self.rows, self.cols = next(iter(self.floors.values())).shape
        self._los_cache: dict[tuple, bool] = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def from_rows(cls, cell_size: float, rows_by_floor: dict[int, list[str]],
                  stair_zones: tuple[StairZone, ...] = ()) -> "GridMap":
        """Build from ASCII rows; row 0 is the TOP of the map (max y)."""
        floors = {}
        for f, rows in rows_by_floor.items():
            grid = np.array(
                [[_CELL_CHARS[c] for c in row] for row in rows], dtype=np.int8
            )
            floors[f] = grid[::-1].copy()  # store with row index increasing in +y
        return cls(cell_size, floors, stair_zones)

    def to_rows(self) -> dict[int, list[str]]:
        out = {}
        for f, layer in sorted(self.floors.items()):
            flipped = layer[::-1]
            out[f] = ["".join(_CHAR_OF[int(v)] for v in row) for row in flipped]
        return out

    # -- geometry ----------------------------------------------------------

    @property
    def width_m(self) -> float:
        return self.cols * self.cell_size

    @property
    def height_m(self) -> float:
        return self.rows * self.cell_size

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        return int(math.floor(x / self.cell_size)), int(math.floor(y / self.cell_size))

    def center_of(self, ix: int, iy: int) -> tuple[float, float]:
        return (ix + 0.5) * self.cell_size, (iy + 0.5) * self.cell_size

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.cols and 0 <= iy < self.rows

    def value_at(self, x: float, y: float, floor: int) -> int:
        ix, iy = self.cell_of(x, y)
        if not self.in_bounds(ix, iy) or floor not in self.floors:
            return OCCUPIED
        return int(self.floors[floor][iy, ix])

    def is_free(self, x: float, y: float, floor: int) -> bool:
        return self.value_at(x, y, floor) == FREE

    def free_cells(self, floor: int) -> np.ndarray:
        """Boolean mask (rows, cols) of free cells on a floor."""
        return self.floors[floor] == FREE

    # -- line of sight -----------------------------------------------------

    def line_of_sight(self, x0: float, y0: float, x1: float, y1: float, floor: int) -> bool:
        """True when no occupied cell lies between the two points.

        Evaluated at cell resolution (between cell centers) and memoized, so
        planners can query it densely.
        """
        a = self.cell_of(x0, y0)
        b = self.cell_of(x1, y1)
        return self.cell_line_of_sight(a, b, floor)

    def cell_line_of_sight(self, a: tuple[int, int], b: tuple[int, int], floor: int) -> bool:
        key = (a, b, floor)
        hit = self._los_cache.get(key)
        if hit is None:
            hit = self._raycast_cells(a, b, floor)
            if len(self._los_cache) > 500_000:
                self._los_cache.clear()
            self._los_cache[key] = hit
            self._los_cache[(b, a, floor)] = hit
        return hit

    def _raycast_cells(self, a: tuple[int, int], b: tuple[int, int], floor: int) -> bool:
        layer = self.floors.get(floor)
        if layer is None:
            return False
        if not (self.in_bounds(*a) and self.in_bounds(*b)):
            return False
        # DDA between cell centers
        steps = max(abs(b[0] - a[0]), abs(b[1] - a[1]))
        if steps == 0:
            return layer[a[1], a[0]] != OCCUPIED
        x0, y0 = a[0] + 0.5, a[1] + 0.5
        dx = b[0] - a[0]
        dy = b[1] - a[1]
        n = 2 * steps
        for k in range(n + 1):
            t = k / n
            cx = int(math.floor(x0 + t * dx))
            cy = int(math.floor(y0 + t * dy))
            if not self.in_bounds(cx, cy) or layer[cy, cx] == OCCUPIED:
                return False
        return True

    def segment_free(self, x0: float, y0: float, x1: float, y1: float, floor: int) -> bool:
        """Like line_of_sight but also rejects unknown cells (for motion)."""
        layer = self.floors.get(floor)
        if layer is None:
            return False
        ix, iy = self.cell_of(x0, y0)
        jx, jy = self.cell_of(x1, y1)
        if not (self.in_bounds(ix, iy) and self.in_bounds(jx, jy)):
            return False
        steps = max(abs(jx - ix), abs(jy - iy))
        n = 2 * steps + 1
        dx, dy = x1 - x0, y1 - y0
        for k in range(n + 1):
            t = k / n
            cx, cy = self.cell_of(x0 + t * dx, y0 + t * dy)
            if not self.in_bounds(cx, cy) or layer[cy, cx] != FREE:
                return False
        return True

    # -- stair zones -------------------------------------------------------

    def zone_at(self, x: float, y: float, floor: int):
        for z in self.stair_zones:
            if z.from_floor == floor and z.contains(x, y):
                return z
        return None

    def zone_cells(self, floor: int) -> frozenset[tuple[int, int]]:
        """Cells of stair zones on a floor; navigation treats them as blocked."""
        cached = getattr(self, "_zone_cells_cache", None)
        if cached is None:
            cached = {}
            self._zone_cells_cache = cached
        if floor not in cached:
            cells = set()
            for z in self.stair_zones:
                if z.from_floor != floor:
                    continue
                ix0, iy0 = self.cell_of(z.x_min, z.y_min)
                ix1, iy1 = self.cell_of(z.x_max, z.y_max)
                for iy in range(iy0, iy1 + 1):
                    for ix in range(ix0, ix1 + 1):
                        if self.in_bounds(ix, iy):
                            cells.add((ix, iy))
            cached[floor] = frozenset(cells)
        return cached[floor]

    def navigable(self, x: float, y: float, floor: int) -> bool:
        """Free space excluding stair zones (deliberate entries bypass this)."""
        if not self.is_free(x, y, floor):
            return False
        return self.cell_of(x, y) not in self.zone_cells(floor)

    # -- path planning -----------------------------------------------------

    def astar(self, start: tuple[float, float], goal: tuple[float, float],
              floor: int, avoid_zones: bool = True) -> list[tuple[float, float]] | None:
        """8-connected A* between world points; returns cell-center waypoints."""
        layer = self.floors.get(floor)
        if layer is None:
            return None
        blocked = self.zone_cells(floor) if avoid_zones else frozenset()
        s = self.cell_of(*start)
        g = self.cell_of(*goal)
        if not (self.in_bounds(*s) and self.in_bounds(*g)):
            return None
        if layer[s[1], s[0]] == OCCUPIED or layer[g[1], g[0]] != FREE or g in blocked:
            return None
        if s == g:
            return [self.center_of(*g)]

        diag = math.sqrt(2.0)

        def h(c):
            dx = abs(c[0] - g[0])
            dy = abs(c[1] - g[1])
            return (dx + dy) + (diag - 2.0) * min(dx, dy)

        open_heap = [(h(s), 0, s)]
        g_cost = {s: 0.0}
        came: dict[tuple[int, int], tuple[int, int]] = {}
        closed = set()
        counter = 0
        while open_heap:
            _, _, cur = heapq.heappop(open_heap)
            if cur in closed:
                continue
            if cur == g:
                path = [cur]
                while path[-1] in came:
                    path.append(came[path[-1]])
                path.reverse()
                return [self.center_of(ix, iy) for ix, iy in path]
            closed.add(cur)
            cx, cy = cur
            for ddx in (-1, 0, 1):
                for ddy in (-1, 0, 1):
                    if ddx == 0 and ddy == 0:
                        continue
                    nx, ny = cx + ddx, cy + ddy
                    if not self.in_bounds(nx, ny) or layer[ny, nx] != FREE \
                            or (nx, ny) in blocked:
                        continue
                    if ddx != 0 and ddy != 0:
                        # forbid corner cutting through blocked orthogonals
                        if layer[cy, nx] != FREE or layer[ny, cx] != FREE:
                            continue
                        step = diag
                    else:
                        step = 1.0
                    cand = g_cost[cur] + step
                    nxt = (nx, ny)
                    if cand < g_cost.get(nxt, math.inf):
                        g_cost[nxt] = cand
                        came[nxt] = cur
                        counter += 1
                        heapq.heappush(open_heap, (cand + h(nxt), counter, nxt))
        return None


@dataclass
class CoverageGrid:
    """Tracks which free cells the sensor footprint has swept, per floor."""

    grid: GridMap
    footprint_radius: float
    covered: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for f, layer in self.grid.floors.items():
            if f not in self.covered:
                self.covered[f] = np.zeros_like(layer, dtype=bool)
        self._precover_zones()

    def _precover_zones(self) -> None:
        # stair zones are not sweep targets
        for f in self.grid.floors:
            for ix, iy in self.grid.zone_cells(f):
                self.covered[f][iy, ix] = True

    def reset(self) -> None:
        for mask in self.covered.values():
            mask[:] = False
        self._precover_zones()

    def mark_from(self, x: float, y: float, floor: int) -> int:
        """Mark free cells within the footprint radius with line of sight."""
        layer = self.grid.floors.get(floor)
        if layer is None:
            return 0
        cs = self.grid.cell_size
        r_cells = int(math.ceil(self.footprint_radius / cs))
        ix, iy = self.grid.cell_of(x, y)
        mask = self.covered[floor]
        marked = 0
        r2 = self.footprint_radius * self.footprint_radius
        for cy in range(max(0, iy - r_cells), min(self.grid.rows, iy + r_cells + 1)):
            for cx in range(max(0, ix - r_cells), min(self.grid.cols, ix + r_cells + 1)):
                if mask[cy, cx] or layer[cy, cx] != FREE:
                    continue
                px, py = self.grid.center_of(cx, cy)
                if (px - x) ** 2 + (py - y) ** 2 > r2:
                    continue
                if self.grid.line_of_sight(x, y, px, py, floor):
                    mask[cy, cx] = True
                    marked += 1
        return marked

    def covered_fraction(self, floor: int) -> float:
        free = self.grid.free_cells(floor)
        total = int(free.sum())
        if total == 0:
            return 1.0
        return float((self.covered[floor] & free).sum()) / total

    def uncovered_free_cells(self, floor: int) -> list[tuple[int, int]]:
        free = self.grid.free_cells(floor)
        pending = free & ~self.covered[floor]
        ys, xs = np.nonzero(pending)
        return list(zip(xs.tolist(), ys.tolist()))

    def is_complete(self, floor: int, target_fraction: float = 1.0) -> bool:
        return self.covered_fraction(floor) >= target_fraction
