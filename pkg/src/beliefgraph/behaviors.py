"""Robot behaviors: sweep coverage, entropy-driven search, inspection, stairs.

Each behavior turns the current belief into one velocity command per tick.
The search behavior plans over a sampled tree of candidate poses and
observation outcomes, pruning with an always-admissible zero entropy bound;
pruning is lossless, which the test suite checks against exhaustive search.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import rng as rngmod
from .filtering import label_entropy
from .predicates import absent_gate, act_gate, act_gate_collapsed
from .scenario import PlannerConfig, Thresholds, WorldScenario
from .types import (
    ControlInput,
    Gait,
    GeoSemanticBelief,
    ObjectBelief,
    RobotState,
    STOP,
    SetGait,
    TriggerInspect,
    wrap_angle,
)
from .worldmap import CoverageGrid, GridMap

LOG_2PI_E = math.log(2.0 * math.pi * math.e)


class BehaviorKind(str, Enum):
    COVERAGE = "coverage"
    SEARCH = "active_search"
    INSPECT = "inspect"
    CLIMB = "climb_stairs"


@dataclass
class BehaviorResult:
    u: ControlInput
    done: bool = False          # behavior reports back to the graph
    outcome: str = ""           # why it reported (for the trace)
    info: dict = field(default_factory=dict)


def entropy_objective(ob: ObjectBelief, pose_weight: float) -> float:
    """Label entropy plus a clamped Gaussian pose-entropy term (never negative)."""
    h = label_entropy(ob.label_probs)
    det = float(np.linalg.det(ob.pos_cov))
    if det > 0:
        h += pose_weight * max(0.0, LOG_2PI_E + 0.5 * math.log(det))
    return h


def drive_toward(robot: RobotState, tx: float, ty: float, target_heading: float,
                 limits, gain: float = 1.5, heading_gain: float = 2.5) -> ControlInput:
    """Proportional waypoint tracking in the body frame.

    The translational command is scaled, not clipped per axis, so the motion
    direction is preserved under the velocity limits.
    """
    ex, ey = tx - robot.x, ty - robot.y
    c, s = math.cos(robot.heading), math.sin(robot.heading)
    bx = gain * (c * ex + s * ey)
    by = gain * (-s * ex + c * ey)
    scale = 1.0
    if abs(bx) > limits.v_max:
        scale = limits.v_max / abs(bx)
    if abs(by) > limits.v_lat_max:
        scale = min(scale, limits.v_lat_max / abs(by))
    herr = wrap_angle(target_heading - robot.heading)
    return ControlInput(
        vx=bx * scale,
        vy=by * scale,
        omega=min(max(heading_gain * herr, -limits.omega_max), limits.omega_max),
    )


# ---------------------------------------------------------------------------
# geometric coverage
# ---------------------------------------------------------------------------


class CoverageBehavior:
    """Greedy sweep: head for the nearest reachable uncovered cell, preferring
    targets with more uncovered cells around them."""

    REPLAN_PERIOD = 5.0
    WINDOW = 2  # cells; neighborhood scored for pending information

    def __init__(self, grid: GridMap, footprint_radius: float, target_fraction: float):
        self.grid = grid
        self.coverage = CoverageGrid(grid, footprint_radius)
        self.target_fraction = target_fraction
        self._path: list[tuple[float, float]] = []
        self._target_cell: Optional[tuple[int, int]] = None
        self._last_plan_t = -math.inf
        self._last_mark_cell: Optional[tuple[int, int, int]] = None

    def mark(self, robot: RobotState) -> None:
        cell = (*self.grid.cell_of(robot.x, robot.y), robot.floor)
        if cell == self._last_mark_cell:
            return
        self._last_mark_cell = cell
        self.coverage.mark_from(robot.x, robot.y, robot.floor)

    def complete(self, floor: int) -> bool:
        return self.coverage.is_complete(floor, self.target_fraction)

    def reset_mask(self) -> None:
        self.coverage.reset()
        self._path = []
        self._target_cell = None
        self._last_mark_cell = None

    def step(self, robot: RobotState, t: float, limits) -> BehaviorResult:
        self.mark(robot)
        floor = robot.floor
        if self.complete(floor):
            return BehaviorResult(STOP, done=True, outcome="coverage_complete")
        if self._needs_replan(robot, t):
            self._plan(robot, t)
        if not self._path:
            # everything pending is unreachable from here
            return BehaviorResult(STOP, done=True, outcome="coverage_complete")
        wx, wy = self._path[0]
        if robot.distance_to(wx, wy) < 0.3:
            self._path.pop(0)
            if not self._path:
                return BehaviorResult(STOP)
            wx, wy = self._path[0]
        heading = math.atan2(wy - robot.y, wx - robot.x)
        return BehaviorResult(drive_toward(robot, wx, wy, heading, limits))

    def _needs_replan(self, robot: RobotState, t: float) -> bool:
        if not self._path or self._target_cell is None:
            return True
        tx, ty = self._target_cell
        if self.coverage.covered[robot.floor][ty, tx]:
            return True
        return t - self._last_plan_t >= self.REPLAN_PERIOD

    def _plan(self, robot: RobotState, t: float) -> None:
        self._last_plan_t = t
        self._path = []
        self._target_cell = None
        target = self._pick_target(robot)
        if target is None:
            return
        goal = self.grid.center_of(*target)
        path = self.grid.astar((robot.x, robot.y), goal, robot.floor)
        if path is None:
            return
        self._target_cell = target
        self._path = path

    def _pick_target(self, robot: RobotState) -> Optional[tuple[int, int]]:
        """Nearest-first Dijkstra flood; break near-ties by pending neighbors."""
        grid = self.grid
        floor = robot.floor
        layer = grid.floors[floor]
        blocked = grid.zone_cells(floor)
        mask = self.coverage.covered[floor]
        start = grid.cell_of(robot.x, robot.y)
        if not grid.in_bounds(*start):
            return None
        import heapq

        diag = math.sqrt(2.0)
        dist = {start: 0.0}
        heap = [(0.0, start)]
        found: list[tuple[float, tuple[int, int]]] = []
        horizon = math.inf
        while heap:
            d, cur = heapq.heappop(heap)
            if d > dist.get(cur, math.inf):
                continue
            if d > horizon:
                break
            cx, cy = cur
            if not mask[cy, cx] and layer[cy, cx] == 0 and cur not in blocked:
                found.append((d, cur))
                if horizon is math.inf:
                    horizon = d + 4.0  # keep collecting near-ties, in cells
            for ddx in (-1, 0, 1):
                for ddy in (-1, 0, 1):
                    if ddx == 0 and ddy == 0:
                        continue
                    nx, ny = cx + ddx, cy + ddy
                    if not grid.in_bounds(nx, ny) or layer[ny, nx] != 0 \
                            or (nx, ny) in blocked:
                        continue
                    if ddx != 0 and ddy != 0 and (layer[cy, nx] != 0 or layer[ny, cx] != 0):
                        continue
                    step = diag if ddx != 0 and ddy != 0 else 1.0
                    nd = d + step
                    if nd < dist.get((nx, ny), math.inf):
                        dist[(nx, ny)] = nd
                        heapq.heappush(heap, (nd, (nx, ny)))
        if not found:
            return None

        def info_score(cell: tuple[int, int]) -> int:
            ix, iy = cell
            w = self.WINDOW
            count = 0
            for yy in range(max(0, iy - w), min(grid.rows, iy + w + 1)):
                for xx in range(max(0, ix - w), min(grid.cols, ix + w + 1)):
                    if layer[yy, xx] == 0 and not mask[yy, xx]:
                        count += 1
            return count

        return min(found, key=lambda dc: (-info_score(dc[1]), dc[0], dc[1]))[1]


# ---------------------------------------------------------------------------
# active search: receding-horizon entropy minimization
# ---------------------------------------------------------------------------

_CAND_SALT = 0x7FFFFFFF


@dataclass(frozen=True)
class _Track:
    """Slim planning copy of one object belief (diagonal covariance)."""

    mx: float
    my: float
    vx: float
    vy: float
    probs: tuple[float, ...]

    @classmethod
    def from_belief(cls, ob: ObjectBelief) -> "_Track":
        return cls(
            mx=float(ob.pos_mean[0]),
            my=float(ob.pos_mean[1]),
            vx=max(float(ob.pos_cov[0, 0]), 0.0),
            vy=max(float(ob.pos_cov[1, 1]), 0.0),
            probs=tuple(float(p) for p in ob.label_probs),
        )


@dataclass
class PlanResult:
    pose: Optional[tuple[float, float, float]]
    value: float
    root_entropy: float
    nodes: int
    pruned: int
    first_action: int = -1


class EntropySearchPlanner:
    """Sampled expectimax over candidate poses with branch-and-bound pruning.

    The sampled tree is a pure function of the plan seed: every node draws
    from its own seeded stream, so pruned and exhaustive traversals see
    identical candidates and outcomes.
    """

    def __init__(self, scenario: WorldScenario, floor: int = 0):
        self.cfg: PlannerConfig = scenario.planner
        self.grid = scenario.grid
        self.registry = scenario.registry
        self.floor = floor
        det = scenario.detection
        self.fov_cos_limit = math.cos(det.fov_half_angle)
        self.max_range = det.max_range
        n = len(scenario.registry)
        self.n_labels = n
        self.curves = [det.curve_for(l) for l in range(n)]
        self.gammas = [scenario.registry[l].noise_factor for l in range(n)]
        self.labels = [scenario.registry[l] for l in range(n)]
        self.confusion = [tuple(float(v) for v in row) for row in scenario.noise.confusion]
        noise = scenario.noise
        self.pos_coeffs = (noise.pos_dist_coeff, noise.pos_bearing_coeff, noise.pos_label_coeff)
        self.score_sigma = noise.score_sigma

    # -- model pieces ------------------------------------------------------

    def _detection_probs(self, px: float, py: float, track: _Track) -> list[float]:
        """Per-label detection probability of the track mean from a pose."""
        d = math.hypot(track.mx - px, track.my - py)
        if d > self.max_range:
            return [0.0] * self.n_labels
        if not self.grid.cell_line_of_sight(
                self.grid.cell_of(px, py), self.grid.cell_of(track.mx, track.my), self.floor):
            return [0.0] * self.n_labels
        # candidate headings always face the track, so the angular gate passes
        return [c.prob_at(d) for c in self.curves]

    def _meas_std(self, px: float, py: float, heading: float,
                  ox: float, oy: float, gamma: float) -> float:
        d = math.hypot(ox - px, oy - py)
        beta = abs(wrap_angle(math.atan2(oy - py, ox - px) - heading))
        cd, cb, cl = self.pos_coeffs
        return cd * d + cb * beta + cl * gamma

    def entropy(self, track: _Track) -> float:
        h = 0.0
        for p in track.probs:
            if p > 0.0:
                h -= p * math.log(p)
        det = track.vx * track.vy
        if det > 0.0:
            h += self.cfg.pose_entropy_weight * max(0.0, LOG_2PI_E + 0.5 * math.log(det))
        return h

    def _score_pdf(self, z: float, mean: float) -> float:
        # truncated Gaussian on [0, 1]
        sig = self.score_sigma
        znorm = (0.5 * (1.0 + math.erf((1.0 - mean) / (sig * math.sqrt(2.0))))
                 - 0.5 * (1.0 + math.erf((0.0 - mean) / (sig * math.sqrt(2.0)))))
        if znorm <= 0.0:
            return 0.0
        u = (z - mean) / sig
        return math.exp(-0.5 * u * u) / (sig * math.sqrt(2.0 * math.pi) * znorm)

    def _sample_trunc_score(self, r: random.Random, mean: float) -> float:
        sig = self.score_sigma
        if sig == 0:
            return min(max(mean, 0.0), 1.0)
        for _ in range(256):
            v = r.gauss(mean, sig)
            if 0.0 <= v <= 1.0:
                return v
        return min(max(mean, 0.0), 1.0)

    # -- belief pushes -----------------------------------------------------

    def _miss_update(self, track: _Track, pd: list[float]) -> _Track:
        weights = [p * (1.0 - q) for p, q in zip(track.probs, pd)]
        total = sum(weights)
        if total <= 0.0:
            return track
        return _Track(track.mx, track.my, track.vx, track.vy,
                      tuple(w / total for w in weights))

    def _detection_update(self, track: _Track, px: float, py: float, heading: float,
                          r: random.Random) -> _Track:
        # sample an object hypothesis from the belief
        u = r.random()
        acc = 0.0
        hyp_l = self.n_labels - 1
        for l, p in enumerate(track.probs):
            acc += p
            if u <= acc:
                hyp_l = l
                break
        hx = track.mx + r.gauss(0.0, 1.0) * math.sqrt(track.vx)
        hy = track.my + r.gauss(0.0, 1.0) * math.sqrt(track.vy)
        # sample the measurement the sensor would return for that hypothesis
        s_meas = self._meas_std(px, py, heading, hx, hy, self.gammas[hyp_l])
        zx = hx + r.gauss(0.0, 1.0) * s_meas
        zy = hy + r.gauss(0.0, 1.0) * s_meas
        row = self.confusion[hyp_l]
        u = r.random()
        acc = 0.0
        zl = self.n_labels - 1
        for l, p in enumerate(row):
            acc += p
            if u <= acc:
                zl = l
                break
        d_hyp = math.hypot(hx - px, hy - py)
        zs = self._sample_trunc_score(r, self.labels[hyp_l].expected_score(d_hyp))

        # fuse: measurement noise is evaluated at the track mean
        exp_l = max(range(self.n_labels), key=lambda l: track.probs[l])
        s_mean = self._meas_std(px, py, heading, track.mx, track.my, self.gammas[exp_l])
        r_var = s_mean * s_mean
        if track.vx + r_var > 0:
            kx = track.vx / (track.vx + r_var)
            mx = track.mx + kx * (zx - track.mx)
            vx = (1.0 - kx) * track.vx
        else:
            mx, vx = track.mx, track.vx
        if track.vy + r_var > 0:
            ky = track.vy / (track.vy + r_var)
            my = track.my + ky * (zy - track.my)
            vy = (1.0 - ky) * track.vy
        else:
            my, vy = track.my, track.vy
        d_mean = math.hypot(track.mx - px, track.my - py)
        weights = [
            track.probs[l] * self.confusion[l][zl]
            * self._score_pdf(zs, self.labels[l].expected_score(d_mean))
            for l in range(self.n_labels)
        ]
        total = sum(weights)
        if total <= 0.0:
            probs = tuple(1.0 / self.n_labels for _ in range(self.n_labels))
        else:
            probs = tuple(w / total for w in weights)
        return _Track(mx, my, vx, vy, probs)

    # -- tree --------------------------------------------------------------

    def _candidates(self, px: float, py: float, track: _Track,
                    plan_seed: int, path: tuple[int, ...]) -> list[tuple[float, float, float]]:
        r = random.Random(rngmod.node_seed(plan_seed, path + (_CAND_SALT,)))
        out = []
        face = math.atan2(track.my - py, track.mx - px)
        if self.grid.navigable(px, py, self.floor):
            out.append((px, py, face))  # observe from here
        tries = 0
        while len(out) < self.cfg.action_samples and tries < self.cfg.action_samples * 8:
            tries += 1
            dist = r.uniform(self.cfg.min_step_dist, self.cfg.max_step_dist)
            ang = r.uniform(-math.pi, math.pi)
            nx = px + dist * math.cos(ang)
            ny = py + dist * math.sin(ang)
            if not self.grid.navigable(nx, ny, self.floor):
                continue
            if not self.grid.cell_line_of_sight(
                    self.grid.cell_of(px, py), self.grid.cell_of(nx, ny), self.floor):
                continue
            out.append((nx, ny, math.atan2(track.my - ny, track.mx - nx)))
        return out

    def _path_step_candidate(self, px: float, py: float,
                             track: _Track) -> Optional[tuple[float, float, float]]:
        """Next pose along the collision-free path to the believed object, so
        the root always has an approach option even when sight is blocked."""
        path = self.grid.astar((px, py), (track.mx, track.my), self.floor)
        if path is None or len(path) < 2:
            return None
        budget = self.cfg.max_step_dist
        traveled = 0.0
        cx, cy = px, py
        chosen = None
        for wx, wy in path[1:]:
            step = math.hypot(wx - cx, wy - cy)
            if traveled + step > budget and chosen is not None:
                break
            traveled += step
            cx, cy = wx, wy
            chosen = (wx, wy)
            if traveled >= self.cfg.min_step_dist:
                break
        if chosen is None:
            return None
        return chosen[0], chosen[1], math.atan2(track.my - chosen[1],
                                                track.mx - chosen[0])

    def plan(self, ob: ObjectBelief, robot: RobotState, plan_seed: int,
             exhaustive: bool = False) -> PlanResult:
        track = _Track.from_belief(ob)
        self._nodes = 0
        self._pruned = 0
        root_entropy = self.entropy(track)
        if root_entropy <= self.cfg.entropy_floor:
            return PlanResult(None, root_entropy, root_entropy, 0, 0)
        cands = self._candidates(robot.x, robot.y, track, plan_seed, ())
        step = self._path_step_candidate(robot.x, robot.y, track)
        if step is not None:
            cands = cands + [step]
        if not cands:
            return PlanResult(None, root_entropy, root_entropy, 0, 0)
        best = math.inf
        best_idx = -1
        for ai, cand in enumerate(cands):
            val = self._expected(track, cand, 1, (ai,), plan_seed, best, exhaustive)
            if val < best:
                best = val
                best_idx = ai
        return PlanResult(cands[best_idx], best, root_entropy,
                          self._nodes, self._pruned, best_idx)

    def _node_value(self, track: _Track, px: float, py: float, depth: int,
                    path: tuple[int, ...], plan_seed: int, exhaustive: bool) -> float:
        self._nodes += 1
        ent = self.entropy(track)
        if depth >= self.cfg.steps or ent <= self.cfg.entropy_floor:
            return ent
        cands = self._candidates(px, py, track, plan_seed, path)
        if not cands:
            return ent
        best = math.inf
        for ai, cand in enumerate(cands):
            val = self._expected(track, cand, depth + 1, path + (ai,),
                                 plan_seed, best, exhaustive)
            if val < best:
                best = val
        return best

    def _expected(self, track: _Track, cand: tuple[float, float, float], child_depth: int,
                  path: tuple[int, ...], plan_seed: int, incumbent: float,
                  exhaustive: bool) -> float:
        """Expectation over observation outcomes at one candidate pose.

        Accumulates branch terms in a fixed order; with a zero lower bound on
        the unexpanded remainder, a partial sum above the incumbent already
        proves this candidate cannot win, so expansion stops (never when
        exhaustive). Returned partial sums only ever underestimate the true
        value, which keeps the parent's running minimum exact.
        """
        px, py, heading = cand
        pd = self._detection_probs(px, py, track)
        p_det = sum(p * q for p, q in zip(track.probs, pd))
        k = self.cfg.outcome_samples
        branches: list[tuple[float, int]] = [(1.0 - p_det, 0)]
        if p_det > 0.0:
            branches.extend((p_det / k, bi) for bi in range(1, k + 1))
        acc = 0.0
        for weight, bi in branches:
            if weight <= 0.0:
                continue
            if bi == 0:
                child = self._miss_update(track, pd)
            else:
                r = random.Random(rngmod.node_seed(plan_seed, path + (bi,)))
                child = self._detection_update(track, px, py, heading, r)
            acc += weight * self._node_value(child, px, py, child_depth,
                                             path + (bi,), plan_seed, exhaustive)
            if not exhaustive and acc > incumbent:
                self._pruned += 1
                return acc
        return acc


class SearchBehavior:
    """Drives the entropy planner in a receding-horizon loop for one target.

    When the belief stops changing (typically: the believed position is on the
    wrong side of a wall, so no observations arrive), the behavior orbits
    viewpoints around the believed object until sight is regained.
    """

    STALL_PATIENCE = 4.0   # s without any belief change before orbiting
    MIN_PLAN_GAP = 0.5     # s between tree searches

    def __init__(self, scenario: WorldScenario, planner_stream: np.random.Generator):
        self.scenario = scenario
        self.thresholds: Thresholds = scenario.thresholds
        self._stream = planner_stream
        self._planner: Optional[EntropySearchPlanner] = None
        self._waypoint: Optional[tuple[float, float, float]] = None
        self._last_plan_t = -math.inf
        self._plan_count = 0
        self._belief_sig: Optional[tuple] = None
        self._last_change_t = 0.0
        self._orbit_k = 0
        self._orbit_goal: Optional[tuple[float, float]] = None

    def reset(self) -> None:
        self._waypoint = None
        self._last_plan_t = -math.inf
        self._belief_sig = None
        self._last_change_t = 0.0
        self._orbit_k = 0
        self._orbit_goal = None

    def step(self, belief: GeoSemanticBelief, target_id: int, expected_label: int,
             robot: RobotState, t: float) -> BehaviorResult:
        ob = belief.objects.get(target_id)
        if ob is None:
            return BehaviorResult(STOP, done=True, outcome="target_lost")
        thr = self.thresholds
        if act_gate(belief, ob, expected_label, thr):
            return BehaviorResult(STOP, done=True, outcome="target_confirmed")
        if absent_gate(ob, expected_label, thr):
            return BehaviorResult(STOP, done=True, outcome="target_absent")

        limits = self.scenario.limits
        cfg = self.scenario.planner
        self._note_belief_change(ob, t)
        replan = self._waypoint is None or (
            t - self._last_plan_t >= self.MIN_PLAN_GAP
            and (t - self._last_plan_t >= cfg.step_duration
                 or robot.distance_to(self._waypoint[0], self._waypoint[1]) < 0.2)
        )
        info: dict = {}
        if replan:
            if self._planner is None or self._planner.floor != robot.floor:
                self._planner = EntropySearchPlanner(self.scenario, robot.floor)
            plan_seed = int(self._stream.integers(0, 2**63 - 1))
            result = self._planner.plan(ob, robot, plan_seed)
            self._plan_count += 1
            self._last_plan_t = t
            info = {
                "plan_nodes": result.nodes,
                "plan_pruned": result.pruned,
                "plan_value": result.value,
                "plan_entropy": result.root_entropy,
            }
            no_gain = result.value >= result.root_entropy - 1e-9
            if result.pose is not None and not no_gain:
                self._waypoint = result.pose
                self._orbit_goal = None
            elif t - self._last_change_t >= self.STALL_PATIENCE:
                waypoint = self._orbit_step(ob, robot)
                if waypoint is None:
                    u = ControlInput(omega=limits.omega_max * 0.5)  # recovery
                    return BehaviorResult(u, info=info)
                self._waypoint = waypoint
            else:
                # nothing left to learn, or no informative pose in reach:
                # close the distance instead (also arms the act gate's
                # proximity condition)
                approach = self._approach_point(ob, robot)
                if approach is None:
                    u = ControlInput(omega=limits.omega_max * 0.5)  # recovery
                    return BehaviorResult(u, info=info)
                self._waypoint = approach
        wx, wy, _ = self._waypoint
        face = math.atan2(float(ob.pos_mean[1]) - robot.y,
                          float(ob.pos_mean[0]) - robot.x)
        return BehaviorResult(drive_toward(robot, wx, wy, face, limits), info=info)

    def _note_belief_change(self, ob: ObjectBelief, t: float) -> None:
        sig = (
            tuple(float(p) for p in ob.label_probs),
            float(ob.pos_cov[0, 0]), float(ob.pos_cov[1, 1]),
            float(ob.pos_mean[0]), float(ob.pos_mean[1]),
        )
        if sig != self._belief_sig:
            self._belief_sig = sig
            self._last_change_t = t
            self._orbit_goal = None
            self._orbit_k = 0

    def _orbit_step(self, ob: ObjectBelief,
                    robot: RobotState) -> Optional[tuple[float, float, float]]:
        """Walk a ring of viewpoints around the believed object; the next ring
        pose is chosen whenever the current one is reached without progress."""
        grid = self.scenario.grid
        ox, oy = float(ob.pos_mean[0]), float(ob.pos_mean[1])
        face = math.atan2(oy - robot.y, ox - robot.x)
        if self._orbit_goal is not None \
                and robot.distance_to(*self._orbit_goal) < 0.4:
            self._orbit_goal = None
            self._orbit_k += 1
        if self._orbit_goal is None:
            radius = self.thresholds.act_expected_dist * 0.7
            for attempt in range(8):
                ang = (self._orbit_k + attempt) * (math.pi / 4.0)
                gx, gy = ox + radius * math.cos(ang), oy + radius * math.sin(ang)
                if not grid.navigable(gx, gy, robot.floor):
                    continue
                if grid.astar((robot.x, robot.y), (gx, gy), robot.floor):
                    self._orbit_k += attempt
                    self._orbit_goal = (gx, gy)
                    break
            if self._orbit_goal is None:
                return None
        path = grid.astar((robot.x, robot.y), self._orbit_goal, robot.floor)
        if not path:
            self._orbit_goal = None
            return None
        step = path[1] if len(path) > 1 else path[0]
        return step[0], step[1], face

    def _approach_point(self, ob: ObjectBelief,
                        robot: RobotState) -> Optional[tuple[float, float, float]]:
        """A navigable pose roughly a standoff away from the believed object."""
        grid = self.scenario.grid
        ox, oy = float(ob.pos_mean[0]), float(ob.pos_mean[1])
        d = robot.distance_to(ox, oy)
        hold = self.scenario.registry[ob.expected_label].standoff
        if d > 1e-6:
            frac = max(0.0, (d - hold) / d)
            gx, gy = robot.x + frac * (ox - robot.x), robot.y + frac * (oy - robot.y)
            if grid.navigable(gx, gy, robot.floor) \
                    and grid.segment_free(robot.x, robot.y, gx, gy, robot.floor):
                return gx, gy, math.atan2(oy - robot.y, ox - robot.x)
        # blocked straight line: walk the grid toward the nearest point by the object
        for radius in (hold, 2.0 * hold):
            for k in range(8):
                ang = k * math.pi / 4.0
                gx, gy = ox + radius * math.cos(ang), oy + radius * math.sin(ang)
                if not grid.navigable(gx, gy, robot.floor):
                    continue
                path = grid.astar((robot.x, robot.y), (gx, gy), robot.floor)
                if path:
                    step = path[1] if len(path) > 1 else path[0]
                    return step[0], step[1], math.atan2(oy - robot.y, ox - robot.x)
        return None


# ---------------------------------------------------------------------------
# inspection
# ---------------------------------------------------------------------------


class InspectBehavior:
    """Approach the believed object's stand-off pose, align, and trigger."""

    POS_TOL = 0.1       # m
    HEADING_TOL = 0.1   # rad
    TRIGGER_COOLDOWN = 1.0

    def __init__(self, scenario: WorldScenario):
        self.scenario = scenario
        self._last_trigger_t = -math.inf
        self._path: list[tuple[float, float]] = []
        self._path_goal: Optional[tuple[float, float]] = None

    def reset(self) -> None:
        self._last_trigger_t = -math.inf
        self._path = []
        self._path_goal = None

    def standoff_pose(self, ob: ObjectBelief) -> tuple[float, float]:
        """Stand-off point along the believed facing direction, nudged into
        free space when the nominal point is blocked."""
        label = self.scenario.registry[ob.expected_label]
        ox, oy = float(ob.pos_mean[0]), float(ob.pos_mean[1])
        grid = self.scenario.grid
        base = ob.yaw_mean
        for k in range(8):
            ang = base + k * (math.pi / 4.0)
            sx = ox + label.standoff * math.cos(ang)
            sy = oy + label.standoff * math.sin(ang)
            if grid.navigable(sx, sy, ob.floor):
                return sx, sy
        return ox + label.standoff * math.cos(base), oy + label.standoff * math.sin(base)

    def step(self, belief: GeoSemanticBelief, target_id: int, robot: RobotState,
             t: float) -> BehaviorResult:
        ob = belief.objects.get(target_id)
        if ob is None:
            return BehaviorResult(STOP, done=True, outcome="target_lost")
        if not ob.status.pending:
            return BehaviorResult(STOP, done=True, outcome="task_done")
        if act_gate_collapsed(ob, self.scenario.thresholds):
            return BehaviorResult(STOP, done=True, outcome="confidence_collapsed")
        ox, oy = float(ob.pos_mean[0]), float(ob.pos_mean[1])
        sx, sy = self.standoff_pose(ob)
        face = math.atan2(oy - robot.y, ox - robot.x)
        pos_err = robot.distance_to(sx, sy)
        head_err = abs(wrap_angle(face - robot.heading))
        limits = self.scenario.limits
        if pos_err <= self.POS_TOL and head_err <= self.HEADING_TOL:
            if t - self._last_trigger_t < self.TRIGGER_COOLDOWN:
                return BehaviorResult(STOP)
            self._last_trigger_t = t
            action = TriggerInspect(target_id, ox, oy)
            return BehaviorResult(ControlInput(action=action), info={"trigger": target_id})
        return BehaviorResult(self._navigate(robot, sx, sy, face, limits))

    def _navigate(self, robot: RobotState, sx: float, sy: float, face: float,
                  limits) -> ControlInput:
        grid = self.scenario.grid
        if grid.segment_free(robot.x, robot.y, sx, sy, robot.floor):
            self._path = []
            return drive_toward(robot, sx, sy, face, limits)
        goal = (sx, sy)
        if self._path_goal != goal or not self._path:
            path = grid.astar((robot.x, robot.y), goal, robot.floor)
            self._path = path[1:] if path else []
            self._path_goal = goal
        if not self._path:
            return ControlInput(omega=limits.omega_max * 0.5)
        wx, wy = self._path[0]
        if robot.distance_to(wx, wy) < 0.3:
            self._path.pop(0)
            if not self._path:
                return drive_toward(robot, sx, sy, face, limits)
            wx, wy = self._path[0]
        return drive_toward(robot, wx, wy, math.atan2(wy - robot.y, wx - robot.x), limits)


# ---------------------------------------------------------------------------
# stair climbing
# ---------------------------------------------------------------------------


class ClimbBehavior:
    """Line up on the stair entry pose, switch gait, walk the zone, restore gait."""

    ALIGN_POS_TOL = 0.12    # tighter than the simulator's tolerance on purpose
    ALIGN_HEADING_TOL = 0.08
    CLIMB_SPEED = 0.25      # m/s while inside the zone

    def __init__(self, scenario: WorldScenario):
        self.scenario = scenario
        self._path: list[tuple[float, float]] = []

    def reset(self) -> None:
        self._path = []

    def step(self, belief: GeoSemanticBelief, target_id: int, robot: RobotState,
             t: float) -> BehaviorResult:
        zone = next((z for z in self.scenario.grid.stair_zones
                     if z.object_id == target_id), None)
        if zone is None:
            return BehaviorResult(STOP, done=True, outcome="no_stair_zone")
        limits = self.scenario.limits
        if robot.floor == zone.to_floor:
            if robot.gait != Gait.WALK:
                return BehaviorResult(ControlInput(action=SetGait(Gait.WALK)))
            return BehaviorResult(STOP, done=True, outcome="task_done")
        ex, ey = math.cos(zone.entry_heading), math.sin(zone.entry_heading)
        vx_, vy_ = robot.x - zone.entry_x, robot.y - zone.entry_y
        along = ex * vx_ + ey * vy_
        lateral = abs(-ey * vx_ + ex * vy_)
        head_err = abs(wrap_angle(zone.entry_heading - robot.heading))
        on_axis = lateral <= self.ALIGN_POS_TOL and head_err <= self.ALIGN_HEADING_TOL
        if not on_axis or along < -self.ALIGN_POS_TOL:
            # line up behind the entry pose first, in walking gait
            if robot.gait != Gait.WALK:
                return BehaviorResult(ControlInput(action=SetGait(Gait.WALK)))
            return BehaviorResult(self._approach(robot, zone, limits))
        if robot.gait != Gait.STAIR:
            return BehaviorResult(ControlInput(action=SetGait(Gait.STAIR)))
        # creep along the entry axis; the goal sits on the axis ahead of the
        # robot's projection, which pulls lateral error back to zero
        goal_x = zone.entry_x + (along + 0.5) * ex
        goal_y = zone.entry_y + (along + 0.5) * ey
        u = drive_toward(robot, goal_x, goal_y, zone.entry_heading, limits)
        speed = math.hypot(u.vx, u.vy)
        if speed > self.CLIMB_SPEED:
            scale = self.CLIMB_SPEED / speed
            u = ControlInput(u.vx * scale, u.vy * scale, u.omega)
        return BehaviorResult(u)

    def _approach(self, robot: RobotState, zone, limits) -> ControlInput:
        gx, gy = zone.entry_x, zone.entry_y
        if robot.distance_to(gx, gy) < 0.8 \
                or self.scenario.grid.segment_free(robot.x, robot.y, gx, gy, robot.floor):
            return drive_toward(robot, gx, gy, zone.entry_heading, limits)
        if not self._path:
            path = self.scenario.grid.astar((robot.x, robot.y), (gx, gy), robot.floor)
            self._path = path[1:] if path else []
        if not self._path:
            return ControlInput(omega=limits.omega_max * 0.5)
        wx, wy = self._path[0]
        if robot.distance_to(wx, wy) < 0.3:
            self._path.pop(0)
            return drive_toward(robot, gx, gy, zone.entry_heading, limits)
        return drive_toward(robot, wx, wy, math.atan2(wy - robot.y, wx - robot.x), limits)
