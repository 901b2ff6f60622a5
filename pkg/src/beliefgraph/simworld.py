"""Ground-truth world: kinematics, collisions, stair zones, task adjudication.

The world owns the named RNG streams. Planner sampling draws from its own
stream, so replaying a recorded control log reproduces the world evolution
bit-exactly whether or not any planner runs.
"""

from __future__ import annotations

import math

from . import rng
from .sensing import sample_observations
from .scenario import WorldScenario
from .types import (
    AffordanceStatus,
    ControlInput,
    Gait,
    Observation,
    RobotState,
    SetGait,
    TriggerInspect,
    wrap_angle,
)

INSPECT_POSE_TOL = 0.5       # m between believed and true position at trigger time
INSPECT_RANGE_SLACK = 0.5    # m beyond the label standoff
STAIR_POS_TOL = 0.3          # m from the zone entry pose
STAIR_HEADING_TOL = 0.2      # rad from the zone entry heading
EVENT_THROTTLE_S = 1.0       # repeated collision/stair-failure events per second


class SimWorld:
    """Mutable ground truth for one run."""

    def __init__(self, scenario: WorldScenario):
        self.scenario = scenario
        self.grid = scenario.grid
        self.robot = RobotState(
            x=scenario.start.x, y=scenario.start.y,
            heading=scenario.start.heading, floor=scenario.start.floor,
        )
        self.objects = {
            o.object_id: ObjectCopy(o) for o in scenario.objects
        }
        self.time = 0.0
        self.teleported = False  # true for the tick that crossed a stair zone
        self._rng_motion = rng.substream(scenario.seed, rng.MOTION)
        self._rng_detection = rng.substream(scenario.seed, rng.DETECTION)
        self._rng_measurement = rng.substream(scenario.seed, rng.MEASUREMENT)
        self._last_collision_event = -math.inf
        self._last_stair_event = -math.inf

    # -- observation ---------------------------------------------------

    def observe(self) -> list[Observation]:
        return sample_observations(
            self.robot, [oc.truth for oc in self.objects.values()],
            self.scenario.detection, self.scenario.noise, self.scenario.registry,
            self.grid, self._rng_detection, self._rng_measurement,
        )

    def statuses(self) -> dict[str, str]:
        return {str(oid): oc.truth.status.value
                for oid, oc in sorted(self.objects.items())}

    def truth_statuses(self) -> dict[int, AffordanceStatus]:
        return {oid: oc.truth.status for oid, oc in self.objects.items()}

    def pending_ids(self) -> list[int]:
        return sorted(oid for oid, oc in self.objects.items() if oc.truth.status.pending)

    # -- stepping --------------------------------------------------------

    def step(self, u: ControlInput, dt: float) -> list[dict]:
        """Advance one tick; returns world events."""
        if dt <= 0:
            raise ValueError("dt must be > 0")
        events: list[dict] = []
        limits = self.scenario.limits
        u = u.clamped(limits.v_max, limits.v_lat_max, limits.omega_max)
        r = self.robot
        self.teleported = False

        c, s = math.cos(r.heading), math.sin(r.heading)
        dx = dt * (c * u.vx - s * u.vy)
        dy = dt * (s * u.vx + c * u.vy)
        if limits.motion_noise_std > 0:
            dx += float(self._rng_motion.normal(0.0, limits.motion_noise_std))
            dy += float(self._rng_motion.normal(0.0, limits.motion_noise_std))
        new_heading = wrap_angle(r.heading + dt * u.omega)
        tx, ty = r.x + dx, r.y + dy

        zone = self.grid.zone_at(tx, ty, r.floor)
        entering = zone is not None and self.grid.zone_at(r.x, r.y, r.floor) is None
        if entering:
            # alignment with the stair axis: lateral offset from the entry
            # ray plus heading, not distance along it
            ex, ey = math.cos(zone.entry_heading), math.sin(zone.entry_heading)
            vx_, vy_ = r.x - zone.entry_x, r.y - zone.entry_y
            lateral = abs(-ey * vx_ + ex * vy_)
            aligned = (
                lateral <= STAIR_POS_TOL
                and abs(wrap_angle(r.heading - zone.entry_heading)) <= STAIR_HEADING_TOL
            )
            if r.gait == Gait.STAIR and aligned:
                events.extend(self._traverse_stairs(zone))
            else:
                tx, ty = self._clip_motion(r.x, r.y, tx, ty, include_zones=True)
                if self.time - self._last_stair_event >= EVENT_THROTTLE_S:
                    self._last_stair_event = self.time
                    events.append({
                        "event": "stair_failure", "object": zone.object_id,
                        "gait": r.gait.value,
                        "pos_error": lateral,
                    })
                r.x, r.y = tx, ty
        elif not self.teleported:
            if self._motion_ok(r.x, r.y, tx, ty):
                r.x, r.y = tx, ty
            else:
                # slide along whichever axis stays clear, else clip at the wall
                if self._motion_ok(r.x, r.y, tx, r.y):
                    r.x = tx
                elif self._motion_ok(r.x, r.y, r.x, ty):
                    r.y = ty
                else:
                    r.x, r.y = self._clip_motion(r.x, r.y, tx, ty, include_zones=False)
                if self.time - self._last_collision_event >= EVENT_THROTTLE_S:
                    self._last_collision_event = self.time
                    events.append({"event": "collision"})
        r.heading = new_heading

        if u.action is not None:
            events.extend(self._apply_action(u.action))
        self.time += dt
        return events

    def _motion_ok(self, x0: float, y0: float, x1: float, y1: float) -> bool:
        """Collision-free and does not slip into a stair zone sideways."""
        if self.grid.zone_at(x1, y1, self.robot.floor) is not None:
            return False
        return self.grid.segment_free(x0, y0, x1, y1, self.robot.floor)

    def _traverse_stairs(self, zone) -> list[dict]:
        r = self.robot
        r.x, r.y = zone.exit_x, zone.exit_y
        r.floor = zone.to_floor
        self.teleported = True
        events = [{"event": "stair_ascended", "object": zone.object_id,
                   "to_floor": zone.to_floor}]
        oc = self.objects.get(zone.object_id)
        if oc is not None and oc.truth.status == AffordanceStatus.TO_BE_ASCENDED:
            oc.truth.set_status(AffordanceStatus.ASCENDED)
        return events

    def _clip_motion(self, x0: float, y0: float, x1: float, y1: float,
                     include_zones: bool) -> tuple[float, float]:
        """Largest collision-free prefix of the motion segment (bisection)."""

        def ok(t: float) -> bool:
            px, py = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
            if include_zones and self.grid.zone_at(px, py, self.robot.floor) is not None:
                return False
            return self.grid.segment_free(x0, y0, px, py, self.robot.floor)

        lo, hi = 0.0, 1.0
        if not ok(0.0):
            return x0, y0
        for _ in range(12):
            mid = 0.5 * (lo + hi)
            if ok(mid):
                lo = mid
            else:
                hi = mid
        return x0 + lo * (x1 - x0), y0 + lo * (y1 - y0)

    def _apply_action(self, action) -> list[dict]:
        r = self.robot
        if isinstance(action, SetGait):
            r.gait = action.mode
            return [{"event": "gait_set", "gait": action.mode.value}]
        if isinstance(action, TriggerInspect):
            oc = self.objects.get(action.object_id)
            if oc is None:
                return [{"event": "inspect_failure", "object": action.object_id,
                         "reason": "unknown_object"}]
            truth = oc.truth
            label = self.scenario.registry[truth.label_id]
            belief_err = math.hypot(truth.x - action.believed_x,
                                    truth.y - action.believed_y)
            range_err = r.distance_to(truth.x, truth.y)
            if truth.floor != r.floor:
                reason = "wrong_floor"
            elif truth.status != AffordanceStatus.TO_BE_INSPECTED:
                reason = "not_pending"
            elif belief_err > INSPECT_POSE_TOL:
                reason = "belief_error"
            elif range_err > label.standoff + INSPECT_RANGE_SLACK:
                reason = "out_of_range"
            else:
                truth.set_status(AffordanceStatus.INSPECTED)
                return [{"event": "inspect_success", "object": action.object_id,
                         "label": label.name}]
            return [{"event": "inspect_failure", "object": action.object_id,
                     "reason": reason, "belief_error": belief_err}]
        raise TypeError(f"unknown discrete action {action!r}")


class ObjectCopy:
    """Mutable holder so scenario objects stay pristine across runs."""

    def __init__(self, template):
        from copy import deepcopy
        self.truth = deepcopy(template)
