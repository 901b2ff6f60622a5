"""The behavior graph: belief-predicate edges, transition policy, tick executor.

Four edge families, evaluated in fixed priority with first match winning:
search -> task behavior on the act gate; search -> coverage on the absent
gate (dismissing the track); coverage -> search on the search gate; task
behavior -> coverage once the engaged task resolves. No edge anywhere
depends on time, only on the belief.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import rng as rngmod
from .behaviors import (
    BehaviorKind,
    ClimbBehavior,
    CoverageBehavior,
    InspectBehavior,
    SearchBehavior,
)
from .filtering import BeliefFilter
from .predicates import (
    PredicateKind,
    absent_gate,
    act_gate,
    act_gate_collapsed,
    expected_distance,
    search_gate,
)
from .scenario import WorldScenario
from .simworld import SimWorld
from .trace import PLANNER, WORLD, Trace, summarize
from .types import (
    AffordanceStatus,
    ControlInput,
    Gait,
    GeoSemanticBelief,
    ObjectBelief,
    RobotPoseBelief,
    RobotState,
    STOP,
    TaskKind,
    TriggerInspect,
    advance_status,
)

METHODS = ("full", "coverage-inspect", "coverage-only")

_TASK_NODE = {TaskKind.INSPECT: BehaviorKind.INSPECT, TaskKind.ASCEND: BehaviorKind.CLIMB}


def edge_set(method: str) -> list[tuple[str, str, str]]:
    """Static (from, to, predicate) topology for a method; all belief-gated."""
    if method == "coverage-only":
        return []
    if method == "coverage-inspect":
        return [
            (BehaviorKind.COVERAGE.value, BehaviorKind.INSPECT.value,
             PredicateKind.ACT_GATE.value),
            (BehaviorKind.COVERAGE.value, BehaviorKind.CLIMB.value,
             PredicateKind.ACT_GATE.value),
            (BehaviorKind.INSPECT.value, BehaviorKind.COVERAGE.value,
             PredicateKind.TASK_DONE.value),
            (BehaviorKind.CLIMB.value, BehaviorKind.COVERAGE.value,
             PredicateKind.TASK_DONE.value),
        ]
    return [
        (BehaviorKind.SEARCH.value, BehaviorKind.INSPECT.value,
         PredicateKind.ACT_GATE.value),
        (BehaviorKind.SEARCH.value, BehaviorKind.CLIMB.value,
         PredicateKind.ACT_GATE.value),
        (BehaviorKind.SEARCH.value, BehaviorKind.COVERAGE.value,
         PredicateKind.ABSENT_GATE.value),
        (BehaviorKind.COVERAGE.value, BehaviorKind.SEARCH.value,
         PredicateKind.SEARCH_GATE.value),
        (BehaviorKind.INSPECT.value, BehaviorKind.COVERAGE.value,
         PredicateKind.TASK_DONE.value),
        (BehaviorKind.CLIMB.value, BehaviorKind.COVERAGE.value,
         PredicateKind.TASK_DONE.value),
        (BehaviorKind.INSPECT.value, BehaviorKind.SEARCH.value,
         PredicateKind.SEARCH_ABORT.value),
        (BehaviorKind.CLIMB.value, BehaviorKind.SEARCH.value,
         PredicateKind.SEARCH_ABORT.value),
    ]


@dataclass
class GraphState:
    active: BehaviorKind = BehaviorKind.COVERAGE
    target_id: Optional[int] = None
    target_label: Optional[int] = None


def _gate_values(belief: GeoSemanticBelief, ob: ObjectBelief, label_id: int) -> dict:
    return {
        "object": ob.object_id,
        "label_prob": float(ob.label_probs[label_id]),
        "pos_std": ob.max_pos_std,
        "expected_dist": expected_distance(belief, ob),
        "status": ob.status.value,
    }


class TransitionPolicy:
    """Pure function of (node, belief) -> node, with trace-able predicate values."""

    def __init__(self, scenario: WorldScenario, method: str):
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        self.scenario = scenario
        self.method = method
        self.thresholds = scenario.thresholds
        self.registry = scenario.registry

    def evaluate(self, state: GraphState,
                 belief: GeoSemanticBelief) -> tuple[GraphState, list[dict]]:
        thr = self.thresholds
        events: list[dict] = []
        active = state.active

        if active == BehaviorKind.SEARCH:
            ob = belief.objects.get(state.target_id)
            if ob is None or ob.status.resolved:
                return self._to_coverage(state, events, PredicateKind.TASK_DONE,
                                         {"object": state.target_id})
            label = state.target_label
            if act_gate(belief, ob, label, thr):
                node = _TASK_NODE[self.registry[label].task]
                events.append(self._transition_event(
                    active, node, PredicateKind.ACT_GATE,
                    _gate_values(belief, ob, label)))
                return GraphState(node, state.target_id, label), events
            if absent_gate(ob, label, thr):
                alt = self._retarget_label(ob, label)
                if alt is not None:
                    events.append({"event": "retarget", "object": ob.object_id,
                                   "from_label": self.registry[label].name,
                                   "to_label": self.registry[alt].name})
                    return GraphState(BehaviorKind.SEARCH, state.target_id, alt), events
                ob.status = advance_status(ob.status, AffordanceStatus.DISMISSED)
                events.append({"event": "dismissed", "object": ob.object_id,
                               "label": self.registry[label].name})
                return self._to_coverage(state, events, PredicateKind.ABSENT_GATE,
                                         _gate_values(belief, ob, label))
            return state, events

        if active in (BehaviorKind.INSPECT, BehaviorKind.CLIMB):
            ob = belief.objects.get(state.target_id)
            if ob is None or ob.status.resolved:
                if active == BehaviorKind.CLIMB and belief.robot.gait != Gait.WALK:
                    return state, events  # let the behavior restore the gait first
                values = {"object": state.target_id,
                          "status": ob.status.value if ob else "lost"}
                return self._to_coverage(state, events, PredicateKind.TASK_DONE, values)
            if self.method == "full" and act_gate_collapsed(ob, thr):
                events.append(self._transition_event(
                    active, BehaviorKind.SEARCH, PredicateKind.SEARCH_ABORT,
                    _gate_values(belief, ob, state.target_label)))
                return GraphState(BehaviorKind.SEARCH, state.target_id,
                                  state.target_label), events
            return state, events

        # coverage node
        if self.method == "coverage-only":
            return state, events
        candidate = self._pick_candidate(belief)
        if candidate is not None:
            ob, label = candidate
            if self.method == "full":
                events.append(self._transition_event(
                    active, BehaviorKind.SEARCH, PredicateKind.SEARCH_GATE,
                    _gate_values(belief, ob, label)))
                return GraphState(BehaviorKind.SEARCH, ob.object_id, label), events
            node = _TASK_NODE[self.registry[label].task]
            events.append(self._transition_event(
                active, node, PredicateKind.ACT_GATE, _gate_values(belief, ob, label)))
            return GraphState(node, ob.object_id, label), events
        return state, events

    # -- helpers -----------------------------------------------------------

    def _transition_event(self, from_node: BehaviorKind, to_node: BehaviorKind,
                          predicate: PredicateKind, values: dict) -> dict:
        return {
            "event": "transition",
            "from": from_node.value,
            "to": to_node.value,
            "predicate": predicate.value,
            "values": values,
        }

    def _to_coverage(self, state: GraphState, events: list[dict],
                     predicate: PredicateKind, values: dict):
        events.append(self._transition_event(state.active, BehaviorKind.COVERAGE,
                                             predicate, values))
        return GraphState(BehaviorKind.COVERAGE), events

    def _retarget_label(self, ob: ObjectBelief, current: int) -> Optional[int]:
        """When the searched label collapses but another label is now likely,
        keep searching under the new expectation instead of dismissing."""
        alt = ob.expected_label
        if alt == current:
            return None
        if float(ob.label_probs[alt]) > self.thresholds.search_label_prob:
            return alt
        return None

    def _pick_candidate(self, belief: GeoSemanticBelief):
        """Best pending track whose gate fires: highest label confidence,
        then nearest, then lowest id."""
        thr = self.thresholds
        best = None
        best_key = None
        for oid in belief.tracked_ids():
            ob = belief.objects[oid]
            if ob.status.resolved:
                continue
            label = ob.expected_label
            if self.method == "full":
                if not search_gate(ob, label, thr):
                    continue
            else:
                if not act_gate(belief, ob, label, thr):
                    continue
            key = (-float(ob.label_probs[label]), expected_distance(belief, ob), oid)
            if best_key is None or key < best_key:
                best, best_key = (ob, label), key
        return best


class Executor:
    """Algorithm loop: transition, act, step the world, observe, update."""

    def __init__(self, scenario: WorldScenario, method: str = "full",
                 teleop: bool = False):
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        self.scenario = scenario
        self.method = method
        self.teleop = teleop
        self.world = SimWorld(scenario)
        self.policy = TransitionPolicy(scenario, method)
        self.state = GraphState()
        start = scenario.start
        self.belief = GeoSemanticBelief(
            robot=RobotPoseBelief(
                mean=[start.x, start.y, start.heading],
                cov=[[0.0] * 3] * 3,
                floor=start.floor,
            ),
        )
        self.filter = BeliefFilter(
            registry=scenario.registry,
            detection=scenario.detection,
            noise=scenario.noise,
            config=scenario.filter_config,
            grid=scenario.grid,
        )
        self.coverage = CoverageBehavior(
            scenario.grid, scenario.coverage.footprint_radius,
            scenario.coverage.target_fraction)
        self.search = SearchBehavior(
            scenario, rngmod.substream(scenario.seed, rngmod.PLANNER))
        self.inspect = InspectBehavior(scenario)
        self.climb = ClimbBehavior(scenario)
        self.trace = Trace()
        self.trace.header(scenario, "teleop" if teleop else method, scenario.seed)
        self.tick_index = 0
        self.terminal_reason: Optional[str] = None
        self.path_length_m = 0.0
        self.task_successes = 0
        self.stair_failures = 0
        self.last_observations: list = []

    # -- state views -------------------------------------------------------

    @property
    def done(self) -> bool:
        return self.terminal_reason is not None

    def robot_estimate(self) -> RobotState:
        return self.belief.robot.as_state()

    def reward_cost_running(self) -> float:
        r = self.scenario.rewards
        return (r.task_reward * self.task_successes
                - r.dist_cost * self.path_length_m
                - r.time_cost * self.world.time
                - r.stair_failure_penalty * self.stair_failures)

    def believed_resolved_count(self) -> int:
        """Successfully resolved tasks as visible in the belief (fog-safe)."""
        return sum(1 for ob in self.belief.objects.values()
                   if ob.status in (AffordanceStatus.INSPECTED,
                                    AffordanceStatus.ASCENDED))

    def _pin_robot_belief(self) -> None:
        r = self.world.robot
        b = self.belief.robot
        if self.scenario.filter_config.perfect_localization:
            b.mean[0], b.mean[1], b.mean[2] = r.x, r.y, r.heading
        b.floor = r.floor
        b.gait = r.gait

    def _all_resolved(self) -> bool:
        for oid, oc in self.world.objects.items():
            if not oc.truth.status.pending:
                continue
            ob = self.belief.objects.get(oid)
            if ob is not None and ob.status == AffordanceStatus.DISMISSED:
                continue
            return False
        return True

    def _check_terminal(self) -> None:
        if self._all_resolved():
            self.terminal_reason = "all_resolved"
        elif self.world.time >= self.scenario.budget_s - 1e-9:
            self.terminal_reason = "budget"

    # -- main loop ---------------------------------------------------------

    def tick(self, external_u: Optional[ControlInput] = None) -> list[dict]:
        """One simulated tick; returns this tick's events (trace payloads)."""
        if self.done:
            raise RuntimeError("executor already terminal")
        scenario = self.scenario
        dt = scenario.dt
        self._pin_robot_belief()
        robot_est = self.robot_estimate()
        t_now = self.world.time
        all_events: list[dict] = []

        if self.teleop:
            u = self._teleop_control(external_u)
            self.coverage.mark(robot_est)  # keep the operator's sweep view live
            behavior_name = "teleop"
            target = None
        else:
            new_state, events = self.policy.evaluate(self.state, self.belief)
            for ev in events:
                self.trace.event(self.tick_index, t_now, PLANNER, ev)
            all_events.extend(events)
            if new_state.active != self.state.active:
                self._on_enter(new_state)
            self.state = new_state
            u, step_events = self._behavior_control(robot_est, t_now)
            for ev in step_events:
                self.trace.event(self.tick_index, t_now, PLANNER, ev)
            all_events.extend(step_events)
            behavior_name = self.state.active.value
            target = self.state.target_id

        prev_x, prev_y, prev_floor = self.world.robot.x, self.world.robot.y, \
            self.world.robot.floor
        world_events = self.world.step(u, dt)
        for ev in world_events:
            self.trace.event(self.tick_index, self.world.time, WORLD, ev)
            if ev["event"] in ("inspect_success", "stair_ascended"):
                self.task_successes += 1
            elif ev["event"] == "stair_failure":
                self.stair_failures += 1
        all_events.extend(world_events)
        if not self.world.teleported and self.world.robot.floor == prev_floor:
            self.path_length_m += math.hypot(self.world.robot.x - prev_x,
                                             self.world.robot.y - prev_y)
        self._sync_statuses()

        observations = self.world.observe()
        self.last_observations = observations
        self.filter.predict(self.belief, u, dt)
        self._pin_robot_belief()
        obs_pose = self.robot_estimate()
        truth_statuses = {z.object_id: self.world.objects[z.object_id].truth.status
                          for z in observations}
        filter_events = self.filter.ingest(self.belief, observations, obs_pose,
                                           truth_statuses)
        for ev in filter_events:
            self.trace.event(self.tick_index, self.world.time, PLANNER, ev)
        all_events.extend(filter_events)

        r = self.world.robot
        pose = {"x": r.x, "y": r.y, "heading": r.heading, "floor": r.floor,
                "gait": r.gait.value}
        if self.world.teleported:
            pose["teleport"] = True
        self.trace.tick(self.tick_index, self.world.time, pose, u.to_dict(),
                        self.world.statuses(), behavior_name, target)
        self.tick_index += 1
        self._check_terminal()
        return all_events

    def run(self) -> Trace:
        while not self.done:
            self.tick()
        return self.finish()

    def finish(self) -> Trace:
        payload = summarize(self.trace)
        payload["method"] = "teleop" if self.teleop else self.method
        payload["terminal"] = self.terminal_reason or "aborted"
        payload["trace_format"] = "v1"
        self.trace.summary(payload)
        return self.trace

    # -- control dispatch ---------------------------------------------------

    def _on_enter(self, new_state: GraphState) -> None:
        if new_state.active == BehaviorKind.SEARCH:
            self.search.reset()
        elif new_state.active == BehaviorKind.INSPECT:
            self.inspect.reset()
        elif new_state.active == BehaviorKind.CLIMB:
            self.climb.reset()

    def _behavior_control(self, robot_est: RobotState,
                          t_now: float) -> tuple[ControlInput, list[dict]]:
        events: list[dict] = []
        state = self.state
        if state.active == BehaviorKind.COVERAGE:
            result = self.coverage.step(robot_est, t_now, self.scenario.limits)
            if result.done:
                if self._all_resolved():
                    return STOP, events
                self.coverage.reset_mask()
                events.append({"event": "coverage_reset"})
            return result.u, events
        if state.active == BehaviorKind.SEARCH:
            result = self.search.step(self.belief, state.target_id,
                                      state.target_label, robot_est, t_now)
            if result.info:
                events.append({"event": "plan_stats", **result.info,
                               "object": state.target_id})
            return result.u, events
        if state.active == BehaviorKind.INSPECT:
            result = self.inspect.step(self.belief, state.target_id, robot_est, t_now)
            return result.u, events
        result = self.climb.step(self.belief, state.target_id, robot_est, t_now)
        return result.u, events

    def _teleop_control(self, external_u: Optional[ControlInput]) -> ControlInput:
        if external_u is None:
            return STOP
        action = external_u.action
        if isinstance(action, TriggerInspect):
            ob = self.belief.objects.get(action.object_id)
            if ob is None:
                action = None
            else:
                action = TriggerInspect(action.object_id,
                                        float(ob.pos_mean[0]), float(ob.pos_mean[1]))
            external_u = ControlInput(external_u.vx, external_u.vy,
                                      external_u.omega, action)
        return external_u

    def _sync_statuses(self) -> None:
        """Statuses are observable: resolved truths propagate to their tracks."""
        for oid, ob in self.belief.objects.items():
            oc = self.world.objects.get(oid)
            if oc is None:
                continue
            truth_status = oc.truth.status
            if truth_status.resolved and ob.status.pending:
                ob.status = advance_status(ob.status, truth_status)


def run_once(scenario: WorldScenario, method: str = "full") -> Trace:
    """Run one autonomous episode to termination."""
    return Executor(scenario, method).run()
