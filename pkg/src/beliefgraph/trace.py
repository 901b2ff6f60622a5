"""Run traces: JSON-lines records, derived metric series, determinism hashes.

A trace is a header record, one record per tick, event records as they occur,
and a closing summary. World-sourced lines (simulator facts) are hashed
separately from planner-sourced lines so a control-log replay can be checked
bit-exactly without re-running the planner.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .scenario import RewardSpec, WorldScenario
from .types import AffordanceStatus

FORMAT_VERSION = 1

WORLD = "world"
PLANNER = "planner"

_DONE = (AffordanceStatus.INSPECTED.value, AffordanceStatus.ASCENDED.value)


def _canonical(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


@dataclass
class Trace:
    """In-memory run trace; append-only."""

    records: list[dict] = field(default_factory=list)

    def append(self, record: dict) -> None:
        self.records.append(record)

    def header(self, scenario: WorldScenario, method: str, seed: int) -> None:
        self.append({
            "kind": "header",
            "format_version": FORMAT_VERSION,
            "scenario": scenario.to_dict(),
            "method": method,
            "seed": seed,
        })

    def tick(self, i: int, t: float, pose: dict, u: dict,
             statuses: dict[str, str], behavior: str, target: int | None) -> None:
        self.append({
            "kind": "tick", "i": i, "t": t, "pose": pose, "u": u,
            "statuses": statuses, "behavior": behavior, "target": target,
        })

    def event(self, i: int, t: float, src: str, payload: dict) -> None:
        self.append({"kind": "event", "i": i, "t": t, "src": src, **payload})

    def summary(self, payload: dict) -> None:
        self.append({"kind": "summary", **payload})

    # -- views ---------------------------------------------------------

    def ticks(self) -> list[dict]:
        return [r for r in self.records if r["kind"] == "tick"]

    def events(self, event: str | None = None) -> list[dict]:
        out = [r for r in self.records if r["kind"] == "event"]
        if event is not None:
            out = [r for r in out if r["event"] == event]
        return out

    def scenario_dict(self) -> dict:
        return self.records[0]["scenario"]

    def summary_record(self) -> dict:
        last = self.records[-1]
        if last["kind"] != "summary":
            raise ValueError("trace has no summary record")
        return last

    def world_lines(self) -> list[str]:
        """Canonical lines of simulator-owned facts (for replay comparison)."""
        out = []
        for r in self.records:
            if r["kind"] == "tick":
                world_view = {k: r[k] for k in ("kind", "i", "t", "pose", "u", "statuses")}
                out.append(_canonical(world_view))
            elif r["kind"] == "event" and r["src"] == WORLD:
                out.append(_canonical(r))
        return out

    def hash(self) -> str:
        h = hashlib.sha256()
        for r in self.records:
            h.update(_canonical(r).encode())
            h.update(b"\n")
        return h.hexdigest()

    def world_hash(self) -> str:
        h = hashlib.sha256()
        for line in self.world_lines():
            h.update(line.encode())
            h.update(b"\n")
        return h.hexdigest()

    # -- persistence ------------------------------------------------------

    def write(self, path: str | Path) -> None:
        with open(path, "w") as f:
            for r in self.records:
                f.write(_canonical(r))
                f.write("\n")

    @classmethod
    def read(cls, path: str | Path) -> "Trace":
        records = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        if not records or records[0].get("kind") != "header":
            raise ValueError(f"{path}: not a trace file (missing header)")
        return cls(records)


# -- derived metrics --------------------------------------------------------


def path_length(trace: Trace) -> float:
    """Sum of per-tick displacements; teleport ticks (stair exits) excluded."""
    start = trace.scenario_dict()["robot"]["start"]
    prev = {"x": start["x"], "y": start["y"], "floor": start.get("floor", 0)}
    total = 0.0
    for r in trace.ticks():
        pose = r["pose"]
        if not pose.get("teleport", False) and pose["floor"] == prev["floor"]:
            total += math.hypot(pose["x"] - prev["x"], pose["y"] - prev["y"])
        prev = pose
    return total


def inspected_count_series(trace: Trace) -> list[tuple[float, int]]:
    """(time, number of successfully resolved objects) per tick."""
    out = []
    for r in trace.ticks():
        n = sum(1 for s in r["statuses"].values() if s in _DONE)
        out.append((r["t"], n))
    return out


def closest_distance_series(trace: Trace, cap: float = 5.0) -> list[tuple[float, float]]:
    """Sum over objects of the running minimum of min(cap, distance to robot).

    Distances only accrue while the robot shares the object's floor.
    """
    scenario = trace.scenario_dict()
    objs = scenario.get("objects", [])
    best = {str(o["id"]): cap for o in objs}
    pos = {str(o["id"]): (o["x"], o["y"], o.get("floor", 0)) for o in objs}
    start = scenario["robot"]["start"]
    for oid, (ox, oy, ofloor) in pos.items():
        if start.get("floor", 0) == ofloor:
            d = math.hypot(start["x"] - ox, start["y"] - oy)
            best[oid] = min(best[oid], d)
    out = []
    for r in trace.ticks():
        p = r["pose"]
        for oid, (ox, oy, ofloor) in pos.items():
            if p["floor"] != ofloor:
                continue
            d = math.hypot(p["x"] - ox, p["y"] - oy)
            if d < best[oid]:
                best[oid] = d
        out.append((r["t"], sum(best.values())))
    return out


def reward_cost(trace: Trace, rewards: RewardSpec | None = None) -> float:
    """Task rewards minus distance, time, and stair-failure costs."""
    if rewards is None:
        rewards = RewardSpec(**trace.scenario_dict().get("rewards", {}))
    successes = len(trace.events("inspect_success")) + len(trace.events("stair_ascended"))
    failures = len(trace.events("stair_failure"))
    ticks = trace.ticks()
    elapsed = ticks[-1]["t"] if ticks else 0.0
    return (rewards.task_reward * successes
            - rewards.dist_cost * path_length(trace)
            - rewards.time_cost * elapsed
            - rewards.stair_failure_penalty * failures)


def sample_series(series: list[tuple[float, float]], period: float,
                  t_end: float) -> list[tuple[float, float]]:
    """Resample a step series at multiples of `period` (last value carried forward)."""
    out = []
    if not series:
        return out
    idx = 0
    value = series[0][1]
    t = 0.0
    while t <= t_end + 1e-9:
        while idx < len(series) and series[idx][0] <= t + 1e-9:
            value = series[idx][1]
            idx += 1
        out.append((t, value))
        t += period
    return out


_TICK_FIELDS = {"kind", "i", "t", "pose", "u", "statuses", "behavior", "target"}
_POSE_FIELDS = {"x", "y", "heading", "floor", "gait"}
_STATUS_VALUES = {s.value for s in AffordanceStatus}


def validate_trace(trace: Trace) -> None:
    """Structural check of a trace: record shapes, time order, monotone counts.

    Raises ValueError on the first violation.
    """
    if not trace.records or trace.records[0].get("kind") != "header":
        raise ValueError("trace must start with a header record")
    header = trace.records[0]
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported trace format_version {header.get('format_version')}")
    if "scenario" not in header:
        raise ValueError("header missing scenario")
    last_t = -math.inf
    last_i = -1
    last_done = -1
    for n, r in enumerate(trace.records[1:], start=1):
        kind = r.get("kind")
        if kind == "tick":
            missing = _TICK_FIELDS - set(r)
            if missing:
                raise ValueError(f"record {n}: tick missing fields {sorted(missing)}")
            if not _POSE_FIELDS <= set(r["pose"]):
                raise ValueError(f"record {n}: malformed pose")
            if r["t"] <= last_t:
                raise ValueError(f"record {n}: time not strictly increasing")
            if r["i"] != last_i + 1:
                raise ValueError(f"record {n}: tick index skipped")
            bad = [s for s in r["statuses"].values() if s not in _STATUS_VALUES]
            if bad:
                raise ValueError(f"record {n}: unknown statuses {bad}")
            done = sum(1 for s in r["statuses"].values() if s in _DONE)
            if done < last_done:
                raise ValueError(f"record {n}: resolved count decreased")
            last_t, last_i, last_done = r["t"], r["i"], done
        elif kind == "event":
            if "event" not in r or "src" not in r or "i" not in r:
                raise ValueError(f"record {n}: malformed event")
            if r["src"] not in (WORLD, PLANNER):
                raise ValueError(f"record {n}: unknown event source {r['src']}")
        elif kind == "summary":
            if n != len(trace.records) - 1:
                raise ValueError("summary must be the final record")
            for key in ("ticks", "elapsed_s", "inspected_count", "path_length_m",
                        "reward_cost"):
                if key not in r:
                    raise ValueError(f"summary missing {key}")
        else:
            raise ValueError(f"record {n}: unknown kind {kind!r}")


def summarize(trace: Trace) -> dict:
    ticks = trace.ticks()
    final_inspected = inspected_count_series(trace)[-1][1] if ticks else 0
    closest = closest_distance_series(trace)
    return {
        "kind": "summary",
        "ticks": len(ticks),
        "elapsed_s": ticks[-1]["t"] if ticks else 0.0,
        "inspected_count": final_inspected,
        "closest_distance_sum": closest[-1][1] if closest else 0.0,
        "path_length_m": path_length(trace),
        "reward_cost": reward_cost(trace),
        "world_hash": trace.world_hash(),
    }
