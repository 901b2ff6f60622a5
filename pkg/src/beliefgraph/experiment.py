"""Batch experiments: matched-seed runs per method, CSV summaries, replay.

Seeds run in isolated workers (pool size via BELIEFGRAPH_WORKERS); every run
gets its own RNG streams and trace file, so results never depend on pool size
or scheduling.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .graph import METHODS, Executor
from .scenario import WorldScenario
from .simworld import SimWorld
from .trace import (
    Trace,
    closest_distance_series,
    inspected_count_series,
    sample_series,
    summarize,
)
from .types import ControlInput

SERIES_PERIOD_S = 10.0

SUMMARY_COLUMNS = [
    "method", "seed", "inspected_final", "closest_distance_final",
    "path_length_m", "reward_cost", "elapsed_s", "terminal", "trace_hash",
]
SERIES_COLUMNS = [
    "method", "t", "inspected_mean", "inspected_min", "inspected_max",
    "closest_mean", "closest_min", "closest_max",
]


def trace_filename(method: str, seed: int) -> str:
    return f"trace_{method}_seed{seed}.jsonl"


def _run_one(args: tuple[str, dict, str, int, float | None]) -> dict:
    out_dir, scenario_dict, method, seed, budget = args
    scenario_dict = dict(scenario_dict)
    scenario_dict["seed"] = seed
    if budget is not None:
        scenario_dict["budget_s"] = budget
    scenario = WorldScenario.from_dict(scenario_dict)
    trace = Executor(scenario, method).run()
    path = Path(out_dir) / trace_filename(method, seed)
    trace.write(path)
    summary = trace.summary_record()
    return {
        "method": method,
        "seed": seed,
        "inspected_final": summary["inspected_count"],
        "closest_distance_final": summary["closest_distance_sum"],
        "path_length_m": summary["path_length_m"],
        "reward_cost": summary["reward_cost"],
        "elapsed_s": summary["elapsed_s"],
        "terminal": summary["terminal"],
        "trace_hash": trace.hash(),
    }


def worker_count(n_jobs: int) -> int:
    env = os.environ.get("BELIEFGRAPH_WORKERS")
    if env:
        return max(1, min(int(env), n_jobs))
    return max(1, min(os.cpu_count() or 1, n_jobs))


def run_experiment(scenario: WorldScenario, method: str, seeds: list[int],
                   out_dir: str | Path, budget: float | None = None) -> list[dict]:
    """Run one method over matched seeds; writes traces plus summary/series CSV."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not seeds:
        raise ValueError("need at least one seed")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(str(out_dir), scenario.to_dict(), method, seed, budget) for seed in seeds]
    workers = worker_count(len(jobs))
    if workers == 1:
        rows = [_run_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, jobs))
    write_summary_csv(out_dir / f"summary_{method}.csv", rows)
    write_series_csv(out_dir, method, seeds)
    return rows


def write_summary_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in sorted(rows, key=lambda r: (r["method"], r["seed"])):
            writer.writerow({k: row[k] for k in SUMMARY_COLUMNS})


def load_summary_csv(path: str | Path) -> list[dict]:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    for row in rows:
        row["seed"] = int(row["seed"])
        row["inspected_final"] = int(row["inspected_final"])
        for k in ("closest_distance_final", "path_length_m", "reward_cost", "elapsed_s"):
            row[k] = float(row[k])
    return rows


def method_series(out_dir: Path, method: str, seeds: list[int]) -> list[dict]:
    """Mean/min/max of the metric series across seeds at a fixed resolution."""
    per_seed_inspected = []
    per_seed_closest = []
    t_end = 0.0
    for seed in seeds:
        trace = Trace.read(out_dir / trace_filename(method, seed))
        ins = inspected_count_series(trace)
        clo = closest_distance_series(trace)
        t_end = max(t_end, ins[-1][0] if ins else 0.0)
        per_seed_inspected.append(ins)
        per_seed_closest.append(clo)
    rows = []
    sampled_i = [sample_series(s, SERIES_PERIOD_S, t_end) for s in per_seed_inspected]
    sampled_c = [sample_series(s, SERIES_PERIOD_S, t_end) for s in per_seed_closest]
    for k in range(len(sampled_i[0])):
        t = sampled_i[0][k][0]
        ivals = [s[k][1] for s in sampled_i]
        cvals = [s[k][1] for s in sampled_c]
        rows.append({
            "method": method,
            "t": t,
            "inspected_mean": sum(ivals) / len(ivals),
            "inspected_min": min(ivals),
            "inspected_max": max(ivals),
            "closest_mean": sum(cvals) / len(cvals),
            "closest_min": min(cvals),
            "closest_max": max(cvals),
        })
    return rows


def write_series_csv(out_dir: Path, method: str, seeds: list[int]) -> None:
    rows = method_series(out_dir, method, seeds)
    with open(out_dir / f"series_{method}.csv", "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SERIES_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


# -- comparison ---------------------------------------------------------------


@dataclass
class Comparison:
    method_a: str
    method_b: str
    seeds: list[int]
    inspected_deltas: list[int]      # a minus b, per seed
    reward_deltas: list[float]
    verdict: str                     # "a", "b", or "inconclusive"

    def as_text(self) -> str:
        lines = [
            f"{self.method_a} vs {self.method_b} over seeds {self.seeds}",
            f"  inspected deltas: {self.inspected_deltas}",
            f"  reward-cost deltas: {[round(d, 2) for d in self.reward_deltas]}",
        ]
        if self.verdict == "inconclusive":
            lines.append("  no consistent ordering")
        else:
            winner = self.method_a if self.verdict == "a" else self.method_b
            lines.append(f"  consistent winner: {winner}")
        return "\n".join(lines)


def compare(summary_a: list[dict], summary_b: list[dict],
            min_consistent: float = 0.8) -> Comparison:
    """Paired per-seed comparison; declares an order only when it holds on
    at least `min_consistent` of the seeds."""
    a_by_seed = {r["seed"]: r for r in summary_a}
    b_by_seed = {r["seed"]: r for r in summary_b}
    if set(a_by_seed) != set(b_by_seed):
        raise ValueError(
            f"seed sets differ: {sorted(a_by_seed)} vs {sorted(b_by_seed)}")
    if len(a_by_seed) < 2:
        raise ValueError("paired comparison needs at least two matched seeds")
    seeds = sorted(a_by_seed)
    ins_d = [a_by_seed[s]["inspected_final"] - b_by_seed[s]["inspected_final"]
             for s in seeds]
    rew_d = [a_by_seed[s]["reward_cost"] - b_by_seed[s]["reward_cost"] for s in seeds]
    need = math.ceil(min_consistent * len(seeds))
    a_wins = sum(1 for d in ins_d if d > 0)
    b_wins = sum(1 for d in ins_d if d < 0)
    ties = sum(1 for d in ins_d if d == 0)
    verdict = "inconclusive"
    if a_wins + ties >= need and a_wins > b_wins:
        verdict = "a"
    elif b_wins + ties >= need and b_wins > a_wins:
        verdict = "b"
    method_a = summary_a[0]["method"]
    method_b = summary_b[0]["method"]
    return Comparison(method_a, method_b, seeds, ins_d, rew_d, verdict)


# -- replay -------------------------------------------------------------------


def replay_trace(trace: Trace) -> Trace:
    """Re-drive the simulator with the recorded per-tick controls.

    Uses only world-side state (scenario + control log + seed); the returned
    trace's world lines must match the original's bit-exactly.
    """
    scenario = WorldScenario.from_dict(trace.scenario_dict())
    world = SimWorld(scenario)
    out = Trace()
    out.header(scenario, "replay", scenario.seed)
    for rec in trace.ticks():
        u = ControlInput.from_dict(rec["u"])
        events = world.step(u, scenario.dt)
        for ev in events:
            out.event(rec["i"], world.time, "world", ev)
        world.observe()  # consume sensing streams exactly as the live run did
        r = world.robot
        pose = {"x": r.x, "y": r.y, "heading": r.heading, "floor": r.floor,
                "gait": r.gait.value}
        if world.teleported:
            pose["teleport"] = True
        out.tick(rec["i"], world.time, pose, u.to_dict(), world.statuses(),
                 "replay", None)
    out.summary({**summarize(out), "method": "replay", "terminal": "replayed"})
    return out


def verify_replay(trace: Trace) -> tuple[bool, str, str]:
    replayed = replay_trace(trace)
    a, b = trace.world_hash(), replayed.world_hash()
    return a == b, a, b

