"""Scenario files: every knob of a run, validated, in one JSON document.

Loading is strict: schema violations raise ScenarioError naming the offending
field path. Saving and reloading a scenario round-trips exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import rng
from .filtering import FilterConfig
from .sensing import DetectionParams, NoiseModelParams
from .types import AffordanceStatus, LabelRegistry, ObjectTruth, RobotState, TaskKind
from .worldmap import GridMap, StairZone

FORMAT_VERSION = 1


class ScenarioError(ValueError):
    """Scenario file failed validation; message names the field."""


@dataclass(frozen=True)
class RobotLimits:
    v_max: float = 1.0
    v_lat_max: float = 0.5
    omega_max: float = 1.5
    motion_noise_std: float = 0.01  # m per tick, each axis

    def __post_init__(self) -> None:
        if self.v_max <= 0 or self.v_lat_max < 0 or self.omega_max <= 0:
            raise ScenarioError("robot limits must be positive")
        if self.motion_noise_std < 0:
            raise ScenarioError("robot.motion_noise_std must be >= 0")


@dataclass(frozen=True)
class Thresholds:
    """Belief-predicate gates for the behavior graph."""

    search_label_prob: float = 0.7    # engage search above this label confidence
    search_pos_std: float = 5.0       # m
    act_label_prob: float = 0.9       # act (inspect/climb) above this confidence
    act_pos_std: float = 1.0          # m
    act_expected_dist: float = 2.5    # m
    absent_label_prob: float = 0.2    # below this the search concludes negative
    abort_std_factor: float = 2.0     # inspect aborts when std exceeds factor * act gate

    def __post_init__(self) -> None:
        for name in ("search_label_prob", "act_label_prob", "absent_label_prob"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ScenarioError(f"thresholds.{name} must be in (0, 1)")
        for name in ("search_pos_std", "act_pos_std", "act_expected_dist", "abort_std_factor"):
            if getattr(self, name) <= 0:
                raise ScenarioError(f"thresholds.{name} must be > 0")


@dataclass(frozen=True)
class PlannerConfig:
    """Budget of the receding-horizon search."""

    horizon_s: float = 8.0        # lookahead
    steps: int = 4                # belief-update rounds per horizon
    action_samples: int = 8       # candidate poses per node
    outcome_samples: int = 3      # detection outcomes per candidate (plus a miss branch)
    pose_entropy_weight: float = 0.1
    entropy_floor: float = 0.05   # nodes at or below this stop expanding
    min_step_dist: float = 0.5    # m, candidate displacement range
    max_step_dist: float = 2.0    # m

    def __post_init__(self) -> None:
        if self.horizon_s <= 0:
            raise ScenarioError("planner.horizon_s must be > 0")
        for name in ("steps", "action_samples", "outcome_samples"):
            if getattr(self, name) < 1:
                raise ScenarioError(f"planner.{name} must be >= 1")
        if not (0 < self.min_step_dist <= self.max_step_dist):
            raise ScenarioError("planner step distance range invalid")

    @property
    def step_duration(self) -> float:
        return self.horizon_s / self.steps


@dataclass(frozen=True)
class RewardSpec:
    task_reward: float = 100.0          # per successful inspection or ascent
    dist_cost: float = 1.0              # per meter traveled
    time_cost: float = 0.05             # per second elapsed
    stair_failure_penalty: float = 50.0  # per failed stair entry

    def __post_init__(self) -> None:
        if self.task_reward < 0 or self.dist_cost < 0 or self.time_cost < 0 \
                or self.stair_failure_penalty < 0:
            raise ScenarioError("reward terms must be >= 0")


@dataclass(frozen=True)
class CoverageConfig:
    footprint_radius: float = 10.0
    target_fraction: float = 0.95

    def __post_init__(self) -> None:
        if self.footprint_radius <= 0:
            raise ScenarioError("coverage.footprint_radius must be > 0")
        if not (0.0 < self.target_fraction <= 1.0):
            raise ScenarioError("coverage.target_fraction must be in (0, 1]")


@dataclass
class WorldScenario:
    """Everything a run needs: world, sensors, thresholds, budgets, seed."""

    name: str
    grid: GridMap
    registry: LabelRegistry
    objects: list[ObjectTruth]
    detection: DetectionParams
    noise: NoiseModelParams
    start: RobotState
    limits: RobotLimits = RobotLimits()
    filter_config: FilterConfig = FilterConfig()
    thresholds: Thresholds = Thresholds()
    planner: PlannerConfig = PlannerConfig()
    rewards: RewardSpec = RewardSpec()
    coverage: CoverageConfig = CoverageConfig()
    budget_s: float = 700.0
    tick_hz: float = 10.0
    seed: int = 1
    generator: dict | None = None

    def __post_init__(self) -> None:
        self.validate()

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_hz

    def validate(self) -> None:
        if self.budget_s <= 0:
            raise ScenarioError("budget_s must be > 0")
        if self.tick_hz <= 0:
            raise ScenarioError("tick_hz must be > 0")
        if len(self.noise.confusion) != len(self.registry):
            raise ScenarioError(
                f"noise.confusion is {len(self.noise.confusion)}x{len(self.noise.confusion)} "
                f"but the registry has {len(self.registry)} labels")
        if not self.grid.is_free(self.start.x, self.start.y, self.start.floor):
            raise ScenarioError("robot.start must lie in free space")
        ids = [o.object_id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ScenarioError("objects: duplicate object ids")
        for o in self.objects:
            if not self.grid.is_free(o.x, o.y, o.floor):
                raise ScenarioError(f"objects[id={o.object_id}] placed in occupied space")
        zone_ids = {z.object_id for z in self.grid.stair_zones}
        for o in self.objects:
            if self.registry[o.label_id].task == TaskKind.ASCEND and o.object_id not in zone_ids:
                raise ScenarioError(
                    f"objects[id={o.object_id}] has an ascend task but no stair zone")

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "name": self.name,
            "grid": {
                "cell_size": self.grid.cell_size,
                "floors": {str(f): rows for f, rows in self.grid.to_rows().items()},
            },
            "stair_zones": [z.to_dict() for z in self.grid.stair_zones],
            "labels": self.registry.to_dict(),
            "objects": [o.to_dict(self.registry) for o in self.objects],
            "detection": self.detection.to_dict(self.registry),
            "noise": self.noise.to_dict(),
            "robot": {
                "start": {
                    "x": self.start.x,
                    "y": self.start.y,
                    "heading": self.start.heading,
                    "floor": self.start.floor,
                },
                "v_max": self.limits.v_max,
                "v_lat_max": self.limits.v_lat_max,
                "omega_max": self.limits.omega_max,
                "motion_noise_std": self.limits.motion_noise_std,
            },
            "filter": self.filter_config.to_dict(),
            "thresholds": vars(self.thresholds).copy(),
            "planner": vars(self.planner).copy(),
            "rewards": vars(self.rewards).copy(),
            "coverage": vars(self.coverage).copy(),
            "budget_s": self.budget_s,
            "tick_hz": self.tick_hz,
            "seed": self.seed,
            **({"generator": self.generator} if self.generator else {}),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WorldScenario":
        version = _require(d, "format_version", "")
        if version != FORMAT_VERSION:
            raise ScenarioError(f"format_version: expected {FORMAT_VERSION}, got {version}")
        try:
            registry = LabelRegistry.from_dict(_require(d, "labels", ""))
        except (ValueError, KeyError) as e:
            raise ScenarioError(f"labels: {e}") from e
        grid_d = _require(d, "grid", "")
        zones = tuple(StairZone.from_dict(z) for z in d.get("stair_zones", []))
        try:
            grid = GridMap.from_rows(
                _require(grid_d, "cell_size", "grid"),
                {int(f): rows for f, rows in _require(grid_d, "floors", "grid").items()},
                zones,
            )
        except (ValueError, KeyError) as e:
            raise ScenarioError(f"grid: {e}") from e
        objects = []
        for i, od in enumerate(d.get("objects", [])):
            try:
                objects.append(ObjectTruth.from_dict(od, registry))
            except (ValueError, KeyError) as e:
                raise ScenarioError(f"objects[{i}]: {e}") from e
        robot_d = _require(d, "robot", "")
        start_d = _require(robot_d, "start", "robot")
        start = RobotState(
            x=_require(start_d, "x", "robot.start"),
            y=_require(start_d, "y", "robot.start"),
            heading=_require(start_d, "heading", "robot.start"),
            floor=start_d.get("floor", 0),
        )
        try:
            detection = DetectionParams.from_dict(_require(d, "detection", ""), registry)
            noise = NoiseModelParams.from_dict(_require(d, "noise", ""))
        except (ValueError, KeyError) as e:
            raise ScenarioError(f"detection/noise: {e}") from e
        limits = RobotLimits(
            v_max=robot_d.get("v_max", 1.0),
            v_lat_max=robot_d.get("v_lat_max", 0.5),
            omega_max=robot_d.get("omega_max", 1.5),
            motion_noise_std=robot_d.get("motion_noise_std", 0.01),
        )
        filter_d = d.get("filter", {})
        perfect = robot_d.get("perfect_localization", filter_d.get("perfect_localization", True))
        filter_config = FilterConfig.from_dict({**filter_d, "perfect_localization": perfect})
        return cls(
            name=d.get("name", "unnamed"),
            grid=grid,
            registry=registry,
            objects=objects,
            detection=detection,
            noise=noise,
            start=start,
            limits=limits,
            filter_config=filter_config,
            thresholds=Thresholds(**d.get("thresholds", {})),
            planner=PlannerConfig(**d.get("planner", {})),
            rewards=RewardSpec(**d.get("rewards", {})),
            coverage=CoverageConfig(**d.get("coverage", {})),
            budget_s=d.get("budget_s", 700.0),
            tick_hz=d.get("tick_hz", 10.0),
            seed=d.get("seed", 1),
            generator=d.get("generator"),
        )

    def with_seed(self, seed: int) -> "WorldScenario":
        d = self.to_dict()
        d["seed"] = seed
        return WorldScenario.from_dict(d)


def _require(d: dict, key: str, path: str):
    if not isinstance(d, dict) or key not in d:
        where = f"{path}.{key}" if path else key
        raise ScenarioError(f"missing required field: {where}")
    return d[key]


def load_scenario(path: str | Path) -> WorldScenario:
    """Read and validate a scenario JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}") from e
    try:
        return WorldScenario.from_dict(raw)
    except ScenarioError as e:
        raise ScenarioError(f"{path}: {e}") from e


def save_scenario(scenario: WorldScenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2) + "\n")


def bundled_scenario_path(name: str) -> Path:
    return Path(__file__).parent / "scenarios" / f"{name}.json"


def load_bundled(name: str) -> WorldScenario:
    return load_scenario(bundled_scenario_path(name))


def generate_scenario(template: WorldScenario, seed: int) -> WorldScenario:
    """Place objects from the template's generator spec uniformly in free space.

    The generator spec gives per-label counts and a minimum pairwise
    separation; placement draws from the scenario-generation stream only.
    """
    if not template.generator:
        raise ScenarioError("template has no generator section")
    counts: dict[str, int] = template.generator.get("counts", {})
    min_sep: float = template.generator.get("min_separation", 3.0)
    floor: int = template.generator.get("floor", 0)
    stream = rng.substream(seed, rng.SCENARIO)
    grid = template.grid
    free = grid.free_cells(floor)
    ys, xs = np.nonzero(free)
    if len(xs) == 0:
        raise ScenarioError("generator: no free cells on target floor")
    placed: list[tuple[float, float]] = [(template.start.x, template.start.y)]
    objects: list[ObjectTruth] = []
    next_id = 1
    for label_name in sorted(counts):
        label_id = template.registry.id_of(label_name)
        task = template.registry[label_id].task
        status = (AffordanceStatus.TO_BE_ASCENDED if task == TaskKind.ASCEND
                  else AffordanceStatus.TO_BE_INSPECTED)
        for _ in range(counts[label_name]):
            for _attempt in range(10_000):
                k = int(stream.integers(len(xs)))
                px, py = grid.center_of(int(xs[k]), int(ys[k]))
                if all(math.hypot(px - qx, py - qy) >= min_sep for qx, qy in placed):
                    break
            else:
                raise ScenarioError(
                    f"generator: could not place {label_name} with separation {min_sep}")
            heading = float(stream.uniform(-math.pi, math.pi))
            objects.append(ObjectTruth(next_id, px, py, heading, label_id, status, floor))
            placed.append((px, py))
            next_id += 1
    out = template.to_dict()
    out["objects"] = [o.to_dict(template.registry) for o in objects]
    out["seed"] = seed
    out.pop("generator", None)
    return WorldScenario.from_dict(out)
