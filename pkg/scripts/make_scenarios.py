#!/usr/bin/env python3
"""Regenerate the bundled scenario files under src/beliefgraph/scenarios/."""

from __future__ import annotations

import math
from pathlib import Path

from beliefgraph.filtering import FilterConfig
from beliefgraph.scenario import (
    CoverageConfig,
    PlannerConfig,
    RewardSpec,
    RobotLimits,
    Thresholds,
    WorldScenario,
    save_scenario,
)
from beliefgraph.sensing import DetectionCurve, DetectionParams, NoiseModelParams
from beliefgraph.types import (
    AffordanceStatus,
    LabelRegistry,
    ObjectTruth,
    RobotState,
    SemanticLabel,
    TaskKind,
)
from beliefgraph.worldmap import GridMap, StairZone

OUT = Path(__file__).resolve().parent.parent / "src" / "beliefgraph" / "scenarios"


def box_rows(cols: int, rows: int) -> list[str]:
    top = "#" * cols
    mid = "#" + "." * (cols - 2) + "#"
    return [top] + [mid] * (rows - 2) + [top]


def office_rows() -> list[str]:
    """40 x 24 cells at 0.5 m: a corridor with three rooms above, two below."""
    cols, rows = 40, 24
    grid = [["." for _ in range(cols)] for _ in range(rows)]  # indexed [iy][ix]
    for ix in range(cols):
        grid[0][ix] = "#"
        grid[rows - 1][ix] = "#"
    for iy in range(rows):
        grid[iy][0] = "#"
        grid[iy][cols - 1] = "#"
    # corridor walls with door gaps
    for ix in range(1, cols - 1):
        if ix not in (8, 9, 28, 29):        # gaps into the bottom rooms
            grid[9][ix] = "#"
        if ix not in (6, 7, 18, 19, 32, 33):  # gaps into the top rooms
            grid[15][ix] = "#"
    # room dividers
    for iy in range(16, rows - 1):
        grid[iy][13] = "#"
        grid[iy][26] = "#"
    for iy in range(1, 9):
        grid[iy][19] = "#"
    return ["".join(row) for row in grid[::-1]]  # row 0 of the file is the top


def office_small() -> WorldScenario:
    registry = LabelRegistry([
        SemanticLabel("fire_extinguisher", noise_factor=1.0, score_peak=0.9,
                      score_optimal_dist=1.5, score_decay=4.0, standoff=1.0,
                      task=TaskKind.INSPECT),
        SemanticLabel("door", noise_factor=1.5, score_peak=0.85,
                      score_optimal_dist=2.0, score_decay=5.0, standoff=1.2,
                      task=TaskKind.INSPECT),
    ])
    fe = registry.id_of("fire_extinguisher")
    door = registry.id_of("door")
    tbi = AffordanceStatus.TO_BE_INSPECTED
    objects = [
        ObjectTruth(1, 2.0, 10.0, -math.pi / 2, fe, tbi),
        ObjectTruth(2, 12.5, 10.5, math.pi, fe, tbi),
        ObjectTruth(3, 16.5, 6.5, math.pi, fe, tbi),
        ObjectTruth(4, 6.5, 1.5, math.pi / 2, door, tbi),
        ObjectTruth(5, 17.5, 1.5, math.pi / 2, door, tbi),
        ObjectTruth(6, 18.5, 10.5, -math.pi / 2, door, tbi),
    ]
    return WorldScenario(
        name="office-small",
        grid=GridMap.from_rows(0.5, {0: office_rows()}),
        registry=registry,
        objects=objects,
        detection=DetectionParams(
            curve=DetectionCurve(base_prob=0.9, optimal_dist=2.0, decay_dist=4.0),
            fov_half_angle=math.radians(45.0),
            max_range=10.0,
        ),
        noise=NoiseModelParams(
            pos_dist_coeff=0.1, pos_bearing_coeff=0.1, pos_label_coeff=0.05,
            yaw_dist_coeff=0.03, yaw_bearing_coeff=0.05, yaw_label_coeff=0.02,
            confusion=[[0.8, 0.2], [0.2, 0.8]],
            score_sigma=0.15,
        ),
        start=RobotState(x=1.0, y=6.0, heading=0.0),
        limits=RobotLimits(v_max=1.0, v_lat_max=0.5, omega_max=1.5,
                           motion_noise_std=0.005),
        filter_config=FilterConfig(),
        thresholds=Thresholds(),
        planner=PlannerConfig(steps=3, action_samples=6, outcome_samples=2),
        rewards=RewardSpec(),
        coverage=CoverageConfig(footprint_radius=10.0, target_fraction=0.95),
        budget_s=700.0,
        tick_hz=10.0,
        seed=1,
    )


def open_seek() -> WorldScenario:
    """One fire extinguisher dead ahead; near-perfect sensor; smoke scenario."""
    registry = LabelRegistry([
        SemanticLabel("fire_extinguisher", standoff=1.0),
        SemanticLabel("door", standoff=1.2),
    ])
    fe = registry.id_of("fire_extinguisher")
    return WorldScenario(
        name="open-seek",
        grid=GridMap.from_rows(0.5, {0: box_rows(24, 20)}),
        registry=registry,
        objects=[ObjectTruth(1, 7.0, 5.0, math.pi, fe,
                             AffordanceStatus.TO_BE_INSPECTED)],
        detection=DetectionParams(
            curve=DetectionCurve(base_prob=0.95, optimal_dist=2.0, decay_dist=6.0),
            fov_half_angle=math.radians(60.0),
            max_range=10.0,
        ),
        noise=NoiseModelParams(
            pos_dist_coeff=0.03, pos_bearing_coeff=0.05, pos_label_coeff=0.02,
            yaw_dist_coeff=0.02, yaw_bearing_coeff=0.03, yaw_label_coeff=0.01,
            confusion=[[0.95, 0.05], [0.05, 0.95]],
            score_sigma=0.1,
        ),
        start=RobotState(x=4.0, y=5.0, heading=0.0),
        limits=RobotLimits(motion_noise_std=0.002),
        planner=PlannerConfig(steps=3, action_samples=6, outcome_samples=2),
        coverage=CoverageConfig(footprint_radius=8.0, target_fraction=0.95),
        budget_s=120.0,
        seed=1,
    )


def open_empty() -> WorldScenario:
    registry = LabelRegistry([SemanticLabel("fire_extinguisher")])
    return WorldScenario(
        name="open-empty",
        grid=GridMap.from_rows(0.5, {0: box_rows(12, 12)}),
        registry=registry,
        objects=[],
        detection=DetectionParams(),
        noise=NoiseModelParams(confusion=[[1.0]]),
        start=RobotState(x=3.0, y=3.0, heading=0.0),
        budget_s=60.0,
        seed=1,
    )


def stair_demo() -> WorldScenario:
    """Two floors joined by one stair zone; a fire extinguisher waits upstairs."""
    registry = LabelRegistry([
        SemanticLabel("fire_extinguisher", standoff=1.0),
        SemanticLabel("stairs", noise_factor=1.2, score_peak=0.85,
                      score_optimal_dist=2.5, score_decay=5.0, standoff=1.5,
                      task=TaskKind.ASCEND),
    ])
    fe = registry.id_of("fire_extinguisher")
    stairs = registry.id_of("stairs")
    zone = StairZone(
        object_id=1, from_floor=0, to_floor=1,
        entry_x=11.5, entry_y=5.0, entry_heading=0.0,
        exit_x=14.5, exit_y=5.0,
        x_min=12.0, y_min=4.0, x_max=14.0, y_max=6.0,
    )
    objects = [
        ObjectTruth(1, 13.0, 5.0, 0.0, stairs, AffordanceStatus.TO_BE_ASCENDED),
        ObjectTruth(2, 4.0, 5.0, 0.0, fe, AffordanceStatus.TO_BE_INSPECTED, floor=1),
    ]
    rows = box_rows(32, 20)
    return WorldScenario(
        name="stair-demo",
        grid=GridMap.from_rows(0.5, {0: rows, 1: rows}, (zone,)),
        registry=registry,
        objects=objects,
        detection=DetectionParams(
            curve=DetectionCurve(base_prob=0.9, optimal_dist=2.0, decay_dist=5.0),
            fov_half_angle=math.radians(60.0),
            max_range=10.0,
        ),
        noise=NoiseModelParams(
            pos_dist_coeff=0.04, pos_bearing_coeff=0.05, pos_label_coeff=0.03,
            yaw_dist_coeff=0.02, yaw_bearing_coeff=0.03, yaw_label_coeff=0.01,
            confusion=[[0.9, 0.1], [0.1, 0.9]],
            score_sigma=0.12,
        ),
        start=RobotState(x=3.0, y=5.0, heading=0.0),
        limits=RobotLimits(motion_noise_std=0.002),
        planner=PlannerConfig(steps=3, action_samples=6, outcome_samples=2),
        coverage=CoverageConfig(footprint_radius=8.0, target_fraction=0.95),
        budget_s=300.0,
        seed=1,
    )


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for build in (office_small, open_seek, open_empty, stair_demo):
        scenario = build()
        path = OUT / f"{scenario.name}.json"
        save_scenario(scenario, path)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
