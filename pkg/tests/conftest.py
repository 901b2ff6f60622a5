from __future__ import annotations

import math

import numpy as np
import pytest

from beliefgraph.sensing import DetectionCurve, DetectionParams, NoiseModelParams
from beliefgraph.types import (
    AffordanceStatus,
    LabelRegistry,
    ObjectBelief,
    ObjectTruth,
    RobotState,
    SemanticLabel,
)
from beliefgraph.worldmap import GridMap


@pytest.fixture
def registry() -> LabelRegistry:
    return LabelRegistry([
        SemanticLabel("fire_extinguisher", noise_factor=1.0, score_peak=0.9,
                      score_optimal_dist=1.5, score_decay=4.0, standoff=1.0),
        SemanticLabel("door", noise_factor=1.5, score_peak=0.85,
                      score_optimal_dist=2.0, score_decay=5.0, standoff=1.2),
    ])


@pytest.fixture
def noise(registry) -> NoiseModelParams:
    return NoiseModelParams(
        pos_dist_coeff=0.05, pos_bearing_coeff=0.1, pos_label_coeff=0.05,
        yaw_dist_coeff=0.02, yaw_bearing_coeff=0.05, yaw_label_coeff=0.02,
        confusion=np.array([[0.8, 0.2], [0.3, 0.7]]),
        score_sigma=0.1,
    )


@pytest.fixture
def detection() -> DetectionParams:
    return DetectionParams(
        curve=DetectionCurve(base_prob=0.9, optimal_dist=2.0, decay_dist=4.0),
        fov_half_angle=math.radians(45.0),
        max_range=10.0,
    )


@pytest.fixture
def open_grid() -> GridMap:
    rows = ["#" * 30] + ["#" + "." * 28 + "#"] * 18 + ["#" * 30]
    return GridMap.from_rows(0.5, {0: rows})


@pytest.fixture
def robot() -> RobotState:
    return RobotState(x=3.0, y=5.0, heading=0.0)


def make_belief(object_id=1, pos=(5.0, 5.0), var=1.0, yaw=0.0, yaw_var=0.1,
                probs=(0.5, 0.5), status=AffordanceStatus.TO_BE_INSPECTED,
                floor=0) -> ObjectBelief:
    return ObjectBelief(
        object_id=object_id,
        pos_mean=np.array(pos, dtype=float),
        pos_cov=np.eye(2) * var,
        yaw_mean=yaw,
        yaw_var=yaw_var,
        label_probs=np.array(probs, dtype=float),
        status=status,
        floor=floor,
    )


def make_truth(object_id=1, pos=(5.0, 5.0), heading=0.0, label_id=0,
               status=AffordanceStatus.TO_BE_INSPECTED, floor=0) -> ObjectTruth:
    return ObjectTruth(object_id, pos[0], pos[1], heading, label_id, status, floor)
