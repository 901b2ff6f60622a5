"""Belief-space inspection planning: semantic sensing, Bayes filtering, an
entropy-minimizing search behavior, a belief-gated behavior graph, and a
deterministic planar simulator with batch and live-teleoperation front ends.
"""

from .types import (
    AffordanceStatus,
    ControlInput,
    GeoSemanticBelief,
    LabelRegistry,
    ObjectBelief,
    ObjectTruth,
    Observation,
    RobotState,
    SemanticLabel,
)
from .scenario import WorldScenario, load_scenario, load_bundled, generate_scenario
from .graph import Executor, run_once

__version__ = "0.1.0"

__all__ = [
    "AffordanceStatus",
    "ControlInput",
    "Executor",
    "GeoSemanticBelief",
    "LabelRegistry",
    "ObjectBelief",
    "ObjectTruth",
    "Observation",
    "RobotState",
    "SemanticLabel",
    "WorldScenario",
    "generate_scenario",
    "load_bundled",
    "load_scenario",
    "run_once",
    "__version__",
]
