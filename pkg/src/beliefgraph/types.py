"""Core domain types shared by the sensing, filtering, planning, and simulation layers.

Conventions: positions are planar (x, y) in meters, headings are radians in
(-pi, pi], label distributions are dense vectors over the scenario's label
registry, and every type serializes to plain JSON-compatible dicts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi


class DegenerateBeliefError(ValueError):
    """Raised when evidence annihilates every hypothesis (all weights zero)."""


def wrap_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.remainder(theta, TWO_PI)
    return a if a > -math.pi else math.pi


def normalize_label_distribution(weights: Sequence[float] | np.ndarray) -> np.ndarray:
    """Scale non-negative weights into a probability vector.

    Raises DegenerateBeliefError when all weights are zero; callers decide
    whether to reset to uniform (the filter does, and flags the event).
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"expected a non-empty 1-D weight vector, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("label weights must be non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise DegenerateBeliefError("all label weights are zero")
    return w / total


class Gait(str, Enum):
    WALK = "walk"
    STAIR = "stair"


class TaskKind(str, Enum):
    """What successful resolution of a label's object means."""

    INSPECT = "inspect"
    ASCEND = "ascend"


class AffordanceStatus(str, Enum):
    TO_BE_INSPECTED = "to_be_inspected"
    TO_BE_ASCENDED = "to_be_ascended"
    INSPECTED = "inspected"
    ASCENDED = "ascended"
    DISMISSED = "dismissed"

    @property
    def pending(self) -> bool:
        return self in (AffordanceStatus.TO_BE_INSPECTED, AffordanceStatus.TO_BE_ASCENDED)

    @property
    def resolved(self) -> bool:
        return not self.pending


_STATUS_EDGES = {
    AffordanceStatus.TO_BE_INSPECTED: {AffordanceStatus.INSPECTED, AffordanceStatus.DISMISSED},
    AffordanceStatus.TO_BE_ASCENDED: {AffordanceStatus.ASCENDED, AffordanceStatus.DISMISSED},
    AffordanceStatus.INSPECTED: set(),
    AffordanceStatus.ASCENDED: set(),
    AffordanceStatus.DISMISSED: set(),
}


def advance_status(old: AffordanceStatus, new: AffordanceStatus) -> AffordanceStatus:
    """Apply a status transition, rejecting anything non-monotone."""
    if new == old:
        return old
    if new not in _STATUS_EDGES[old]:
        raise ValueError(f"illegal affordance transition {old.value} -> {new.value}")
    return new


@dataclass(frozen=True)
class SemanticLabel:
    """One entry of the scenario label registry."""

    name: str
    noise_factor: float = 1.0       # label-dependent scaling of measurement noise
    score_peak: float = 0.9         # expected detector score at the optimal distance
    score_optimal_dist: float = 1.5  # m
    score_decay: float = 4.0        # m; larger decays slower
    standoff: float = 1.0           # m; inspection stand-off distance
    task: TaskKind = TaskKind.INSPECT

    def __post_init__(self) -> None:
        if self.noise_factor <= 0:
            raise ValueError(f"label {self.name!r}: noise_factor must be > 0")
        if not (0.0 < self.score_peak <= 1.0):
            raise ValueError(f"label {self.name!r}: score_peak must be in (0, 1]")
        if self.score_optimal_dist < 0:
            raise ValueError(f"label {self.name!r}: score_optimal_dist must be >= 0")
        if self.score_decay <= 0:
            raise ValueError(f"label {self.name!r}: score_decay must be > 0")
        if self.standoff <= 0:
            raise ValueError(f"label {self.name!r}: standoff must be > 0")

    def expected_score(self, dist: float) -> float:
        """Mean detector confidence at a given distance."""
        return self.score_peak * math.exp(-abs(self.score_optimal_dist - dist) / self.score_decay)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "noise_factor": self.noise_factor,
            "score_peak": self.score_peak,
            "score_optimal_dist": self.score_optimal_dist,
            "score_decay": self.score_decay,
            "standoff": self.standoff,
            "task": self.task.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SemanticLabel":
        d = dict(d)
        d["task"] = TaskKind(d.get("task", "inspect"))
        return cls(**d)


class LabelRegistry:
    """Ordered, immutable set of semantic labels; label ids are indices."""

    def __init__(self, labels: Sequence[SemanticLabel]):
        if not labels:
            raise ValueError("label registry must be non-empty")
        names = [l.name for l in labels]
        if len(set(names)) != len(names):
            raise ValueError("duplicate label names in registry")
        self._labels = tuple(labels)
        self._index = {l.name: i for i, l in enumerate(labels)}

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __getitem__(self, label_id: int) -> SemanticLabel:
        return self._labels[label_id]

    def id_of(self, name: str) -> int:
        return self._index[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(l.name for l in self._labels)

    def uniform(self) -> np.ndarray:
        return np.full(len(self._labels), 1.0 / len(self._labels))

    def to_dict(self) -> list[dict]:
        return [l.to_dict() for l in self._labels]

    @classmethod
    def from_dict(cls, entries: Sequence[dict]) -> "LabelRegistry":
        return cls([SemanticLabel.from_dict(e) for e in entries])


@dataclass
class RobotState:
    """True (or estimated-mean) robot configuration."""

    x: float
    y: float
    heading: float
    floor: int = 0
    gait: Gait = Gait.WALK
    sensor_on: bool = True

    def __post_init__(self) -> None:
        self.heading = wrap_angle(self.heading)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def distance_to(self, px: float, py: float) -> float:
        return math.hypot(px - self.x, py - self.y)

    def bearing_to(self, px: float, py: float) -> float:
        """Bearing of a point relative to the heading, wrapped to (-pi, pi]."""
        return wrap_angle(math.atan2(py - self.y, px - self.x) - self.heading)

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "heading": self.heading,
            "floor": self.floor,
            "gait": self.gait.value,
            "sensor_on": self.sensor_on,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RobotState":
        return cls(
            x=d["x"],
            y=d["y"],
            heading=d["heading"],
            floor=d.get("floor", 0),
            gait=Gait(d.get("gait", "walk")),
            sensor_on=d.get("sensor_on", True),
        )


@dataclass
class ObjectTruth:
    """Ground-truth object state held by the simulator."""

    object_id: int
    x: float
    y: float
    heading: float
    label_id: int
    status: AffordanceStatus
    floor: int = 0

    def __post_init__(self) -> None:
        self.heading = wrap_angle(self.heading)

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def set_status(self, new: AffordanceStatus) -> None:
        self.status = advance_status(self.status, new)

    def to_dict(self, registry: LabelRegistry) -> dict:
        return {
            "id": self.object_id,
            "x": self.x,
            "y": self.y,
            "heading": self.heading,
            "label": registry[self.label_id].name,
            "status": self.status.value,
            "floor": self.floor,
        }

    @classmethod
    def from_dict(cls, d: dict, registry: LabelRegistry) -> "ObjectTruth":
        return cls(
            object_id=d["id"],
            x=d["x"],
            y=d["y"],
            heading=d["heading"],
            label_id=registry.id_of(d["label"]),
            status=AffordanceStatus(d["status"]),
            floor=d.get("floor", 0),
        )


@dataclass(frozen=True)
class Observation:
    """One noisy geo-semantic measurement: pose, detected label, confidence."""

    object_id: int
    x: float
    y: float
    yaw: float
    label_id: int
    score: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"observation score {self.score} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "x": self.x,
            "y": self.y,
            "yaw": self.yaw,
            "label_id": self.label_id,
            "score": self.score,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Observation":
        return cls(
            object_id=d["object_id"],
            x=d["x"],
            y=d["y"],
            yaw=d["yaw"],
            label_id=d["label_id"],
            score=d["score"],
        )


@dataclass(frozen=True)
class TriggerInspect:
    """Discrete request to adjudicate an inspection of the believed target.

    Carries the believed object position so the simulator can score the
    trigger against ground truth without ever exposing truth to the planner.
    """

    object_id: int
    believed_x: float
    believed_y: float

    def to_dict(self) -> dict:
        return {
            "kind": "trigger_inspect",
            "object_id": self.object_id,
            "believed_x": self.believed_x,
            "believed_y": self.believed_y,
        }


@dataclass(frozen=True)
class SetGait:
    mode: Gait

    def to_dict(self) -> dict:
        return {"kind": "set_gait", "mode": self.mode.value}


DiscreteAction = TriggerInspect | SetGait


def action_from_dict(d: Optional[dict]) -> Optional[DiscreteAction]:
    if d is None:
        return None
    if d["kind"] == "trigger_inspect":
        return TriggerInspect(d["object_id"], d["believed_x"], d["believed_y"])
    if d["kind"] == "set_gait":
        return SetGait(Gait(d["mode"]))
    raise ValueError(f"unknown discrete action kind {d['kind']!r}")


@dataclass(frozen=True)
class ControlInput:
    """Velocity command in the body frame plus an optional discrete action."""

    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0
    action: Optional[DiscreteAction] = None

    def clamped(self, v_max: float, v_lat_max: float, omega_max: float) -> "ControlInput":
        return ControlInput(
            vx=min(max(self.vx, -v_max), v_max),
            vy=min(max(self.vy, -v_lat_max), v_lat_max),
            omega=min(max(self.omega, -omega_max), omega_max),
            action=self.action,
        )

    def to_dict(self) -> dict:
        return {
            "vx": self.vx,
            "vy": self.vy,
            "omega": self.omega,
            "action": self.action.to_dict() if self.action else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ControlInput":
        return cls(
            vx=d["vx"],
            vy=d["vy"],
            omega=d["omega"],
            action=action_from_dict(d.get("action")),
        )


STOP = ControlInput()


@dataclass
class ObjectBelief:
    """Gaussian pose belief plus categorical label belief for one object."""

    object_id: int
    pos_mean: np.ndarray            # (2,)
    pos_cov: np.ndarray             # (2, 2), symmetric PSD
    yaw_mean: float
    yaw_var: float
    label_probs: np.ndarray         # dense over the registry, sums to 1
    status: AffordanceStatus
    floor: int = 0

    def __post_init__(self) -> None:
        self.pos_mean = np.asarray(self.pos_mean, dtype=float).reshape(2)
        self.pos_cov = np.asarray(self.pos_cov, dtype=float).reshape(2, 2)
        self.label_probs = np.asarray(self.label_probs, dtype=float)
        self.yaw_mean = wrap_angle(self.yaw_mean)

    def validate(self, atol: float = 1e-9) -> None:
        if not np.allclose(self.pos_cov, self.pos_cov.T, atol=atol):
            raise ValueError("position covariance not symmetric")
        eigs = np.linalg.eigvalsh(self.pos_cov)
        if eigs.min() < -1e-10:
            raise ValueError(f"position covariance not PSD (min eig {eigs.min()})")
        if self.yaw_var < 0:
            raise ValueError("yaw variance negative")
        if np.any(self.label_probs < -atol):
            raise ValueError("negative label probability")
        if abs(float(self.label_probs.sum()) - 1.0) > atol:
            raise ValueError(f"label distribution sums to {self.label_probs.sum()}")

    @property
    def expected_label(self) -> int:
        return int(np.argmax(self.label_probs))

    @property
    def max_pos_std(self) -> float:
        """Largest marginal position standard deviation, in meters."""
        return math.sqrt(max(self.pos_cov[0, 0], self.pos_cov[1, 1], 0.0))

    def copy(self) -> "ObjectBelief":
        return ObjectBelief(
            object_id=self.object_id,
            pos_mean=self.pos_mean.copy(),
            pos_cov=self.pos_cov.copy(),
            yaw_mean=self.yaw_mean,
            yaw_var=self.yaw_var,
            label_probs=self.label_probs.copy(),
            status=self.status,
            floor=self.floor,
        )

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "pos_mean": [float(v) for v in self.pos_mean],
            "pos_cov": [[float(v) for v in row] for row in self.pos_cov],
            "yaw_mean": self.yaw_mean,
            "yaw_var": self.yaw_var,
            "label_probs": [float(v) for v in self.label_probs],
            "status": self.status.value,
            "floor": self.floor,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectBelief":
        return cls(
            object_id=d["object_id"],
            pos_mean=np.array(d["pos_mean"], dtype=float),
            pos_cov=np.array(d["pos_cov"], dtype=float),
            yaw_mean=d["yaw_mean"],
            yaw_var=d["yaw_var"],
            label_probs=np.array(d["label_probs"], dtype=float),
            status=AffordanceStatus(d["status"]),
            floor=d.get("floor", 0),
        )


@dataclass
class RobotPoseBelief:
    """Gaussian over (x, y, heading); the simulator may pin it to truth."""

    mean: np.ndarray                # (3,)
    cov: np.ndarray                 # (3, 3)
    floor: int = 0
    gait: Gait = Gait.WALK

    def __post_init__(self) -> None:
        self.mean = np.asarray(self.mean, dtype=float).reshape(3)
        self.cov = np.asarray(self.cov, dtype=float).reshape(3, 3)
        self.mean[2] = wrap_angle(self.mean[2])

    def as_state(self) -> RobotState:
        return RobotState(
            x=float(self.mean[0]),
            y=float(self.mean[1]),
            heading=float(self.mean[2]),
            floor=self.floor,
            gait=self.gait,
        )

    def copy(self) -> "RobotPoseBelief":
        return RobotPoseBelief(self.mean.copy(), self.cov.copy(), self.floor, self.gait)

    def to_dict(self) -> dict:
        return {
            "mean": [float(v) for v in self.mean],
            "cov": [[float(v) for v in row] for row in self.cov],
            "floor": self.floor,
            "gait": self.gait.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RobotPoseBelief":
        return cls(
            mean=np.array(d["mean"], dtype=float),
            cov=np.array(d["cov"], dtype=float),
            floor=d.get("floor", 0),
            gait=Gait(d.get("gait", "walk")),
        )


@dataclass
class GeoSemanticBelief:
    """Joint belief over the robot pose and all tracked objects."""

    robot: RobotPoseBelief
    objects: dict[int, ObjectBelief] = field(default_factory=dict)
    time: float = 0.0

    def validate(self) -> None:
        for oid, ob in self.objects.items():
            if oid != ob.object_id:
                raise ValueError(f"belief key {oid} != object id {ob.object_id}")
            ob.validate()

    def tracked_ids(self) -> list[int]:
        return sorted(self.objects)

    def copy(self) -> "GeoSemanticBelief":
        return GeoSemanticBelief(
            robot=self.robot.copy(),
            objects={oid: ob.copy() for oid, ob in sorted(self.objects.items())},
            time=self.time,
        )

    def to_dict(self) -> dict:
        return {
            "robot": self.robot.to_dict(),
            "objects": [self.objects[oid].to_dict() for oid in self.tracked_ids()],
            "time": self.time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeoSemanticBelief":
        objs = [ObjectBelief.from_dict(o) for o in d["objects"]]
        return cls(
            robot=RobotPoseBelief.from_dict(d["robot"]),
            objects={o.object_id: o for o in objs},
            time=d["time"],
        )


__all__ = [
    "AffordanceStatus",
    "ControlInput",
    "DegenerateBeliefError",
    "DiscreteAction",
    "Gait",
    "GeoSemanticBelief",
    "LabelRegistry",
    "ObjectBelief",
    "ObjectTruth",
    "Observation",
    "RobotPoseBelief",
    "RobotState",
    "STOP",
    "SemanticLabel",
    "SetGait",
    "TaskKind",
    "TriggerInspect",
    "advance_status",
    "normalize_label_distribution",
    "wrap_angle",
]
