"""Probabilistic semantic sensing: detection, measurement noise, likelihoods.

The same models serve two masters: the simulator samples observations from
them, and the belief filter evaluates them as likelihoods. Both sides share
this module so they can never drift apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .types import LabelRegistry, Observation, ObjectTruth, RobotState, wrap_angle
from .worldmap import GridMap

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class DetectionCurve:
    """Distance-decaying detection probability profile."""

    base_prob: float = 0.9      # probability at the optimal distance
    optimal_dist: float = 2.0   # m
    decay_dist: float = 4.0     # m; larger decays slower

    def __post_init__(self) -> None:
        if not (0.0 < self.base_prob <= 1.0):
            raise ValueError("base_prob must be in (0, 1]")
        if self.optimal_dist < 0:
            raise ValueError("optimal_dist must be >= 0")
        if self.decay_dist <= 0:
            raise ValueError("decay_dist must be > 0")

    def prob_at(self, dist: float) -> float:
        return self.base_prob * math.exp(-abs(self.optimal_dist - dist) / self.decay_dist)

    def to_dict(self) -> dict:
        return {
            "base_prob": self.base_prob,
            "optimal_dist": self.optimal_dist,
            "decay_dist": self.decay_dist,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionCurve":
        return cls(**d)


@dataclass(frozen=True)
class DetectionParams:
    """Detection curve (shared or per label) plus the sensor field of view."""

    curve: DetectionCurve = DetectionCurve()
    fov_half_angle: float = math.radians(45.0)
    max_range: float = 10.0
    per_label: dict[int, DetectionCurve] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (0.0 < self.fov_half_angle <= math.pi):
            raise ValueError("fov_half_angle must be in (0, pi]")
        if self.max_range <= 0:
            raise ValueError("max_range must be > 0")

    def curve_for(self, label_id: int) -> DetectionCurve:
        return self.per_label.get(label_id, self.curve)

    def to_dict(self, registry: LabelRegistry) -> dict:
        d = dict(self.curve.to_dict())
        d["fov_half_angle_deg"] = math.degrees(self.fov_half_angle)
        d["max_range"] = self.max_range
        if self.per_label:
            d["per_label"] = {
                registry[lid].name: c.to_dict() for lid, c in sorted(self.per_label.items())
            }
        return d

    @classmethod
    def from_dict(cls, d: dict, registry: LabelRegistry) -> "DetectionParams":
        curve = DetectionCurve(
            base_prob=d.get("base_prob", 0.9),
            optimal_dist=d.get("optimal_dist", 2.0),
            decay_dist=d.get("decay_dist", 4.0),
        )
        per_label = {
            registry.id_of(name): DetectionCurve.from_dict(c)
            for name, c in d.get("per_label", {}).items()
        }
        return cls(
            curve=curve,
            fov_half_angle=math.radians(d.get("fov_half_angle_deg", 45.0)),
            max_range=d.get("max_range", 10.0),
            per_label=per_label,
        )


@dataclass(frozen=True)
class NoiseModelParams:
    """Affine distance/bearing/label noise coefficients plus label confusion.

    Measurement std = dist_coeff * d + bearing_coeff * |bearing| + label_coeff * noise_factor,
    applied separately to position (m) and yaw (rad). The confusion matrix is
    row-stochastic with rows indexed by true label, columns by detected label.
    """

    pos_dist_coeff: float = 0.05        # m per m
    pos_bearing_coeff: float = 0.1      # m per rad
    pos_label_coeff: float = 0.05       # m per unit noise factor
    yaw_dist_coeff: float = 0.02        # rad per m
    yaw_bearing_coeff: float = 0.05     # rad per rad
    yaw_label_coeff: float = 0.02       # rad per unit noise factor
    confusion: np.ndarray = None        # (|L|, |L|)
    score_sigma: float = 0.1            # spread of the confidence score density

    def __post_init__(self) -> None:
        for name in ("pos_dist_coeff", "pos_bearing_coeff", "pos_label_coeff",
                     "yaw_dist_coeff", "yaw_bearing_coeff", "yaw_label_coeff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.confusion is None:
            raise ValueError("confusion matrix is required")
        c = np.asarray(self.confusion, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"confusion matrix must be square, got {c.shape}")
        if np.any(c < 0):
            raise ValueError("confusion matrix entries must be >= 0")
        if not np.allclose(c.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError("confusion matrix rows must sum to 1")
        if self.score_sigma < 0:
            raise ValueError("score_sigma must be >= 0")
        object.__setattr__(self, "confusion", c)

    def to_dict(self) -> dict:
        return {
            "pos_dist_coeff": self.pos_dist_coeff,
            "pos_bearing_coeff": self.pos_bearing_coeff,
            "pos_label_coeff": self.pos_label_coeff,
            "yaw_dist_coeff": self.yaw_dist_coeff,
            "yaw_bearing_coeff": self.yaw_bearing_coeff,
            "yaw_label_coeff": self.yaw_label_coeff,
            "confusion": [[float(v) for v in row] for row in self.confusion],
            "score_sigma": self.score_sigma,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModelParams":
        d = dict(d)
        d["confusion"] = np.array(d["confusion"], dtype=float)
        return cls(**d)


def in_fov(robot: RobotState, x: float, y: float, floor: int,
           params: DetectionParams, grid: Optional[GridMap] = None) -> bool:
    """Field-of-view test: same floor, range, half-angle, and line of sight."""
    if floor != robot.floor:
        return False
    d = robot.distance_to(x, y)
    if d > params.max_range:
        return False
    if d > 1e-12 and abs(robot.bearing_to(x, y)) > params.fov_half_angle:
        return False
    if grid is not None and not grid.line_of_sight(robot.x, robot.y, x, y, floor):
        return False
    return True


def detection_probability(robot: RobotState, x: float, y: float, floor: int,
                          label_id: int, params: DetectionParams,
                          grid: Optional[GridMap] = None) -> float:
    """Probability of detecting an object at (x, y): decaying inside the FoV, else 0."""
    if not in_fov(robot, x, y, floor, params, grid):
        return 0.0
    return params.curve_for(label_id).prob_at(robot.distance_to(x, y))


def measurement_stds(robot: RobotState, x: float, y: float,
                     noise: NoiseModelParams, noise_factor: float) -> tuple[float, float]:
    """Position and yaw measurement stds from the affine noise model."""
    d = robot.distance_to(x, y)
    beta = abs(robot.bearing_to(x, y))  # in [0, pi]
    s_pos = noise.pos_dist_coeff * d + noise.pos_bearing_coeff * beta \
        + noise.pos_label_coeff * noise_factor
    s_yaw = noise.yaw_dist_coeff * d + noise.yaw_bearing_coeff * beta \
        + noise.yaw_label_coeff * noise_factor
    return s_pos, s_yaw


def pose_measurement_covariance(robot: RobotState, x: float, y: float,
                                noise: NoiseModelParams,
                                noise_factor: float) -> tuple[np.ndarray, float]:
    """Isotropic 2x2 position covariance and yaw variance at a hypothesized pose."""
    s_pos, s_yaw = measurement_stds(robot, x, y, noise, noise_factor)
    return np.diag([s_pos * s_pos, s_pos * s_pos]), s_yaw * s_yaw


def truncated_gaussian_pdf(z: float, mean: float, sigma: float,
                           lo: float = 0.0, hi: float = 1.0) -> float:
    """Density of a Gaussian truncated to [lo, hi]; zero outside."""
    if sigma <= 0:
        raise ValueError("truncated Gaussian needs sigma > 0")
    if z < lo or z > hi:
        return 0.0
    norm = _norm_cdf((hi - mean) / sigma) - _norm_cdf((lo - mean) / sigma)
    if norm <= 0:
        return 0.0
    return _norm_pdf((z - mean) / sigma) / (sigma * norm)


def score_likelihood(score: float, label_id: int, dist: float,
                     registry: LabelRegistry, noise: NoiseModelParams) -> float:
    """Density of a confidence score given the hypothesized label and distance."""
    mean = registry[label_id].expected_score(dist)
    return truncated_gaussian_pdf(score, mean, noise.score_sigma)


def observation_likelihood(z: Observation, hyp_x: float, hyp_y: float, hyp_yaw: float,
                           hyp_label: int, robot: RobotState,
                           registry: LabelRegistry, noise: NoiseModelParams) -> float:
    """Joint likelihood of one observation under a hypothesized object state.

    Product of the Gaussian pose factor, the confusion-matrix label factor,
    and the truncated-Gaussian score factor.
    """
    gamma = registry[hyp_label].noise_factor
    s_pos, s_yaw = measurement_stds(robot, hyp_x, hyp_y, noise, gamma)
    if s_pos <= 0 or s_yaw <= 0:
        raise ValueError("pose likelihood undefined for zero measurement noise")
    dx = z.x - hyp_x
    dy = z.y - hyp_y
    var_p = s_pos * s_pos
    p_pos = math.exp(-0.5 * (dx * dx + dy * dy) / var_p) / (2.0 * math.pi * var_p)
    dyaw = wrap_angle(z.yaw - hyp_yaw)
    p_yaw = math.exp(-0.5 * dyaw * dyaw / (s_yaw * s_yaw)) / (_SQRT_2PI * s_yaw)
    p_label = float(noise.confusion[hyp_label, z.label_id])
    p_score = score_likelihood(z.score, hyp_label, robot.distance_to(hyp_x, hyp_y),
                               registry, noise)
    return p_pos * p_yaw * p_label * p_score


def sample_truncated_gaussian(rng: np.random.Generator, mean: float, sigma: float,
                              lo: float = 0.0, hi: float = 1.0) -> float:
    """Rejection-sample a truncated Gaussian (mean expected within [lo, hi])."""
    if sigma == 0:
        return min(max(mean, lo), hi)
    for _ in range(256):
        v = rng.normal(mean, sigma)
        if lo <= v <= hi:
            return float(v)
    return min(max(mean, lo), hi)


def sample_observations(robot: RobotState, truths: list[ObjectTruth],
                        params: DetectionParams, noise: NoiseModelParams,
                        registry: LabelRegistry, grid: Optional[GridMap],
                        rng: np.random.Generator,
                        rng_measure: Optional[np.random.Generator] = None) -> list[Observation]:
    """Draw this tick's observations: detection coin, then noisy measurement.

    Detection coins and measurement noise can come from separate streams so
    the number of measurement draws never shifts the detection sequence.
    """
    if not robot.sensor_on:
        return []
    if rng_measure is None:
        rng_measure = rng
    out: list[Observation] = []
    for obj in sorted(truths, key=lambda o: o.object_id):
        p_d = detection_probability(robot, obj.x, obj.y, obj.floor, obj.label_id,
                                    params, grid)
        if p_d <= 0.0 or rng.random() >= p_d:
            continue
        gamma = registry[obj.label_id].noise_factor
        s_pos, s_yaw = measurement_stds(robot, obj.x, obj.y, noise, gamma)
        zx = float(rng_measure.normal(obj.x, s_pos))
        zy = float(rng_measure.normal(obj.y, s_pos))
        zyaw = wrap_angle(float(rng_measure.normal(obj.heading, s_yaw)))
        row = noise.confusion[obj.label_id]
        zl = int(rng_measure.choice(len(row), p=row))
        mean_score = registry[obj.label_id].expected_score(robot.distance_to(obj.x, obj.y))
        zs = sample_truncated_gaussian(rng_measure, mean_score, noise.score_sigma)
        out.append(Observation(obj.object_id, zx, zy, zyaw, zl, zs))
    return out
