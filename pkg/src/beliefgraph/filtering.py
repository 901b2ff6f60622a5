"""Recursive belief updates: prediction, measurement fusion, negative evidence.

Object tracks hold a Gaussian pose and a categorical label distribution; both
are updated in closed form. The robot pose belief is either pinned to truth
(perfect localization) or dead-reckoned as an EKF over the unicycle model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sensing import (
    DetectionParams,
    NoiseModelParams,
    detection_probability,
    in_fov,
    pose_measurement_covariance,
    score_likelihood,
)
from .types import (
    AffordanceStatus,
    ControlInput,
    GeoSemanticBelief,
    LabelRegistry,
    ObjectBelief,
    Observation,
    RobotState,
    wrap_angle,
)
from .worldmap import GridMap


@dataclass(frozen=True)
class FilterConfig:
    spawn_cov_inflation: float = 4.0    # new tracks start deliberately uncertain
    spawn_label_smoothing: float = 0.1  # mass shared toward uniform at spawn
    neg_update_period: float = 1.0      # s of sim time between negative updates
    process_noise: tuple[float, float, float] = (0.02, 0.02, 0.01)  # per-s variance
    perfect_localization: bool = True

    def to_dict(self) -> dict:
        return {
            "spawn_cov_inflation": self.spawn_cov_inflation,
            "spawn_label_smoothing": self.spawn_label_smoothing,
            "neg_update_period": self.neg_update_period,
            "process_noise": list(self.process_noise),
            "perfect_localization": self.perfect_localization,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FilterConfig":
        d = dict(d)
        if "process_noise" in d:
            d["process_noise"] = tuple(d["process_noise"])
        return cls(**d)


def predict(belief: GeoSemanticBelief, u: ControlInput, dt: float,
            config: FilterConfig) -> None:
    """Propagate the robot pose belief by the unicycle model; objects are static."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    x, y, th = belief.robot.mean
    c, s = math.cos(th), math.sin(th)
    belief.robot.mean[0] = x + dt * (c * u.vx - s * u.vy)
    belief.robot.mean[1] = y + dt * (s * u.vx + c * u.vy)
    belief.robot.mean[2] = wrap_angle(th + dt * u.omega)
    if not config.perfect_localization:
        f = np.array([
            [1.0, 0.0, dt * (-s * u.vx - c * u.vy)],
            [0.0, 1.0, dt * (c * u.vx - s * u.vy)],
            [0.0, 0.0, 1.0],
        ])
        q = np.diag(config.process_noise) * dt
        belief.robot.cov = f @ belief.robot.cov @ f.T + q
    belief.time += dt


def label_entropy(probs: np.ndarray) -> float:
    """Shannon entropy of a categorical distribution, in nats."""
    p = np.asarray(probs, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def update_object(ob: ObjectBelief, z: Observation, robot: RobotState,
                  registry: LabelRegistry, noise: NoiseModelParams) -> tuple[ObjectBelief, bool]:
    """Fuse one positive detection into a track.

    Pose: Kalman update with identity measurement model, measurement noise
    evaluated at the belief mean. Label: Bayes with the confusion-matrix
    column and the score likelihood. Returns (updated belief, degenerate flag);
    on degenerate label evidence the distribution resets to uniform.
    """
    if z.object_id != ob.object_id:
        raise ValueError(f"observation for {z.object_id} applied to track {ob.object_id}")
    out = ob.copy()
    gamma = registry[ob.expected_label].noise_factor
    mx, my = float(ob.pos_mean[0]), float(ob.pos_mean[1])
    r_pos, r_yaw = pose_measurement_covariance(robot, mx, my, noise, gamma)

    # position: 2x2 Kalman update, symmetrized to stay PSD under roundoff
    sigma = out.pos_cov
    innov = np.array([z.x, z.y]) - out.pos_mean
    gain = sigma @ np.linalg.inv(sigma + r_pos)
    out.pos_mean = out.pos_mean + gain @ innov
    post = (np.eye(2) - gain) @ sigma
    out.pos_cov = 0.5 * (post + post.T)

    # yaw: scalar Kalman with wrapped innovation
    if out.yaw_var + r_yaw > 0:
        k = out.yaw_var / (out.yaw_var + r_yaw)
        out.yaw_mean = wrap_angle(out.yaw_mean + k * wrap_angle(z.yaw - out.yaw_mean))
        out.yaw_var = (1.0 - k) * out.yaw_var

    # label: prior * confusion column * score likelihood, renormalized
    dist = robot.distance_to(mx, my)
    factors = np.array([
        float(noise.confusion[l, z.label_id])
        * score_likelihood(z.score, l, dist, registry, noise)
        for l in range(len(registry))
    ])
    weights = ob.label_probs * factors
    total = float(weights.sum())
    degenerate = total <= 0.0
    out.label_probs = registry.uniform() if degenerate else weights / total
    return out, degenerate


def update_no_detection(ob: ObjectBelief, robot: RobotState, params: DetectionParams,
                        registry: LabelRegistry,
                        grid: GridMap | None = None) -> ObjectBelief:
    """Fold in a miss: labels easy to detect here lose mass; pose unchanged."""
    out = ob.copy()
    mx, my = float(ob.pos_mean[0]), float(ob.pos_mean[1])
    miss = np.array([
        1.0 - detection_probability(robot, mx, my, ob.floor, l, params, grid)
        for l in range(len(registry))
    ])
    weights = ob.label_probs * miss
    total = float(weights.sum())
    if total <= 0.0:
        return out  # every hypothesis predicted certain detection; keep prior
    out.label_probs = weights / total
    return out


def spawn_track(z: Observation, robot: RobotState, registry: LabelRegistry,
                noise: NoiseModelParams, config: FilterConfig,
                status: AffordanceStatus, floor: int) -> ObjectBelief:
    """Open a track from a first detection, inflated against overconfidence."""
    gamma = registry[z.label_id].noise_factor
    r_pos, r_yaw = pose_measurement_covariance(robot, z.x, z.y, noise, gamma)
    n = len(registry)
    eps = config.spawn_label_smoothing
    probs = np.full(n, eps / n)
    probs[z.label_id] += 1.0 - eps
    return ObjectBelief(
        object_id=z.object_id,
        pos_mean=np.array([z.x, z.y]),
        pos_cov=r_pos * config.spawn_cov_inflation,
        yaw_mean=z.yaw,
        yaw_var=r_yaw * config.spawn_cov_inflation,
        label_probs=probs,
        status=status,
        floor=floor,
    )


@dataclass
class BeliefFilter:
    """Stateful wrapper owning the belief plus negative-update bookkeeping."""

    registry: LabelRegistry
    detection: DetectionParams
    noise: NoiseModelParams
    config: FilterConfig
    grid: GridMap | None = None
    _last_neg_update: dict[int, float] = field(default_factory=dict)

    def predict(self, belief: GeoSemanticBelief, u: ControlInput, dt: float) -> None:
        predict(belief, u, dt, self.config)

    def ingest(self, belief: GeoSemanticBelief, observations: list[Observation],
               robot: RobotState,
               statuses: dict[int, AffordanceStatus] | None = None) -> list[dict]:
        """Apply one tick of observations; returns filter events for the trace."""
        events: list[dict] = []
        statuses = statuses or {}
        seen: set[int] = set()
        for z in sorted(observations, key=lambda o: o.object_id):
            seen.add(z.object_id)
            track = belief.objects.get(z.object_id)
            if track is None:
                status = statuses.get(z.object_id, AffordanceStatus.TO_BE_INSPECTED)
                belief.objects[z.object_id] = spawn_track(
                    z, robot, self.registry, self.noise, self.config, status, robot.floor)
                events.append({"event": "track_spawn", "object": z.object_id})
                continue
            updated, degenerate = update_object(track, z, robot, self.registry, self.noise)
            if z.object_id in statuses:
                updated.status = statuses[z.object_id]
            belief.objects[z.object_id] = updated
            if degenerate:
                events.append({"event": "degenerate_reset", "object": z.object_id})

        # negative information for tracked-but-unseen objects in view,
        # throttled to sim time so results do not depend on the tick rate
        for oid in belief.tracked_ids():
            if oid in seen:
                continue
            ob = belief.objects[oid]
            if ob.status.resolved:
                continue
            if not in_fov(robot, float(ob.pos_mean[0]), float(ob.pos_mean[1]),
                          ob.floor, self.detection, self.grid):
                continue
            last = self._last_neg_update.get(oid)
            if last is not None and belief.time - last < self.config.neg_update_period:
                continue
            self._last_neg_update[oid] = belief.time
            belief.objects[oid] = update_no_detection(
                ob, robot, self.detection, self.registry, self.grid)
        return events
