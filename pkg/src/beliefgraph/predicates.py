"""Belief-set membership tests that gate behavior transitions.

Three gates per (track, label): confident enough to act, uncertain but
promising enough to search, and confident-the-label-is-wrong. All read the
tracked belief only; no ground truth, no clocks.
"""

from __future__ import annotations

import math
from enum import Enum

from .scenario import Thresholds
from .types import GeoSemanticBelief, ObjectBelief


class PredicateKind(str, Enum):
    SEARCH_GATE = "search_gate"    # engage active search for a label
    ACT_GATE = "act_gate"          # confident enough to inspect / climb
    ABSENT_GATE = "absent_gate"    # search concluded: not this label
    TASK_DONE = "task_done"        # engaged object's task resolved
    SEARCH_ABORT = "search_abort"  # act-gate certainty collapsed mid-task


def expected_distance(belief: GeoSemanticBelief, ob: ObjectBelief) -> float:
    """Distance between the robot pose estimate and the track mean."""
    rx, ry = float(belief.robot.mean[0]), float(belief.robot.mean[1])
    return math.hypot(float(ob.pos_mean[0]) - rx, float(ob.pos_mean[1]) - ry)


def act_gate(belief: GeoSemanticBelief, ob: ObjectBelief, label_id: int,
             thr: Thresholds) -> bool:
    """High label confidence, tight localization, and close range."""
    return (
        float(ob.label_probs[label_id]) > thr.act_label_prob
        and ob.max_pos_std < thr.act_pos_std
        and expected_distance(belief, ob) < thr.act_expected_dist
        and belief.robot.floor == ob.floor
    )


def search_gate(ob: ObjectBelief, label_id: int, thr: Thresholds) -> bool:
    """Promising but not yet actionable: worth an active search."""
    return (
        float(ob.label_probs[label_id]) > thr.search_label_prob
        and ob.max_pos_std < thr.search_pos_std
    )


def absent_gate(ob: ObjectBelief, label_id: int, thr: Thresholds) -> bool:
    """The searched-for label has become unlikely."""
    return float(ob.label_probs[label_id]) < thr.absent_label_prob


def act_gate_collapsed(ob: ObjectBelief, thr: Thresholds) -> bool:
    """Mid-task abort test: position uncertainty blew past the act gate."""
    return ob.max_pos_std > thr.abort_std_factor * thr.act_pos_std
