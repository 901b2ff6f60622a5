from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beliefgraph.types import (
    AffordanceStatus,
    ControlInput,
    DegenerateBeliefError,
    GeoSemanticBelief,
    LabelRegistry,
    ObjectTruth,
    Observation,
    RobotPoseBelief,
    RobotState,
    SemanticLabel,
    advance_status,
    normalize_label_distribution,
    wrap_angle,
)

from conftest import make_belief


class TestWrapAngle:
    def test_identity_in_range(self):
        assert wrap_angle(0.5) == 0.5

    def test_wraps_above(self):
        assert wrap_angle(math.pi + 0.1) == pytest.approx(-math.pi + 0.1)

    def test_pi_maps_to_pi(self):
        assert wrap_angle(math.pi) == math.pi
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angle(3 * math.pi) == math.pi

    @given(st.floats(-1e6, 1e6))
    def test_range_invariant(self, theta):
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi


class TestNormalizeLabelDistribution:
    def test_symmetric(self):
        np.testing.assert_allclose(normalize_label_distribution([2, 2]), [0.5, 0.5])

    def test_proportional(self):
        np.testing.assert_allclose(
            normalize_label_distribution([0, 3, 1]), [0.0, 0.75, 0.25])

    def test_all_zero_raises(self):
        with pytest.raises(DegenerateBeliefError):
            normalize_label_distribution([0, 0])

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            normalize_label_distribution([-1, 2])

    @given(st.lists(st.floats(0, 1e6), min_size=1, max_size=8))
    def test_sums_to_one_and_proportional(self, weights):
        total = sum(weights)
        if total <= 0:
            with pytest.raises(DegenerateBeliefError):
                normalize_label_distribution(weights)
            return
        out = normalize_label_distribution(weights)
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        for w, o in zip(weights, out):
            assert o == pytest.approx(w / total, rel=1e-12)


class TestAffordanceStatus:
    def test_legal_transitions(self):
        assert advance_status(AffordanceStatus.TO_BE_INSPECTED,
                              AffordanceStatus.INSPECTED) == AffordanceStatus.INSPECTED
        assert advance_status(AffordanceStatus.TO_BE_ASCENDED,
                              AffordanceStatus.DISMISSED) == AffordanceStatus.DISMISSED

    def test_self_transition_allowed(self):
        assert advance_status(AffordanceStatus.INSPECTED,
                              AffordanceStatus.INSPECTED) == AffordanceStatus.INSPECTED

    @pytest.mark.parametrize("old,new", [
        (AffordanceStatus.INSPECTED, AffordanceStatus.TO_BE_INSPECTED),
        (AffordanceStatus.DISMISSED, AffordanceStatus.INSPECTED),
        (AffordanceStatus.TO_BE_INSPECTED, AffordanceStatus.ASCENDED),
        (AffordanceStatus.ASCENDED, AffordanceStatus.TO_BE_ASCENDED),
    ])
    def test_non_monotone_rejected(self, old, new):
        with pytest.raises(ValueError):
            advance_status(old, new)


class TestRegistry:
    def test_requires_nonempty(self):
        with pytest.raises(ValueError):
            LabelRegistry([])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            LabelRegistry([SemanticLabel("a"), SemanticLabel("a")])

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SemanticLabel("x", noise_factor=0.0)
        with pytest.raises(ValueError):
            SemanticLabel("x", score_peak=1.5)
        with pytest.raises(ValueError):
            SemanticLabel("x", score_decay=0.0)

    def test_lookup(self, registry):
        assert registry.id_of("door") == 1
        assert registry[1].name == "door"


class TestSerializationRoundTrip:
    def test_robot_state(self):
        r = RobotState(x=1.25, y=-3.5, heading=2.9)
        assert RobotState.from_dict(r.to_dict()) == r

    def test_object_truth(self, registry):
        o = ObjectTruth(7, 1.0, 2.0, -1.5, 1, AffordanceStatus.TO_BE_INSPECTED)
        back = ObjectTruth.from_dict(o.to_dict(registry), registry)
        assert back == o

    def test_observation(self):
        z = Observation(3, 0.1, 0.2, 0.3, 1, 0.77)
        assert Observation.from_dict(z.to_dict()) == z

    def test_control_input_with_action(self):
        from beliefgraph.types import TriggerInspect
        u = ControlInput(0.5, -0.25, 0.1, TriggerInspect(4, 1.0, 2.0))
        back = ControlInput.from_dict(u.to_dict())
        assert back == u

    def test_belief_roundtrip_exact(self):
        ob = make_belief(pos=(1.234567890123, 9.87654321), var=0.456789,
                         probs=(0.3, 0.7))
        belief = GeoSemanticBelief(
            robot=RobotPoseBelief(mean=[1.0, 2.0, 0.5], cov=np.eye(3) * 0.01),
            objects={1: ob}, time=12.3)
        back = GeoSemanticBelief.from_dict(belief.to_dict())
        assert back.time == belief.time
        np.testing.assert_array_equal(back.robot.mean, belief.robot.mean)
        np.testing.assert_array_equal(back.objects[1].pos_mean, ob.pos_mean)
        np.testing.assert_array_equal(back.objects[1].pos_cov, ob.pos_cov)
        np.testing.assert_array_equal(back.objects[1].label_probs, ob.label_probs)

    @given(st.floats(-100, 100), st.floats(-100, 100), st.floats(-10, 10))
    def test_json_floats_roundtrip_exact(self, x, y, heading):
        import json
        r = RobotState(x=x, y=y, heading=heading)
        back = RobotState.from_dict(json.loads(json.dumps(r.to_dict())))
        assert back.x == r.x and back.y == r.y and back.heading == r.heading


class TestObjectBeliefValidation:
    def test_valid(self):
        make_belief().validate()

    def test_asymmetric_cov_rejected(self):
        ob = make_belief()
        ob.pos_cov = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError):
            ob.validate()

    def test_negative_eigenvalue_rejected(self):
        ob = make_belief()
        ob.pos_cov = np.array([[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(ValueError):
            ob.validate()

    def test_bad_distribution_rejected(self):
        ob = make_belief(probs=(0.5, 0.6))
        with pytest.raises(ValueError):
            ob.validate()

    def test_velocity_clamp(self):
        u = ControlInput(vx=5.0, vy=-3.0, omega=9.0).clamped(1.0, 0.5, 1.5)
        assert (u.vx, u.vy, u.omega) == (1.0, -0.5, 1.5)
