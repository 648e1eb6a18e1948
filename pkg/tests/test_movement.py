from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robostage.movement import (
    MAX_STEP,
    Bounds,
    Legality,
    MovementKind,
    Pose,
    Property,
    Transform,
    apply_transforms,
    bearing,
    can_combine,
    distance,
    load_combination_matrix,
    normalize_angle,
    pose_from_matrix,
    properties_of,
    restriction_condition,
    rotate_pose,
    rotation_matrix,
    signed_angle,
    spatial_matrix,
    transform_matrix,
    translate_pose,
    validate_parallel_set,
)

angles = st.floats(-20.0, 20.0, allow_nan=False)
steps = st.floats(-MAX_STEP, MAX_STEP, allow_nan=False)


def test_properties_per_kind():
    assert properties_of("spatial") == {
        Property.GLOBAL, Property.RELATIONAL, Property.SUMMATIVE, Property.ADDITIVE, Property.PERSISTENT
    }
    assert properties_of(MovementKind.ROTATIONAL) == {
        Property.RELATIONAL, Property.OBVIOUS, Property.SUMMATIVE, Property.ADDITIVE, Property.PERSISTENT
    }
    assert properties_of("iconic") == {Property.OBVIOUS}
    assert properties_of("deictic") == {Property.REFERENTIAL}
    assert properties_of("metaphoric") == {Property.METAPHORICAL}
    assert properties_of("cohesive") == {Property.GLOBAL}
    assert properties_of("beat") == {Property.LOCAL}


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        properties_of("dance")


def test_selected_cells():
    assert can_combine("iconic", "metaphoric") is Legality.EXCLUSIVE
    assert can_combine("spatial", "deictic") is Legality.RESTRICTED
    assert can_combine("cohesive", "cohesive") is Legality.COMBINABLE
    assert can_combine("beat", "beat") is Legality.COMBINABLE
    assert can_combine("cohesive", "beat") is Legality.EXCLUSIVE


def test_matrix_loader_rejects_bad_shape():
    with pytest.raises(ValueError):
        load_combination_matrix('{"kinds": ["spatial"], "matrix": [["combinable"]]}')


def test_parallel_set_verdicts():
    v = validate_parallel_set(["iconic", "metaphoric"])
    assert not v.accepted and v.exclusive == ((MovementKind.ICONIC, MovementKind.METAPHORIC),)
    assert validate_parallel_set(["spatial", "cohesive"]).accepted
    assert not validate_parallel_set(["spatial", "deictic"]).accepted
    assert validate_parallel_set(["spatial", "deictic"], restricted_ok=True).accepted
    assert not validate_parallel_set(["spatial", "deictic", "beat"], restricted_ok=True).accepted
    assert validate_parallel_set([]).accepted


def test_restriction_conditions():
    assert restriction_condition(MovementKind.SPATIAL, MovementKind.ICONIC) == "gesture.walk_safe"
    assert restriction_condition(MovementKind.ROTATIONAL, MovementKind.DEICTIC) == "target_still_visible"
    assert restriction_condition(MovementKind.ROTATIONAL, MovementKind.ICONIC) is None


def test_translate_along_heading():
    assert translate_pose(Pose(0, 0, 0), 0.25) == Pose(0.25, 0, 0)
    p = translate_pose(Pose(1, 0, math.pi), 0.25)
    assert (p.x, p.y) == (0.75, 0.0)
    p = translate_pose(Pose(0, 0, math.pi / 2), 1.0)
    assert (p.x, p.y) == (0.0, 1.0)


def test_translate_clamps_to_bounds(caplog):
    b = Bounds(-2, 2, -1.5, 1.5)
    p = translate_pose(Pose(1.9, 0, 0), 0.25, b)
    assert p.x == 2.0
    assert "clamped" in caplog.text


def test_rotation_wraps_heading():
    assert rotate_pose(Pose(0, 0, 3 * math.pi / 2), math.pi).heading == pytest.approx(math.pi / 2)
    assert rotate_pose(Pose(0, 0, 0), -math.pi / 2).heading == pytest.approx(3 * math.pi / 2)


def test_pose_and_transform_validation():
    with pytest.raises(ValueError):
        Pose(float("nan"), 0, 0)
    with pytest.raises(ValueError):
        Transform.translation(MAX_STEP + 0.1)
    with pytest.raises(ValueError):
        Transform("hop", 1.0)


def test_angle_helpers():
    assert normalize_angle(-math.pi / 2) == pytest.approx(3 * math.pi / 2)
    assert signed_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert signed_angle(math.pi) == pytest.approx(math.pi)
    assert bearing(Pose(0, 0, 0), Pose(0, 1, 0)) == pytest.approx(math.pi / 2)
    assert distance(Pose(-1, 0, 0), Pose(1, 0, 0)) == 2.0


def test_spatial_matrix_row_form():
    row_form = spatial_matrix(0.25).T
    assert row_form[3, 0] == 0.25
    np.testing.assert_array_equal(row_form[:3, :3], np.eye(3))
    point = np.array([1.0, 2.0, 3.0, 1.0])
    assert (point @ row_form)[0] == 1.25


@given(angles, angles)
def test_rotations_compose(a, b):
    np.testing.assert_allclose(rotation_matrix(a) @ rotation_matrix(b), rotation_matrix(a + b), atol=1e-9)


@given(st.lists(st.one_of(steps.map(Transform.translation), angles.map(Transform.rotation)), max_size=8))
def test_pose_ops_match_matrix_product(transforms):
    start = Pose(0.3, -0.2, 0.7)
    m = start.matrix()
    for t in transforms:
        m = m @ transform_matrix(t)
    expected = pose_from_matrix(m)
    got = apply_transforms(start, transforms)
    assert got.x == pytest.approx(expected.x, abs=1e-9)
    assert got.y == pytest.approx(expected.y, abs=1e-9)
    assert abs(signed_angle(got.heading - expected.heading)) < 1e-9


@given(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False), angles)
def test_pose_roundtrip(x, y, h):
    p = Pose(x, y, h)
    assert Pose.from_dict(p.to_dict()) == p
    assert 0 <= p.heading < 2 * math.pi
