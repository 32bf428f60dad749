import math

import pytest
from hypothesis import given, strategies as st

from handmouse.core import (
    MissingJoint,
    NegativeTimestamp,
    NonFiniteCoordinate,
    NonMonotoneTimestamp,
    SkeletonFrame,
    frame_to_record,
    validate_frame,
)


def record(t=0, hl=(-0.2, 0.3, 2.0), hr=(0.2, 0.3, 2.0), sc=(0.0, 0.5, 2.0)):
    return {"t": t, "hl": list(hl), "hr": list(hr), "sc": list(sc)}


class TestValidateFrame:
    def test_accepts_well_formed_frames(self):
        first = validate_frame(record(t=0))
        second = validate_frame(record(t=33), last_t=first.t)
        assert first.t == 0 and second.t == 33
        assert second.hand_left.x == -0.2

    def test_nan_coordinate_rejected(self):
        with pytest.raises(NonFiniteCoordinate):
            validate_frame(record(hl=(-0.2, 0.3, math.nan)))

    def test_inf_coordinate_rejected(self):
        with pytest.raises(NonFiniteCoordinate):
            validate_frame(record(hr=(math.inf, 0.3, 2.0)))

    def test_negative_z_rejected(self):
        with pytest.raises(NonFiniteCoordinate):
            validate_frame(record(sc=(0.0, 0.5, -0.01)))

    def test_negative_timestamp_rejected(self):
        with pytest.raises(NegativeTimestamp):
            validate_frame(record(t=-1))

    def test_non_monotone_timestamp_rejected(self):
        with pytest.raises(NonMonotoneTimestamp):
            validate_frame(record(t=10), last_t=33)

    def test_equal_timestamp_rejected(self):
        with pytest.raises(NonMonotoneTimestamp):
            validate_frame(record(t=33), last_t=33)

    def test_missing_joint_rejected(self):
        raw = record()
        del raw["hr"]
        with pytest.raises(MissingJoint):
            validate_frame(raw)

    def test_short_joint_array_rejected(self):
        with pytest.raises(MissingJoint):
            validate_frame(record(hl=(-0.2, 0.3)))

    def test_missing_timestamp_rejected(self):
        raw = record()
        del raw["t"]
        with pytest.raises(MissingJoint):
            validate_frame(raw)

    def test_non_integer_timestamp_rejected(self):
        with pytest.raises(MissingJoint):
            validate_frame(record(t=33.5))

    def test_round_trip_record(self):
        frame = validate_frame(record(t=5))
        assert validate_frame(frame_to_record(frame)) == frame


coord = st.one_of(
    st.floats(allow_nan=False, allow_infinity=False, width=64),
    st.floats(allow_nan=True, allow_infinity=True, width=64),
    st.integers(-1000, 1000),
)
joint = st.one_of(st.tuples(coord, coord, coord), st.lists(coord, max_size=4))
raw_records = st.fixed_dictionaries(
    {
        "t": st.one_of(st.integers(-100, 10_000), st.floats(), st.text(max_size=3)),
        "hl": joint,
        "hr": joint,
        "sc": joint,
    }
)


@given(raw=raw_records, last_t=st.one_of(st.none(), st.integers(0, 5000)))
def test_validated_frames_satisfy_all_invariants(raw, last_t):
    try:
        frame = validate_frame(raw, last_t)
    except (MissingJoint, NonFiniteCoordinate, NegativeTimestamp, NonMonotoneTimestamp):
        return
    assert isinstance(frame, SkeletonFrame)
    assert frame.t >= 0
    if last_t is not None:
        assert frame.t > last_t
    for p in (frame.hand_left, frame.hand_right, frame.shoulder_center):
        assert math.isfinite(p.x) and math.isfinite(p.y) and math.isfinite(p.z)
        assert p.z >= 0


@given(raw=raw_records, last_t=st.one_of(st.none(), st.integers(0, 5000)))
def test_validate_frame_is_deterministic(raw, last_t):
    def attempt():
        try:
            return ("ok", validate_frame(raw, last_t))
        except Exception as exc:
            return ("err", type(exc).__name__)

    assert attempt() == attempt()
