"""Shared domain vocabulary: joints, frames, pointer samples, gesture events.

Coordinate convention (fixed for the whole package): skeleton space is
metric, x positive toward the subject's right as seen from the sensor,
y positive up, z positive away from the sensor. Timestamps are integer
milliseconds since stream start and must be strictly increasing within
one stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional


class FrameError(ValueError):
    """A candidate frame violates a frame invariant."""


class NonFiniteCoordinate(FrameError):
    """A joint coordinate is NaN/inf, or z is negative (out of sensor range)."""


class NegativeTimestamp(FrameError):
    """Frame timestamp is below zero."""


class MissingJoint(FrameError):
    """A required field is absent or has the wrong shape.

    Covers missing joints as well as a missing or non-integer timestamp;
    the message names the offending field.
    """


class NonMonotoneTimestamp(FrameError):
    """Frame timestamp does not advance past the previously accepted frame."""


@dataclass(frozen=True)
class Point3D:
    """One joint position in skeleton space, meters."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Point3D") -> "Point3D":
        return Point3D(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Point3D") -> "Point3D":
        return Point3D(self.x - other.x, self.y - other.y, self.z - other.z)

    def distance_to(self, other: "Point3D") -> float:
        return math.sqrt(
            (self.x - other.x) ** 2
            + (self.y - other.y) ** 2
            + (self.z - other.z) ** 2
        )


@dataclass(frozen=True)
class SkeletonFrame:
    """Timestamped 3D positions of the three tracked joints."""

    t: int
    hand_left: Point3D
    hand_right: Point3D
    shoulder_center: Point3D


@dataclass(frozen=True)
class PointerSample:
    """Absolute pointer coordinates on the [0, 65536]^2 grid.

    65536 (one past the 16-bit maximum) is representable on purpose: the
    in-memory mapping keeps the full clamp value and only the wire protocol
    narrows it to 65535.
    """

    u: int
    v: int
    t: int


class GestureKind(str, Enum):
    """Discrete gesture event classes; values double as wire names."""

    CLICK = "click"
    CUT_START = "cut_start"
    CUT_END = "cut_end"
    DRAG_START = "drag_start"
    DRAG_END = "drag_end"
    ROTATION = "rotation"
    BALANCE = "balance"


# Fixed tie-break order for events sharing a timestamp.
KIND_ORDER = {
    GestureKind.CLICK: 0,
    GestureKind.CUT_START: 1,
    GestureKind.CUT_END: 1,
    GestureKind.DRAG_START: 2,
    GestureKind.DRAG_END: 2,
    GestureKind.ROTATION: 3,
    GestureKind.BALANCE: 4,
}


@dataclass(frozen=True)
class GestureEvent:
    """One detected gesture occurrence.

    Payload keys by kind:
      click    -> {"pos": [px, py]}          screen pixels
      cut_end  -> {"seg": [[px,py],[px,py]]} swept screen segment
      rotation -> {"deg": float}             signed accumulated angle
      balance  -> {"score": float}           in-band fraction, [0, 1]
      others   -> {}
    """

    kind: GestureKind
    t: int
    payload: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScreenDims:
    """Target screen size in pixels."""

    width_px: int = 640
    height_px: int = 480

    def __post_init__(self) -> None:
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("screen dimensions must be >= 1")


def _check_coord(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MissingJoint(f"{name}: coordinate must be a number")
    v = float(value)
    if not math.isfinite(v):
        raise NonFiniteCoordinate(f"{name}: coordinate is not finite")
    return v


def _check_joint(name: str, raw: Any) -> Point3D:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise MissingJoint(f"{name}: expected [x, y, z]")
    x = _check_coord(f"{name}.x", raw[0])
    y = _check_coord(f"{name}.y", raw[1])
    z = _check_coord(f"{name}.z", raw[2])
    if z < 0:
        raise NonFiniteCoordinate(f"{name}.z: must be >= 0 (in front of sensor)")
    return Point3D(x, y, z)


def validate_frame(raw: Mapping[str, Any], last_t: Optional[int] = None) -> SkeletonFrame:
    """Validate one candidate frame record against all frame invariants.

    ``raw`` is a parsed recording line or wire message with keys ``t``,
    ``hl``, ``hr``, ``sc``. ``last_t`` is the timestamp of the previously
    accepted frame in the same stream (caller-owned state); pass ``None``
    for the first frame. Deterministic: same record and same ``last_t``
    always produce the same result.

    Raises MissingJoint, NonFiniteCoordinate, NegativeTimestamp or
    NonMonotoneTimestamp.
    """
    if "t" not in raw:
        raise MissingJoint("t: missing")
    t = raw["t"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise MissingJoint("t: must be an integer millisecond count")
    if t < 0:
        raise NegativeTimestamp(f"t={t}")
    if last_t is not None and t <= last_t:
        raise NonMonotoneTimestamp(f"t={t} after t={last_t}")
    for key in ("hl", "hr", "sc"):
        if key not in raw:
            raise MissingJoint(f"{key}: missing")
    return SkeletonFrame(
        t=t,
        hand_left=_check_joint("hl", raw["hl"]),
        hand_right=_check_joint("hr", raw["hr"]),
        shoulder_center=_check_joint("sc", raw["sc"]),
    )


def frame_to_record(frame: SkeletonFrame) -> dict:
    """Inverse of validate_frame: the plain-record form of a frame."""
    return {
        "t": frame.t,
        "hl": [frame.hand_left.x, frame.hand_left.y, frame.hand_left.z],
        "hr": [frame.hand_right.x, frame.hand_right.y, frame.hand_right.z],
        "sc": [frame.shoulder_center.x, frame.shoulder_center.y, frame.shoulder_center.z],
    }
