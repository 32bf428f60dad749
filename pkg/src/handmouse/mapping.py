"""Hand position to absolute pointer coordinates.

The mapping normalizes the hand's offset from a calibrated movement box
onto the [0, 65536] absolute-pointer grid used by absolute mouse moves:

    u = 65536            if dx > move_width
      = 0                if dx < 0
      = round_half_even(dx / move_width * 65536)   otherwise

with dx = target.x - origin.x, and symmetrically for v with
dy = origin.y - target.y (screen y grows downward while skeleton y grows
up, hence the inversion). Rounding is half-to-even, the single sanctioned
rounding mode for this conversion. z never enters the mapping.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence

from .core import Point3D, PointerSample, ScreenDims, SkeletonFrame

POINTER_MAX = 65536  # internal clamp; the wire narrows to 65535

MIN_BOX_EXTENT_M = 0.1
DEGENERATE_SWEEP_M = 0.01


class CalibrationError(ValueError):
    pass


class TooFewFrames(CalibrationError):
    pass


@dataclass(frozen=True)
class MovementBox:
    """Calibrated reach rectangle in skeleton space.

    ``origin`` is the upper-left corner as the subject faces the sensor:
    minimal x, maximal y. ``degenerate`` marks a calibration whose sweep
    was too small on some axis and fell back to the minimum extent.
    """

    origin: Point3D
    move_width: float
    move_height: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.move_width <= 0 or self.move_height <= 0:
            raise ValueError("movement box extents must be positive")


@dataclass(frozen=True)
class ScreenPos:
    px: int
    py: int


class ButtonEdge(Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class ButtonState:
    left_down: bool = False


def _axis_value(delta: float, extent: float) -> int:
    if delta > extent:
        return POINTER_MAX
    if delta < 0:
        return 0
    return round(delta / extent * 65536)


def map_hand_to_pointer(
    origin: Point3D, target: Point3D, box: MovementBox, t: int
) -> PointerSample:
    """Map a hand position to absolute pointer coordinates at time ``t``.

    Total over finite inputs; output always lies in [0, 65536]^2. The
    formula uses only coordinate differences, so translating origin and
    target together leaves the result unchanged.
    """
    u = _axis_value(target.x - origin.x, box.move_width)
    v = _axis_value(origin.y - target.y, box.move_height)
    return PointerSample(u=u, v=v, t=t)


def to_screen(p: PointerSample, screen: ScreenDims) -> ScreenPos:
    """Convert absolute pointer coordinates to a screen pixel.

    Integer arithmetic keeps the floor exact: u=0 maps to column 0 and
    u=65536 maps to the last column for every screen size.
    """
    px = min((p.u * screen.width_px) // 65536, screen.width_px - 1)
    py = min((p.v * screen.height_px) // 65536, screen.height_px - 1)
    return ScreenPos(px=px, py=py)


def press_left(
    state: ButtonState, is_press: bool
) -> tuple[ButtonState, Optional[ButtonEdge]]:
    """Drive the left-button latch; emits an edge only on a state change.

    Repeated calls with the same value are idempotent (no duplicate edges).
    """
    if is_press and not state.left_down:
        return ButtonState(left_down=True), ButtonEdge.DOWN
    if not is_press and state.left_down:
        return ButtonState(left_down=False), ButtonEdge.UP
    return state, None


def calibrate_box(frames: Sequence[SkeletonFrame], hand: str) -> MovementBox:
    """Fit a movement box from a calibration sweep of one hand.

    The box spans the observed x/y extent of the chosen hand ("left" or
    "right"), origin at (min x, max y, median z). Extents below
    0.1 m are floored to 0.1 m; if the raw sweep covered less than 1 cm on
    either axis the result is flagged degenerate.
    """
    if hand not in ("left", "right"):
        raise ValueError(f"hand must be 'left' or 'right', got {hand!r}")
    if len(frames) < 30:
        raise TooFewFrames(f"need >= 30 frames, got {len(frames)}")
    pts = [f.hand_left if hand == "left" else f.hand_right for f in frames]
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    zs = [p.z for p in pts]
    width = max(xs) - min(xs)
    height = max(ys) - min(ys)
    degenerate = width < DEGENERATE_SWEEP_M or height < DEGENERATE_SWEEP_M
    return MovementBox(
        origin=Point3D(min(xs), max(ys), statistics.median(zs)),
        move_width=max(width, MIN_BOX_EXTENT_M),
        move_height=max(height, MIN_BOX_EXTENT_M),
        degenerate=degenerate,
    )


def default_box(
    shoulder_center: Point3D, move_width: float = 0.5, move_height: float = 0.5
) -> MovementBox:
    """Uncalibrated fallback: a box of the given extent centered on the
    shoulder. A plausible reach default, not a measured value."""
    return MovementBox(
        origin=Point3D(
            shoulder_center.x - move_width / 2,
            shoulder_center.y + move_height / 2,
            shoulder_center.z,
        ),
        move_width=move_width,
        move_height=move_height,
    )
