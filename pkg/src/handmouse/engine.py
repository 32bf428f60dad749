"""Five deterministic gesture state machines over the filtered joint stream.

Hand roles: the left hand clicks (a quick push toward the sensor) and
cuts (a fast lateral burst); the right hand drives the pointer and is
watched for circular motion (rotation) and vertical steadiness (balance).
Drag is coupled to the click latch: the left hand presses and holds, the
right hand localizes.

Per-step event order is fixed: click, cut, drag, rotation, balance. Cut
episodes are buffered and the start/end pair is emitted together when the
episode qualifies, so no unpaired cut_start ever reaches the output; the
emitted cut_start keeps its original (earlier) timestamp.

Every threshold is configuration, echoed into serialized reports; none of
the defaults is a measured constant.
"""

from __future__ import annotations

import math
import statistics
from collections import deque
from dataclasses import dataclass, field, fields
from typing import Optional

from .core import (
    GestureEvent,
    GestureKind,
    Point3D,
    PointerSample,
    ScreenDims,
    SkeletonFrame,
)
from .filtering import estimate_velocity
from .mapping import (
    ButtonEdge,
    ButtonState,
    MovementBox,
    ScreenPos,
    map_hand_to_pointer,
    press_left,
    to_screen,
)

CLICK_BASELINE_WINDOW_MS = 1000


@dataclass(frozen=True)
class GestureThresholds:
    """Tunables for the five detectors. All values must be positive."""

    click_dz_m: float = 0.12          # push depth toward the sensor
    click_window_ms: int = 400        # max push duration
    click_refractory_ms: int = 300    # min gap between clicks
    cut_speed_mps: float = 1.5
    cut_min_path_m: float = 0.25
    cut_min_dur_ms: int = 100
    rot_min_angle_deg: float = 270.0
    rot_min_radius_m: float = 0.05
    rot_window_ms: int = 1000         # rolling-centroid window
    balance_band_m: float = 0.05
    balance_window_ms: int = 2000

    def __post_init__(self) -> None:
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")


class _ClickState:
    __slots__ = ("baseline_buf", "pressed", "frozen_baseline", "last_near_t", "last_fire_t")

    def __init__(self) -> None:
        self.baseline_buf: deque[tuple[int, float]] = deque()
        self.pressed = False
        self.frozen_baseline = 0.0
        self.last_near_t: Optional[int] = None
        self.last_fire_t: Optional[int] = None


class _CutState:
    __slots__ = ("active", "start_t", "start_pos", "path_m", "prev_point")

    def __init__(self) -> None:
        self.active = False
        self.start_t = 0
        self.start_pos = ScreenPos(0, 0)
        self.path_m = 0.0
        self.prev_point: Optional[Point3D] = None


class _RotationState:
    __slots__ = ("buf", "prev_xy", "acc_deg")

    def __init__(self) -> None:
        self.buf: deque[tuple[int, float, float]] = deque()
        self.prev_xy: Optional[tuple[float, float]] = None
        self.acc_deg = 0.0


class _BalanceState:
    __slots__ = ("window_start_t", "ref_y", "n_in", "n_total")

    def __init__(self) -> None:
        self.window_start_t: Optional[int] = None
        self.ref_y = 0.0
        self.n_in = 0
        self.n_total = 0


class EngineState:
    """Mutable per-session detector state, threaded through engine_step.

    One instance per stream; frames must arrive in timestamp order from a
    single consumer. Independent sessions never share state.
    """

    def __init__(self, screen: ScreenDims = ScreenDims(), velocity_window: int = 5) -> None:
        if velocity_window < 2:
            raise ValueError("velocity_window must be >= 2")
        self.screen = screen
        self.click = _ClickState()
        self.cut = _CutState()
        self.rotation = _RotationState()
        self.balance = _BalanceState()
        self.button = ButtonState()
        self.last_pointer: Optional[PointerSample] = None
        self.left_track: deque[tuple[int, Point3D]] = deque(maxlen=velocity_window)


def detect_click(
    state: _ClickState, point: Point3D, t: int, th: GestureThresholds, pos: ScreenPos
) -> tuple[Optional[GestureEvent], Optional[bool]]:
    """Push-toward-sensor click with latch-and-release semantics.

    Fires when z drops at least click_dz_m below the rolling baseline
    (median of the preceding second of idle z) and the drop happened
    within click_window_ms of last being near the baseline. The latch
    releases once z comes back within click_dz_m/2 of the baseline.
    Returns (click event or None, latch change: True/False/None).
    """
    z = point.z
    if not state.pressed:
        state.baseline_buf.append((t, z))
        while state.baseline_buf[0][0] < t - CLICK_BASELINE_WINDOW_MS:
            state.baseline_buf.popleft()
        baseline = statistics.median(s[1] for s in state.baseline_buf)
        dz = baseline - z
        if dz <= th.click_dz_m / 2:
            state.last_near_t = t
        elif (
            dz >= th.click_dz_m
            and state.last_near_t is not None
            and t - state.last_near_t <= th.click_window_ms
            and (state.last_fire_t is None or t - state.last_fire_t >= th.click_refractory_ms)
        ):
            state.pressed = True
            state.frozen_baseline = baseline
            state.last_fire_t = t
            event = GestureEvent(GestureKind.CLICK, t, {"pos": [pos.px, pos.py]})
            return event, True
        return None, None
    # Pressed: baseline frozen until the hand returns near it.
    if state.frozen_baseline - z <= th.click_dz_m / 2:
        state.pressed = False
        state.last_near_t = t
        return None, False
    return None, None


def detect_cut(
    state: _CutState,
    point: Point3D,
    speed: float,
    t: int,
    th: GestureThresholds,
    pointer_pos: ScreenPos,
) -> list[GestureEvent]:
    """Fast-burst cut over the left hand, segment taken from the pointer.

    An episode opens when speed reaches cut_speed_mps and closes when it
    drops below; the start/end pair is emitted only if the hand covered
    cut_min_path_m and the episode lasted cut_min_dur_ms, otherwise the
    episode vanishes without a trace.
    """
    if not state.active:
        if speed >= th.cut_speed_mps:
            state.active = True
            state.start_t = t
            state.start_pos = pointer_pos
            state.path_m = 0.0
            state.prev_point = point
        return []
    state.path_m += point.distance_to(state.prev_point)
    state.prev_point = point
    if speed >= th.cut_speed_mps:
        return []
    state.active = False
    if state.path_m >= th.cut_min_path_m and t - state.start_t >= th.cut_min_dur_ms:
        seg = [
            [state.start_pos.px, state.start_pos.py],
            [pointer_pos.px, pointer_pos.py],
        ]
        return [
            GestureEvent(GestureKind.CUT_START, state.start_t),
            GestureEvent(GestureKind.CUT_END, t, {"seg": seg}),
        ]
    return []


def detect_drag(edge: Optional[ButtonEdge], t: int) -> list[GestureEvent]:
    """Drag start/end on the button latch edges; held states emit nothing."""
    if edge is ButtonEdge.DOWN:
        return [GestureEvent(GestureKind.DRAG_START, t)]
    if edge is ButtonEdge.UP:
        return [GestureEvent(GestureKind.DRAG_END, t)]
    return []


def detect_rotation(
    state: _RotationState, point: Point3D, t: int, th: GestureThresholds
) -> list[GestureEvent]:
    """Signed angle accumulation about the rolling centroid in the x-y plane.

    Accumulates only while the hand stays at least rot_min_radius_m from
    the centroid; dipping inside resets the sum. Fires (and resets) when
    the magnitude reaches rot_min_angle_deg. Counterclockwise as seen by
    the subject-facing sensor (x right, y up) is positive.
    """
    x, y = point.x, point.y
    state.buf.append((t, x, y))
    while state.buf[0][0] < t - th.rot_window_ms:
        state.buf.popleft()
    events: list[GestureEvent] = []
    if len(state.buf) >= 3 and state.prev_xy is not None:
        cx = sum(s[1] for s in state.buf) / len(state.buf)
        cy = sum(s[2] for s in state.buf) / len(state.buf)
        r_now = math.sqrt((x - cx) ** 2 + (y - cy) ** 2)
        if r_now < th.rot_min_radius_m:
            state.acc_deg = 0.0
        else:
            v1x, v1y = state.prev_xy[0] - cx, state.prev_xy[1] - cy
            v2x, v2y = x - cx, y - cy
            if (v1x != 0.0 or v1y != 0.0) and (v2x != 0.0 or v2y != 0.0):
                cross = v1x * v2y - v1y * v2x
                dot = v1x * v2x + v1y * v2y
                state.acc_deg += math.degrees(math.atan2(cross, dot))
            if abs(state.acc_deg) >= th.rot_min_angle_deg:
                events.append(GestureEvent(GestureKind.ROTATION, t, {"deg": state.acc_deg}))
                state.acc_deg = 0.0
    state.prev_xy = (x, y)
    return events


def measure_balance(
    state: _BalanceState, point: Point3D, t: int, th: GestureThresholds
) -> list[GestureEvent]:
    """Vertical steadiness over non-overlapping windows.

    Each window is anchored at its first frame; the score is the fraction
    of the window's subsequent frames whose y stays within
    balance_band_m of that anchor (the anchor itself is not scored; an
    otherwise empty window scores 1.0). The report carries the window-end
    timestamp. A partial window at stream end is never emitted.
    """
    if state.window_start_t is None:
        state.window_start_t = t
        state.ref_y = point.y
        state.n_in = 0
        state.n_total = 0
        return []
    if t >= state.window_start_t + th.balance_window_ms:
        score = 1.0 if state.n_total == 0 else state.n_in / state.n_total
        event = GestureEvent(
            GestureKind.BALANCE,
            state.window_start_t + th.balance_window_ms,
            {"score": score},
        )
        state.window_start_t = t
        state.ref_y = point.y
        state.n_in = 0
        state.n_total = 0
        return [event]
    state.n_total += 1
    if abs(point.y - state.ref_y) <= th.balance_band_m:
        state.n_in += 1
    return []


def engine_step(
    state: EngineState,
    frame: SkeletonFrame,
    box: MovementBox,
    th: GestureThresholds,
) -> tuple[EngineState, PointerSample, list[GestureEvent]]:
    """Advance all detectors by one validated, filtered frame.

    Returns the threaded state, the pointer sample mapped from the right
    hand, and this step's events concatenated in the fixed order
    click, cut, drag, rotation, balance. Deterministic: a replayed stream
    produces byte-identical serialized events.
    """
    pointer = map_hand_to_pointer(box.origin, frame.hand_right, box, frame.t)
    state.last_pointer = pointer
    pointer_pos = to_screen(pointer, state.screen)

    click_event, latch_change = detect_click(
        state.click, frame.hand_left, frame.t, th, pointer_pos
    )
    edge: Optional[ButtonEdge] = None
    if latch_change is not None:
        state.button, edge = press_left(state.button, latch_change)

    state.left_track.append((frame.t, frame.hand_left))
    if len(state.left_track) >= 2:
        speed = estimate_velocity(list(state.left_track)).speed
    else:
        speed = 0.0

    events: list[GestureEvent] = []
    if click_event is not None:
        events.append(click_event)
    events.extend(detect_cut(state.cut, frame.hand_left, speed, frame.t, th, pointer_pos))
    events.extend(detect_drag(edge, frame.t))
    events.extend(detect_rotation(state.rotation, frame.hand_right, frame.t, th))
    events.extend(measure_balance(state.balance, frame.hand_right, frame.t, th))
    return state, pointer, events
