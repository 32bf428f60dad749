"""End-to-end per-session pipeline: validate -> filter -> gesture engine.

One Pipeline instance per stream/session; feed frames strictly in
timestamp order. The movement box comes from the config when pinned
there, otherwise it is derived from the first frame's shoulder position
(box centered on the shoulder, so the resting hand maps near mid-screen).
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from .config import PipelineConfig
from .core import GestureEvent, Point3D, PointerSample, ScreenDims, SkeletonFrame, validate_frame
from .engine import EngineState, GestureThresholds, engine_step
from .filtering import SmootherState, dead_zone, smooth
from .mapping import MovementBox, default_box
from .streams import Recording

_JOINTS = ("hand_left", "hand_right", "shoulder_center")


class Pipeline:
    def __init__(self, config: PipelineConfig, thresholds: GestureThresholds) -> None:
        self.config = config
        self.thresholds = thresholds
        self.last_t: Optional[int] = None
        self._smoothers = {j: SmootherState(alpha=config.smoothing_alpha) for j in _JOINTS}
        self._held: dict[str, Optional[Point3D]] = {j: None for j in _JOINTS}
        self.engine = EngineState(
            screen=ScreenDims(config.screen_width, config.screen_height),
            velocity_window=config.velocity_window,
        )
        self.box: Optional[MovementBox] = None
        if config.box_origin is not None:
            self.box = MovementBox(
                origin=Point3D(*config.box_origin),
                move_width=config.box_width,
                move_height=config.box_height,
            )

    def _filter_joint(self, joint: str, raw: Point3D) -> Point3D:
        self._smoothers[joint], smoothed = smooth(self._smoothers[joint], raw)
        held = self._held[joint]
        out = smoothed if held is None else dead_zone(held, smoothed, self.config.dead_zone_m)
        self._held[joint] = out
        return out

    def step(self, frame: SkeletonFrame) -> tuple[PointerSample, list[GestureEvent]]:
        """Process one validated frame; returns (pointer, events)."""
        if self.box is None:
            self.box = default_box(
                frame.shoulder_center, self.config.box_width, self.config.box_height
            )
        self.last_t = frame.t
        filtered = SkeletonFrame(
            t=frame.t,
            hand_left=self._filter_joint("hand_left", frame.hand_left),
            hand_right=self._filter_joint("hand_right", frame.hand_right),
            shoulder_center=self._filter_joint("shoulder_center", frame.shoulder_center),
        )
        self.engine, pointer, events = engine_step(
            self.engine, filtered, self.box, self.thresholds
        )
        return pointer, events

    def step_record(self, raw: Mapping) -> tuple[PointerSample, list[GestureEvent]]:
        """Validate one raw frame record, then process it.

        Raises FrameError subclasses; a rejected frame leaves all state
        untouched, so the caller may keep feeding later frames.
        """
        frame = validate_frame(raw, self.last_t)
        return self.step(frame)


def replay(
    recording: Recording, config: PipelineConfig, thresholds: GestureThresholds
) -> tuple[list[PointerSample], list[GestureEvent]]:
    """Run a full recording through a fresh pipeline."""
    pipe = Pipeline(config, thresholds)
    pointers: list[PointerSample] = []
    events: list[GestureEvent] = []
    for frame in recording.frames:
        pointer, evs = pipe.step(frame)
        pointers.append(pointer)
        events.extend(evs)
    return pointers, events
