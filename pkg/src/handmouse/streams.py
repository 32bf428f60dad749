"""Skeleton-stream sources and sinks.

Three line-delimited UTF-8 formats share one framing rule: line 1 is a
header object naming the format, every following line is one record.
Serialization is canonical (fixed key order, shortest round-trippable
decimals, no whitespace), so byte equality of two files is a valid
equality test on their contents.

    skelrec    {"fmt":"skelrec","v":1,"fps":30,"coords":"x-right,y-up,z-away,m"}
               {"t":0,"hl":[x,y,z],"hr":[x,y,z],"sc":[x,y,z]}
    gestev     {"fmt":"gestev","v":1}
               {"t":0,"kind":"click","payload":{"pos":[px,py]}}
    skelscript {"fmt":"skelscript","v":1,"fps":30}
               {"joint":"hl","interp":"linear","pts":[[t,x,y,z],...]}

The trajectory generator stands in for a depth sensor: it samples scripted
joint waypoints at the nominal frame rate (30 fps by default).
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Optional, Union

from .core import (
    FrameError,
    GestureEvent,
    GestureKind,
    Point3D,
    SkeletonFrame,
    frame_to_record,
    validate_frame,
)

COORDS_TAG = "x-right,y-up,z-away,m"

REST_POSE = {
    "hl": Point3D(-0.2, 0.3, 2.0),
    "hr": Point3D(0.2, 0.3, 2.0),
    "sc": Point3D(0.0, 0.5, 2.0),
}


class StreamFormatError(ValueError):
    pass


class BadHeader(StreamFormatError):
    pass


class MalformedLine(StreamFormatError):
    def __init__(self, line_no: int, detail: str) -> None:
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no


class FrameInvalid(StreamFormatError):
    def __init__(self, line_no: int, cause: FrameError) -> None:
        super().__init__(f"line {line_no}: {cause}")
        self.line_no = line_no
        self.cause = cause


class EmptyScript(StreamFormatError):
    pass


@dataclass(frozen=True)
class Recording:
    """A validated frame sequence plus its header metadata."""

    fps_nominal: float = 30.0
    frames: tuple[SkeletonFrame, ...] = ()


@dataclass(frozen=True)
class ScriptSegment:
    joint: str                              # "hl" | "hr" | "sc"
    points: tuple[tuple[int, Point3D], ...]  # (t_ms, position), strictly increasing t
    interp: str = "linear"                  # "linear" | "hold"


@dataclass(frozen=True)
class TrajectoryScript:
    fps: float = 30.0
    segments: tuple[ScriptSegment, ...] = ()


def _num(value: Any) -> Union[int, float]:
    """Integral reals serialize as ints (canonical form for header fields)."""
    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def _dump(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


def _lines(text: str, what: str) -> list[str]:
    if text.endswith("\n"):
        text = text[:-1]
    if text == "":
        raise BadHeader(f"empty input, expected a {what} header")
    return text.split("\n")


def _parse_header(line: str, fmt: str) -> dict:
    try:
        head = json.loads(line)
    except json.JSONDecodeError as exc:
        raise BadHeader(f"header is not valid JSON: {exc}") from exc
    if not isinstance(head, dict) or head.get("fmt") != fmt:
        raise BadHeader(f"expected fmt={fmt!r}")
    if head.get("v") != 1:
        raise BadHeader(f"unsupported version {head.get('v')!r}")
    return head


def _parse_fps(head: dict) -> float:
    fps = head.get("fps")
    if isinstance(fps, bool) or not isinstance(fps, (int, float)) or fps <= 0:
        raise BadHeader("fps must be a positive number")
    return float(fps)


# ---------------------------------------------------------------------------
# Recording (skelrec)
# ---------------------------------------------------------------------------

def parse_recording(text: str) -> Recording:
    lines = _lines(text, "skelrec")
    head = _parse_header(lines[0], "skelrec")
    fps = _parse_fps(head)
    if head.get("coords") != COORDS_TAG:
        raise BadHeader(f"coords must be {COORDS_TAG!r}")
    frames: list[SkeletonFrame] = []
    last_t: Optional[int] = None
    for idx, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(idx, f"not valid JSON: {exc}") from exc
        if not isinstance(rec, dict) or set(rec) != {"t", "hl", "hr", "sc"}:
            raise MalformedLine(idx, "expected keys t, hl, hr, sc")
        for key in ("hl", "hr", "sc"):
            joint = rec[key]
            if not isinstance(joint, list) or len(joint) != 3:
                raise MalformedLine(idx, f"{key} must be a 3-element array")
        try:
            frame = validate_frame(rec, last_t)
        except FrameError as exc:
            raise FrameInvalid(idx, exc) from exc
        last_t = frame.t
        frames.append(frame)
    return Recording(fps_nominal=fps, frames=tuple(frames))


def serialize_recording(rec: Recording) -> str:
    out = [_dump({"fmt": "skelrec", "v": 1, "fps": _num(rec.fps_nominal), "coords": COORDS_TAG})]
    out.extend(_dump(frame_to_record(f)) for f in rec.frames)
    return "\n".join(out) + "\n"


def read_recording(source: Union[str, bytes, IO]) -> Recording:
    return parse_recording(_as_text(source))


def write_recording(rec: Recording, sink: IO) -> None:
    data = serialize_recording(rec)
    if hasattr(sink, "mode") and "b" in getattr(sink, "mode", ""):
        sink.write(data.encode("utf-8"))
    else:
        sink.write(data)


def _as_text(source: Union[str, bytes, IO]) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


# ---------------------------------------------------------------------------
# Event stream (gestev)
# ---------------------------------------------------------------------------

_PAYLOAD_KEYS = {
    GestureKind.CLICK: ("pos",),
    GestureKind.CUT_END: ("seg",),
    GestureKind.ROTATION: ("deg",),
    GestureKind.BALANCE: ("score",),
    GestureKind.CUT_START: (),
    GestureKind.DRAG_START: (),
    GestureKind.DRAG_END: (),
}


def event_to_record(ev: GestureEvent) -> dict:
    return {"t": ev.t, "kind": ev.kind.value, "payload": ev.payload}


def serialize_events(events: Iterable[GestureEvent]) -> str:
    out = [_dump({"fmt": "gestev", "v": 1})]
    out.extend(_dump(event_to_record(ev)) for ev in events)
    return "\n".join(out) + "\n"


def _check_pair(line_no: int, value: Any, name: str) -> None:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or any(isinstance(c, bool) or not isinstance(c, int) for c in value)
    ):
        raise MalformedLine(line_no, f"{name} must be [x, y] integers")


def parse_events(text: str) -> list[GestureEvent]:
    lines = _lines(text, "gestev")
    _parse_header(lines[0], "gestev")
    events: list[GestureEvent] = []
    for idx, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(idx, f"not valid JSON: {exc}") from exc
        if not isinstance(rec, dict) or set(rec) != {"t", "kind", "payload"}:
            raise MalformedLine(idx, "expected keys t, kind, payload")
        t = rec["t"]
        if isinstance(t, bool) or not isinstance(t, int) or t < 0:
            raise MalformedLine(idx, "t must be a nonnegative integer")
        try:
            kind = GestureKind(rec["kind"])
        except ValueError:
            raise MalformedLine(idx, f"unknown kind {rec['kind']!r}") from None
        payload = rec["payload"]
        if not isinstance(payload, dict) or set(payload) != set(_PAYLOAD_KEYS[kind]):
            raise MalformedLine(
                idx, f"payload for {kind.value} must have keys {_PAYLOAD_KEYS[kind]}"
            )
        if kind is GestureKind.CLICK:
            _check_pair(idx, payload["pos"], "pos")
        elif kind is GestureKind.CUT_END:
            seg = payload["seg"]
            if not isinstance(seg, list) or len(seg) != 2:
                raise MalformedLine(idx, "seg must be [[x,y],[x,y]]")
            for endpoint in seg:
                _check_pair(idx, endpoint, "seg endpoint")
        elif kind in (GestureKind.ROTATION, GestureKind.BALANCE):
            key = _PAYLOAD_KEYS[kind][0]
            val = payload[key]
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
                raise MalformedLine(idx, f"{key} must be a finite number")
            payload = {key: float(val)}
        events.append(GestureEvent(kind=kind, t=t, payload=payload))
    return events


# ---------------------------------------------------------------------------
# Trajectory scripts (skelscript)
# ---------------------------------------------------------------------------

def serialize_script(script: TrajectoryScript) -> str:
    out = [_dump({"fmt": "skelscript", "v": 1, "fps": _num(script.fps)})]
    for seg in script.segments:
        out.append(
            _dump(
                {
                    "joint": seg.joint,
                    "interp": seg.interp,
                    "pts": [[t, p.x, p.y, p.z] for t, p in seg.points],
                }
            )
        )
    return "\n".join(out) + "\n"


def parse_script(text: str) -> TrajectoryScript:
    lines = _lines(text, "skelscript")
    head = _parse_header(lines[0], "skelscript")
    fps = _parse_fps(head)
    segments: list[ScriptSegment] = []
    for idx, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(idx, f"not valid JSON: {exc}") from exc
        if not isinstance(rec, dict) or set(rec) != {"joint", "interp", "pts"}:
            raise MalformedLine(idx, "expected keys joint, interp, pts")
        if rec["joint"] not in ("hl", "hr", "sc"):
            raise MalformedLine(idx, f"unknown joint {rec['joint']!r}")
        if rec["interp"] not in ("linear", "hold"):
            raise MalformedLine(idx, f"unknown interp {rec['interp']!r}")
        pts = rec["pts"]
        if not isinstance(pts, list) or not pts:
            raise MalformedLine(idx, "pts must be a non-empty array")
        points = []
        for pt in pts:
            if not isinstance(pt, list) or len(pt) != 4:
                raise MalformedLine(idx, "each pt must be [t, x, y, z]")
            t = pt[0]
            if isinstance(t, bool) or not isinstance(t, int) or t < 0:
                raise MalformedLine(idx, "pt time must be a nonnegative integer")
            coords = []
            for c in pt[1:]:
                if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                    raise MalformedLine(idx, "pt coordinates must be finite numbers")
                coords.append(float(c))
            points.append((t, Point3D(*coords)))
        segments.append(ScriptSegment(joint=rec["joint"], points=tuple(points), interp=rec["interp"]))
    script = TrajectoryScript(fps=fps, segments=tuple(segments))
    _joint_tracks(script)  # validates per-joint time ordering
    return script


# ---------------------------------------------------------------------------
# Synthetic generation
# ---------------------------------------------------------------------------

@dataclass
class _Waypoint:
    t: int
    pos: Point3D
    seg_index: int
    interp: str


def _joint_tracks(script: TrajectoryScript) -> dict[str, list[_Waypoint]]:
    tracks: dict[str, list[_Waypoint]] = {}
    for seg_index, seg in enumerate(script.segments):
        if not seg.points:
            raise EmptyScript("segment with no waypoints")
        track = tracks.setdefault(seg.joint, [])
        for t, pos in seg.points:
            if track and t <= track[-1].t:
                raise StreamFormatError(
                    f"waypoint times for joint {seg.joint!r} must be strictly increasing"
                )
            track.append(_Waypoint(t=t, pos=pos, seg_index=seg_index, interp=seg.interp))
    return tracks


def _sample(track: list[_Waypoint], t: int) -> Point3D:
    if t <= track[0].t:
        return track[0].pos
    if t >= track[-1].t:
        return track[-1].pos
    times = [w.t for w in track]
    i = bisect_right(times, t) - 1
    a, b = track[i], track[i + 1]
    # Between two segments (or under hold) the left value carries forward.
    if a.seg_index != b.seg_index or a.interp == "hold":
        return a.pos
    f = (t - a.t) / (b.t - a.t)
    return Point3D(
        a.pos.x + (b.pos.x - a.pos.x) * f,
        a.pos.y + (b.pos.y - a.pos.y) * f,
        a.pos.z + (b.pos.z - a.pos.z) * f,
    )


def generate(script: TrajectoryScript) -> Recording:
    """Sample a script into a recording at the script's frame rate.

    Frames land at t = round(i * 1000 / fps) for i = 0.. up to and
    including the script's last waypoint time; rounding collisions (fps
    above 1000) collapse into one frame so timestamps stay strictly
    increasing. Joints without a script hold the rest pose.
    """
    if not script.segments:
        raise EmptyScript("script has no segments")
    if script.fps <= 0:
        raise StreamFormatError("fps must be > 0")
    tracks = _joint_tracks(script)
    duration = max(track[-1].t for track in tracks.values())
    frames: list[SkeletonFrame] = []
    last_t: Optional[int] = None
    i = 0
    while True:
        t = round(i * 1000.0 / script.fps)
        if t > duration:
            break
        i += 1
        if last_t is not None and t <= last_t:
            continue
        joints = {
            name: (_sample(tracks[name], t) if name in tracks else REST_POSE[name])
            for name in ("hl", "hr", "sc")
        }
        frames.append(
            SkeletonFrame(
                t=t,
                hand_left=joints["hl"],
                hand_right=joints["hr"],
                shoulder_center=joints["sc"],
            )
        )
        last_t = t
    return Recording(fps_nominal=script.fps, frames=tuple(frames))
