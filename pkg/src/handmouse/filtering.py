"""Noise handling ahead of gesture detection.

Three small, deterministic stages: exponential smoothing, a dead zone
that suppresses sub-threshold jitter, and endpoint-difference velocity
estimation. Order in the pipeline is smooth -> dead_zone -> velocity so
the velocity estimate sees exactly the positions the gesture detectors
see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import Point3D


class VelocityError(ValueError):
    pass


class WindowTooShort(VelocityError):
    pass


class ZeroTimeSpan(VelocityError):
    pass


@dataclass(frozen=True)
class SmootherState:
    """Exponential-moving-average state for one joint.

    alpha=1 passes input through; alpha=0 freezes on the first sample.
    """

    alpha: float
    last: Optional[Point3D] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


@dataclass(frozen=True)
class MotionSample:
    """Velocity split into intensity (speed) and direction."""

    velocity: tuple[float, float, float]
    speed: float
    direction: Optional[tuple[float, float, float]]


def smooth(state: SmootherState, raw: Point3D) -> tuple[SmootherState, Point3D]:
    """Blend ``raw`` into the moving average; returns (new state, output).

    The first sample passes through unchanged. Output always lies
    componentwise between the previous output and ``raw``.
    """
    if state.last is None:
        out = raw
    else:
        a = state.alpha
        out = Point3D(
            a * raw.x + (1 - a) * state.last.x,
            a * raw.y + (1 - a) * state.last.y,
            a * raw.z + (1 - a) * state.last.z,
        )
    return SmootherState(alpha=state.alpha, last=out), out


def dead_zone(prev_out: Point3D, candidate: Point3D, radius_m: float) -> Point3D:
    """Hold the previous output until the candidate moves at least
    ``radius_m`` away from it."""
    if radius_m < 0:
        raise ValueError("radius must be >= 0")
    if candidate.distance_to(prev_out) < radius_m:
        return prev_out
    return candidate


def estimate_velocity(window: Sequence[tuple[int, Point3D]]) -> MotionSample:
    """Endpoint-difference velocity over a window of (t_ms, position).

    Timestamps must be strictly increasing. Speed is in m/s; direction is
    the unit velocity vector, or None when the endpoints coincide.
    """
    if len(window) < 2:
        raise WindowTooShort(f"need >= 2 samples, got {len(window)}")
    t0, p0 = window[0]
    t1, p1 = window[-1]
    dt_s = (t1 - t0) / 1000.0
    if dt_s <= 0:
        raise ZeroTimeSpan(f"window spans {t1 - t0} ms")
    vx = (p1.x - p0.x) / dt_s
    vy = (p1.y - p0.y) / dt_s
    vz = (p1.z - p0.z) / dt_s
    speed = math.sqrt(vx * vx + vy * vy + vz * vz)
    if speed == 0.0:
        return MotionSample(velocity=(vx, vy, vz), speed=0.0, direction=None)
    return MotionSample(
        velocity=(vx, vy, vz),
        speed=speed,
        direction=(vx / speed, vy / speed, vz / speed),
    )
