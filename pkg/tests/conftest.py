"""Shared trajectory builders and fixtures.

Everything here is deterministic: scripts are built from fixed waypoint
math plus seeded jitter, so the recordings they generate are stable
across runs and processes.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

import pytest

from handmouse.core import Point3D
from handmouse.streams import (
    Recording,
    ScriptSegment,
    TrajectoryScript,
    generate,
    serialize_recording,
)

# Rest pose shared with the generator defaults.
HL = (-0.2, 0.3, 2.0)
HR = (0.2, 0.3, 2.0)
SC = (0.0, 0.5, 2.0)


def seg(joint: str, pts, interp: str = "linear") -> ScriptSegment:
    return ScriptSegment(
        joint=joint,
        points=tuple((int(t), Point3D(float(x), float(y), float(z))) for t, x, y, z in pts),
        interp=interp,
    )


def script(*segments: ScriptSegment, fps: float = 30.0) -> TrajectoryScript:
    return TrajectoryScript(fps=fps, segments=tuple(segments))


def frame_times(duration_ms: int, fps: float = 30.0) -> list[int]:
    """The frame timestamps generate() will produce for this duration."""
    out: list[int] = []
    i = 0
    while True:
        t = round(i * 1000.0 / fps)
        if t > duration_ms:
            return out
        if not out or t > out[-1]:
            out.append(t)
        i += 1


# ---------------------------------------------------------------------------
# Click / drag trajectories (left hand pushes along z)
# ---------------------------------------------------------------------------

def click_push_pts(
    pushes: list[tuple[int, int, int, int]], depth: float = 0.18, end_pad: int = 500
):
    """Left-hand z waypoints for push cycles.

    Each push is (start, down_by, up_from, up_by): z ramps from rest to
    rest-depth over [start, down_by], holds, then returns over
    [up_from, up_by].
    """
    pts = [(0, HL[0], HL[1], HL[2])]
    for start, down_by, up_from, up_by in pushes:
        pts.append((start, HL[0], HL[1], HL[2]))
        pts.append((down_by, HL[0], HL[1], HL[2] - depth))
        pts.append((up_from, HL[0], HL[1], HL[2] - depth))
        pts.append((up_by, HL[0], HL[1], HL[2]))
    pts.append((pts[-1][0] + end_pad, HL[0], HL[1], HL[2]))
    return pts


def click_fire_script() -> TrajectoryScript:
    return script(seg("hl", click_push_pts([(1200, 1440, 1640, 1880)])))


def click_shallow_script() -> TrajectoryScript:
    # Push depth below the threshold: nothing may fire.
    return script(seg("hl", click_push_pts([(1200, 1440, 1640, 1880)], depth=0.08)))


def click_slow_script() -> TrajectoryScript:
    # Full depth reached far too slowly for the push window.
    return script(seg("hl", click_push_pts([(1200, 3600, 3800, 4200)])))


def click_rapid_script() -> TrajectoryScript:
    # Three quick push cycles at 60 fps; the refractory window thins them out.
    pushes = [(1200, 1280, 1330, 1410), (1450, 1530, 1580, 1660), (1700, 1780, 1830, 1910)]
    return script(seg("hl", click_push_pts(pushes)), fps=60.0)


def click_noisy_script(seed: int = 11) -> TrajectoryScript:
    rng = random.Random(seed)
    pts = []
    for t in frame_times(2600):
        if t < 1200:
            z = HL[2]
        elif t < 1500:
            z = HL[2] - 0.2 * (t - 1200) / 300
        elif t < 1800:
            z = HL[2] - 0.2
        elif t < 2100:
            z = HL[2] - 0.2 * (2100 - t) / 300
        else:
            z = HL[2]
        pts.append((t, HL[0], HL[1], z + rng.uniform(-0.003, 0.003)))
    return script(seg("hl", pts))


def click_hold_script() -> TrajectoryScript:
    # Push held for >100 frames before release: one latch cycle only.
    pts = [
        (0, HL[0], HL[1], HL[2]),
        (1200, HL[0], HL[1], HL[2]),
        (1440, HL[0], HL[1], HL[2] - 0.18),
        (5000, HL[0], HL[1], HL[2] - 0.18),
        (5240, HL[0], HL[1], HL[2]),
        (5600, HL[0], HL[1], HL[2]),
    ]
    return script(seg("hl", pts))


def click_press_to_end_script() -> TrajectoryScript:
    # Stream ends while still pressed: drag never closes.
    pts = [
        (0, HL[0], HL[1], HL[2]),
        (1200, HL[0], HL[1], HL[2]),
        (1440, HL[0], HL[1], HL[2] - 0.18),
        (2400, HL[0], HL[1], HL[2] - 0.18),
    ]
    return script(seg("hl", pts))


def idle_script(duration_ms: int = 1500) -> TrajectoryScript:
    return script(seg("hl", [(0, *HL), (duration_ms, *HL)]))


def double_click_script() -> TrajectoryScript:
    # Two well-separated clicks: two full drag cycles.
    return script(
        seg("hl", click_push_pts([(1200, 1440, 1640, 1880), (2600, 2840, 3040, 3280)]))
    )


def triple_click_script() -> TrajectoryScript:
    return script(
        seg(
            "hl",
            click_push_pts(
                [
                    (1200, 1440, 1640, 1880),
                    (2600, 2840, 3040, 3280),
                    (4000, 4240, 4440, 4680),
                ]
            ),
        )
    )


# ---------------------------------------------------------------------------
# Cut trajectories (left hand lateral burst)
# ---------------------------------------------------------------------------

def cut_sweep_pts(start_t: int, sweep_ms: int, dist: float, return_ms: int = 1000):
    return [
        (0, HL[0], HL[1], HL[2]),
        (start_t, HL[0], HL[1], HL[2]),
        (start_t + sweep_ms, HL[0] + dist, HL[1], HL[2]),
        (start_t + sweep_ms + return_ms, HL[0], HL[1], HL[2]),
        (start_t + sweep_ms + return_ms + 400, HL[0], HL[1], HL[2]),
    ]


def cut_fire_script() -> TrajectoryScript:
    return script(seg("hl", cut_sweep_pts(1000, 300, 0.6)))  # 2.0 m/s raw


def cut_slow_script() -> TrajectoryScript:
    return script(seg("hl", cut_sweep_pts(1000, 1200, 0.6)))  # 0.5 m/s raw


def cut_short_path_script() -> TrajectoryScript:
    return script(seg("hl", cut_sweep_pts(1000, 66, 0.15)))  # fast but tiny


def cut_short_duration_script() -> TrajectoryScript:
    return script(seg("hl", cut_sweep_pts(1000, 120, 0.2)))


def cut_noisy_script(seed: int = 23) -> TrajectoryScript:
    rng = random.Random(seed)
    pts = []
    for t in frame_times(2800):
        if t < 1000:
            x = HL[0]
        elif t < 1350:
            x = HL[0] + 0.7 * (t - 1000) / 350
        elif t < 2400:
            x = HL[0] + 0.7 * (2400 - t) / 1050
        else:
            x = HL[0]
        pts.append((t, x, HL[1] + rng.uniform(-0.002, 0.002), HL[2]))
    return script(seg("hl", pts))


# ---------------------------------------------------------------------------
# Rotation trajectories (right hand circles in x-y)
# ---------------------------------------------------------------------------

def circle_pts(
    radius: float,
    revs: float,
    period_ms: int = 1000,
    cx: float = HR[0],
    cy: float = HR[1],
    clockwise: bool = False,
    lead_ms: int = 200,
    tail_ms: int = 300,
    jitter: float = 0.0,
    seed: int = 0,
):
    """Right-hand waypoints: rest, glide to the circle, then sweep it."""
    rng = random.Random(seed)
    sign = -1.0 if clockwise else 1.0
    pts = [(0, *HR)]
    total = round(period_ms * revs)
    for t in frame_times(total):
        ang = sign * 2.0 * math.pi * t / period_ms
        x = cx + radius * math.cos(ang) + (rng.uniform(-jitter, jitter) if jitter else 0.0)
        y = cy + radius * math.sin(ang) + (rng.uniform(-jitter, jitter) if jitter else 0.0)
        pts.append((lead_ms + t, x, y, HR[2]))
    last = pts[-1]
    pts.append((last[0] + tail_ms, last[1], last[2], last[3]))
    return pts


def rotation_fire_script() -> TrajectoryScript:
    return script(seg("hr", circle_pts(0.1, 1.0)))


def rotation_cw_script() -> TrajectoryScript:
    return script(seg("hr", circle_pts(0.1, 1.2, clockwise=True)))


def rotation_small_radius_script() -> TrajectoryScript:
    return script(seg("hr", circle_pts(0.02, 2.0)))


def rotation_line_script() -> TrajectoryScript:
    pts = [(0, *HR), (500, *HR), (1500, HR[0] + 0.4, HR[1], HR[2]), (2000, HR[0] + 0.4, HR[1], HR[2])]
    return script(seg("hr", pts))


def rotation_half_rev_script() -> TrajectoryScript:
    return script(seg("hr", circle_pts(0.1, 0.5, tail_ms=600)))


def rotation_noisy_script(seed: int = 31) -> TrajectoryScript:
    return script(seg("hr", circle_pts(0.12, 1.5, jitter=0.003, seed=seed)))


# ---------------------------------------------------------------------------
# Balance trajectories (right hand vertical steadiness)
# ---------------------------------------------------------------------------

def balance_steady_script() -> TrajectoryScript:
    return script(seg("hr", [(0, *HR), (2200, *HR)]))


def balance_oscillate_script() -> TrajectoryScript:
    # +-0.3 m square wave per frame: every scored frame lands out of band.
    pts = []
    for i, t in enumerate(frame_times(2100)):
        y = HR[1] + (0.3 if i % 2 == 0 else -0.3)
        pts.append((t, HR[0], y, HR[2]))
    return script(seg("hr", pts))


def balance_half_script() -> TrajectoryScript:
    # In band for frames 1..30 of the 59 scored frames, out afterwards.
    pts = [
        (0, *HR),
        (1000, *HR),
        (1033, HR[0], HR[1] + 0.2, HR[2]),
        (2400, HR[0], HR[1] + 0.2, HR[2]),
    ]
    return script(seg("hr", pts))


def balance_drift_script() -> TrajectoryScript:
    # Slow steady rise: leaves the band partway through each window.
    pts = [(0, *HR), (4400, HR[0], HR[1] + 0.44, HR[2])]
    return script(seg("hr", pts))


def balance_two_windows_script() -> TrajectoryScript:
    return script(seg("hr", [(0, *HR), (4400, *HR)]))


# ---------------------------------------------------------------------------
# Combined stream: every gesture class at least once
# ---------------------------------------------------------------------------

def all_gestures_script() -> TrajectoryScript:
    hl_pts = [
        (0, HL[0], HL[1], HL[2]),
        (1200, HL[0], HL[1], HL[2]),
        (1440, HL[0], HL[1], HL[2] - 0.18),   # click press
        (1640, HL[0], HL[1], HL[2] - 0.18),
        (1880, HL[0], HL[1], HL[2]),          # release
        (2200, HL[0], HL[1], HL[2]),
        (2500, HL[0] + 0.6, HL[1], HL[2]),    # cut burst
        (3400, HL[0], HL[1], HL[2]),          # slow return
        (6200, HL[0], HL[1], HL[2]),
    ]
    hr_pts = [(0, *HR), (3400, *HR)]
    rng_pts = circle_pts(0.1, 2.4, lead_ms=0, tail_ms=200)
    # Splice the circle to start at t=3600 after a short glide.
    for t, x, y, z in rng_pts[1:]:
        hr_pts.append((3600 + t, x, y, z))
    hr_pts.append((hr_pts[-1][0] + 100, *HR))
    end = max(hr_pts[-1][0], 6200)
    hr_pts.append((end + 200, *HR))
    return script(seg("hl", hl_pts), seg("hr", hr_pts))


# ---------------------------------------------------------------------------
# Smooth seeded random streams (for monotonicity and determinism batches)
# ---------------------------------------------------------------------------

def random_burst_script(seed: int) -> TrajectoryScript:
    """Random left-hand sweep bursts separated by idle holds.

    Each burst is a constant-speed linear sweep, so the filtered speed
    profile rises and falls exactly once per burst: stricter speed
    thresholds strictly nest the detection interval instead of splitting
    it. Burst speeds straddle the default cut threshold.
    """
    rng = random.Random(seed)
    pts = [(0, HL[0], HL[1], HL[2])]
    t = 600
    x = HL[0]
    direction = 1.0
    for _ in range(rng.randint(3, 6)):
        dist = rng.uniform(0.1, 0.8)
        dur = rng.randint(150, 500)
        pts.append((t, x, HL[1], HL[2]))
        x += direction * dist
        t += dur
        pts.append((t, x, HL[1], HL[2]))
        direction = -direction
        t += rng.randint(700, 1200)  # idle gap so episodes never merge
    pts.append((t, x, HL[1], HL[2]))
    return script(seg("hl", pts))


def random_motion_script(seed: int, duration_ms: int = 4000) -> TrajectoryScript:
    """Sum-of-sines motion on both hands; smooth, deterministic, varied."""
    rng = random.Random(seed)
    amps = [rng.uniform(0.05, 0.35) for _ in range(3)]
    freqs = [rng.uniform(0.2, 1.4) for _ in range(3)]
    phases = [rng.uniform(0, 2 * math.pi) for _ in range(3)]
    zamp = rng.uniform(0.0, 0.15)
    zfreq = rng.uniform(0.1, 0.8)
    hl_pts, hr_pts = [], []
    for t in frame_times(duration_ms):
        s = t / 1000.0
        dx = sum(a * math.sin(2 * math.pi * f * s + p) for a, f, p in zip(amps, freqs, phases))
        dy = sum(a * math.cos(2 * math.pi * f * s + p) for a, f, p in zip(amps, freqs, phases)) * 0.5
        dz = zamp * math.sin(2 * math.pi * zfreq * s)
        hl_pts.append((t, HL[0] + dx, HL[1] + dy, max(HL[2] + dz, 0.5)))
        hr_pts.append((t, HR[0] + dy, HR[1] + dx * 0.5, HR[2]))
    return script(seg("hl", hl_pts), seg("hr", hr_pts))


# ---------------------------------------------------------------------------
# Perfect-player construction for the slicing game
# ---------------------------------------------------------------------------

# Session constants the perfect player is built against; its config file
# must pin the same values.
PERFECT_SESSION_MS = 8000
PERFECT_CONFIG = {
    "pipeline": {"dead_zone_m": 0.005},
    "game": {"vx_range_px_s": [0.0, 0.0], "session_duration_ms": PERFECT_SESSION_MS},
}


def perfect_player_script(seed: int) -> TrajectoryScript:
    """A trajectory that slices every fruit of the seeded schedule.

    Replays the session's spawn draws (x position, apex band; horizontal
    drift pinned to zero by the config), then for each fruit parks the
    pointer on the fruit's column and sweeps a tall vertical cut centered
    on the fruit's predicted height 550 ms after its spawn, while the
    left hand does a speed burst to open the cut episode. Bursts
    alternate direction so no fast return is ever needed.
    """
    rng = random.Random(seed)
    gravity, width, height = 600.0, 640, 480
    ox, oy, bw, bh = -0.25, 0.75, 0.5, 0.5  # default movement box at rest pose

    def hand_x(px: float) -> float:
        return ox + (px + 0.5) / width * bw

    def hand_y(py: float) -> float:
        return oy - (py + 0.5) / height * bh

    fruits = []
    for i in range(PERFECT_SESSION_MS // 1000):
        cx = rng.uniform(0.1 * width, 0.9 * width)
        apex_px = rng.uniform(0.4, 0.9) * height
        vy = -((2.0 * gravity * apex_px) ** 0.5)
        rng.uniform(0.0, 0.0)  # vx draw, pinned to zero
        y_at_cut = height + vy * 0.55 + 0.5 * gravity * 0.55**2
        fruits.append((i * 1000, cx, y_at_cut))

    hr_pts = [(0, *HR)]
    hl_pts = [(0, *HL)]
    left_x = HL[0]
    direction = 1.0
    for base, cx, y_cut in fruits:
        bot = (hand_x(cx), hand_y(y_cut + 130.0))
        top = (hand_x(cx), hand_y(y_cut - 130.0))
        if base > 0:
            hr_pts.append((base + 50, hr_pts[-1][1], hr_pts[-1][2], HR[2]))
        hr_pts.append((base + 250, bot[0], bot[1], HR[2]))   # park on the column
        hr_pts.append((base + 400, bot[0], bot[1], HR[2]))   # settle
        hr_pts.append((base + 700, top[0], top[1], HR[2]))   # upward slice
        hl_pts.append((base + 400, left_x, HL[1], HL[2]))
        left_x += direction * 0.7
        hl_pts.append((base + 700, left_x, HL[1], HL[2]))    # speed burst
        direction = -direction
    tail = fruits[-1][0] + 1100
    hr_pts.append((tail, hr_pts[-1][1], hr_pts[-1][2], HR[2]))
    hl_pts.append((tail, left_x, HL[1], HL[2]))
    return script(seg("hr", hr_pts), seg("hl", hl_pts))


def null_player_script() -> TrajectoryScript:
    return idle_script(duration_ms=PERFECT_SESSION_MS)


# ---------------------------------------------------------------------------
# Script catalogs
# ---------------------------------------------------------------------------

ORACLE_SCRIPTS = {
    "click_fire": click_fire_script,
    "click_shallow": click_shallow_script,
    "click_slow": click_slow_script,
    "click_rapid": click_rapid_script,
    "click_noisy": click_noisy_script,
    "click_hold": click_hold_script,
    "click_press_to_end": click_press_to_end_script,
    "double_click": double_click_script,
    "idle": idle_script,
    "cut_fire": cut_fire_script,
    "cut_slow": cut_slow_script,
    "cut_short_path": cut_short_path_script,
    "cut_short_duration": cut_short_duration_script,
    "cut_noisy": cut_noisy_script,
    "rotation_fire": rotation_fire_script,
    "rotation_cw": rotation_cw_script,
    "rotation_small_radius": rotation_small_radius_script,
    "rotation_line": rotation_line_script,
    "rotation_half_rev": rotation_half_rev_script,
    "rotation_noisy": rotation_noisy_script,
    "balance_steady": balance_steady_script,
    "balance_oscillate": balance_oscillate_script,
    "balance_half": balance_half_script,
    "balance_drift": balance_drift_script,
    "balance_two_windows": balance_two_windows_script,
    "all_gestures": all_gestures_script,
}

GESTURE_GROUPS = {
    "click": ["click_fire", "click_shallow", "click_slow", "click_rapid", "click_noisy"],
    "cut": ["cut_fire", "cut_slow", "cut_short_path", "cut_short_duration", "cut_noisy"],
    "drag": ["click_fire", "click_hold", "idle", "double_click", "click_press_to_end"],
    "rotation": [
        "rotation_fire",
        "rotation_cw",
        "rotation_small_radius",
        "rotation_line",
        "rotation_half_rev",
        "rotation_noisy",
    ],
    "balance": [
        "balance_steady",
        "balance_oscillate",
        "balance_half",
        "balance_drift",
        "balance_two_windows",
    ],
}


def determinism_recordings() -> dict[str, Recording]:
    """Twenty varied fixture recordings for replay-determinism checks."""
    out: dict[str, Recording] = {}
    for name in (
        "click_fire",
        "click_noisy",
        "click_rapid",
        "cut_fire",
        "cut_noisy",
        "rotation_fire",
        "rotation_noisy",
        "balance_oscillate",
        "balance_half",
        "double_click",
        "all_gestures",
        "idle",
    ):
        out[name] = generate(ORACLE_SCRIPTS[name]())
    for seed in range(8):
        out[f"random_{seed}"] = generate(random_motion_script(1000 + seed))
    return out


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    """Determinism fixture recordings written once per test session."""
    root = tmp_path_factory.mktemp("recordings")
    for name, rec in determinism_recordings().items():
        (root / f"{name}.skelrec").write_text(serialize_recording(rec), encoding="utf-8")
    return root
