"""Deterministic mini-games and evaluation metrics.

Two games score gesture streams: a slicing game (ballistic fruits rise
from the bottom edge and are despawned by cut segments) and a shape game
(timed targets are despawned by clicks inside them). Both are seeded and
fully deterministic, so a session can be replayed bit-for-bit. The
matcher compares a detected event stream against a reference stream with
greedy one-to-one time matching and reports per-gesture accuracy,
overall recognition accuracy, and miss rate.

All game constants live in GameConfig and are echoed in serialized
reports; none of them is a measured value.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .config import GameConfig
from .core import GestureEvent, GestureKind, ScreenDims
from .mapping import ScreenPos


class UnsortedInput(ValueError):
    """Input event stream is not sorted by timestamp."""


@dataclass
class FruitState:
    """One ballistic target; spawns at the bottom edge moving up."""

    id: int
    cx: float
    cy: float
    radius_px: float
    vx: float
    vy: float          # px/s, negative while rising (screen y grows down)
    spawn_t: int
    alive: bool = True


@dataclass(frozen=True)
class ShapeTarget:
    """One timed click target, alive over [appear_t, expire_t)."""

    id: int
    shape: str                                   # "circle" | "rect"
    appear_t: int
    expire_t: int
    center: Optional[tuple[float, float]] = None  # circle
    radius: Optional[float] = None
    corner: Optional[tuple[float, float]] = None  # rect upper-left
    extent: Optional[tuple[float, float]] = None


@dataclass(frozen=True)
class SessionStats:
    score: int
    hits: int
    misses: int
    hit_rate: float
    duration_ms: int


def spawn_fruit(
    rng: random.Random, config: GameConfig, screen: ScreenDims, t: int, fruit_id: int
) -> FruitState:
    """Draw one fruit from the session generator.

    Draw order is fixed (x, apex fraction, horizontal speed) so a seed
    fully determines the session. The launch speed is chosen from the
    apex-height band, which keeps every apex at or above the configured
    minimum screen fraction.
    """
    lo, hi = config.spawn_x_frac
    cx = rng.uniform(lo * screen.width_px, hi * screen.width_px)
    apex_px = rng.uniform(*config.apex_frac) * screen.height_px
    vy = -((2.0 * config.gravity_px_s2 * apex_px) ** 0.5)
    vx = rng.uniform(*config.vx_range_px_s)
    return FruitState(
        id=fruit_id,
        cx=cx,
        cy=float(screen.height_px),
        radius_px=config.fruit_radius_px,
        vx=vx,
        vy=vy,
        spawn_t=t,
    )


def advance(fruit: FruitState, dt_ms: float, gravity_px_s2: float, height_px: int) -> FruitState:
    """Advance a fruit by dt under constant gravity.

    Uses the exact ballistic update (including the quadratic term), so
    splitting a step into sub-steps changes nothing beyond float noise.
    The fruit dies once it is below the bottom edge and falling.
    """
    if dt_ms < 0:
        raise ValueError("dt must be >= 0")
    dt = dt_ms / 1000.0
    cx = fruit.cx + fruit.vx * dt
    cy = fruit.cy + fruit.vy * dt + 0.5 * gravity_px_s2 * dt * dt
    vy = fruit.vy + gravity_px_s2 * dt
    alive = fruit.alive and not (cy > height_px and vy > 0)
    return replace(fruit, cx=cx, cy=cy, vy=vy, alive=alive)


def _dist_point_segment(px: float, py: float, a: Sequence[float], b: Sequence[float]) -> float:
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    len2 = dx * dx + dy * dy
    if len2 == 0.0:
        return ((px - ax) ** 2 + (py - ay) ** 2) ** 0.5
    s = ((px - ax) * dx + (py - ay) * dy) / len2
    s = 0.0 if s < 0.0 else 1.0 if s > 1.0 else s
    qx, qy = ax + s * dx, ay + s * dy
    return ((px - qx) ** 2 + (py - qy) ** 2) ** 0.5


def fruit_hit_test(seg: Sequence[Sequence[float]], fruit: FruitState) -> bool:
    """True when the closed segment passes within the fruit's radius
    (boundary contact counts)."""
    return _dist_point_segment(fruit.cx, fruit.cy, seg[0], seg[1]) <= fruit.radius_px


def shape_hit_test(pointer: ScreenPos, target: ShapeTarget, t: int) -> bool:
    """True when the pointer is inside the target during [appear, expire).

    Geometry boundaries are inclusive; the time interval is half-open, so
    a click at the exact expiry instant misses.
    """
    if not target.appear_t <= t < target.expire_t:
        return False
    if target.shape == "circle":
        cx, cy = target.center
        return (pointer.px - cx) ** 2 + (pointer.py - cy) ** 2 <= target.radius**2
    x0, y0 = target.corner
    ex, ey = target.extent
    return x0 <= pointer.px <= x0 + ex and y0 <= pointer.py <= y0 + ey


# ---------------------------------------------------------------------------
# Incremental game engines (shared by batch scoring and the live service)
# ---------------------------------------------------------------------------

class FruitGame:
    """Seeded slicing game, advanced on demand.

    ``advance_to(t)`` replays the spawn schedule and off-screen exits up
    to t (exits strictly before t, so a cut at the exact exit instant
    still connects) and returns renderable change messages in time order.
    """

    def __init__(self, config: GameConfig, screen: ScreenDims, seed: int) -> None:
        self.config = config
        self.screen = screen
        self.rng = random.Random(seed)
        self.fruits: dict[int, FruitState] = {}
        self.fruit_t: dict[int, float] = {}
        self.resolved: set[int] = set()  # every spawned fruit ends up here exactly once
        self.score = 0
        self.hits = 0
        self.misses = 0
        self.spawned = 0
        self._next_spawn_t = 0
        self._next_id = 0
        self._exits: list[tuple[float, int]] = []  # (exit_t, fruit id) heap

    def _spawn_due(self, cutoff: float, inclusive: bool) -> bool:
        if self._next_spawn_t >= self.config.session_duration_ms:
            return False
        return self._next_spawn_t <= cutoff if inclusive else self._next_spawn_t < cutoff

    def advance_to(self, t: float) -> list[dict]:
        messages: list[dict] = []
        while True:
            spawn_due = self._spawn_due(t, inclusive=True)
            exit_due = bool(self._exits) and self._exits[0][0] < t
            if not spawn_due and not exit_due:
                break
            # Interleave spawns and exits chronologically; ties spawn first.
            if spawn_due and (not exit_due or self._next_spawn_t <= self._exits[0][0]):
                fruit = spawn_fruit(
                    self.rng, self.config, self.screen, self._next_spawn_t, self._next_id
                )
                self.fruits[fruit.id] = fruit
                self.fruit_t[fruit.id] = float(fruit.spawn_t)
                self.spawned += 1
                exit_t = fruit.spawn_t + (-2.0 * fruit.vy / self.config.gravity_px_s2) * 1000.0
                heapq.heappush(self._exits, (exit_t, fruit.id))
                messages.append(
                    {
                        "id": fruit.id,
                        "kind": "fruit",
                        "pos": [fruit.cx, fruit.cy],
                        "vel": [fruit.vx, fruit.vy],
                        "r": fruit.radius_px,
                        "t": fruit.spawn_t,
                        "op": "spawn",
                    }
                )
                self._next_id += 1
                self._next_spawn_t += self.config.spawn_interval_ms
            else:
                exit_t, fid = heapq.heappop(self._exits)
                if fid not in self.resolved:
                    self.resolved.add(fid)
                    self.fruits[fid].alive = False
                    self.misses += 1
                    messages.append({"id": fid, "t": exit_t, "op": "despawn"})
        return messages

    def on_cut(self, seg: Sequence[Sequence[float]], t: float) -> list[dict]:
        """Test a finished cut segment against every live fruit."""
        messages: list[dict] = []
        for fid in sorted(self.fruits):
            if fid in self.resolved:
                continue
            moved = advance(
                self.fruits[fid],
                t - self.fruit_t[fid],
                self.config.gravity_px_s2,
                self.screen.height_px,
            )
            self.fruits[fid] = moved
            self.fruit_t[fid] = t
            if not moved.alive:
                # Float noise at the exact exit boundary: resolve as a miss here
                # rather than waiting for the queued exit.
                self.resolved.add(fid)
                self.misses += 1
                messages.append({"id": fid, "t": t, "op": "despawn"})
            elif fruit_hit_test(seg, moved):
                moved.alive = False
                self.resolved.add(fid)
                self.hits += 1
                self.score += self.config.score_per_hit
                messages.append({"id": fid, "score": self.score, "t": t, "op": "hit"})
        return messages

    def _close(self, duration_ms: int) -> SessionStats:
        for fid in self.fruits:
            if fid not in self.resolved:
                self.resolved.add(fid)
                self.fruits[fid].alive = False
                self.misses += 1
        total = self.hits + self.misses
        return SessionStats(
            score=self.score,
            hits=self.hits,
            misses=self.misses,
            hit_rate=self.hits / total if total else 0.0,
            duration_ms=duration_ms,
        )

    def finalize(self) -> SessionStats:
        """Close a batch session: the whole spawn schedule runs and
        whatever was never hit counts as a miss."""
        self.advance_to(float("inf"))
        return self._close(self.config.session_duration_ms)

    def stop(self, t: float) -> SessionStats:
        """Close a live session early at stream time t; fruits still in
        flight were never hit and count as misses."""
        self.advance_to(t)
        return self._close(int(t))


class ShapeGame:
    """Seeded click-target game with the same advance/act/finalize shape."""

    def __init__(self, config: GameConfig, screen: ScreenDims, seed: int) -> None:
        self.config = config
        self.screen = screen
        self.rng = random.Random(seed)
        self.targets: dict[int, ShapeTarget] = {}
        self.resolved: set[int] = set()
        self.score = 0
        self.hits = 0
        self.misses = 0
        self.spawned = 0
        self._next_spawn_t = 0
        self._next_id = 0
        self._expiries: list[tuple[int, int]] = []

    def _make_target(self, t: int) -> ShapeTarget:
        w, h = self.screen.width_px, self.screen.height_px
        expire = t + self.config.shape_lifetime_ms
        if self.rng.random() < 0.5:
            r = self.config.shape_circle_radius_px
            center = (self.rng.uniform(r, w - r), self.rng.uniform(r, h - r))
            return ShapeTarget(
                id=self._next_id, shape="circle", appear_t=t, expire_t=expire,
                center=center, radius=r,
            )
        ex, ey = self.config.shape_rect_extent_px
        corner = (self.rng.uniform(0, w - ex), self.rng.uniform(0, h - ey))
        return ShapeTarget(
            id=self._next_id, shape="rect", appear_t=t, expire_t=expire,
            corner=corner, extent=(ex, ey),
        )

    def advance_to(self, t: float) -> list[dict]:
        messages: list[dict] = []
        while True:
            spawn_due = (
                self._next_spawn_t < self.config.session_duration_ms
                and self._next_spawn_t <= t
            )
            # Expiry is inclusive: a click at the expiry instant misses.
            expire_due = bool(self._expiries) and self._expiries[0][0] <= t
            if not spawn_due and not expire_due:
                break
            if spawn_due and (not expire_due or self._next_spawn_t <= self._expiries[0][0]):
                target = self._make_target(self._next_spawn_t)
                self.targets[target.id] = target
                self.spawned += 1
                heapq.heappush(self._expiries, (target.expire_t, target.id))
                msg = {
                    "id": target.id,
                    "kind": target.shape,
                    "t": target.appear_t,
                    "expire_t": target.expire_t,
                    "op": "spawn",
                }
                if target.shape == "circle":
                    msg["pos"] = [target.center[0], target.center[1]]
                    msg["r"] = target.radius
                else:
                    msg["pos"] = [target.corner[0], target.corner[1]]
                    msg["ext"] = [target.extent[0], target.extent[1]]
                messages.append(msg)
                self._next_id += 1
                self._next_spawn_t += self.config.spawn_interval_ms
            else:
                expire_t, tid = heapq.heappop(self._expiries)
                if tid not in self.resolved:
                    self.resolved.add(tid)
                    self.misses += 1
                    messages.append({"id": tid, "t": expire_t, "op": "despawn"})
        return messages

    def on_click(self, pos: Sequence[int], t: int) -> list[dict]:
        pointer = ScreenPos(px=pos[0], py=pos[1])
        messages: list[dict] = []
        for tid in sorted(self.targets):
            if tid in self.resolved:
                continue
            if shape_hit_test(pointer, self.targets[tid], t):
                self.resolved.add(tid)
                self.hits += 1
                self.score += self.config.score_per_hit
                messages.append({"id": tid, "score": self.score, "t": t, "op": "hit"})
        return messages

    def _close(self, duration_ms: int) -> SessionStats:
        for tid in self.targets:
            if tid not in self.resolved:
                self.resolved.add(tid)
                self.misses += 1
        total = self.hits + self.misses
        return SessionStats(
            score=self.score,
            hits=self.hits,
            misses=self.misses,
            hit_rate=self.hits / total if total else 0.0,
            duration_ms=duration_ms,
        )

    def finalize(self) -> SessionStats:
        self.advance_to(float("inf"))
        return self._close(self.config.session_duration_ms)

    def stop(self, t: float) -> SessionStats:
        self.advance_to(t)
        return self._close(int(t))


def run_session(
    events: Iterable[GestureEvent],
    game: str,
    config: GameConfig,
    screen: ScreenDims,
    seed: int,
) -> SessionStats:
    """Score one gesture stream against a seeded game session.

    The slicing game consumes cut_end segments, the shape game consumes
    click positions; everything else in the stream is ignored. Events
    must arrive in nondecreasing timestamp order; events past the session
    duration are dropped.
    """
    if game not in ("fruit", "shape"):
        raise ValueError(f"game must be 'fruit' or 'shape', got {game!r}")
    engine: Union[FruitGame, ShapeGame]
    engine = FruitGame(config, screen, seed) if game == "fruit" else ShapeGame(config, screen, seed)
    last_t: Optional[int] = None
    for ev in events:
        if last_t is not None and ev.t < last_t:
            raise UnsortedInput(f"event at t={ev.t} after t={last_t}")
        last_t = ev.t
        if ev.t > config.session_duration_ms:
            continue
        engine.advance_to(ev.t)
        if game == "fruit" and ev.kind is GestureKind.CUT_END:
            engine.on_cut(ev.payload["seg"], ev.t)
        elif game == "shape" and ev.kind is GestureKind.CLICK:
            engine.on_click(ev.payload["pos"], ev.t)
    return engine.finalize()


# ---------------------------------------------------------------------------
# Reference matching
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatchTolerances:
    dt_ms: int = 200
    dist_px: float = 30.0


# Report column order, fixed.
GESTURE_COLUMNS = ("click", "cutting", "drag", "balancing", "rotation")

_GROUP_OF = {
    GestureKind.CLICK: "click",
    GestureKind.CUT_START: "cutting",
    GestureKind.CUT_END: "cutting",
    GestureKind.DRAG_START: "drag",
    GestureKind.DRAG_END: "drag",
    GestureKind.BALANCE: "balancing",
    GestureKind.ROTATION: "rotation",
}


@dataclass(frozen=True)
class EvalReport:
    """Accuracy of a candidate stream against a reference stream.

    Per-gesture accuracies are percentages; a gesture with no reference
    events has no defined accuracy and is reported as None, never as 100.
    """

    accuracy_pct: dict[str, Optional[float]]
    recognition_accuracy: Optional[float]
    miss_rate: Optional[float]
    matched: int
    reference_total: int
    candidate_total: int
    tol: MatchTolerances = field(default_factory=MatchTolerances)


def _event_position(ev: GestureEvent) -> Optional[tuple[float, float]]:
    if ev.kind is GestureKind.CLICK:
        x, y = ev.payload["pos"]
        return (float(x), float(y))
    if ev.kind is GestureKind.CUT_END:
        (ax, ay), (bx, by) = ev.payload["seg"]
        return ((ax + bx) / 2.0, (ay + by) / 2.0)
    return None


def _check_sorted(events: Sequence[GestureEvent], name: str) -> None:
    for prev, cur in zip(events, events[1:]):
        if cur.t < prev.t:
            raise UnsortedInput(f"{name} stream not sorted: t={cur.t} after t={prev.t}")


def accuracy_vs_reference(
    candidate: Sequence[GestureEvent],
    reference: Sequence[GestureEvent],
    tol: MatchTolerances = MatchTolerances(),
) -> EvalReport:
    """Greedy one-to-one matching of candidate events onto a reference.

    Walking the reference in time order, each reference event claims the
    earliest unmatched candidate of the same kind within tol.dt_ms; when
    both events carry screen positions the distance must also be within
    tol.dist_px. A candidate is never matched twice. Shrinking either
    tolerance can only remove matches.
    """
    _check_sorted(candidate, "candidate")
    _check_sorted(reference, "reference")

    by_kind: dict[GestureKind, list[tuple[GestureEvent, Optional[tuple[float, float]]]]] = {}
    matched_flags: dict[GestureKind, list[bool]] = {}
    for ev in candidate:
        by_kind.setdefault(ev.kind, []).append((ev, _event_position(ev)))
        matched_flags.setdefault(ev.kind, []).append(False)

    ref_count: dict[str, int] = {g: 0 for g in GESTURE_COLUMNS}
    match_count: dict[str, int] = {g: 0 for g in GESTURE_COLUMNS}
    for ref in reference:
        group = _GROUP_OF[ref.kind]
        ref_count[group] += 1
        ref_pos = _event_position(ref)
        pool = by_kind.get(ref.kind, [])
        flags = matched_flags.get(ref.kind, [])
        for i, (cand, cand_pos) in enumerate(pool):
            if flags[i]:
                continue
            if cand.t > ref.t + tol.dt_ms:
                break  # pool is time-sorted; nothing later can qualify
            if ref.t - cand.t > tol.dt_ms:
                continue
            if ref_pos is not None and cand_pos is not None:
                dx = ref_pos[0] - cand_pos[0]
                dy = ref_pos[1] - cand_pos[1]
                if (dx * dx + dy * dy) ** 0.5 > tol.dist_px:
                    continue
            flags[i] = True
            match_count[group] += 1
            break

    accuracy: dict[str, Optional[float]] = {}
    for g in GESTURE_COLUMNS:
        accuracy[g] = 100.0 * match_count[g] / ref_count[g] if ref_count[g] else None
    total_ref = sum(ref_count.values())
    total_matched = sum(match_count.values())
    recognition = total_matched / total_ref if total_ref else None
    return EvalReport(
        accuracy_pct=accuracy,
        recognition_accuracy=recognition,
        miss_rate=(1.0 - recognition) if recognition is not None else None,
        matched=total_matched,
        reference_total=total_ref,
        candidate_total=len(candidate),
        tol=tol,
    )
