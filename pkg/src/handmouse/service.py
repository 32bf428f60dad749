"""Real-time websocket boundary around the pipeline.

One websocket connection is one session: the client opens with "hello"
(optional config overrides), then streams skeleton frames or virtual-hand
messages and receives pointer and gesture replies synchronously, in
arrival order. A session can attach one seeded game at a time; game state
changes (spawn/despawn/hit) are pushed as the pipeline clock advances.

Protocol (one JSON object per text message, endpoint /v1/session):
  inbound   hello {config?}, frame {t,hl,hr,sc}, hand {x,y,push},
            game_start {game,seed}, game_stop
  outbound  ready {session,config}, pointer {u,v,t}, gesture {t,kind,payload},
            spawn/despawn/hit {id,...}, stats {...}, error {code,detail}

Pointer coordinates are clamped to [0, 65535] at this boundary (the
in-memory samples run to 65536). Replies never carry wall-clock values,
so a replayed inbound transcript yields a byte-identical reply transcript.
Malformed input earns an error reply, never a disconnect; sessions are
fully isolated from each other.
"""

from __future__ import annotations

import asyncio
import json
import time
from dataclasses import dataclass
from http import HTTPStatus
from pathlib import Path
from typing import Any, Optional, Union

from websockets.asyncio.server import serve
from websockets.datastructures import Headers
from websockets.http11 import Request, Response

from .config import ConfigError, RunConfig, merge_config
from .core import FrameError, GestureKind, NonMonotoneTimestamp, ScreenDims
from .games import FruitGame, SessionStats, ShapeGame
from .mapping import default_box
from .pipeline import Pipeline
from .streams import REST_POSE, event_to_record

WS_PATH = "/v1/session"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


class _TokenBucket:
    """Per-session frame-rate guard; burst capacity equals the rate."""

    def __init__(self, per_second: int, clock=time.monotonic) -> None:
        self.rate = float(per_second)
        self.capacity = float(per_second)
        self.tokens = float(per_second)
        self.clock = clock
        self.last = clock()

    def take(self) -> bool:
        now = self.clock()
        self.tokens = min(self.capacity, self.tokens + (now - self.last) * self.rate)
        self.last = now
        if self.tokens >= 1.0:
            self.tokens -= 1.0
            return True
        return False


@dataclass
class _LiveGame:
    name: str
    engine: Union[FruitGame, ShapeGame]
    start_t: int  # session-stream time when the game attached


class Session:
    """Protocol state machine for one connection.

    Transport-agnostic: ``handle(text)`` maps one inbound message to the
    ordered list of reply message strings, which makes conformance tests
    and replay comparisons trivial.
    """

    def __init__(self, session_id: str, defaults: RunConfig) -> None:
        self.id = session_id
        self.defaults = defaults
        self.config: Optional[RunConfig] = None
        self.pipeline: Optional[Pipeline] = None
        self.game: Optional[_LiveGame] = None
        self.limiter: Optional[_TokenBucket] = None

    # -- helpers ----------------------------------------------------------

    def _error(self, code: str, detail: str) -> list[str]:
        return [_dump({"type": "error", "code": code, "detail": detail})]

    def _stream_t(self) -> int:
        return self.pipeline.last_t if self.pipeline.last_t is not None else 0

    def _game_messages(self, raw: list[dict], offset: int) -> list[str]:
        out = []
        for msg in raw:
            op = msg.pop("op")
            t = msg.pop("t")
            out.append(_dump({"type": op, **msg, "t": t + offset}))
        return out

    def _stats_message(self, stats: SessionStats) -> str:
        return _dump(
            {
                "type": "stats",
                "score": stats.score,
                "hits": stats.hits,
                "misses": stats.misses,
                "hit_rate": stats.hit_rate,
                "duration_ms": stats.duration_ms,
            }
        )

    # -- message handlers --------------------------------------------------

    def handle(self, text: str) -> list[str]:
        try:
            msg = json.loads(text)
        except json.JSONDecodeError as exc:
            return self._error("BadMessage", f"not valid JSON: {exc.msg}")
        if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
            return self._error("BadMessage", "message must be an object with a 'type' field")
        mtype = msg["type"]
        if mtype == "hello":
            return self._on_hello(msg)
        if self.pipeline is None:
            return self._error("BadMessage", "send 'hello' before anything else")
        if mtype == "frame":
            return self._on_frame(msg)
        if mtype == "hand":
            return self._on_hand(msg)
        if mtype == "game_start":
            return self._on_game_start(msg)
        if mtype == "game_stop":
            return self._on_game_stop()
        return self._error("BadMessage", f"unknown message type {mtype!r}")

    def _on_hello(self, msg: dict) -> list[str]:
        if self.pipeline is not None:
            return self._error("BadMessage", "session already open")
        overrides = msg.get("config", {})
        try:
            config = merge_config(self.defaults.to_dict(), overrides)
        except ConfigError as exc:
            return self._error("BadConfig", str(exc))
        self.config = config
        self.pipeline = Pipeline(config.pipeline, config.gestures)
        self.limiter = _TokenBucket(config.service.max_frames_per_sec)
        return [_dump({"type": "ready", "session": self.id, "config": config.to_dict()})]

    def _step_pipeline(self, record: dict) -> list[str]:
        if not self.limiter.take():
            return self._error("RateExceeded", "frame rate above configured limit; frame dropped")
        try:
            pointer, events = self.pipeline.step_record(record)
        except NonMonotoneTimestamp as exc:
            return self._error("NonMonotoneTimestamp", str(exc))
        except FrameError as exc:
            return self._error("FrameInvalid", str(exc))
        replies = [
            _dump(
                {
                    "type": "pointer",
                    "u": min(pointer.u, 65535),
                    "v": min(pointer.v, 65535),
                    "t": pointer.t,
                }
            )
        ]
        replies.extend(_dump({"type": "gesture", **event_to_record(ev)}) for ev in events)
        if self.game is not None:
            rel_t = pointer.t - self.game.start_t
            replies.extend(self._game_messages(self.game.engine.advance_to(rel_t), self.game.start_t))
            for ev in events:
                if self.game.name == "fruit" and ev.kind is GestureKind.CUT_END:
                    acted = self.game.engine.on_cut(ev.payload["seg"], ev.t - self.game.start_t)
                elif self.game.name == "shape" and ev.kind is GestureKind.CLICK:
                    acted = self.game.engine.on_click(ev.payload["pos"], ev.t - self.game.start_t)
                else:
                    continue
                replies.extend(self._game_messages(acted, self.game.start_t))
        return replies

    def _on_frame(self, msg: dict) -> list[str]:
        record = {k: v for k, v in msg.items() if k != "type"}
        return self._step_pipeline(record)

    def _on_hand(self, msg: dict) -> list[str]:
        x, y, push = msg.get("x"), msg.get("y"), msg.get("push", False)
        for name, val in (("x", x), ("y", y)):
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not 0 <= val <= 1:
                return self._error("BadMessage", f"hand.{name} must be a number in [0, 1]")
        if not isinstance(push, bool):
            return self._error("BadMessage", "hand.push must be a boolean")
        cfg = self.config.pipeline
        box = self.pipeline.box or default_box(REST_POSE["sc"], cfg.box_width, cfg.box_height)
        step = max(1, round(1000.0 / cfg.fps_nominal))
        t = 0 if self.pipeline.last_t is None else self.pipeline.last_t + step
        hr_x = box.origin.x + x * box.move_width
        hr_y = box.origin.y - y * box.move_height
        push_depth = self.config.gestures.click_dz_m * 1.5
        record = {
            "t": t,
            "hl": [hr_x - 0.4, hr_y, box.origin.z - (push_depth if push else 0.0)],
            "hr": [hr_x, hr_y, box.origin.z],
            "sc": [REST_POSE["sc"].x, REST_POSE["sc"].y, REST_POSE["sc"].z],
        }
        return self._step_pipeline(record)

    def _on_game_start(self, msg: dict) -> list[str]:
        if self.game is not None:
            return self._error("GameAlreadyRunning", f"{self.game.name} game already attached")
        name = msg.get("game")
        seed = msg.get("seed", 0)
        if name not in ("fruit", "shape"):
            return self._error("BadMessage", "game must be 'fruit' or 'shape'")
        if isinstance(seed, bool) or not isinstance(seed, int):
            return self._error("BadMessage", "seed must be an integer")
        screen = ScreenDims(self.config.pipeline.screen_width, self.config.pipeline.screen_height)
        engine: Union[FruitGame, ShapeGame]
        if name == "fruit":
            engine = FruitGame(self.config.game, screen, seed)
        else:
            engine = ShapeGame(self.config.game, screen, seed)
        self.game = _LiveGame(name=name, engine=engine, start_t=self._stream_t())
        # The schedule starts immediately; the first spawn is the acknowledgement.
        return self._game_messages(self.game.engine.advance_to(0), self.game.start_t)

    def _on_game_stop(self) -> list[str]:
        if self.game is None:
            return self._error("NoGameRunning", "no game attached")
        game = self.game
        self.game = None
        stats = game.engine.stop(self._stream_t() - game.start_t)
        return [self._stats_message(stats)]


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------

def _static_responder(static_dir: Optional[str]):
    root = Path(static_dir).resolve() if static_dir else None

    def respond(connection: Any, request: Request) -> Optional[Response]:
        if request.path.split("?", 1)[0] == WS_PATH:
            return None  # proceed with the websocket handshake
        if root is None:
            return Response(
                HTTPStatus.NOT_FOUND, "Not Found", Headers([("Content-Type", "text/plain")]),
                b"not found\n",
            )
        rel = request.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (root / rel).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            return Response(
                HTTPStatus.NOT_FOUND, "Not Found", Headers([("Content-Type", "text/plain")]),
                b"not found\n",
            )
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        return Response(
            HTTPStatus.OK, "OK", Headers([("Content-Type", ctype)]), target.read_bytes()
        )

    return respond


async def run_server(
    config: RunConfig,
    port: int,
    host: str = "127.0.0.1",
    static_dir: Optional[str] = None,
    ready: Optional[asyncio.Event] = None,
    port_holder: Optional[list] = None,
):
    counter = {"n": 0}

    async def handler(connection) -> None:
        counter["n"] += 1
        session = Session(f"s{counter['n']}", config)
        async for message in connection:
            if isinstance(message, bytes):
                replies = session._error("BadMessage", "binary frames are not supported")
            else:
                try:
                    replies = session.handle(message)
                except Exception as exc:  # never let one message kill the session
                    replies = session._error("InternalError", f"{type(exc).__name__}: {exc}")
            for reply in replies:
                await connection.send(reply)

    async with serve(
        handler, host, port, process_request=_static_responder(static_dir)
    ) as server:
        bound = None
        for sock in server.sockets:
            bound = sock.getsockname()[1]
            break
        if port_holder is not None:
            port_holder.append(bound)
        print(f"listening on ws://{host}:{bound}{WS_PATH}", flush=True)
        if ready is not None:
            ready.set()
        await asyncio.get_running_loop().create_future()


def serve_forever(config: RunConfig, port: int, static_dir: Optional[str] = None) -> None:
    try:
        asyncio.run(run_server(config, port, static_dir=static_dir))
    except KeyboardInterrupt:
        pass
