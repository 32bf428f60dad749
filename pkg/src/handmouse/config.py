"""Layered run configuration shared by the CLI and the socket service.

A config is a single JSON object with namespaced sections: ``pipeline``,
``gestures``, ``game``, ``service``. Layers merge with increasing
precedence (defaults, then config file, then flags or hello overrides);
unknown keys and out-of-range values are rejected, never ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping, Optional

from .engine import GestureThresholds


class ConfigError(ValueError):
    """Unknown key or out-of-range value in a config layer."""


@dataclass(frozen=True)
class PipelineConfig:
    """Filtering, mapping, and stream constants for one session."""

    fps_nominal: float = 30.0
    smoothing_alpha: float = 0.5
    dead_zone_m: float = 0.01
    velocity_window: int = 5
    box_origin: Optional[tuple[float, float, float]] = None  # None: derive from first frame
    box_width: float = 0.5
    box_height: float = 0.5
    screen_width: int = 640
    screen_height: int = 480

    def __post_init__(self) -> None:
        if self.fps_nominal <= 0:
            raise ConfigError("pipeline.fps_nominal must be > 0")
        if not 0.0 <= self.smoothing_alpha <= 1.0:
            raise ConfigError("pipeline.smoothing_alpha must be in [0, 1]")
        if self.dead_zone_m < 0:
            raise ConfigError("pipeline.dead_zone_m must be >= 0")
        if self.velocity_window < 2:
            raise ConfigError("pipeline.velocity_window must be >= 2")
        if self.box_width <= 0 or self.box_height <= 0:
            raise ConfigError("pipeline.box extents must be > 0")
        if self.screen_width < 1 or self.screen_height < 1:
            raise ConfigError("pipeline.screen dimensions must be >= 1")
        if self.box_origin is not None:
            if len(self.box_origin) != 3 or not all(
                math.isfinite(c) for c in self.box_origin
            ):
                raise ConfigError("pipeline.box_origin must be [x, y, z], finite")


@dataclass(frozen=True)
class GameConfig:
    """Deterministic game constants, echoed into every report."""

    gravity_px_s2: float = 600.0
    fruit_radius_px: float = 24.0
    score_per_hit: int = 10
    spawn_interval_ms: int = 1000
    session_duration_ms: int = 60000
    spawn_x_frac: tuple[float, float] = (0.1, 0.9)
    apex_frac: tuple[float, float] = (0.4, 0.9)  # fruit apex as screen-height fraction
    vx_range_px_s: tuple[float, float] = (-120.0, 120.0)
    shape_lifetime_ms: int = 1500
    shape_circle_radius_px: float = 30.0
    shape_rect_extent_px: tuple[float, float] = (48.0, 48.0)

    def __post_init__(self) -> None:
        if self.gravity_px_s2 <= 0 or self.fruit_radius_px <= 0:
            raise ConfigError("game.gravity_px_s2 and game.fruit_radius_px must be > 0")
        if self.score_per_hit <= 0:
            raise ConfigError("game.score_per_hit must be > 0")
        if self.spawn_interval_ms <= 0 or self.session_duration_ms <= 0:
            raise ConfigError("game intervals must be > 0")
        for name in ("spawn_x_frac", "apex_frac"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ConfigError(f"game.{name} must satisfy 0 <= lo <= hi <= 1")
        if self.apex_frac[0] <= 0.0:
            raise ConfigError("game.apex_frac lower bound must be > 0")
        if self.vx_range_px_s[0] > self.vx_range_px_s[1]:
            raise ConfigError("game.vx_range_px_s must be ordered")
        if self.shape_lifetime_ms <= 0 or self.shape_circle_radius_px <= 0:
            raise ConfigError("game.shape constants must be > 0")
        if self.shape_rect_extent_px[0] <= 0 or self.shape_rect_extent_px[1] <= 0:
            raise ConfigError("game.shape_rect_extent_px must be > 0")


@dataclass(frozen=True)
class ServiceConfig:
    port: int = 8765
    max_frames_per_sec: int = 1000

    def __post_init__(self) -> None:
        if not 0 <= self.port <= 65535:
            raise ConfigError("service.port must be in [0, 65535]")
        if self.max_frames_per_sec < 1:
            raise ConfigError("service.max_frames_per_sec must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    gestures: GestureThresholds = field(default_factory=GestureThresholds)
    game: GameConfig = field(default_factory=GameConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "pipeline": PipelineConfig,
    "gestures": GestureThresholds,
    "game": GameConfig,
    "service": ServiceConfig,
}

# Fields holding fixed-length numeric tuples (JSON lists on the wire).
_TUPLE_FIELDS = {
    "box_origin": 3,
    "spawn_x_frac": 2,
    "apex_frac": 2,
    "vx_range_px_s": 2,
    "shape_rect_extent_px": 2,
}


def _coerce(section: str, name: str, declared: Any, value: Any) -> Any:
    if name in _TUPLE_FIELDS:
        if name == "box_origin" and value is None:
            return None
        if not isinstance(value, (list, tuple)) or len(value) != _TUPLE_FIELDS[name]:
            raise ConfigError(f"{section}.{name}: expected a {_TUPLE_FIELDS[name]}-element list")
        return tuple(_coerce(section, f"{name}[]", float, v) for v in value)
    if isinstance(value, bool):
        raise ConfigError(f"{section}.{name}: expected a number, got a boolean")
    if declared is int or declared == int:
        if not isinstance(value, int):
            raise ConfigError(f"{section}.{name}: expected an integer")
        return value
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{name}: expected a number")
    return float(value)


def merge_config(*layers: Mapping[str, Any]) -> RunConfig:
    """Build a RunConfig from defaults plus override layers, later wins.

    Each layer is a (possibly partial) namespaced mapping. Raises
    ConfigError on unknown sections, unknown keys, wrong types, or values
    outside their declared range.
    """
    merged: dict[str, dict[str, Any]] = {name: {} for name in _SECTIONS}
    for layer in layers:
        if not isinstance(layer, Mapping):
            raise ConfigError("config layer must be an object")
        for section, body in layer.items():
            cls = _SECTIONS.get(section)
            if cls is None:
                raise ConfigError(f"unknown config section {section!r}")
            if not isinstance(body, Mapping):
                raise ConfigError(f"config section {section!r} must be an object")
            known = {f.name: f.type for f in fields(cls)}
            for key, value in body.items():
                if key not in known:
                    raise ConfigError(f"unknown config key {section}.{key}")
                merged[section][key] = _coerce(section, key, _field_type(cls, key), value)
    try:
        return RunConfig(
            pipeline=PipelineConfig(**merged["pipeline"]),
            gestures=GestureThresholds(**merged["gestures"]),
            game=GameConfig(**merged["game"]),
            service=ServiceConfig(**merged["service"]),
        )
    except ValueError as exc:  # threshold range violations surface as ConfigError
        raise ConfigError(str(exc)) from exc


def _field_type(cls: type, name: str) -> Any:
    for f in fields(cls):
        if f.name == name:
            ann = f.type
            if ann in ("int", int):
                return int
            return float
    raise ConfigError(f"unknown field {name}")


def load_config_file(path: str) -> dict:
    """Read one namespaced config object from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a single object")
    return data
