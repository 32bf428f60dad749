"""Hand-tracking virtual mouse toolkit.

Converts 3D hand-joint streams into absolute pointer coordinates and
discrete gesture events (click, cut, drag, rotation, balance), replays
and evaluates recordings against reference traces and seeded mini-games,
and serves the whole pipeline over a websocket protocol.
"""

from .config import GameConfig, PipelineConfig, RunConfig, ServiceConfig, merge_config
from .core import (
    GestureEvent,
    GestureKind,
    Point3D,
    PointerSample,
    ScreenDims,
    SkeletonFrame,
    validate_frame,
)
from .engine import EngineState, GestureThresholds, engine_step
from .filtering import MotionSample, SmootherState, dead_zone, estimate_velocity, smooth
from .games import (
    EvalReport,
    FruitGame,
    MatchTolerances,
    SessionStats,
    ShapeGame,
    accuracy_vs_reference,
    run_session,
)
from .mapping import (
    ButtonEdge,
    ButtonState,
    MovementBox,
    ScreenPos,
    calibrate_box,
    default_box,
    map_hand_to_pointer,
    press_left,
    to_screen,
)
from .pipeline import Pipeline, replay
from .streams import (
    Recording,
    ScriptSegment,
    TrajectoryScript,
    generate,
    parse_events,
    parse_recording,
    parse_script,
    serialize_events,
    serialize_recording,
    serialize_script,
)

__version__ = "0.1.0"
