"""Command-line entry point.

One binary, six subcommands:

    replay     recording -> gesture event stream
    bench      recording + reference events -> accuracy report + table
    simulate   recording/script + game -> aggregated session stats
    generate   trajectory script -> recording
    calibrate  recording + hand -> movement box document
    serve      run the websocket service until interrupted

Exit codes: 0 success, 2 input error, 3 internal invariant violation.
All commands except serve are deterministic given their inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, load_config_file, merge_config
from .core import KIND_ORDER, GestureEvent
from .games import (
    GESTURE_COLUMNS,
    EvalReport,
    MatchTolerances,
    SessionStats,
    accuracy_vs_reference,
    run_session,
)
from .core import ScreenDims
from .pipeline import replay as replay_pipeline
from .mapping import CalibrationError, calibrate_box
from .streams import (
    Recording,
    StreamFormatError,
    generate,
    parse_events,
    parse_recording,
    parse_script,
    serialize_events,
    serialize_recording,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    """Anything wrong with user-supplied files or values (exit 2)."""


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_run_config(args: argparse.Namespace) -> RunConfig:
    layers = []
    if getattr(args, "config", None):
        try:
            layers.append(load_config_file(args.config))
        except ConfigError as exc:
            raise InputError(str(exc)) from exc
    flag_layer: dict = {}
    if getattr(args, "port", None) is not None:
        flag_layer.setdefault("service", {})["port"] = args.port
    if flag_layer:
        layers.append(flag_layer)
    try:
        return merge_config(*layers)
    except ConfigError as exc:
        raise InputError(str(exc)) from exc


def _parse_recording_file(path: str) -> Recording:
    try:
        return parse_recording(_read_file(path))
    except StreamFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _sorted_events(events: Sequence[GestureEvent]) -> list[GestureEvent]:
    return sorted(events, key=lambda ev: (ev.t, KIND_ORDER[ev.kind]))


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_replay(args: argparse.Namespace) -> int:
    cfg = _load_run_config(args)
    recording = _parse_recording_file(args.recording)
    _, events = replay_pipeline(recording, cfg.pipeline, cfg.gestures)
    _write_output(serialize_events(events), args.out)
    return EXIT_OK


def _format_table(report: EvalReport) -> str:
    header = "".join(f"{name:>11}" for name in GESTURE_COLUMNS)
    cells = []
    for name in GESTURE_COLUMNS:
        value = report.accuracy_pct[name]
        cells.append(f"{'n/a':>11}" if value is None else f"{value:>11.2f}")
    lines = [
        "gesture  " + header,
        "accuracy " + "".join(cells),
    ]
    if report.recognition_accuracy is None:
        lines.append("recognition accuracy n/a (empty reference), miss rate n/a")
    else:
        lines.append(
            f"recognition accuracy {report.recognition_accuracy:.4f}, "
            f"miss rate {report.miss_rate:.4f}"
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = _load_run_config(args)
    recording = _parse_recording_file(args.recording)
    try:
        reference = parse_events(_read_file(args.reference))
    except StreamFormatError as exc:
        raise InputError(f"{args.reference}: {exc}") from exc
    _, candidate = replay_pipeline(recording, cfg.pipeline, cfg.gestures)
    tol = MatchTolerances(dt_ms=args.tol_ms, dist_px=float(args.tol_px))
    report = accuracy_vs_reference(_sorted_events(candidate), _sorted_events(reference), tol)
    doc_lines = [
        _dump_line({"fmt": "benchreport", "v": 1}),
        _dump_line({"tol_ms": tol.dt_ms, "tol_px": tol.dist_px, "config": cfg.to_dict()}),
        _dump_line(
            {
                "accuracy_pct": report.accuracy_pct,
                "recognition_accuracy": report.recognition_accuracy,
                "miss_rate": report.miss_rate,
                "matched": report.matched,
                "reference_total": report.reference_total,
                "candidate_total": report.candidate_total,
            }
        ),
    ]
    _write_output("\n".join(doc_lines) + "\n", args.out)
    sys.stdout.write(_format_table(report))
    return EXIT_OK


def _load_input_as_recording(path: str) -> Recording:
    """Accept either a recording or a trajectory script, by header."""
    text = _read_file(path)
    head = text.split("\n", 1)[0]
    try:
        fmt = json.loads(head).get("fmt") if head.strip() else None
    except json.JSONDecodeError:
        fmt = None
    try:
        if fmt == "skelscript":
            return generate(parse_script(text))
        return parse_recording(text)
    except StreamFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.count < 1:
        raise InputError(f"--count must be >= 1, got {args.count}")
    cfg = _load_run_config(args)
    recording = _load_input_as_recording(args.input)
    _, events = replay_pipeline(recording, cfg.pipeline, cfg.gestures)
    events = _sorted_events(events)
    screen = ScreenDims(cfg.pipeline.screen_width, cfg.pipeline.screen_height)
    stats: list[SessionStats] = [
        run_session(events, args.game, cfg.game, screen, args.seed)
        for _ in range(args.count)
    ]
    mean_hit_rate = sum(s.hit_rate for s in stats) / len(stats)
    mean_score = sum(s.score for s in stats) / len(stats)
    doc_lines = [
        _dump_line({"fmt": "simreport", "v": 1}),
        _dump_line(
            {"game": args.game, "seed": args.seed, "count": args.count, "config": cfg.to_dict()}
        ),
        _dump_line({"mean_hit_rate": mean_hit_rate, "mean_score": mean_score}),
    ]
    if args.per_session:
        for i, s in enumerate(stats):
            doc_lines.append(
                _dump_line(
                    {
                        "session": i,
                        "score": s.score,
                        "hits": s.hits,
                        "misses": s.misses,
                        "hit_rate": s.hit_rate,
                        "duration_ms": s.duration_ms,
                    }
                )
            )
    _write_output("\n".join(doc_lines) + "\n", args.out)
    sys.stdout.write(
        f"{args.game}: {args.count} sessions, mean hit rate {mean_hit_rate:.3f}, "
        f"mean score {mean_score:.1f}\n"
    )
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        script = parse_script(_read_file(args.script))
        recording = generate(script)
    except StreamFormatError as exc:
        raise InputError(f"{args.script}: {exc}") from exc
    _write_output(serialize_recording(recording), args.out)
    return EXIT_OK


def cmd_calibrate(args: argparse.Namespace) -> int:
    recording = _parse_recording_file(args.recording)
    try:
        box = calibrate_box(recording.frames, args.hand)
    except (CalibrationError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    doc = [
        _dump_line({"fmt": "movebox", "v": 1}),
        _dump_line(
            {
                "origin": [box.origin.x, box.origin.y, box.origin.z],
                "width": box.move_width,
                "height": box.move_height,
                "degenerate": box.degenerate,
            }
        ),
    ]
    _write_output("\n".join(doc) + "\n", args.out)
    return EXIT_OK


def resolve_port(configured_port: int, env_port: Optional[str]) -> int:
    """GESTURE_PORT, when set, overrides whatever the config resolved to."""
    if env_port is None:
        return configured_port
    try:
        return int(env_port)
    except ValueError:
        raise InputError(f"GESTURE_PORT={env_port!r} is not an integer") from None


def cmd_serve(args: argparse.Namespace) -> int:
    cfg = _load_run_config(args)
    port = resolve_port(cfg.service.port, os.environ.get("GESTURE_PORT"))
    from .service import serve_forever

    serve_forever(cfg, port=port, static_dir=args.static)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="handmouse",
        description="Hand-tracking virtual mouse: replay, evaluate, and serve gesture pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="config file (namespaced JSON object)")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("replay", help="run a recording through the pipeline")
    p.add_argument("recording")
    add_common(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="compare pipeline output against a reference event stream")
    p.add_argument("recording")
    p.add_argument("reference")
    p.add_argument("--tol-ms", type=int, default=200)
    p.add_argument("--tol-px", type=float, default=30.0)
    add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="score a recording or script against a seeded game")
    p.add_argument("input", help="recording or trajectory script")
    p.add_argument("--game", choices=("fruit", "shape"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--per-session", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("generate", help="sample a trajectory script into a recording")
    p.add_argument("script")
    add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("calibrate", help="fit a movement box from a calibration sweep")
    p.add_argument("recording")
    p.add_argument("hand", choices=("left", "right"))
    add_common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("serve", help="run the websocket event service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--static", help="directory of playground assets to serve over HTTP")
    add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return EXIT_OK
    except Exception as exc:  # internal invariant violation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
