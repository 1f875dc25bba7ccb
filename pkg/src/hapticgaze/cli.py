"""Command line entry points.

Subcommands:
  play       start the live server for a browser client
  demo       live server preset to the demo-room scenario
  headless   run agent sessions in virtual time, print a metrics CSV
  replay     re-simulate a recorded log and verify it matches
  calibrate  map piped hand samples to gaze coordinates, line by line
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .agents import AGENT_NAMES, make_driver
from .config import ConfigError, GameConfig, load_config
from .gaze import (
    GazePoint,
    HandSample,
    TrackerCalibration,
    gaze_to_cell,
    map_hand_to_gaze,
)
from .session import (
    aggregate,
    aggregate_csv,
    metrics_csv,
    read_log,
    run_scenario,
    verify_replay,
    write_log,
)

CONFIG_FLAGS = (
    ("--seed", int, "session seed"),
    ("--tick-rate", int, "simulation ticks per second"),
    ("--game-duration", int, "game length in ticks"),
    ("--games-per-session", int, "scored games per session"),
    ("--calib-x-min", float, "tracker plane left edge, mm"),
    ("--calib-x-max", float, "tracker plane right edge, mm"),
    ("--calib-y-min", float, "tracker plane bottom edge, mm"),
    ("--calib-y-max", float, "tracker plane top edge, mm"),
)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", default=None,
                        help="JSON config file")
    for flag, ftype, help_text in CONFIG_FLAGS:
        parser.add_argument(flag, type=ftype, default=None, help=help_text)


def _config_from_args(args: argparse.Namespace) -> GameConfig:
    overrides = {flag.lstrip("-").replace("-", "_"): getattr(
        args, flag.lstrip("-").replace("-", "_"))
        for flag, _, _ in CONFIG_FLAGS}
    return load_config(path=args.config, overrides=overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hapticgaze",
        description="Two-channel haptic hallway game: simulator, agents, "
                    "live server.")
    sub = parser.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="start the live session server")
    _add_config_flags(play)
    play.add_argument("--host", default="127.0.0.1")
    play.add_argument("--port", type=int, default=8765)
    play.add_argument("--scenario", choices=("game", "demo", "protocol"),
                      default="game")
    play.add_argument("--log-dir", default="logs")
    play.add_argument("--frontend", default=None,
                      help="directory of built browser client to serve")

    demo = sub.add_parser("demo", help="live server in the demo room")
    _add_config_flags(demo)
    demo.add_argument("--host", default="127.0.0.1")
    demo.add_argument("--port", type=int, default=8765)
    demo.add_argument("--log-dir", default="logs")
    demo.add_argument("--frontend", default=None)

    headless = sub.add_parser("headless", help="agent sessions, CSV out")
    _add_config_flags(headless)
    headless.add_argument("--agent", choices=AGENT_NAMES, required=True)
    headless.add_argument("--games", type=int, default=None,
                          help="scored games in the session")
    headless.add_argument("--sessions", type=int, default=1,
                          help="number of sessions (seeds derived per index)")
    headless.add_argument("--scenario", choices=("protocol", "game"),
                          default="protocol")
    headless.add_argument("--out", default=None, metavar="DIR",
                          help="also write session logs and CSVs here")
    headless.add_argument("--aggregate", action="store_true",
                          help="print the per-game aggregate CSV instead")

    replay = sub.add_parser("replay", help="verify a recorded session log")
    replay.add_argument("log", help="path to a session log")

    calibrate = sub.add_parser(
        "calibrate", help="print gaze mapping for piped 'x y [z]' lines")
    _add_config_flags(calibrate)

    return parser


def cmd_play(args: argparse.Namespace, scenario: str | None = None) -> int:
    from .service import serve

    config = _config_from_args(args)
    serve(config, host=args.host, port=args.port,
          scenario=scenario or args.scenario, log_dir=args.log_dir,
          frontend_dir=args.frontend)
    return 0


def cmd_headless(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    logs = []
    for i in range(args.sessions):
        session_config = config if i == 0 else config.replace(seed=config.seed + i)
        driver = make_driver(args.agent, session_config)
        log = run_scenario(session_config, driver, args.scenario,
                           participant=args.agent, games=args.games)
        logs.append(log)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for log in logs:
            write_log(log, out / f"{log.session_id}.log")
        (out / "metrics.csv").write_text(metrics_csv(logs))
    if args.aggregate:
        sys.stdout.write(aggregate_csv(aggregate(logs)))
    else:
        sys.stdout.write(metrics_csv(logs))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        log = read_log(args.log)
    except (OSError, ValueError) as exc:
        print(f"cannot read log: {exc}", file=sys.stderr)
        return 2
    problems = verify_replay(log)
    if problems:
        for problem in problems:
            print(f"MISMATCH {problem}", file=sys.stderr)
        return 1
    games = len(log.games)
    print(f"ok: {games} game(s) re-simulated identically")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    calib = TrackerCalibration(config.calib_x_min, config.calib_x_max,
                               config.calib_y_min, config.calib_y_max)
    gaze: GazePoint | None = None
    print("# x_mm y_mm [z_mm] -> u v col row", file=sys.stderr)
    for line in sys.stdin:
        parts = line.split()
        if not parts:
            continue
        try:
            x, y = float(parts[0]), float(parts[1])
            z = float(parts[2]) if len(parts) > 2 else 0.0
        except (IndexError, ValueError):
            print("expected: x y [z]", file=sys.stderr)
            continue
        gaze = map_hand_to_gaze(HandSample(x, y, z), calib, gaze,
                                config.smoothing_alpha)
        col, row = gaze_to_cell(gaze, config.grid_cols, config.grid_rows)
        print(f"{gaze.u:.4f} {gaze.v:.4f} {col} {row}")
    return 0


def cli_run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "play":
            return cmd_play(args)
        if args.command == "demo":
            return cmd_play(args, scenario="demo")
        if args.command == "headless":
            return cmd_headless(args)
        if args.command == "replay":
            return cmd_replay(args)
        if args.command == "calibrate":
            return cmd_calibrate(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    raise AssertionError("unreachable")


def main() -> None:
    sys.exit(cli_run(sys.argv[1:]))


if __name__ == "__main__":
    main()
