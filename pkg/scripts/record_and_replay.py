#!/usr/bin/env python3
"""Record one agent session to a log file, then re-simulate it from the
recorded inputs and verify the event streams and metrics are identical.

Usage:
    python scripts/record_and_replay.py --agent haptic --seed 7 out.log
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hapticgaze.agents import make_driver
from hapticgaze.config import GameConfig
from hapticgaze.session import read_log, run_protocol, verify_replay, write_log


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("log", help="output log path")
    parser.add_argument("--agent", default="haptic")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--games", type=int, default=7)
    args = parser.parse_args()

    config = GameConfig(seed=args.seed, intro_ticks=35, demo_timeout_ticks=350)
    log = run_protocol(config, make_driver(args.agent, config),
                       participant=args.agent, games=args.games)
    write_log(log, args.log)
    print(f"recorded {len(log.games)} games to {args.log}")
    for m in log.metrics:
        print(f"  game {m.game_index}: score {m.score:+d}  shots {m.shots}  "
              f"accuracy {m.accuracy:.2f}")

    problems = verify_replay(read_log(args.log))
    if problems:
        for p in problems:
            print(f"MISMATCH {p}", file=sys.stderr)
        return 1
    print("replay: byte-for-byte identical")
    return 0


if __name__ == "__main__":
    sys.exit(main())
