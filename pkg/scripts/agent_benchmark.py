#!/usr/bin/env python3
"""Run the three agents through full sessions and tabulate per-game means,
the same quantities a study would plot over its seven trials: score,
misses, barrel hits, accuracy, mistake ratio.

Usage:
    python scripts/agent_benchmark.py --sessions 10 --out results/
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hapticgaze.agents import make_driver
from hapticgaze.config import GameConfig
from hapticgaze.session import aggregate, aggregate_csv, metrics_csv, run_protocol


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sessions", type=int, default=10,
                        help="sessions per agent")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    parser.add_argument("--agents", nargs="+",
                        default=["oracle", "haptic", "random"])
    parser.add_argument("--out", default=None, metavar="DIR",
                        help="write per-agent CSVs here")
    args = parser.parse_args()

    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    for agent in args.agents:
        started = time.perf_counter()
        logs = []
        for i in range(args.sessions):
            config = GameConfig(seed=args.seed + i, intro_ticks=35,
                                demo_timeout_ticks=350)
            driver = make_driver(agent, config)
            logs.append(run_protocol(config, driver, participant=agent))
        elapsed = time.perf_counter() - started
        rows = aggregate(logs)
        print(f"\n== {agent}: {args.sessions} sessions x "
              f"{logs[0].config.games_per_session} games "
              f"({elapsed:.1f}s virtual-time) ==")
        print(f"{'game':>4} {'score':>12} {'misses':>12} {'barrels':>12} "
              f"{'accuracy':>12} {'mistake':>12}")
        for row in rows:
            ratio = ("-" if row.mistake_ratio_mean is None
                     else f"{row.mistake_ratio_mean:.3f}")
            print(f"{row.game_index:>4} "
                  f"{row.score_mean:>7.2f}±{row.score_sd:<4.2f} "
                  f"{row.misses_mean:>7.2f}±{row.misses_sd:<4.2f} "
                  f"{row.barrels_mean:>7.2f}±{row.barrels_sd:<4.2f} "
                  f"{row.accuracy_mean:>7.3f}±{row.accuracy_sd:<4.3f} "
                  f"{ratio:>12}")
        if out_dir:
            (out_dir / f"{agent}_metrics.csv").write_text(metrics_csv(logs))
            (out_dir / f"{agent}_aggregate.csv").write_text(
                aggregate_csv(rows))
    if out_dir:
        print(f"\nCSVs written to {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
