#!/usr/bin/env python3
"""Cross-check a benchmark output directory.

Recomputes the aggregate results row from episodes.csv and the per-episode
event logs, then compares it against results.csv. Usage:

    python scripts/audit_results.py RUN_DIR [RUN_DIR ...]
"""

import csv
import math
import sys
from pathlib import Path


def fail(msg):
    print(f"  MISMATCH: {msg}")
    return 1


def load_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def audit_events(run_dir, episodes):
    events_dir = run_dir / "events"
    if not events_dir.is_dir():
        print("  (no events/ directory, skipping per-episode log check)")
        return 0
    bad = 0
    for i, ep in enumerate(episodes):
        log = events_dir / f"episode_{i}.csv"
        if not log.exists():
            bad += fail(f"{log.name} missing")
            continue
        rows = load_rows(log)
        counts = {"sr": 0, "sp": 0, "mrp": 0}
        for row in rows:
            kind = row["event_type"]
            if kind != "none":
                counts[kind] += 1
        for kind in counts:
            if counts[kind] != int(ep[kind]):
                bad += fail(
                    f"episode {i}: {kind} log count {counts[kind]} != csv {ep[kind]}"
                )
        steps = int(ep["steps"])
        ticks = {int(r["tick"]) for r in rows}
        if ticks != set(range(steps + 1)):
            bad += fail(f"episode {i}: log ticks do not cover 0..{steps}")
        first_frame = int(rows[0]["frame"])
        if first_frame != int(ep["start_frame"]):
            bad += fail(f"episode {i}: log starts at frame {first_frame}")
    return bad


def audit(run_dir):
    print(f"auditing {run_dir}")
    results = load_rows(run_dir / "results.csv")
    episodes = load_rows(run_dir / "episodes.csv")
    if len(results) != 1:
        return fail(f"expected one controller row, found {len(results)}")
    row = results[0]

    bad = 0
    agg = {k: 0 for k in ("reached", "failed", "aborted", "sr", "sp", "mrp", "stall_ticks")}
    delay_sum = 0.0
    for ep in episodes:
        reached = ep["reached_goal"] == "1"
        agg["reached" if reached else "failed"] += 1
        if reached:
            delay_sum += float(ep["delay_percent"])
        agg["aborted"] += int(ep["aborted"])
        for k in ("sr", "sp", "mrp", "stall_ticks"):
            agg[k] += int(ep[k])
        steps, optimal = int(ep["steps"]), int(ep["optimal"])
        if reached and optimal > 0:
            want = (steps / optimal - 1.0) * 100.0
            if not math.isclose(want, float(ep["delay_percent"]), rel_tol=1e-9, abs_tol=1e-9):
                bad += fail(f"episode {ep['episode']}: delay {ep['delay_percent']} != {want!r}")

    if int(row["episodes"]) != len(episodes):
        bad += fail(f"episodes {row['episodes']} != {len(episodes)} rows")
    for k in agg:
        if int(row[k]) != agg[k]:
            bad += fail(f"{k}: results.csv {row[k]} != recomputed {agg[k]}")
    mean_delay = delay_sum / agg["reached"] if agg["reached"] else 0.0
    if not math.isclose(mean_delay, float(row["mean_delay_percent"]), rel_tol=1e-9, abs_tol=1e-9):
        bad += fail(f"mean_delay {row['mean_delay_percent']} != recomputed {mean_delay!r}")

    bad += audit_events(run_dir, episodes)
    if bad == 0:
        print(f"  ok: {len(episodes)} episodes, controller {row['controller']}")
    return bad


def main(argv):
    if len(argv) < 2:
        print(__doc__.strip())
        return 2
    total = 0
    for arg in argv[1:]:
        run_dir = Path(arg)
        if not (run_dir / "results.csv").exists():
            print(f"{run_dir}: no results.csv")
            total += 1
            continue
        total += audit(run_dir)
    return 1 if total else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
