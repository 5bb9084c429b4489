#!/usr/bin/env python3
"""
Summarize the output directory of a streamdrift run.

Usage:
    python scripts/view_trace.py [out_dir]
"""

import json
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import pandas as pd


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "out"
    trace_path = os.path.join(out_dir, "trace.csv")

    if not os.path.exists(trace_path):
        print(f"✗ Error: Trace not found: {trace_path}")
        print("  Run the detector first using: python app.py run --preset abrupt-recurrent")
        sys.exit(1)

    trace = pd.read_csv(trace_path)
    scored = trace[trace["event"] != "init"]
    with open(os.path.join(out_dir, "events.json")) as f:
        events = json.load(f)

    print(f"Run: {out_dir}")
    print(f"Scored batches: {len(scored)}")
    print("")

    print("Summary Statistics:")
    print(f"  Pool reliability range: {scored['pool_reliability'].min():.4f} - {scored['pool_reliability'].max():.4f}")
    print(f"  Pool size: mean {scored['pool_size'].mean():.2f}, max {scored['pool_size'].max()}")
    print(f"  Major updates: {(scored['event'] == 'major').sum()}")
    merges = sum(len(e.get("merged_ids", [])) for e in events)
    print(f"  Models merged away: {merges}")

    auc_path = os.path.join(out_dir, "batch_auc.csv")
    if os.path.exists(auc_path):
        batch_auc = pd.read_csv(auc_path)["auc"].dropna()
        if len(batch_auc) > 0:
            print(f"  Per-batch AUC: mean {batch_auc.mean():.4f}, min {batch_auc.min():.4f}")
    print("")

    print("Major Updates:")
    print(f"{'Batch':>6} {'Reliability':>12} {'Pool':>5} {'Merged':<20}")
    print("-" * 50)
    for event in events:
        if event["kind"] != "major":
            continue
        merged = ",".join(str(i) for i in event.get("merged_ids", [])) or "-"
        print(f"{event['batch_index']:>6} {event['pool_reliability']:>12.4g} {event['pool_size']:>5} {merged:<20}")
    print("-" * 50)


if __name__ == '__main__':
    main()
