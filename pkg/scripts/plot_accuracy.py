#!/usr/bin/env python3
"""Plot per-user accuracy curves from an evaluation.json report.

Users are on the x-axis in ascending order of how many items they chose to
filter, which makes the V-shape of the easy-to-predict extremes visible.
"""

import argparse
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("report", help="evaluation.json from run_experiment.py or the CLI")
    parser.add_argument("--out", default="accuracy.png")
    args = parser.parse_args()

    doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    users = doc["users"]
    x = range(len(users))
    kinds = doc["config"]["kinds"]

    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(x, [u["accuracy_general"] for u in users], label="general", lw=1.0, alpha=0.8)
    ax.plot(x, [u["accuracy_majority"] for u in users], label="majority baseline", lw=1.0, alpha=0.8)
    for kind in kinds:
        ax.plot(
            x,
            [u["accuracy_user_adapted"][kind] for u in users],
            label=f"user-adapted {kind}",
            lw=1.2,
        )
    ax.set_xlabel("users, ordered by number of items filtered")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
