#!/usr/bin/env python3
"""Plot the cluster-count and active-count traces from a run's series.csv.

Needs matplotlib, which is not a package dependency; install it separately.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path


def load_series(path: Path):
    t, clusters, active = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            t.append(int(row["t"]))
            clusters.append(int(row["cluster_count"]))
            active.append(int(row["active_count"]))
    return t, clusters, active


def main() -> int:
    ap = argparse.ArgumentParser(description="Plot a recorded run")
    ap.add_argument("series", type=Path, help="path to series.csv (or its run dir)")
    ap.add_argument("--out", type=Path, default=None, help="save PNG instead of showing")
    ap.add_argument("--t-min", type=int, default=None)
    ap.add_argument("--t-max", type=int, default=None)
    args = ap.parse_args()

    try:
        import matplotlib
        if args.out is not None:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required for plotting: pip install matplotlib", file=sys.stderr)
        return 1

    path = args.series
    if path.is_dir():
        path = path / "series.csv"
    t, clusters, active = load_series(path)

    lo = args.t_min if args.t_min is not None else t[0]
    hi = args.t_max if args.t_max is not None else t[-1]
    keep = [i for i, ti in enumerate(t) if lo <= ti <= hi]
    t = [t[i] for i in keep]
    clusters = [clusters[i] for i in keep]
    active = [active[i] for i in keep]

    fig, (ax0, ax1) = plt.subplots(2, 1, sharex=True, figsize=(10, 6))
    ax0.plot(t, clusters, lw=0.7, color="tab:blue")
    ax0.set_ylabel("clusters")
    ax1.plot(t, active, lw=0.7, color="tab:red")
    ax1.set_ylabel("active molecules")
    ax1.set_xlabel("step")
    fig.suptitle(str(path.parent.name))
    fig.tight_layout()

    if args.out is not None:
        fig.savefig(args.out, dpi=150)
        print(f"wrote {args.out}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
