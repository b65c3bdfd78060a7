#!/usr/bin/env python3
"""Run the lane change under both lateral controllers and overlay follower 2.

Prints the comparison table and, with matplotlib installed, writes an overlay
figure of follower 2's lateral velocity and yaw under the two laws.
"""

import argparse
import math
import sys
from pathlib import Path

from platoonsim.engine import run_scenario
from platoonsim.metrics import (
    compare_runs,
    compute_metrics,
    group_by_vehicle,
    lateral_velocity,
    render_comparison,
)
from platoonsim.scenario import find_scenario, load_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default="lane_change_pp")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default="out/comparison")
    parser.add_argument("--no-plot", action="store_true")
    args = parser.parse_args()

    spec = load_scenario(find_scenario(args.scenario))
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    traces = {
        name: run_scenario(spec.with_lateral(name)) for name in ("pure_pursuit", "stanley")
    }
    reports = {name: compute_metrics(trace) for name, trace in traces.items()}
    table = compare_runs(reports["pure_pursuit"], reports["stanley"])
    print(render_comparison(table, "pure_pursuit", "stanley"), end="")

    if not args.no_plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed; skipping plots (pip install platoonsim[plots])")
            return 0
        f2 = reports["pure_pursuit"].vehicle_ids[2]
        fig, (ax_vy, ax_yaw) = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
        for name, trace in traces.items():
            rows = group_by_vehicle(trace)[f2]
            t = [r.t for r in rows]
            ax_vy.plot(t, [lateral_velocity(r) for r in rows], label=name)
            ax_yaw.plot(t, [math.degrees(r.psi) for r in rows], label=name)
        ax_vy.set(ylabel=f"{f2} lateral velocity [m/s]")
        ax_yaw.set(xlabel="t [s]", ylabel=f"{f2} yaw [deg]")
        for ax in (ax_vy, ax_yaw):
            ax.grid(alpha=0.3)
            ax.legend()
        fig.tight_layout()
        fig.savefig(out / "follower2_overlay.png", dpi=130)
        print(f"wrote {out / 'follower2_overlay.png'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
