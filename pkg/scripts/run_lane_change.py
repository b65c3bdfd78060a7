#!/usr/bin/env python3
"""Run the reference lane-change experiment and plot the four signal panels.

Writes trace.csv / metrics.csv into --out and, when matplotlib is available,
a four-panel figure (lateral position vs x, speed, lateral velocity, yaw)
mirroring the usual experiment report layout.
"""

import argparse
import math
import sys
from pathlib import Path

from platoonsim.engine import run_scenario
from platoonsim.metrics import compute_metrics, export_csv, group_by_vehicle, lateral_velocity
from platoonsim.scenario import find_scenario, load_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default="lane_change_pp")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default="out/lane_change")
    parser.add_argument("--no-plot", action="store_true")
    args = parser.parse_args()

    spec = load_scenario(find_scenario(args.scenario))
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    trace = run_scenario(spec)
    trace.write_csv(out / "trace.csv")
    report = compute_metrics(trace)
    export_csv(report, out / "metrics.csv")

    for vid in report.vehicle_ids:
        m = report.per_vehicle[vid]
        print(
            f"{vid:12s} steady y={m.steady_state_y:+.3f} m  "
            f"peak vy={m.peak_vy:+.3f} m/s @ {m.peak_vy_time:5.1f} s  "
            f"peak yaw={math.degrees(m.peak_yaw):+5.1f} deg @ {m.peak_yaw_time:5.1f} s"
        )

    if not args.no_plot:
        try:
            import matplotlib

            matplotlib.use("Agg")
            import matplotlib.pyplot as plt
        except ImportError:
            print("matplotlib not installed; skipping plots (pip install platoonsim[plots])")
            return 0
        groups = group_by_vehicle(trace)
        fig, axes = plt.subplots(2, 2, figsize=(11, 7))
        for vid, rows in groups.items():
            t = [r.t for r in rows]
            axes[0, 0].plot([r.x for r in rows], [r.y for r in rows], label=vid)
            axes[0, 1].plot(t, [r.v_actual for r in rows], label=vid)
            axes[1, 0].plot(t, [lateral_velocity(r) for r in rows], label=vid)
            axes[1, 1].plot(t, [math.degrees(r.psi) for r in rows], label=vid)
        axes[0, 0].set(xlabel="x [m]", ylabel="lateral position [m]")
        axes[0, 1].set(xlabel="t [s]", ylabel="speed [m/s]")
        axes[1, 0].set(xlabel="t [s]", ylabel="lateral velocity [m/s]")
        axes[1, 1].set(xlabel="t [s]", ylabel="yaw [deg]")
        for ax in axes.flat:
            ax.grid(alpha=0.3)
            ax.legend(fontsize=8)
        fig.suptitle(f"{args.scenario} (seed {spec.seed})")
        fig.tight_layout()
        fig.savefig(out / "signals.png", dpi=130)
        print(f"wrote {out / 'signals.png'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
