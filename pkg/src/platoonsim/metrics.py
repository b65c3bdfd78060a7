"""Quantitative summaries of a trace: steady states, transients, amplification.

Lateral velocity here is the world-frame rate of lateral travel,
``v * sin(psi)``, the quantity that makes follower transients comparable to
the lead's during a lane change. Yaw is kept in radians internally and
exported in degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .engine import TraceLog, TraceRecord
from .scenario import LANE_CHANGE

SPEED_TOLERANCE = 0.03
SUSTAIN_WINDOW = 2.0
STEADY_STATE_FRACTION = 0.1


class DegenerateTrace(ValueError):
    """Raised when a trace is too short to summarize."""


class MismatchedVehicles(ValueError):
    """Raised when two reports do not cover the same vehicles."""


@dataclass(frozen=True)
class VehicleMetrics:
    steady_state_y: float
    speed_convergence_time: float
    peak_vy: float
    peak_vy_time: float
    peak_yaw: float
    peak_yaw_time: float
    min_vy: float
    min_vy_time: float
    min_yaw: float
    min_yaw_time: float
    max_undershoot_y: float
    undershoot_x: float


@dataclass(frozen=True)
class MetricsReport:
    vehicle_ids: tuple[str, ...]
    per_vehicle: dict[str, VehicleMetrics]
    amplification_vy: dict[str, float | None]
    amplification_yaw: dict[str, float | None]


@dataclass(frozen=True)
class ComparisonRow:
    vehicle_id: str
    metric: str
    value_a: float
    value_b: float
    delta: float


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    # Which run ("a"/"b"/None) shows the larger follower-2 negative excursion.
    larger_f2_vy_excursion: str | None = None
    larger_f2_yaw_excursion: str | None = None
    follower2_id: str | None = None


_METRIC_FIELDS = (
    "steady_state_y",
    "speed_convergence_time",
    "peak_vy",
    "peak_yaw",
    "min_vy",
    "min_yaw",
    "max_undershoot_y",
)


def lateral_velocity(record: TraceRecord) -> float:
    """World-frame lateral speed of one record."""
    return record.v_actual * math.sin(record.psi)


def group_by_vehicle(trace: TraceLog) -> dict[str, list[TraceRecord]]:
    """Records per vehicle in scenario order, each list sorted by time."""
    order = [v.vehicle_id for v in trace.scenario.vehicles]
    groups: dict[str, list[TraceRecord]] = {vid: [] for vid in order}
    for r in trace.records:
        groups.setdefault(r.vehicle_id, []).append(r)
    for rows in groups.values():
        rows.sort(key=lambda r: r.t)
    return groups


def maneuver_start_time(trace: TraceLog) -> float:
    """Tick time when the lead's traveled distance first reaches the maneuver start.

    Returns +inf for scenarios without a lane change (the whole run counts as
    pre-maneuver).
    """
    if trace.scenario.maneuver.kind != LANE_CHANGE:
        return math.inf
    lead_id = trace.scenario.vehicles[0].vehicle_id
    rows = group_by_vehicle(trace)[lead_id]
    traveled = 0.0
    prev_t: float | None = None
    prev_v = 0.0
    for r in rows:
        if prev_t is not None:
            traveled += prev_v * (r.t - prev_t)
        if traveled >= trace.scenario.maneuver.start_x:
            return r.t
        prev_t, prev_v = r.t, abs(r.v_actual)
    return math.inf


def compute_metrics(trace: TraceLog) -> MetricsReport:
    """Summarize one run; peaks and excursions are global extrema of the signals."""
    groups = group_by_vehicle(trace)
    ticks = {r.t for r in trace.records}
    if len(ticks) < 10:
        raise DegenerateTrace(f"trace has only {len(ticks)} ticks; need at least 10")
    if len(groups) < 2:
        raise DegenerateTrace("trace covers fewer than 2 vehicles")
    for vid, rows in groups.items():
        if not rows:
            raise DegenerateTrace(f"trace has no records for vehicle {vid!r}")

    t_end = max(ticks)
    steady_from = t_end * (1.0 - STEADY_STATE_FRACTION)
    pre_maneuver_end = maneuver_start_time(trace)
    cruise_speed = trace.scenario.maneuver.cruise_speed

    per_vehicle: dict[str, VehicleMetrics] = {}
    for vid, rows in groups.items():
        tail = [r.y for r in rows if r.t >= steady_from]
        steady_state_y = sum(tail) / len(tail) if tail else math.nan

        convergence = math.nan
        for i, r in enumerate(rows):
            if abs(r.v_actual - cruise_speed) > SPEED_TOLERANCE:
                continue
            horizon = r.t + SUSTAIN_WINDOW
            window = [q for q in rows[i:] if q.t <= horizon]
            if rows[-1].t < horizon:
                break
            if all(abs(q.v_actual - cruise_speed) <= SPEED_TOLERANCE for q in window):
                convergence = r.t
                break

        vy = [lateral_velocity(r) for r in rows]
        peak_i = max(range(len(rows)), key=lambda k: vy[k])
        min_i = min(range(len(rows)), key=lambda k: vy[k])
        yaw_peak_i = max(range(len(rows)), key=lambda k: rows[k].psi)
        yaw_min_i = min(range(len(rows)), key=lambda k: rows[k].psi)

        pre = [r for r in rows if r.t < pre_maneuver_end]
        if pre:
            dip_i = min(range(len(pre)), key=lambda k: pre[k].y)
            undershoot = max(0.0, -pre[dip_i].y)
            undershoot_x = pre[dip_i].x
        else:
            undershoot = 0.0
            undershoot_x = math.nan

        per_vehicle[vid] = VehicleMetrics(
            steady_state_y=steady_state_y,
            speed_convergence_time=convergence,
            peak_vy=vy[peak_i],
            peak_vy_time=rows[peak_i].t,
            peak_yaw=rows[yaw_peak_i].psi,
            peak_yaw_time=rows[yaw_peak_i].t,
            min_vy=vy[min_i],
            min_vy_time=rows[min_i].t,
            min_yaw=rows[yaw_min_i].psi,
            min_yaw_time=rows[yaw_min_i].t,
            max_undershoot_y=undershoot,
            undershoot_x=undershoot_x,
        )

    ids = tuple(groups.keys())
    lead = per_vehicle[ids[0]]
    amplification_vy: dict[str, float | None] = {}
    amplification_yaw: dict[str, float | None] = {}
    for vid in ids[1:]:
        m = per_vehicle[vid]
        amplification_vy[vid] = abs(m.peak_vy) / abs(lead.peak_vy) if lead.peak_vy != 0 else None
        amplification_yaw[vid] = (
            abs(m.peak_yaw) / abs(lead.peak_yaw) if lead.peak_yaw != 0 else None
        )

    return MetricsReport(
        vehicle_ids=ids,
        per_vehicle=per_vehicle,
        amplification_vy=amplification_vy,
        amplification_yaw=amplification_yaw,
    )


def compare_runs(a: MetricsReport, b: MetricsReport) -> ComparisonTable:
    """Side-by-side metric deltas (b minus a) plus the follower-2 excursion flags."""
    if set(a.vehicle_ids) != set(b.vehicle_ids):
        raise MismatchedVehicles(
            f"vehicle ids differ: {sorted(a.vehicle_ids)} vs {sorted(b.vehicle_ids)}"
        )
    rows = []
    for vid in a.vehicle_ids:
        ma, mb = a.per_vehicle[vid], b.per_vehicle[vid]
        for name in _METRIC_FIELDS:
            va = getattr(ma, name)
            vb = getattr(mb, name)
            delta = 0.0 if math.isnan(va) and math.isnan(vb) else vb - va
            rows.append(ComparisonRow(vid, name, va, vb, delta))

    larger_vy = larger_yaw = None
    follower2 = None
    if len(a.vehicle_ids) >= 3:
        follower2 = a.vehicle_ids[2]
        ma, mb = a.per_vehicle[follower2], b.per_vehicle[follower2]
        if abs(ma.min_vy) != abs(mb.min_vy):
            larger_vy = "a" if abs(ma.min_vy) > abs(mb.min_vy) else "b"
        if abs(ma.min_yaw) != abs(mb.min_yaw):
            larger_yaw = "a" if abs(ma.min_yaw) > abs(mb.min_yaw) else "b"
    return ComparisonTable(
        rows=tuple(rows),
        larger_f2_vy_excursion=larger_vy,
        larger_f2_yaw_excursion=larger_yaw,
        follower2_id=follower2,
    )


def _fmt(value: float) -> str:
    return format(value, ".9g")


def _export_rows(report: MetricsReport) -> list[tuple[str, str, float, float]]:
    rows: list[tuple[str, str, float, float]] = []
    for vid in report.vehicle_ids:
        m = report.per_vehicle[vid]
        rows.append((vid, "steady_state_y", m.steady_state_y, math.nan))
        rows.append((vid, "speed_convergence_time", m.speed_convergence_time, math.nan))
        rows.append((vid, "peak_vy", m.peak_vy, m.peak_vy_time))
        rows.append((vid, "peak_yaw_deg", math.degrees(m.peak_yaw), m.peak_yaw_time))
        rows.append((vid, "min_vy", m.min_vy, m.min_vy_time))
        rows.append((vid, "min_yaw_deg", math.degrees(m.min_yaw), m.min_yaw_time))
        rows.append((vid, "max_undershoot_y", m.max_undershoot_y, m.undershoot_x))
    for vid, ratio in report.amplification_vy.items():
        if ratio is not None:
            rows.append((vid, "amplification_vy", ratio, math.nan))
    for vid, ratio in report.amplification_yaw.items():
        if ratio is not None:
            rows.append((vid, "amplification_yaw", ratio, math.nan))
    return rows


def export_csv(report: MetricsReport, path: str | Path) -> None:
    """Write one metric per row: vehicle_id,metric,value,time_or_location."""
    lines = ["vehicle_id,metric,value,time_or_location"]
    for vid, name, value, where in _export_rows(report):
        where_s = "" if math.isnan(where) else _fmt(where)
        lines.append(f"{vid},{name},{_fmt(value)},{where_s}")
    Path(path).write_text("\n".join(lines) + "\n")


def render_comparison(table: ComparisonTable, label_a: str = "a", label_b: str = "b") -> str:
    """Aligned plain-text view of a comparison table."""
    header = ("vehicle", "metric", label_a, label_b, "delta")
    body = [
        (r.vehicle_id, r.metric, _fmt(r.value_a), _fmt(r.value_b), _fmt(r.delta))
        for r in table.rows
    ]
    widths = [max(len(row[i]) for row in [header, *body]) for i in range(5)]
    lines = [
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in [header, *body]
    ]
    if table.follower2_id is not None:
        for signal, larger in (
            ("lateral-velocity", table.larger_f2_vy_excursion),
            ("yaw", table.larger_f2_yaw_excursion),
        ):
            if larger is not None:
                name = label_a if larger == "a" else label_b
                lines.append(
                    f"larger {table.follower2_id} negative {signal} excursion: {name}"
                )
    return "\n".join(lines) + "\n"


def comparison_csv(table: ComparisonTable, path: str | Path, label_a: str = "a", label_b: str = "b") -> None:
    lines = [f"vehicle_id,metric,{label_a},{label_b},delta"]
    for r in table.rows:
        lines.append(
            f"{r.vehicle_id},{r.metric},{_fmt(r.value_a)},{_fmt(r.value_b)},{_fmt(r.delta)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")
