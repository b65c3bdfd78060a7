"""Closed-loop platoon simulation: lead guidance, follower control, trace logging.

The world advances in controller ticks. Each tick observes every follower's
predecessor, runs the PID spacing controller and the selected lateral law,
then sub-steps the plant at the fine integration step with the commands held.
Runs are fully deterministic for a given (scenario, seed): the sensor noise
streams are spawned per follower from the scenario seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .control import (
    LateralErrors,
    PidState,
    pid_step,
    pure_pursuit_steer,
    stanley_steer,
)
from .scenario import PURE_PURSUIT, STRAIGHT_CRUISE, TELEOP, ManeuverSpec, ScenarioSpec
from .sensing import RelativeObservation, observe
from .vehicle import (
    ChassisCommand,
    VehicleState,
    clamp,
    estimate_follower_motion,
    estimate_lead_motion,
    inverse_ackermann,
    inverse_diff_steer,
    step_plant,
    wrap_angle,
)

TRACE_HEADER = (
    "t,vehicle_id,x,y,psi,v_actual,vx_cmd,delta_cmd,"
    "vx_hat,vy_hat,omega_hat,d_measure,alpha,e_psi,e_y,obs_valid"
)

# Fail-safe on lost detection: hold the last valid observation this long,
# then command a stop until the marker is reacquired.
OBSERVATION_HOLD_TIMEOUT = 0.5

# Internal gains of the lead's lane-change reference tracker.
_LANE_TRACK_KY = 1.0
_LANE_TRACK_EPS = 0.05


@dataclass(frozen=True)
class TraceRecord:
    """One vehicle's logged signals at one controller tick."""

    t: float
    vehicle_id: str
    x: float
    y: float
    psi: float
    v_actual: float
    vx_cmd: float
    delta_cmd: float
    vx_hat: float
    vy_hat: float
    omega_hat: float
    d_measure: float
    alpha: float
    e_psi: float
    e_y: float
    obs_valid: bool


@dataclass
class TraceLog:
    """Scenario snapshot plus the time-ordered per-tick records."""

    scenario: ScenarioSpec
    records: list[TraceRecord]

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        lines = [TRACE_HEADER]
        for r in self.records:
            lines.append(
                ",".join(
                    (
                        _fmt(r.t),
                        r.vehicle_id,
                        _fmt(r.x),
                        _fmt(r.y),
                        _fmt(r.psi),
                        _fmt(r.v_actual),
                        _fmt(r.vx_cmd),
                        _fmt(r.delta_cmd),
                        _fmt(r.vx_hat),
                        _fmt(r.vy_hat),
                        _fmt(r.omega_hat),
                        _fmt(r.d_measure),
                        _fmt(r.alpha),
                        _fmt(r.e_psi),
                        _fmt(r.e_y),
                        "1" if r.obs_valid else "0",
                    )
                )
            )
        path.write_text("\n".join(lines) + "\n")

    @staticmethod
    def read_csv(path: str | Path, scenario: ScenarioSpec) -> "TraceLog":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0] != TRACE_HEADER:
            raise ValueError(f"{path} is not a platoon trace (unexpected header)")
        records = []
        for line in lines[1:]:
            f = line.split(",")
            records.append(
                TraceRecord(
                    t=float(f[0]),
                    vehicle_id=f[1],
                    x=float(f[2]),
                    y=float(f[3]),
                    psi=float(f[4]),
                    v_actual=float(f[5]),
                    vx_cmd=float(f[6]),
                    delta_cmd=float(f[7]),
                    vx_hat=float(f[8]),
                    vy_hat=float(f[9]),
                    omega_hat=float(f[10]),
                    d_measure=float(f[11]),
                    alpha=float(f[12]),
                    e_psi=float(f[13]),
                    e_y=float(f[14]),
                    obs_valid=f[15] == "1",
                )
            )
        return TraceLog(scenario=scenario, records=records)


def _fmt(value: float) -> str:
    return format(value, ".9g")


def lane_change_reference(maneuver: ManeuverSpec, s: float) -> tuple[float, float]:
    """Reference lateral position and path slope at traveled distance ``s``.

    The lateral profile is a smoothstep from 0 to the lane offset over
    ``length`` meters of travel, starting at ``start_x``.
    """
    u = clamp((s - maneuver.start_x) / maneuver.length, 0.0, 1.0)
    y_ref = maneuver.lateral_offset * u * u * (3.0 - 2.0 * u)
    slope = 6.0 * maneuver.lateral_offset * u * (1.0 - u) / maneuver.length
    return y_ref, slope


def lead_command(
    t: float,
    maneuver: ManeuverSpec,
    lead_state: VehicleState,
    s_traveled: float = 0.0,
    operator_cmd: ChassisCommand | None = None,
    max_steer: float = 0.5,
) -> ChassisCommand:
    """Lead vehicle guidance for the scripted maneuvers and teleop.

    Cruise speed is commanded throughout. The lane change steers with a
    fixed-gain heading-plus-crosstrack law against the moving smoothstep
    reference, so yaw and lateral-velocity transients are shaped by the
    closed loop rather than scripted.
    """
    if maneuver.kind == TELEOP:
        return operator_cmd if operator_cmd is not None else ChassisCommand(0.0, 0.0)
    if maneuver.kind == STRAIGHT_CRUISE:
        return ChassisCommand(maneuver.cruise_speed, 0.0)

    y_ref, slope = lane_change_reference(maneuver, s_traveled)
    heading_ref = math.atan(slope)
    e_psi = wrap_angle(heading_ref - lead_state.psi)
    e_y = y_ref - lead_state.y
    delta = e_psi + math.atan(
        _LANE_TRACK_KY * e_y / (abs(lead_state.v_actual) + _LANE_TRACK_EPS)
    )
    return ChassisCommand(maneuver.cruise_speed, clamp(delta, -max_steer, max_steer))


class _FollowerChannel:
    """Per-follower sensor sampling, hold/fail-safe policy, and PID memory."""

    def __init__(self, spec: ScenarioSpec, initial_speed: float, rng: np.random.Generator):
        self.rng = rng
        self.sample_every = max(1, round(spec.controller_rate / spec.camera.rate))
        # Bumpless start: preload the integral so the initial PID output
        # matches the vehicle's initial speed.
        preload = initial_speed / spec.pid.ki if spec.pid.ki > 0 else 0.0
        preload = clamp(preload, -spec.pid.integral_limit, spec.pid.integral_limit)
        self.pid = PidState(integral=preload)
        self.held: RelativeObservation | None = None
        self.current_valid = False
        self.stopped = False
        self.last_cmd = ChassisCommand(0.0, 0.0)


class PlatoonWorld:
    """Mutable simulation state for one scenario run."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.states: list[VehicleState] = [
            VehicleState(x=v.x, y=v.y, psi=v.psi, v_actual=v.v, delta_actual=0.0)
            for v in spec.vehicles
        ]
        self.odometers = [0.0] * len(spec.vehicles)
        self.tick_index = 0
        self.operator_held = ChassisCommand(0.0, 0.0)
        seeds = np.random.SeedSequence(spec.seed).spawn(len(spec.vehicles) - 1)
        self.channels = [
            _FollowerChannel(spec, spec.vehicles[i + 1].v, np.random.default_rng(seeds[i]))
            for i in range(len(spec.vehicles) - 1)
        ]

    @property
    def t(self) -> float:
        """Simulation time of the next tick to execute."""
        return self.tick_index / self.spec.controller_rate

    def tick(self, operator_cmd: ChassisCommand | None = None) -> list[TraceRecord]:
        """Advance one controller period and return this tick's records."""
        spec = self.spec
        t = self.tick_index / spec.controller_rate
        tick_dt = 1.0 / spec.controller_rate
        if operator_cmd is not None:
            self.operator_held = operator_cmd

        records: list[TraceRecord] = []
        commands: list[ChassisCommand] = []

        lead_setup = spec.vehicles[0]
        lead_state = self.states[0]
        lead_act = inverse_ackermann(
            ChassisCommand(lead_state.v_actual, lead_state.delta_actual), lead_setup.geometry
        )
        lead_est = estimate_lead_motion(
            lead_act.v_left_obj, lead_act.v_right_obj, lead_act.delta_left_obj, lead_setup.geometry
        )
        cmd = lead_command(
            t,
            spec.maneuver,
            lead_state,
            s_traveled=self.odometers[0],
            operator_cmd=self.operator_held,
            max_steer=lead_setup.geometry.max_steer,
        )
        commands.append(cmd)
        records.append(
            TraceRecord(
                t=t,
                vehicle_id=lead_setup.vehicle_id,
                x=lead_state.x,
                y=lead_state.y,
                psi=lead_state.psi,
                v_actual=lead_state.v_actual,
                vx_cmd=cmd.vx_obj,
                delta_cmd=cmd.delta_obj,
                vx_hat=lead_est.vx_hat,
                vy_hat=lead_est.vy_hat,
                omega_hat=lead_est.omega_hat,
                d_measure=math.nan,
                alpha=math.nan,
                e_psi=math.nan,
                e_y=math.nan,
                obs_valid=False,
            )
        )

        for i in range(1, len(spec.vehicles)):
            setup = spec.vehicles[i]
            state = self.states[i]
            ch = self.channels[i - 1]

            ws = inverse_diff_steer(
                ChassisCommand(state.v_actual, ch.last_cmd.delta_obj), setup.geometry
            )
            est = estimate_follower_motion(ws, setup.geometry)

            if self.tick_index % ch.sample_every == 0:
                sample = observe(state, self.states[i - 1], spec.camera, t, ch.rng)
                ch.current_valid = sample.valid
                if sample.valid:
                    ch.held = sample

            lost = ch.held is None or (t - ch.held.stamp) > OBSERVATION_HOLD_TIMEOUT
            if lost:
                ch.stopped = True
                cmd = ChassisCommand(0.0, 0.0)
            else:
                if ch.stopped:
                    # Reacquired: restart the derivative history, keep the
                    # integral so the cruise bias survives the outage.
                    ch.pid = replace(ch.pid, initialized=False)
                    ch.stopped = False
                ch.pid, vx_cmd = pid_step(ch.pid, spec.pid, ch.held.d_measure, spec.d_goal, tick_dt)
                err = LateralErrors(
                    alpha=ch.held.alpha, e_psi=ch.held.e_psi, e_y=ch.held.e_y, v_xf=est.vx_hat
                )
                if spec.lateral_controller == PURE_PURSUIT:
                    delta_cmd = pure_pursuit_steer(
                        err, spec.pure_pursuit, setup.geometry, ch.held.d_measure
                    )
                else:
                    delta_cmd = stanley_steer(err, spec.stanley, setup.geometry)
                cmd = ChassisCommand(vx_cmd, delta_cmd)
            ch.last_cmd = cmd
            commands.append(cmd)

            held = ch.held
            records.append(
                TraceRecord(
                    t=t,
                    vehicle_id=setup.vehicle_id,
                    x=state.x,
                    y=state.y,
                    psi=state.psi,
                    v_actual=state.v_actual,
                    vx_cmd=cmd.vx_obj,
                    delta_cmd=cmd.delta_obj,
                    vx_hat=est.vx_hat,
                    vy_hat=est.vy_hat,
                    omega_hat=est.omega_hat,
                    d_measure=held.d_measure if held else math.nan,
                    alpha=held.alpha if held else math.nan,
                    e_psi=held.e_psi if held else math.nan,
                    e_y=held.e_y if held else math.nan,
                    obs_valid=ch.current_valid,
                )
            )

        n_sub = spec.substeps_per_tick
        for i, setup in enumerate(spec.vehicles):
            state = self.states[i]
            for _ in range(n_sub):
                self.odometers[i] += abs(state.v_actual) * spec.plant_dt
                state = step_plant(
                    state, commands[i], setup.geometry, spec.plant_dt, spec.tau_v, spec.tau_delta
                )
            self.states[i] = state

        self.tick_index += 1
        return records


def run_scenario(spec: ScenarioSpec) -> TraceLog:
    """Run the scenario start to finish and return the full trace."""
    world = PlatoonWorld(spec)
    last_tick = int(math.floor(spec.duration * spec.controller_rate + 1e-9))
    records: list[TraceRecord] = []
    for _ in range(last_tick + 1):
        records.extend(world.tick())
    return TraceLog(scenario=spec, records=records)


def step_realtime(world: PlatoonWorld, operator_cmd: ChassisCommand | None = None) -> dict:
    """Advance one tick under teleop and return the broadcast state snapshot."""
    records = world.tick(operator_cmd)
    vehicles = []
    for i, r in enumerate(records):
        entry: dict = {
            "id": r.vehicle_id,
            "x": r.x,
            "y": r.y,
            "psi": r.psi,
            "v": r.v_actual,
            "delta": r.delta_cmd,
        }
        if i > 0:
            if math.isfinite(r.d_measure):
                entry["d_measure"] = r.d_measure
            entry["obs_valid"] = r.obs_valid
        vehicles.append(entry)
    return {"type": "state", "t": records[0].t, "vehicles": vehicles}
