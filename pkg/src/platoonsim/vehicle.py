"""Vehicle geometry, inverse-kinematics actuation, odometry estimation, and the forward plant.

The lead vehicle is a front-steered Ackermann platform driven through its two
rear wheels; the followers are four-wheel differential platforms steered by a
left/right wheel-speed split that realizes an effective steering angle. All
functions here are pure: they take explicit state and return new values, so
they are safe to call from any thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ChassisKind(Enum):
    ACKERMANN_LEAD = "ackermann"
    DIFFERENTIAL_FOLLOWER = "differential"


class InvalidCommand(ValueError):
    """Raised when a command or measurement contains non-finite values."""


class DegenerateGeometry(ValueError):
    """Raised when a steering angle puts the kinematics outside its valid domain."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]. Values already in range pass through unchanged."""
    if -math.pi < angle <= math.pi:
        return angle
    a = angle % (2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    return a


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


@dataclass(frozen=True)
class VehicleGeometry:
    """Physical layout and actuation limits of one vehicle.

    Defaults describe the scaled indoor platform used throughout the test
    scenarios; every field can be overridden per vehicle in a scenario file.
    """

    wheelbase: float = 0.30
    track_width: float = 0.25
    rear_axle_to_cg: float = 0.15
    chassis_kind: ChassisKind = ChassisKind.ACKERMANN_LEAD
    max_steer: float = 0.5
    max_speed: float = 0.5

    def __post_init__(self) -> None:
        if not (self.wheelbase > 0 and self.track_width > 0):
            raise ValueError("wheelbase and track_width must be positive")
        if not (0 <= self.rear_axle_to_cg <= self.wheelbase):
            raise ValueError("rear_axle_to_cg must lie within [0, wheelbase]")
        if not (0 < self.max_steer < math.pi / 2):
            raise ValueError("max_steer must lie in (0, pi/2)")
        if not self.max_speed > 0:
            raise ValueError("max_speed must be positive")
        if (
            self.chassis_kind is ChassisKind.ACKERMANN_LEAD
            and math.tan(self.max_steer) * self.track_width >= 2.0 * self.wheelbase
        ):
            # Beyond this the front-left wheel angle is undefined (the nominal
            # turning center reaches the wheel itself).
            raise ValueError(
                "max_steer exceeds the Ackermann validity limit atan(2L/W) for this geometry"
            )


@dataclass(frozen=True)
class VehicleState:
    """Ground-truth planar pose and motion in the world frame.

    The position is the rear-axle center. ``delta_actual`` is the realized
    front steering angle; differential followers have no steerable wheels, so
    it is identically 0 for them.
    """

    x: float
    y: float
    psi: float
    v_actual: float = 0.0
    delta_actual: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", wrap_angle(self.psi))


@dataclass(frozen=True)
class ChassisCommand:
    """High-level command pair: objective longitudinal speed and steering angle."""

    vx_obj: float
    delta_obj: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.vx_obj) and math.isfinite(self.delta_obj)):
            raise InvalidCommand(f"non-finite command ({self.vx_obj}, {self.delta_obj})")


@dataclass(frozen=True)
class AckermannActuation:
    """Rear wheel-speed pair and front-left steer angle for the lead chassis."""

    v_left_obj: float
    v_right_obj: float
    delta_left_obj: float


@dataclass(frozen=True)
class WheelSpeeds4:
    """Per-wheel speeds, indexed left-front, left-rear, right-front, right-rear."""

    v1: float
    v2: float
    v3: float
    v4: float


@dataclass(frozen=True)
class EstimatedMotion:
    """Body-frame motion estimate recovered from wheel-speed measurements."""

    vx_hat: float
    vy_hat: float
    omega_hat: float


def inverse_ackermann(cmd: ChassisCommand, geom: VehicleGeometry) -> AckermannActuation:
    """Map a chassis command to rear wheel speeds and the front-left steer angle.

    The rear wheels split the longitudinal speed according to their turning
    radii, and the front-left wheel angle follows from intersecting its axis
    with the common turning center.

    Raises DegenerateGeometry when ``tan(delta)`` reaches ``2L/W``, where the
    front-left wheel angle is undefined.
    """
    if geom.chassis_kind is not ChassisKind.ACKERMANN_LEAD:
        raise ValueError("inverse_ackermann requires an Ackermann chassis")
    t = math.tan(cmd.delta_obj)
    half_split = geom.track_width / (2.0 * geom.wheelbase) * t
    denom = 2.0 * geom.wheelbase - geom.track_width * t
    if denom <= 0.0:
        raise DegenerateGeometry(
            f"steer angle {cmd.delta_obj:.4f} rad puts the front-left wheel axis "
            "parallel to the turning center"
        )
    return AckermannActuation(
        v_left_obj=cmd.vx_obj * (1.0 - half_split),
        v_right_obj=cmd.vx_obj * (1.0 + half_split),
        delta_left_obj=math.atan(2.0 * geom.wheelbase * t / denom),
    )


def ackermann_right_steer(delta_left: float, geom: VehicleGeometry) -> float:
    """Front-right wheel angle satisfying cot(d_r) - cot(d_l) = W/L.

    Returns 0 for ``delta_left == 0`` (straight wheels, by continuity).
    """
    if not math.isfinite(delta_left):
        raise InvalidCommand("non-finite steer angle")
    if delta_left == 0.0:
        return 0.0
    if abs(delta_left) >= math.pi / 2:
        raise DegenerateGeometry("left wheel angle must satisfy |delta_l| < pi/2")
    cot_right = 1.0 / math.tan(delta_left) + geom.track_width / geom.wheelbase
    if cot_right == 0.0 or math.copysign(1.0, cot_right) != math.copysign(1.0, delta_left):
        # Only possible for extreme right-turn angles where no same-sign
        # solution exists: the nominal turning center crosses the left wheel.
        raise DegenerateGeometry(
            f"no same-sign right-wheel angle exists for delta_left={delta_left:.4f}"
        )
    return math.atan(1.0 / cot_right)


def estimate_lead_motion(
    v_left_meas: float,
    v_right_meas: float,
    delta_left_meas: float,
    geom: VehicleGeometry,
) -> EstimatedMotion:
    """Estimate lead body motion from rear wheel speeds and the front-left angle.

    Longitudinal speed is the rear-wheel mean, the yaw rate comes from the
    wheel-speed differential across the track, and the lateral speed at the CG
    scales with the turning geometry (0 when the wheels are straight).
    """
    if geom.chassis_kind is not ChassisKind.ACKERMANN_LEAD:
        raise ValueError("estimate_lead_motion requires an Ackermann chassis")
    if not all(map(math.isfinite, (v_left_meas, v_right_meas, delta_left_meas))):
        raise InvalidCommand("non-finite wheel measurement")
    vx_hat = 0.5 * (v_left_meas + v_right_meas)
    omega_hat = (v_right_meas - v_left_meas) / geom.track_width
    if delta_left_meas == 0.0:
        vy_hat = 0.0
    else:
        denom = geom.wheelbase / math.tan(delta_left_meas) + geom.track_width / 2.0
        if denom == 0.0:
            raise DegenerateGeometry("turning center coincides with the CG projection")
        vy_hat = geom.rear_axle_to_cg / denom * vx_hat
    return EstimatedMotion(vx_hat=vx_hat, vy_hat=vy_hat, omega_hat=omega_hat)


def inverse_diff_steer(cmd: ChassisCommand, geom: VehicleGeometry) -> WheelSpeeds4:
    """Map a chassis command to four wheel speeds for a differential follower.

    The commanded steering angle is clamped to ``max_steer`` before the split;
    both wheels on a side share one speed.
    """
    if geom.chassis_kind is not ChassisKind.DIFFERENTIAL_FOLLOWER:
        raise ValueError("inverse_diff_steer requires a differential chassis")
    delta = clamp(cmd.delta_obj, -geom.max_steer, geom.max_steer)
    half_split = geom.track_width / (2.0 * geom.wheelbase) * math.tan(delta)
    left = cmd.vx_obj * (1.0 - half_split)
    right = cmd.vx_obj * (1.0 + half_split)
    return WheelSpeeds4(v1=left, v2=left, v3=right, v4=right)


def estimate_follower_motion(ws: WheelSpeeds4, geom: VehicleGeometry) -> EstimatedMotion:
    """Estimate follower body motion from the four measured wheel speeds."""
    if geom.chassis_kind is not ChassisKind.DIFFERENTIAL_FOLLOWER:
        raise ValueError("estimate_follower_motion requires a differential chassis")
    if not all(map(math.isfinite, (ws.v1, ws.v2, ws.v3, ws.v4))):
        raise InvalidCommand("non-finite wheel measurement")
    vx_hat = 0.25 * (ws.v1 + ws.v2 + ws.v3 + ws.v4)
    omega_hat = (-ws.v1 - ws.v2 + ws.v3 + ws.v4) / (2.0 * geom.track_width)
    return EstimatedMotion(vx_hat=vx_hat, vy_hat=0.0, omega_hat=omega_hat)


def step_plant(
    state: VehicleState,
    cmd: ChassisCommand,
    geom: VehicleGeometry,
    dt: float,
    tau_v: float = 0.4,
    tau_delta: float = 0.15,
) -> VehicleState:
    """Advance the kinematic plant by one explicit-Euler step of length ``dt``.

    Pose integrates the bicycle model x' = v cos(psi), y' = v sin(psi),
    psi' = v tan(delta)/L using the state at the start of the step. Speed and
    (for the lead) steering follow first-order lags toward the clamped
    command; a lag constant of 0 applies the command instantly. Followers
    realize the commanded steering angle immediately through their wheel-speed
    split, so only their speed is lagged.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt must lie in (0, 0.1], got {dt}")
    vx_obj = clamp(cmd.vx_obj, -geom.max_speed, geom.max_speed)
    delta_obj = clamp(cmd.delta_obj, -geom.max_steer, geom.max_steer)

    lead = geom.chassis_kind is ChassisKind.ACKERMANN_LEAD
    delta_eff = state.delta_actual if lead else delta_obj

    x = state.x + state.v_actual * math.cos(state.psi) * dt
    y = state.y + state.v_actual * math.sin(state.psi) * dt
    psi = wrap_angle(state.psi + state.v_actual * math.tan(delta_eff) / geom.wheelbase * dt)

    if tau_v > 0.0:
        v = vx_obj + (state.v_actual - vx_obj) * math.exp(-dt / tau_v)
    else:
        v = vx_obj
    if lead:
        if tau_delta > 0.0:
            delta = delta_obj + (state.delta_actual - delta_obj) * math.exp(-dt / tau_delta)
        else:
            delta = delta_obj
    else:
        delta = 0.0

    return VehicleState(x=x, y=y, psi=psi, v_actual=v, delta_actual=delta)
