"""Longitudinal PID spacing control and the two geometric lateral steering laws.

The PID regulates measured inter-vehicle distance toward the desired spacing.
Pure Pursuit steers along the circular arc that carries the rear axle to the
target; Stanley combines heading alignment with a speed-scaled crosstrack
correction. Controllers are pure: each step takes explicit state and returns
the updated state together with the output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .vehicle import VehicleGeometry, clamp, wrap_angle


@dataclass(frozen=True)
class PidConfig:
    kp: float = 1.5
    ki: float = 0.3
    kd: float = 0.0
    v_min: float = 0.0
    v_max: float = 0.5
    integral_limit: float = 1.0

    def __post_init__(self) -> None:
        if not self.v_min <= self.v_max:
            raise ValueError("v_min must not exceed v_max")
        if not self.integral_limit > 0:
            raise ValueError("integral_limit must be positive")


@dataclass(frozen=True)
class PidState:
    """Discrete PID memory: accumulated integral and the previous error sample.

    ``last_output`` is replayed when a step receives non-finite input, in
    which case ``fault`` is raised on the returned state.
    """

    integral: float = 0.0
    prev_error: float = 0.0
    initialized: bool = False
    last_output: float = 0.0
    fault: bool = False


@dataclass(frozen=True)
class PurePursuitConfig:
    """Lookahead selection for Pure Pursuit.

    ``mode`` is either "fixed" (constant ``lookahead`` meters) or
    "speed_scaled" (``lookahead_gain`` seconds times the follower speed,
    floored at ``min_lookahead``).
    """

    mode: str = "fixed"
    lookahead: float = 0.3
    lookahead_gain: float = 1.5
    min_lookahead: float = 0.05

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "speed_scaled"):
            raise ValueError(f"unknown lookahead mode {self.mode!r}")
        if self.mode == "fixed" and not self.lookahead > 0:
            raise ValueError("fixed lookahead must be positive")
        if self.mode == "speed_scaled" and not self.lookahead_gain > 0:
            raise ValueError("lookahead_gain must be positive")
        if not self.min_lookahead > 0:
            raise ValueError("min_lookahead must be positive")


@dataclass(frozen=True)
class StanleyConfig:
    ky: float = 0.4
    eps_v: float = 0.001

    def __post_init__(self) -> None:
        if not self.ky > 0:
            raise ValueError("ky must be positive")
        if self.eps_v == 0:
            raise ValueError("eps_v must be nonzero")


@dataclass(frozen=True)
class LongitudinalError:
    """Signed spacing error: measured distance minus desired distance."""

    e_x: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.e_x):
            raise ValueError("spacing error must be finite")


@dataclass(frozen=True)
class LateralErrors:
    """Lateral feedback bundle: LOS angle, heading error, crosstrack, own speed."""

    alpha: float
    e_psi: float
    e_y: float
    v_xf: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", wrap_angle(self.alpha))
        object.__setattr__(self, "e_psi", wrap_angle(self.e_psi))


def pid_step(
    st: PidState,
    cfg: PidConfig,
    d_measure: float,
    d_goal: float,
    dt: float,
) -> tuple[PidState, float]:
    """One PID update on the spacing error, returning (new state, desired speed).

    The integral accumulates rectangularly and is clamped to
    ``integral_limit``; the derivative is a backward difference, 0 on the
    first call. Output is clamped to [v_min, v_max]. Non-finite input holds
    the previous output and flags a fault instead of corrupting the state.
    """
    if not (math.isfinite(d_measure) and math.isfinite(d_goal) and math.isfinite(dt) and dt > 0):
        return replace(st, fault=True), st.last_output

    err = LongitudinalError(e_x=d_measure - d_goal)
    integral = clamp(st.integral + err.e_x * dt, -cfg.integral_limit, cfg.integral_limit)
    derivative = (err.e_x - st.prev_error) / dt if st.initialized else 0.0
    raw = cfg.kp * err.e_x + cfg.ki * integral + cfg.kd * derivative
    v_des = clamp(raw, cfg.v_min, cfg.v_max)
    new_state = PidState(
        integral=integral,
        prev_error=err.e_x,
        initialized=True,
        last_output=v_des,
        fault=False,
    )
    return new_state, v_des


def resolve_lookahead(v_xf: float, cfg: PurePursuitConfig) -> float:
    """Lookahead distance for the current follower speed."""
    if cfg.mode == "fixed":
        return cfg.lookahead
    return max(cfg.lookahead_gain * v_xf, cfg.min_lookahead)


def pure_pursuit_steer(
    err: LateralErrors,
    cfg: PurePursuitConfig,
    geom: VehicleGeometry,
    d_measure: float | None = None,
) -> float:
    """Pure Pursuit steering angle atan(2 L sin(alpha) / l_d), clamped to max_steer.

    ``d_measure`` is accepted alongside the error bundle for callers that key
    the lookahead on the sensed distance; the shipped modes do not consume it.
    """
    l_d = resolve_lookahead(err.v_xf, cfg)
    delta = math.atan(2.0 * geom.wheelbase * math.sin(err.alpha) / l_d)
    return clamp(delta, -geom.max_steer, geom.max_steer)


def stanley_steer(err: LateralErrors, cfg: StanleyConfig, geom: VehicleGeometry) -> float:
    """Stanley steering: heading error plus speed-attenuated crosstrack term.

    The regularization constant takes the sign of the crosstrack error
    (+|eps_v| for left correction, -|eps_v| for right), keeping the
    denominator away from zero for the active correction direction.
    """
    eps = abs(cfg.eps_v) if err.e_y >= 0 else -abs(cfg.eps_v)
    delta = err.e_psi + math.atan(cfg.ky * err.e_y / (err.v_xf + eps))
    return clamp(delta, -geom.max_steer, geom.max_steer)
