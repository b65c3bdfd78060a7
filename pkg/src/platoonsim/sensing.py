"""Marker-based relative-pose sensor model and a body-frame IMU model.

The camera model turns ground-truth states into the range- and FOV-limited
observation a follower's front camera would deliver when detecting the marker
on its predecessor's rear: distance, line-of-sight angle, relative heading,
and the lateral (crosstrack) component, with optional Gaussian noise and
Bernoulli dropout. Invalid sight lines produce an observation with
``valid=False`` rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .vehicle import VehicleGeometry, VehicleState, wrap_angle

GRAVITY = 9.81


@dataclass(frozen=True)
class CameraModel:
    """Field of view, usable range, sample rate, and noise of the front camera."""

    hfov: float = math.radians(63.1)
    range_min: float = 0.2
    range_max: float = 2.5
    rate: float = 30.0
    noise_sigma_pos: float = 0.005
    noise_sigma_ang: float = 0.01
    dropout_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.hfov < math.pi:
            raise ValueError("hfov must lie in (0, pi)")
        if not 0 < self.range_min < self.range_max:
            raise ValueError("require 0 < range_min < range_max")
        if not self.rate > 0:
            raise ValueError("rate must be positive")
        if self.noise_sigma_pos < 0 or self.noise_sigma_ang < 0:
            raise ValueError("noise sigmas must be non-negative")
        if not 0 <= self.dropout_prob < 1:
            raise ValueError("dropout_prob must lie in [0, 1)")


@dataclass(frozen=True)
class RelativeObservation:
    """One camera sample of the predecessor, in the follower body frame."""

    d_measure: float
    alpha: float
    e_psi: float
    e_y: float
    stamp: float
    valid: bool


@dataclass(frozen=True)
class ImuSample:
    """Six-axis IMU reading for a planar vehicle (gravity on the z axis)."""

    ax_hat: float
    ay_hat: float
    az_hat: float
    omega_hat: float
    roll_rate_hat: float = 0.0
    pitch_rate_hat: float = 0.0


def observe(
    self_state: VehicleState,
    predecessor: VehicleState,
    cam: CameraModel,
    t: float,
    rng: np.random.Generator,
) -> RelativeObservation:
    """Observe the predecessor's rear-axle marker from the follower's frame.

    The true relative vector is rotated into the follower body frame; noise
    (when configured) perturbs distance and angles, and the crosstrack
    component is re-derived from the noisy polar pair. Validity requires the
    *true* geometry to lie within range and half-FOV (noise can never rescue
    an out-of-gate target), the noisy values to remain within the gates, and
    the dropout draw to pass.
    """
    dx = predecessor.x - self_state.x
    dy = predecessor.y - self_state.y
    cos_psi = math.cos(self_state.psi)
    sin_psi = math.sin(self_state.psi)
    longitudinal = cos_psi * dx + sin_psi * dy
    lateral = -sin_psi * dx + cos_psi * dy

    d_true = math.hypot(longitudinal, lateral)
    alpha_true = math.atan2(lateral, longitudinal)
    e_psi_true = wrap_angle(predecessor.psi - self_state.psi)

    half_fov = cam.hfov / 2.0
    geometry_ok = cam.range_min <= d_true <= cam.range_max and abs(alpha_true) <= half_fov

    d = d_true
    alpha = alpha_true
    e_psi = e_psi_true
    if cam.noise_sigma_pos > 0.0:
        d = d_true + cam.noise_sigma_pos * rng.standard_normal()
    if cam.noise_sigma_ang > 0.0:
        alpha = wrap_angle(alpha_true + cam.noise_sigma_ang * rng.standard_normal())
        e_psi = wrap_angle(e_psi_true + cam.noise_sigma_ang * rng.standard_normal())
    e_y = d * math.sin(alpha)

    dropped = cam.dropout_prob > 0.0 and rng.random() < cam.dropout_prob
    noisy_ok = cam.range_min <= d <= cam.range_max and abs(alpha) <= half_fov
    valid = geometry_ok and noisy_ok and not dropped

    return RelativeObservation(
        d_measure=d, alpha=alpha, e_psi=e_psi, e_y=e_y, stamp=t, valid=valid
    )


def simulate_imu(
    state: VehicleState,
    v_dot: float,
    geom: VehicleGeometry,
    rng: np.random.Generator | None = None,
    accel_sigma: float = 0.0,
    gyro_sigma: float = 0.0,
) -> ImuSample:
    """Ideal planar IMU: longitudinal accel, centripetal accel, yaw rate, gravity."""
    omega = state.v_actual * math.tan(state.delta_actual) / geom.wheelbase
    ax = v_dot
    ay = state.v_actual * omega
    if rng is not None and (accel_sigma > 0.0 or gyro_sigma > 0.0):
        ax += accel_sigma * rng.standard_normal()
        ay += accel_sigma * rng.standard_normal()
        omega += gyro_sigma * rng.standard_normal()
    return ImuSample(
        ax_hat=ax,
        ay_hat=ay,
        az_hat=GRAVITY,
        omega_hat=omega,
        roll_rate_hat=0.0,
        pitch_rate_hat=0.0,
    )
