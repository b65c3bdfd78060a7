"""Kinematics, estimation, and plant tests against hand-evaluated oracles."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from platoonsim.vehicle import (
    ChassisCommand,
    ChassisKind,
    DegenerateGeometry,
    InvalidCommand,
    VehicleGeometry,
    VehicleState,
    WheelSpeeds4,
    ackermann_right_steer,
    estimate_follower_motion,
    estimate_lead_motion,
    inverse_ackermann,
    inverse_diff_steer,
    step_plant,
    wrap_angle,
)

LEAD = VehicleGeometry(chassis_kind=ChassisKind.ACKERMANN_LEAD)
FOLLOWER = VehicleGeometry(chassis_kind=ChassisKind.DIFFERENTIAL_FOLLOWER)

speeds = st.floats(min_value=0.0, max_value=0.5, allow_nan=False)
steers = st.floats(min_value=-0.4, max_value=0.4, allow_nan=False)


def test_wrap_angle_range():
    for a in (-10.0, -math.pi, -1.0, 0.0, 1.0, math.pi, 10.0, 123.456):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(0.0) == 0.0


class TestInverseAckermann:
    def test_zero_steer_identity(self):
        act = inverse_ackermann(ChassisCommand(0.2, 0.0), LEAD)
        assert act.v_left_obj == act.v_right_obj == 0.2
        assert act.delta_left_obj == 0.0

    def test_hand_evaluation(self):
        # vx=0.2, delta=0.2, L=0.30, W=0.25: tan(0.2)=0.2027100355,
        # split = W/(2L)*tan = 0.0844625, delta_l = atan(2L tan/(2L - W tan)).
        act = inverse_ackermann(ChassisCommand(0.2, 0.2), LEAD)
        assert act.v_left_obj == pytest.approx(0.18310749704094398, abs=1e-12)
        assert act.v_right_obj == pytest.approx(0.21689250295905604, abs=1e-12)
        assert act.delta_left_obj == pytest.approx(0.21789573009092256, abs=1e-12)

    def test_zero_speed_zeroes_wheels(self):
        act = inverse_ackermann(ChassisCommand(0.0, 0.3), LEAD)
        assert act.v_left_obj == 0.0
        assert act.v_right_obj == 0.0
        assert act.delta_left_obj == pytest.approx(
            math.atan(2 * 0.30 * math.tan(0.3) / (2 * 0.30 - 0.25 * math.tan(0.3)))
        )

    def test_degenerate_denominator(self):
        # A steer far past max_steer (pre-condition violation) reaches the
        # singular denominator of the front-left wheel formula.
        with pytest.raises(DegenerateGeometry):
            inverse_ackermann(ChassisCommand(0.2, 1.3), LEAD)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidCommand):
            inverse_ackermann(ChassisCommand(math.nan, 0.0), LEAD)

    def test_wrong_chassis(self):
        with pytest.raises(ValueError):
            inverse_ackermann(ChassisCommand(0.2, 0.0), FOLLOWER)


class TestAckermannRightSteer:
    def test_cot_two(self):
        # cot(d_l) = 2 -> cot(d_r) = 2 + W/L = 2.8333..., d_r = atan(1/2.8333)
        d_l = math.atan(0.5)
        assert ackermann_right_steer(d_l, LEAD) == pytest.approx(0.3392926144540446, abs=1e-12)

    def test_zero_is_zero(self):
        assert ackermann_right_steer(0.0, LEAD) == 0.0

    def test_round_trip_condition(self):
        act = inverse_ackermann(ChassisCommand(0.2, 0.2), LEAD)
        d_r = ackermann_right_steer(act.delta_left_obj, LEAD)
        residual = 1 / math.tan(d_r) - 1 / math.tan(act.delta_left_obj) - 0.25 / 0.30
        assert abs(residual) < 1e-12

    @given(st.floats(min_value=0.05, max_value=0.6))
    def test_condition_residual(self, d_l):
        d_r = ackermann_right_steer(d_l, LEAD)
        assert abs(1 / math.tan(d_r) - 1 / math.tan(d_l) - 0.25 / 0.30) < 1e-9

    @given(st.floats(min_value=0.01, max_value=0.6))
    def test_sign_preserved(self, d_l):
        assert ackermann_right_steer(d_l, LEAD) > 0
        assert ackermann_right_steer(-d_l, LEAD) < 0

    def test_mirror_pairs_with_eq3(self):
        # Left wheel on a right turn mirrors the right wheel on a left turn.
        for delta in (0.1, 0.2, 0.35):
            left = inverse_ackermann(ChassisCommand(0.2, delta), LEAD).delta_left_obj
            mirrored = inverse_ackermann(ChassisCommand(0.2, -delta), LEAD).delta_left_obj
            assert mirrored == pytest.approx(-ackermann_right_steer(left, LEAD), abs=1e-12)


class TestLeadEstimation:
    def test_straight(self):
        est = estimate_lead_motion(0.2, 0.2, 0.0, LEAD)
        assert (est.vx_hat, est.vy_hat, est.omega_hat) == (0.2, 0.0, 0.0)

    def test_round_trip_from_actuation(self):
        act = inverse_ackermann(ChassisCommand(0.2, 0.2), LEAD)
        est = estimate_lead_motion(act.v_left_obj, act.v_right_obj, act.delta_left_obj, LEAD)
        assert est.vx_hat == pytest.approx(0.2, abs=1e-12)
        assert est.omega_hat == pytest.approx(0.2 * math.tan(0.2) / 0.30, abs=1e-9)
        cot = 1 / math.tan(act.delta_left_obj)
        assert est.vy_hat == pytest.approx(0.15 / (0.30 * cot + 0.125) * 0.2, abs=1e-12)

    def test_yaw_rate_from_differential(self):
        est = estimate_lead_motion(0.1, 0.3, 0.1, LEAD)
        assert est.omega_hat == pytest.approx(0.8, abs=1e-12)

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidCommand):
            estimate_lead_motion(math.inf, 0.2, 0.0, LEAD)


class TestInverseDiffSteer:
    def test_straight(self):
        ws = inverse_diff_steer(ChassisCommand(0.2, 0.0), FOLLOWER)
        assert ws == WheelSpeeds4(0.2, 0.2, 0.2, 0.2)

    def test_hand_evaluation(self):
        ws = inverse_diff_steer(ChassisCommand(0.2, 0.2), FOLLOWER)
        assert ws.v1 == ws.v2 == pytest.approx(0.18310749704094398, abs=1e-12)
        assert ws.v3 == ws.v4 == pytest.approx(0.21689250295905604, abs=1e-12)

    def test_zero_speed(self):
        ws = inverse_diff_steer(ChassisCommand(0.0, 0.3), FOLLOWER)
        assert ws == WheelSpeeds4(0.0, 0.0, 0.0, 0.0)

    def test_steer_clamped(self):
        clamped = inverse_diff_steer(ChassisCommand(0.2, 2.0), FOLLOWER)
        at_limit = inverse_diff_steer(ChassisCommand(0.2, FOLLOWER.max_steer), FOLLOWER)
        assert clamped == at_limit

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidCommand):
            inverse_diff_steer(ChassisCommand(0.2, math.nan), FOLLOWER)


class TestFollowerEstimation:
    def test_straight(self):
        est = estimate_follower_motion(WheelSpeeds4(0.2, 0.2, 0.2, 0.2), FOLLOWER)
        assert (est.vx_hat, est.vy_hat, est.omega_hat) == (0.2, 0.0, 0.0)

    def test_direct_arithmetic(self):
        # (-0.1-0.1+0.3+0.3)/(2*0.25) = 0.8
        est = estimate_follower_motion(WheelSpeeds4(0.1, 0.1, 0.3, 0.3), FOLLOWER)
        assert est.vx_hat == pytest.approx(0.2, abs=1e-15)
        assert est.vy_hat == 0.0
        assert est.omega_hat == pytest.approx(0.8, abs=1e-12)

    def test_round_trip_from_split(self):
        ws = inverse_diff_steer(ChassisCommand(0.2, 0.2), FOLLOWER)
        est = estimate_follower_motion(ws, FOLLOWER)
        assert est.vx_hat == pytest.approx(0.2, abs=1e-12)
        assert est.omega_hat == pytest.approx(0.2 * math.tan(0.2) / 0.30, abs=1e-12)


@given(speeds, steers)
def test_follower_round_trip_property(v, delta):
    ws = inverse_diff_steer(ChassisCommand(v, delta), FOLLOWER)
    est = estimate_follower_motion(ws, FOLLOWER)
    assert abs(est.vx_hat - v) < 1e-9
    assert abs(est.omega_hat - v * math.tan(delta) / FOLLOWER.wheelbase) < 1e-9
    assert est.vy_hat == 0.0


@given(speeds, steers)
def test_lead_round_trip_property(v, delta):
    act = inverse_ackermann(ChassisCommand(v, delta), LEAD)
    est = estimate_lead_motion(act.v_left_obj, act.v_right_obj, act.delta_left_obj, LEAD)
    assert abs(est.vx_hat - v) < 1e-9
    assert abs(est.omega_hat - v * math.tan(delta) / LEAD.wheelbase) < 1e-9


@given(speeds, st.floats(min_value=0.0, max_value=0.4, allow_nan=False))
def test_mirror_symmetry(v, delta):
    left = inverse_diff_steer(ChassisCommand(v, delta), FOLLOWER)
    right = inverse_diff_steer(ChassisCommand(v, -delta), FOLLOWER)
    assert right.v1 == left.v3 and right.v2 == left.v4
    assert right.v3 == left.v1 and right.v4 == left.v2

    act_l = inverse_ackermann(ChassisCommand(v, delta), LEAD)
    act_r = inverse_ackermann(ChassisCommand(v, -delta), LEAD)
    assert act_r.v_left_obj == act_l.v_right_obj
    assert act_r.v_right_obj == act_l.v_left_obj


class TestStepPlant:
    def test_at_rest_unchanged(self):
        state = VehicleState(1.0, 2.0, 0.3, 0.0, 0.0)
        out = step_plant(state, ChassisCommand(0.0, 0.0), LEAD, 0.01)
        assert out == state

    def test_straight_advance(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.2, 0.0)
        out = step_plant(state, ChassisCommand(0.2, 0.0), LEAD, 0.01, tau_v=0.0, tau_delta=0.0)
        assert out.x == pytest.approx(0.002, abs=1e-15)
        assert out.y == 0.0
        assert out.psi == 0.0

    def test_yaw_euler_step(self):
        # psi advances by v*tan(delta)/L*dt = 0.2*tan(0.2)/0.30*0.01
        state = VehicleState(0.0, 0.0, 0.0, 0.2, 0.2)
        out = step_plant(state, ChassisCommand(0.2, 0.2), LEAD, 0.01)
        assert out.psi == pytest.approx(0.0013514002367244835, abs=1e-15)

    def test_follower_realizes_steer_instantly(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.2, 0.0)
        out = step_plant(state, ChassisCommand(0.2, 0.2), FOLLOWER, 0.01)
        assert out.psi == pytest.approx(0.0013514002367244835, abs=1e-15)
        assert out.delta_actual == 0.0

    def test_zero_steer_preserves_y_psi(self):
        state = VehicleState(0.0, 0.5, 0.0, 0.3, 0.0)
        for _ in range(100):
            state = step_plant(state, ChassisCommand(0.3, 0.0), LEAD, 0.01)
        assert state.y == 0.5
        assert state.psi == 0.0

    def test_commands_clamped_to_limits(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.0, 0.0)
        out = state
        for _ in range(3000):
            out = step_plant(out, ChassisCommand(5.0, 2.0), LEAD, 0.01)
        assert out.v_actual <= LEAD.max_speed + 1e-12
        assert abs(out.delta_actual) <= LEAD.max_steer + 1e-12

    def test_dt_out_of_range(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            step_plant(state, ChassisCommand(0.0, 0.0), LEAD, 0.2)
        with pytest.raises(ValueError):
            step_plant(state, ChassisCommand(0.0, 0.0), LEAD, 0.0)

    @pytest.mark.parametrize("geom", [LEAD, FOLLOWER], ids=["lead", "follower"])
    def test_circle_closure(self, geom):
        """A full turn at constant v, delta returns near the start point."""
        v, delta, dt = 0.2, 0.2, 0.005
        period = 2 * math.pi * geom.wheelbase / (v * math.tan(delta))
        steps = int(round(period / dt))
        state = VehicleState(0.0, 0.0, 0.0, v, delta if geom is LEAD else 0.0)
        cmd = ChassisCommand(v, delta)
        for _ in range(steps):
            state = step_plant(state, cmd, geom, dt, tau_v=0.0, tau_delta=0.0)
        radius = geom.wheelbase / math.tan(delta)
        assert math.hypot(state.x, state.y) < 0.02 * radius

    def test_energy_free(self):
        state = VehicleState(0.0, 0.0, 0.0, 0.0, 0.0)
        traveled = 0.0
        for _ in range(1000):
            nxt = step_plant(state, ChassisCommand(0.0, 0.0), FOLLOWER, 0.01)
            traveled += math.hypot(nxt.x - state.x, nxt.y - state.y)
            state = nxt
        assert traveled == 0.0


class TestGeometryValidation:
    def test_defaults_valid(self):
        geom = VehicleGeometry()
        assert geom.wheelbase == 0.30
        assert geom.track_width == 0.25

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"wheelbase": 0.0},
            {"track_width": -1.0},
            {"rear_axle_to_cg": 0.5},
            {"max_steer": 0.0},
            {"max_steer": math.pi},
            {"max_speed": 0.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            VehicleGeometry(**kwargs)

    def test_ackermann_steer_limit_within_validity_domain(self):
        # tan(max_steer) * W must stay below 2L for a front-steered chassis.
        with pytest.raises(ValueError, match="validity limit"):
            VehicleGeometry(wheelbase=0.1, track_width=0.5, rear_axle_to_cg=0.05, max_steer=1.5)
        VehicleGeometry(
            wheelbase=0.1,
            track_width=0.5,
            rear_axle_to_cg=0.05,
            max_steer=1.5,
            chassis_kind=ChassisKind.DIFFERENTIAL_FOLLOWER,
        )

    def test_state_wraps_psi(self):
        assert VehicleState(0, 0, 3 * math.pi).psi == pytest.approx(math.pi)
