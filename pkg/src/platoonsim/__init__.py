"""Deterministic multi-vehicle platooning simulator and control library."""

from .control import (
    LateralErrors,
    LongitudinalError,
    PidConfig,
    PidState,
    PurePursuitConfig,
    StanleyConfig,
    pid_step,
    pure_pursuit_steer,
    resolve_lookahead,
    stanley_steer,
)
from .engine import PlatoonWorld, TraceLog, TraceRecord, lead_command, run_scenario, step_realtime
from .metrics import (
    DegenerateTrace,
    MetricsReport,
    MismatchedVehicles,
    compare_runs,
    compute_metrics,
    export_csv,
)
from .scenario import (
    ManeuverSpec,
    ParseError,
    ScenarioSpec,
    ValidationError,
    VehicleSetup,
    builtin_scenarios,
    find_scenario,
    load_scenario,
)
from .sensing import CameraModel, ImuSample, RelativeObservation, observe, simulate_imu
from .vehicle import (
    AckermannActuation,
    ChassisCommand,
    ChassisKind,
    DegenerateGeometry,
    EstimatedMotion,
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
)

__version__ = "0.1.0"
