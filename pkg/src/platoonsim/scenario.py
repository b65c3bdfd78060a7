"""Declarative scenario files: schema, defaults, and strict loading.

A scenario is a YAML document with five sections (``vehicles``,
``controllers``, ``camera``, ``maneuver``, ``sim``), every field optional and
defaulting to the reference three-vehicle lane-change experiment. Unknown keys
are rejected so that typos never silently fall back to defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from .control import PidConfig, PurePursuitConfig, StanleyConfig
from .sensing import CameraModel
from .vehicle import ChassisKind, VehicleGeometry

PURE_PURSUIT = "pure_pursuit"
STANLEY = "stanley"

LANE_CHANGE = "lane_change"
STRAIGHT_CRUISE = "straight_cruise"
TELEOP = "teleop"

# Reference platoon defaults: spacing 0.5 m, rolling start at cruise speed,
# and a lead heading offset whose correction wobble propagates down the
# platoon and reproduces the observed pre-maneuver follower transients.
DEFAULT_SPACING = 0.5
DEFAULT_CRUISE_SPEED = 0.2
DEFAULT_LEAD_HEADING_OFFSET = -0.45
DEFAULT_PLANT_DT = 1.0 / 180.0
DEFAULT_CONTROLLER_RATE = 30.0


class ParseError(ValueError):
    """The scenario document is not well-formed YAML (or not a mapping)."""


class ValidationError(ValueError):
    """The scenario document violates the schema or an invariant."""


@dataclass(frozen=True)
class VehicleSetup:
    vehicle_id: str
    geometry: VehicleGeometry
    x: float
    y: float
    psi: float
    v: float


@dataclass(frozen=True)
class ManeuverSpec:
    """Scripted lead behavior: steady cruise, a single lane change, or teleop."""

    kind: str = LANE_CHANGE
    cruise_speed: float = DEFAULT_CRUISE_SPEED
    start_x: float = 3.0
    lateral_offset: float = 0.9
    length: float = 3.5

    def __post_init__(self) -> None:
        if self.kind not in (LANE_CHANGE, STRAIGHT_CRUISE, TELEOP):
            raise ValidationError(f"unknown maneuver kind {self.kind!r}")
        if not math.isfinite(self.lateral_offset):
            raise ValidationError("lateral_offset must be finite")
        if not self.length > 0:
            raise ValidationError("maneuver length must be positive")
        if self.cruise_speed < 0:
            raise ValidationError("cruise_speed must be non-negative")


@dataclass(frozen=True)
class ScenarioSpec:
    vehicles: tuple[VehicleSetup, ...] = ()
    lateral_controller: str = PURE_PURSUIT
    pure_pursuit: PurePursuitConfig = field(default_factory=PurePursuitConfig)
    stanley: StanleyConfig = field(default_factory=StanleyConfig)
    pid: PidConfig = field(default_factory=PidConfig)
    d_goal: float = DEFAULT_SPACING
    camera: CameraModel = field(default_factory=CameraModel)
    maneuver: ManeuverSpec = field(default_factory=ManeuverSpec)
    duration: float = 45.0
    plant_dt: float = DEFAULT_PLANT_DT
    controller_rate: float = DEFAULT_CONTROLLER_RATE
    seed: int = 0
    tau_v: float = 0.4
    tau_delta: float = 0.15

    def __post_init__(self) -> None:
        if not self.vehicles:
            object.__setattr__(self, "vehicles", default_platoon())
        if len(self.vehicles) < 2:
            raise ValidationError("a scenario needs at least two vehicles")
        if self.vehicles[0].geometry.chassis_kind is not ChassisKind.ACKERMANN_LEAD:
            raise ValidationError("the first vehicle must be the Ackermann lead")
        for v in self.vehicles[1:]:
            if v.geometry.chassis_kind is not ChassisKind.DIFFERENTIAL_FOLLOWER:
                raise ValidationError(f"vehicle {v.vehicle_id!r} must be a differential follower")
        ids = [v.vehicle_id for v in self.vehicles]
        if len(set(ids)) != len(ids):
            raise ValidationError("vehicle ids must be unique")
        if self.lateral_controller not in (PURE_PURSUIT, STANLEY):
            raise ValidationError(f"unknown lateral controller {self.lateral_controller!r}")
        if not self.duration > 0:
            raise ValidationError("duration must be positive")
        if not self.d_goal > 0:
            raise ValidationError("d_goal must be positive")
        if not 0 < self.plant_dt <= 0.1:
            raise ValidationError("plant_dt must lie in (0, 0.1]")
        if not self.controller_rate > 0:
            raise ValidationError("controller_rate must be positive")
        if self.tau_v < 0 or self.tau_delta < 0:
            raise ValidationError("actuator lag constants must be non-negative")
        tick = 1.0 / self.controller_rate
        n_sub = round(tick / self.plant_dt)
        if n_sub < 1 or abs(tick - n_sub * self.plant_dt) > 1e-9:
            raise ValidationError(
                f"plant_dt={self.plant_dt} does not divide the controller period "
                f"1/{self.controller_rate} into an integer number of sub-steps"
            )
        ratio = self.controller_rate / self.camera.rate
        if ratio < 1 - 1e-9 or abs(ratio - round(ratio)) > 1e-9:
            raise ValidationError(
                "camera.rate must divide controller_rate (sensor samples land on ticks)"
            )
        for v in self.vehicles:
            if "," in v.vehicle_id:
                raise ValidationError("vehicle ids must not contain commas")
            if abs(v.v) > v.geometry.max_speed:
                raise ValidationError(
                    f"vehicle {v.vehicle_id!r} initial speed exceeds its max_speed"
                )
            if not all(map(math.isfinite, (v.x, v.y, v.psi, v.v))):
                raise ValidationError(f"vehicle {v.vehicle_id!r} initial state must be finite")

    @property
    def substeps_per_tick(self) -> int:
        return round(1.0 / self.controller_rate / self.plant_dt)

    def with_lateral(self, name: str) -> "ScenarioSpec":
        return replace(self, lateral_controller=name)

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return replace(self, seed=seed)

    def comparable_to(self, other: "ScenarioSpec") -> bool:
        """True when the two scenarios differ at most in the lateral selector."""
        return replace(self, lateral_controller=other.lateral_controller) == other


def default_platoon(spacing: float = DEFAULT_SPACING) -> tuple[VehicleSetup, ...]:
    """Lead plus two followers at the desired spacing on the lane centerline."""
    lead_geom = VehicleGeometry(chassis_kind=ChassisKind.ACKERMANN_LEAD)
    follower_geom = VehicleGeometry(chassis_kind=ChassisKind.DIFFERENTIAL_FOLLOWER)
    v0 = DEFAULT_CRUISE_SPEED
    return (
        VehicleSetup("lead", lead_geom, x=0.0, y=0.0, psi=DEFAULT_LEAD_HEADING_OFFSET, v=v0),
        VehicleSetup("follower1", follower_geom, x=-spacing, y=0.0, psi=0.0, v=v0),
        VehicleSetup("follower2", follower_geom, x=-2.0 * spacing, y=0.0, psi=0.0, v=v0),
    )


_GEOMETRY_KEYS = {"wheelbase", "track_width", "rear_axle_to_cg", "max_steer", "max_speed"}
_VEHICLE_KEYS = {"id", "chassis", "x", "y", "psi", "v"} | _GEOMETRY_KEYS
_PID_KEYS = {"kp", "ki", "kd", "v_min", "v_max", "integral_limit"}
_PP_KEYS = {"mode", "lookahead", "lookahead_gain", "min_lookahead"}
_STANLEY_KEYS = {"ky", "eps_v"}
_CONTROLLER_KEYS = {"lateral", "pid", "pure_pursuit", "stanley", "d_goal"}
_CAMERA_KEYS = {
    "hfov_deg",
    "range_min",
    "range_max",
    "rate",
    "noise_sigma_pos",
    "noise_sigma_ang",
    "dropout_prob",
}
_MANEUVER_KEYS = {"kind", "cruise_speed", "start_x", "lateral_offset", "length"}
_SIM_KEYS = {"duration", "plant_dt", "controller_rate", "seed", "tau_v", "tau_delta"}
_TOP_KEYS = {"vehicles", "controllers", "camera", "maneuver", "sim"}

_CHASSIS_NAMES = {
    "ackermann": ChassisKind.ACKERMANN_LEAD,
    "differential": ChassisKind.DIFFERENTIAL_FOLLOWER,
}


def _require_mapping(node: object, where: str) -> dict:
    if node is None:
        return {}
    if not isinstance(node, dict):
        raise ValidationError(f"section {where!r} must be a mapping")
    return node


def _check_keys(node: dict, allowed: set[str], where: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ValidationError(f"unknown key {sorted(unknown)[0]!r} in {where!r}")


def _number(node: dict, key: str, default: float, where: str) -> float:
    value = node.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"field {where}.{key} must be a number")
    return float(value)


def _parse_vehicle(node: object, index: int) -> VehicleSetup:
    where = f"vehicles[{index}]"
    node = _require_mapping(node, where)
    _check_keys(node, _VEHICLE_KEYS, where)
    chassis_name = node.get("chassis", "ackermann" if index == 0 else "differential")
    if chassis_name not in _CHASSIS_NAMES:
        raise ValidationError(f"{where}.chassis must be one of {sorted(_CHASSIS_NAMES)}")
    defaults = VehicleGeometry(chassis_kind=_CHASSIS_NAMES[chassis_name])
    try:
        geometry = VehicleGeometry(
            wheelbase=_number(node, "wheelbase", defaults.wheelbase, where),
            track_width=_number(node, "track_width", defaults.track_width, where),
            rear_axle_to_cg=_number(node, "rear_axle_to_cg", defaults.rear_axle_to_cg, where),
            chassis_kind=defaults.chassis_kind,
            max_steer=_number(node, "max_steer", defaults.max_steer, where),
            max_speed=_number(node, "max_speed", defaults.max_speed, where),
        )
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from exc
    return VehicleSetup(
        vehicle_id=str(node.get("id", f"vehicle{index}")),
        geometry=geometry,
        x=_number(node, "x", 0.0, where),
        y=_number(node, "y", 0.0, where),
        psi=_number(node, "psi", 0.0, where),
        v=_number(node, "v", 0.0, where),
    )


def load_scenario(source: str | Path) -> ScenarioSpec:
    """Load and validate a scenario from a file path or a YAML string.

    ``source`` is treated as a path when it points at an existing file,
    otherwise as inline YAML text.
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" not in source and Path(source).is_file():
        text = Path(source).read_text()
    else:
        text = source

    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        location = f" at line {mark.line + 1}" if mark is not None else ""
        raise ParseError(f"invalid scenario document{location}: {exc}") from exc
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a mapping of sections")
    _check_keys(doc, _TOP_KEYS, "scenario")

    vehicles_node = doc.get("vehicles")
    if vehicles_node is None:
        vehicles: tuple[VehicleSetup, ...] = ()
    elif isinstance(vehicles_node, list):
        vehicles = tuple(_parse_vehicle(v, i) for i, v in enumerate(vehicles_node))
    else:
        raise ValidationError("section 'vehicles' must be a list")

    controllers = _require_mapping(doc.get("controllers"), "controllers")
    _check_keys(controllers, _CONTROLLER_KEYS, "controllers")
    lateral = controllers.get("lateral", PURE_PURSUIT)
    aliases = {"pp": PURE_PURSUIT, PURE_PURSUIT: PURE_PURSUIT, STANLEY: STANLEY}
    if lateral not in aliases:
        raise ValidationError(f"controllers.lateral must be one of {sorted(set(aliases))}")
    lateral = aliases[lateral]

    pid_node = _require_mapping(controllers.get("pid"), "controllers.pid")
    _check_keys(pid_node, _PID_KEYS, "controllers.pid")
    pp_node = _require_mapping(controllers.get("pure_pursuit"), "controllers.pure_pursuit")
    _check_keys(pp_node, _PP_KEYS, "controllers.pure_pursuit")
    stanley_node = _require_mapping(controllers.get("stanley"), "controllers.stanley")
    _check_keys(stanley_node, _STANLEY_KEYS, "controllers.stanley")

    camera_node = _require_mapping(doc.get("camera"), "camera")
    _check_keys(camera_node, _CAMERA_KEYS, "camera")
    maneuver_node = _require_mapping(doc.get("maneuver"), "maneuver")
    _check_keys(maneuver_node, _MANEUVER_KEYS, "maneuver")
    sim_node = _require_mapping(doc.get("sim"), "sim")
    _check_keys(sim_node, _SIM_KEYS, "sim")

    pid_defaults = PidConfig()
    pp_defaults = PurePursuitConfig()
    st_defaults = StanleyConfig()
    cam_defaults = CameraModel()
    man_defaults = ManeuverSpec()

    mode = pp_node.get("mode", pp_defaults.mode)
    if not isinstance(mode, str):
        raise ValidationError("controllers.pure_pursuit.mode must be a string")

    kind = maneuver_node.get("kind", man_defaults.kind)
    if not isinstance(kind, str):
        raise ValidationError("maneuver.kind must be a string")

    seed = sim_node.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ValidationError("sim.seed must be an integer")

    try:
        pid = PidConfig(
            kp=_number(pid_node, "kp", pid_defaults.kp, "controllers.pid"),
            ki=_number(pid_node, "ki", pid_defaults.ki, "controllers.pid"),
            kd=_number(pid_node, "kd", pid_defaults.kd, "controllers.pid"),
            v_min=_number(pid_node, "v_min", pid_defaults.v_min, "controllers.pid"),
            v_max=_number(pid_node, "v_max", pid_defaults.v_max, "controllers.pid"),
            integral_limit=_number(
                pid_node, "integral_limit", pid_defaults.integral_limit, "controllers.pid"
            ),
        )
        pure_pursuit = PurePursuitConfig(
            mode=mode,
            lookahead=_number(pp_node, "lookahead", pp_defaults.lookahead, "pure_pursuit"),
            lookahead_gain=_number(
                pp_node, "lookahead_gain", pp_defaults.lookahead_gain, "pure_pursuit"
            ),
            min_lookahead=_number(
                pp_node, "min_lookahead", pp_defaults.min_lookahead, "pure_pursuit"
            ),
        )
        stanley = StanleyConfig(
            ky=_number(stanley_node, "ky", st_defaults.ky, "stanley"),
            eps_v=_number(stanley_node, "eps_v", st_defaults.eps_v, "stanley"),
        )
        camera = CameraModel(
            hfov=math.radians(
                _number(camera_node, "hfov_deg", math.degrees(cam_defaults.hfov), "camera")
            ),
            range_min=_number(camera_node, "range_min", cam_defaults.range_min, "camera"),
            range_max=_number(camera_node, "range_max", cam_defaults.range_max, "camera"),
            rate=_number(camera_node, "rate", cam_defaults.rate, "camera"),
            noise_sigma_pos=_number(
                camera_node, "noise_sigma_pos", cam_defaults.noise_sigma_pos, "camera"
            ),
            noise_sigma_ang=_number(
                camera_node, "noise_sigma_ang", cam_defaults.noise_sigma_ang, "camera"
            ),
            dropout_prob=_number(camera_node, "dropout_prob", cam_defaults.dropout_prob, "camera"),
        )
        maneuver = ManeuverSpec(
            kind=kind,
            cruise_speed=_number(
                maneuver_node, "cruise_speed", man_defaults.cruise_speed, "maneuver"
            ),
            start_x=_number(maneuver_node, "start_x", man_defaults.start_x, "maneuver"),
            lateral_offset=_number(
                maneuver_node, "lateral_offset", man_defaults.lateral_offset, "maneuver"
            ),
            length=_number(maneuver_node, "length", man_defaults.length, "maneuver"),
        )
        return ScenarioSpec(
            vehicles=vehicles,
            lateral_controller=lateral,
            pure_pursuit=pure_pursuit,
            stanley=stanley,
            pid=pid,
            d_goal=_number(controllers, "d_goal", DEFAULT_SPACING, "controllers"),
            camera=camera,
            maneuver=maneuver,
            duration=_number(sim_node, "duration", 45.0, "sim"),
            plant_dt=_number(sim_node, "plant_dt", DEFAULT_PLANT_DT, "sim"),
            controller_rate=_number(
                sim_node, "controller_rate", DEFAULT_CONTROLLER_RATE, "sim"
            ),
            seed=seed,
            tau_v=_number(sim_node, "tau_v", 0.4, "sim"),
            tau_delta=_number(sim_node, "tau_delta", 0.15, "sim"),
        )
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def builtin_scenarios() -> list[str]:
    """Names of the scenario files shipped with the package."""
    root = resources.files("platoonsim") / "scenarios"
    return sorted(p.name.removesuffix(".yaml") for p in root.iterdir() if p.name.endswith(".yaml"))


def find_scenario(name_or_path: str) -> str:
    """Resolve a scenario argument to YAML text, trying paths before builtins."""
    p = Path(name_or_path)
    if p.is_file():
        return p.read_text()
    builtin = resources.files("platoonsim") / "scenarios" / f"{name_or_path}.yaml"
    if builtin.is_file():
        return builtin.read_text()
    raise FileNotFoundError(
        f"scenario {name_or_path!r} is neither a file nor a builtin "
        f"(builtins: {', '.join(builtin_scenarios())})"
    )
