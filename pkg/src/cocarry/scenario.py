"""Scenario configuration: parsing, validation, and component construction.

A scenario file is a YAML document mirroring ScenarioConfig.  Validation
aggregates every problem it can find instead of stopping at the first, so a
bad file is reported in one pass.
"""

import importlib.resources
from dataclasses import dataclass, field

import numpy as np
import yaml

from .aci import AciParams, AdmittanceParams, Mode
from .geometry import Pose
from .human import HandYaw, Hold, HumanParams, MotionScript, TorsoYaw, Translate
from .kinematics import ArmJoint, KinematicModel, KinematicsError, default_model
from .objects import ObjectModel, preset
from .wbc import WbcParams


class ConfigError(ValueError):
    """Raised for unparseable or invalid scenario configuration."""


@dataclass
class Waypoint:
    offset: np.ndarray
    tolerance: float = 0.02

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=float).reshape(3)


@dataclass
class ScenarioConfig:
    """Everything a run needs; field names match the YAML schema."""

    name: str
    model: KinematicModel
    q0: np.ndarray
    mode: Mode
    wbc: WbcParams
    admittance: AdmittanceParams
    aci: AciParams
    human: HumanParams
    object_model: ObjectModel
    script: MotionScript
    hand0: np.ndarray
    torso0: np.ndarray
    torso_yaw0: float = 0.0
    hand_yaw0: float | None = None
    waypoints: list = field(default_factory=list)
    intervals: list = field(default_factory=list)
    waypoint_speed: float = 0.05
    dt: float = 1e-3
    duration: float = 10.0
    seed: int = 0
    trace_path: str | None = None
    metrics_path: str | None = None


def scenario_path(name: str) -> str:
    """Filesystem path of a packaged scenario file (without the .yaml suffix)."""
    res = importlib.resources.files("cocarry") / "scenarios" / f"{name}.yaml"
    return str(res)


def load_scenario(path: str, overrides: dict | None = None) -> ScenarioConfig:
    """Parse and validate a scenario file; overrides patch top-level keys."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    errors = validate_config(raw)
    if errors:
        raise ConfigError(
            f"invalid scenario {path}:\n" + "\n".join(f"  - {e}" for e in errors)
        )
    return _build_config(raw)


def validate_config(raw: dict) -> list:
    """Collect human-readable diagnostics; empty list means the config is good."""
    errors = []

    def _num(key, default=None, positive=False, non_negative=False):
        val = raw.get(key, default)
        if val is None:
            errors.append(f"missing required field '{key}'")
            return None
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            errors.append(f"field '{key}' must be a number, got {val!r}")
            return None
        if positive and val <= 0:
            errors.append(f"field '{key}' must be positive, got {val}")
        if non_negative and val < 0:
            errors.append(f"field '{key}' must be non-negative, got {val}")
        return val

    _num("dt", default=1e-3, positive=True)
    _num("duration", positive=True)

    mode = raw.get("mode", "aci")
    if mode not in {m.value for m in Mode}:
        errors.append(
            f"unknown mode {mode!r}; expected one of {sorted(m.value for m in Mode)}"
        )

    obj = raw.get("object")
    if obj is None:
        errors.append("missing required field 'object'")
    elif isinstance(obj, str):
        try:
            preset(obj)
        except KeyError as exc:
            errors.append(str(exc).strip('"'))
    elif isinstance(obj, dict):
        for key in (
            "axial_stiffness_tension",
            "axial_stiffness_compression",
            "lateral_stiffness",
            "damping",
            "slack_length",
        ):
            if key in obj and (not isinstance(obj[key], (int, float)) or obj[key] < 0):
                errors.append(f"object.{key} must be a non-negative number")
        if "preset" in obj:
            try:
                preset(obj["preset"])
            except KeyError as exc:
                errors.append(str(exc).strip('"'))
    else:
        errors.append("'object' must be a preset name or a mapping")

    script = raw.get("script")
    if not isinstance(script, list) or not script:
        errors.append("'script' must be a non-empty list of segments")
    else:
        for i, seg in enumerate(script):
            if not isinstance(seg, dict):
                errors.append(f"script[{i}] must be a mapping")
                continue
            kinds = {"hold", "translate", "torso_yaw", "hand_yaw"} & seg.keys()
            if len(kinds) != 1:
                errors.append(
                    f"script[{i}] must contain exactly one of hold/translate/"
                    f"torso_yaw/hand_yaw"
                )
                continue
            kind = kinds.pop()
            if kind == "hold":
                if not isinstance(seg["hold"], (int, float)) or seg["hold"] <= 0:
                    errors.append(f"script[{i}].hold must be a positive duration")
            else:
                dur = seg.get("duration")
                if not isinstance(dur, (int, float)) or dur <= 0:
                    errors.append(f"script[{i}].duration must be positive")
                if kind == "translate" and (
                    not isinstance(seg["translate"], list)
                    or len(seg["translate"]) != 3
                ):
                    errors.append(f"script[{i}].translate must be a 3-vector")

    for i, wp in enumerate(raw.get("waypoints", []) or []):
        if not isinstance(wp, dict) or "offset" not in wp:
            errors.append(f"waypoints[{i}] must be a mapping with an 'offset'")
            continue
        if not isinstance(wp["offset"], list) or len(wp["offset"]) != 3:
            errors.append(f"waypoints[{i}].offset must be a 3-vector")
        tol = wp.get("tolerance", 0.02)
        if not isinstance(tol, (int, float)) or tol <= 0:
            errors.append(f"waypoints[{i}].tolerance must be positive")

    duration = raw.get("duration")
    for i, iv in enumerate(raw.get("intervals", []) or []):
        if not isinstance(iv, list) or len(iv) != 2:
            errors.append(f"intervals[{i}] must be a [start, end] pair")
            continue
        lo, hi = iv
        if not (isinstance(lo, (int, float)) and isinstance(hi, (int, float))):
            errors.append(f"intervals[{i}] entries must be numbers")
        elif lo < 0 or hi <= lo:
            errors.append(f"intervals[{i}] must satisfy 0 <= start < end")
        elif isinstance(duration, (int, float)) and hi > duration:
            errors.append(f"intervals[{i}] ends after the configured duration")

    human = raw.get("human", {})
    if isinstance(human, dict):
        for key in ("mass", "stiffness", "damping"):
            if key in human and (
                not isinstance(human[key], (int, float)) or human[key] <= 0
            ):
                errors.append(f"human.{key} must be positive")
    else:
        errors.append("'human' must be a mapping")

    adm = raw.get("admittance", {})
    if isinstance(adm, dict):
        for key in ("mass", "damping"):
            val = adm.get(key)
            if val is not None and (
                not isinstance(val, list)
                or len(val) != 3
                or any(v <= 0 for v in val)
            ):
                errors.append(f"admittance.{key} must be a 3-vector of positives")
    else:
        errors.append("'admittance' must be a mapping")

    if "hand0" not in raw:
        errors.append("missing required field 'hand0' (initial hand position)")
    if "torso0" not in raw:
        errors.append("missing required field 'torso0' (initial torso position)")
    return errors


def _build_model(raw: dict) -> KinematicModel:
    spec = raw.get("model")
    if spec is None:
        return default_model()
    if isinstance(spec, dict) and "arm" in spec:
        arm = [
            ArmJoint(
                axis=j["axis"],
                offset=Pose.from_xyz_rpy(j.get("xyz", [0, 0, 0]), j.get("rpy", [0, 0, 0])),
            )
            for j in spec["arm"]
        ]
        ee = spec.get("ee_offset", {})
        return KinematicModel(
            arm=arm,
            ee_offset=Pose.from_xyz_rpy(ee.get("xyz", [0, 0, 0]), ee.get("rpy", [0, 0, 0])),
            w_threshold=spec.get("w_threshold", 0.05),
            k_max=spec.get("k_max", 0.1),
        )
    kwargs = spec if isinstance(spec, dict) else {}
    return default_model(
        w_threshold=kwargs.get("w_threshold", 0.05), k_max=kwargs.get("k_max", 0.1)
    )


def _build_object(raw: dict) -> ObjectModel:
    obj = raw["object"]
    if isinstance(obj, str):
        return preset(obj)
    base = preset(obj["preset"]) if "preset" in obj else ObjectModel(
        rest_vector=np.zeros(3),
        axial_stiffness_tension=0.0,
        axial_stiffness_compression=0.0,
        lateral_stiffness=0.0,
        damping=0.0,
    )
    for key in (
        "axial_stiffness_tension",
        "axial_stiffness_compression",
        "lateral_stiffness",
        "damping",
        "slack_length",
        "label",
    ):
        if key in obj:
            setattr(base, key, obj[key])
    return base


def _build_script(raw: dict, hand0, torso_yaw0, hand_yaw0) -> MotionScript:
    segments = []
    for seg in raw["script"]:
        if "hold" in seg:
            segments.append(Hold(float(seg["hold"])))
        elif "translate" in seg:
            segments.append(Translate(seg["translate"], float(seg["duration"])))
        elif "torso_yaw" in seg:
            segments.append(TorsoYaw(float(seg["torso_yaw"]), float(seg["duration"])))
        elif "hand_yaw" in seg:
            segments.append(HandYaw(float(seg["hand_yaw"]), float(seg["duration"])))
    return MotionScript(segments, hand0, torso_yaw0=torso_yaw0, hand_yaw0=hand_yaw0)


def _build_config(raw: dict) -> ScenarioConfig:
    try:
        model = _build_model(raw)
    except (KinematicsError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc
    m = model.n_joints
    q0 = np.asarray(raw.get("q0", np.zeros(m)), dtype=float)
    if q0.shape != (m,):
        raise ConfigError(f"q0 must have {m} entries, got {q0.shape[0]}")

    wbc_raw = raw.get("wbc", {})
    params = WbcParams.defaults(
        model,
        q_def=np.asarray(wbc_raw.get("q_def", q0), dtype=float),
        base_lin_limit=wbc_raw.get("base_lin_limit", 1.0),
        base_ang_limit=wbc_raw.get("base_ang_limit", 1.0),
        arm_limit=wbc_raw.get("arm_limit", 1.5),
    )
    if "k_gain" in wbc_raw:
        params.k_gain = np.asarray(wbc_raw["k_gain"], dtype=float)
    if "w_task" in wbc_raw:
        params.w_task = np.asarray(wbc_raw["w_task"], dtype=float)
    if "posture_gain" in wbc_raw:
        params.posture_gain = float(wbc_raw["posture_gain"])

    adm_raw = raw.get("admittance", {})
    admittance = AdmittanceParams(
        mass=adm_raw.get("mass", [6.0, 6.0, 6.0]),
        damping=adm_raw.get("damping", [30.0, 30.0, 30.0]),
    )

    aci_raw = raw.get("aci", {})
    aci = AciParams(
        window_length=aci_raw.get("window_length", 0.25),
        epsilon=aci_raw.get("epsilon", 1e-4),
        deadband=aci_raw.get("deadband", 1e-4),
        lower_angle=aci_raw.get("lower_angle", 0.2),
        upper_angle=aci_raw.get("upper_angle", 0.4),
        velocity_threshold=aci_raw.get("velocity_threshold", 0.05),
        rotation_rate=aci_raw.get("rotation_rate", 0.3),
        min_rotation_duration=aci_raw.get("min_rotation_duration", 2.0),
    )

    human_raw = raw.get("human", {})
    human = HumanParams(
        hand_mass=human_raw.get("mass", 2.0),
        hand_stiffness=human_raw.get("stiffness", 600.0),
        hand_damping=human_raw.get("damping", 40.0),
        velocity_deadband=human_raw.get("velocity_deadband", 0.02),
        yaw_filter_cutoff=human_raw.get("yaw_filter_cutoff", 5.0),
        noise=human_raw.get("noise", {}) or {},
    )

    hand0 = np.asarray(raw["hand0"], dtype=float).reshape(3)
    torso0 = np.asarray(raw["torso0"], dtype=float).reshape(3)
    torso_yaw0 = float(raw.get("torso_yaw0", 0.0))
    hand_yaw0 = raw.get("hand_yaw0")
    script = _build_script(raw, hand0, torso_yaw0, hand_yaw0)

    waypoints = [
        Waypoint(wp["offset"], wp.get("tolerance", 0.02))
        for wp in (raw.get("waypoints") or [])
    ]
    intervals = [tuple(iv) for iv in (raw.get("intervals") or [])]

    try:
        return ScenarioConfig(
            name=str(raw.get("name", "scenario")),
            model=model,
            q0=q0,
            mode=Mode(raw.get("mode", "aci")),
            wbc=params,
            admittance=admittance,
            aci=aci,
            human=human,
            object_model=_build_object(raw),
            script=script,
            hand0=hand0,
            torso0=torso0,
            torso_yaw0=torso_yaw0,
            hand_yaw0=None if hand_yaw0 is None else float(hand_yaw0),
            waypoints=waypoints,
            intervals=intervals,
            waypoint_speed=float(raw.get("waypoint_speed", 0.05)),
            dt=float(raw.get("dt", 1e-3)),
            duration=float(raw["duration"]),
            seed=int(raw.get("seed", 0)),
            trace_path=raw.get("trace_path"),
            metrics_path=raw.get("metrics_path"),
        )
    except (KinematicsError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
