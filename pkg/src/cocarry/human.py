"""Scripted human partner: impedance-held hand, kinematic torso yaw, trace I/O.

The hand follows a scripted target through a mass-spring-damper law and feels
the object reaction force, so it yields realistically when the coupling loads
up.  Torso yaw follows its script exactly; its rate is produced the way a
motion-capture pipeline would produce it, by finite differencing the angle
and low-pass filtering the result.  Emitted measurements can be perturbed by
configured noise, and hand velocity below a configurable deadband reads as
zero, mimicking the noise floor of a tracking system: velocities that small
are indistinguishable from standing still.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, Twist, quat_from_yaw

TRACE_COLUMNS = [
    "t",
    "hand_px",
    "hand_py",
    "hand_pz",
    "hand_qw",
    "hand_qx",
    "hand_qy",
    "hand_qz",
    "hand_vx",
    "hand_vy",
    "hand_vz",
    "torso_yaw",
    "torso_yaw_rate",
    "hand_yaw",
]


class TraceError(ValueError):
    pass


@dataclass
class HumanParams:
    hand_mass: float = 2.0
    hand_stiffness: float = 600.0
    hand_damping: float = 40.0
    velocity_deadband: float = 0.02
    yaw_filter_cutoff: float = 5.0
    noise: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.hand_mass <= 0.0:
            raise ValueError("hand mass must be positive")
        if self.hand_stiffness < 0.0 or self.hand_damping < 0.0:
            raise ValueError("hand stiffness and damping must be non-negative")


@dataclass
class HumanState:
    """Measured snapshot of the partner, as the robot-side pipeline sees it."""

    hand_pose: Pose
    hand_twist: Twist
    torso_pose: Pose
    theta_h_w: float
    theta_t_w: float
    theta_h_t: float
    thetadot_t_w: float


@dataclass
class Hold:
    duration: float


@dataclass
class Translate:
    offset: np.ndarray
    duration: float

    def __post_init__(self):
        self.offset = np.asarray(self.offset, dtype=float).reshape(3)


@dataclass
class TorsoYaw:
    target: float
    duration: float


@dataclass
class HandYaw:
    target: float
    duration: float


def _cubic(tau: float) -> tuple[float, float]:
    """Smoothstep timing s(tau) and its derivative ds/dtau."""
    tau = min(1.0, max(0.0, tau))
    return tau * tau * (3.0 - 2.0 * tau), 6.0 * tau * (1.0 - tau)


@dataclass
class ScriptTarget:
    position: np.ndarray
    velocity: np.ndarray
    torso_yaw: float
    torso_yaw_rate: float
    hand_yaw: float


class MotionScript:
    """Piecewise cubic schedule for the hand target and the yaw channels.

    Translations move the hand target; TorsoYaw turns only the torso while
    the hand grip stays put in the world, and HandYaw turns only the hand.
    Each segment starts where the previous one ended.
    """

    def __init__(self, segments, hand0, torso_yaw0: float = 0.0, hand_yaw0=None):
        self.segments = list(segments)
        for seg in self.segments:
            if seg.duration <= 0.0:
                raise ValueError("script segment durations must be positive")
        self.hand0 = np.asarray(hand0, dtype=float).reshape(3)
        self.torso_yaw0 = float(torso_yaw0)
        self.hand_yaw0 = float(torso_yaw0 if hand_yaw0 is None else hand_yaw0)
        self._starts = []
        t = 0.0
        pos = self.hand0.copy()
        tyaw = self.torso_yaw0
        hyaw = self.hand_yaw0
        for seg in self.segments:
            self._starts.append((t, pos.copy(), tyaw, hyaw))
            t += seg.duration
            if isinstance(seg, Translate):
                pos = pos + seg.offset
            elif isinstance(seg, TorsoYaw):
                tyaw = seg.target
            elif isinstance(seg, HandYaw):
                hyaw = seg.target
        self._end = (t, pos, tyaw, hyaw)

    @property
    def duration(self) -> float:
        return self._end[0]

    def first_motion_time(self) -> float:
        """Start time of the first segment that commands any motion."""
        for seg, (t0, _, _, _) in zip(self.segments, self._starts):
            if not isinstance(seg, Hold):
                return t0
        return 0.0

    def motion_spans(self) -> list:
        """(start, end) of every Translate segment, in order."""
        return [
            (t0, t0 + seg.duration)
            for seg, (t0, _, _, _) in zip(self.segments, self._starts)
            if isinstance(seg, Translate)
        ]

    def target(self, t: float) -> ScriptTarget:
        if t >= self.duration:
            _, pos, tyaw, hyaw = self._end
            return ScriptTarget(pos.copy(), np.zeros(3), tyaw, 0.0, hyaw)
        for seg, (t0, pos, tyaw, hyaw) in zip(self.segments, self._starts):
            if t < t0 + seg.duration:
                tau = (t - t0) / seg.duration
                s, s_rate = _cubic(tau)
                s_rate /= seg.duration
                if isinstance(seg, Translate):
                    return ScriptTarget(
                        pos + s * seg.offset, s_rate * seg.offset, tyaw, 0.0, hyaw
                    )
                if isinstance(seg, TorsoYaw):
                    delta = seg.target - tyaw
                    return ScriptTarget(
                        pos.copy(), np.zeros(3), tyaw + s * delta, s_rate * delta, hyaw
                    )
                if isinstance(seg, HandYaw):
                    delta = seg.target - hyaw
                    return ScriptTarget(
                        pos.copy(), np.zeros(3), tyaw, 0.0, hyaw + s * delta
                    )
                return ScriptTarget(pos.copy(), np.zeros(3), tyaw, 0.0, hyaw)
        raise AssertionError("unreachable")


class SimulatedHuman:
    """Impedance hand plus kinematic torso, stepped at the simulation rate.

    The torso translates with the scripted hand target (the partner walks
    with the object) and yaws kinematically; the hand obeys
    m a = K (x_des - x) + D (v_des - v) + F_obj with semi-implicit Euler
    integration, which keeps the stiff contact loop stable at 1 kHz.
    """

    def __init__(
        self,
        params: HumanParams,
        script: MotionScript,
        torso_position,
        seed: int = 0,
    ):
        self.params = params
        self.script = script
        self.torso_position0 = np.asarray(torso_position, dtype=float).reshape(3)
        self.rng = np.random.default_rng(seed)
        self.t = 0.0
        self.hand_position = script.hand0.copy()
        self.hand_velocity = np.zeros(3)
        self._prev_torso_yaw = script.torso_yaw0
        self._torso_rate_filt = 0.0

    def step(self, force_on_hand: np.ndarray, dt: float) -> HumanState:
        force_on_hand = np.asarray(force_on_hand, dtype=float).reshape(3)
        if not np.all(np.isfinite(force_on_hand)):
            raise ValueError("non-finite force applied to the human hand")
        p = self.params
        self.t += dt
        target = self.script.target(self.t)

        accel = (
            p.hand_stiffness * (target.position - self.hand_position)
            + p.hand_damping * (target.velocity - self.hand_velocity)
            + force_on_hand
        ) / p.hand_mass
        self.hand_velocity = self.hand_velocity + accel * dt
        self.hand_position = self.hand_position + self.hand_velocity * dt

        # Torso yaw is kinematic; its measured rate goes through the same
        # finite-difference + first-order low-pass path a mocap stack uses.
        torso_yaw = target.torso_yaw
        raw_rate = (torso_yaw - self._prev_torso_yaw) / dt
        self._prev_torso_yaw = torso_yaw
        tau = 1.0 / (2.0 * math.pi * p.yaw_filter_cutoff)
        beta = dt / (tau + dt)
        self._torso_rate_filt += beta * (raw_rate - self._torso_rate_filt)

        return self._measure(target, torso_yaw)

    def _measure(self, target: ScriptTarget, torso_yaw: float) -> HumanState:
        p = self.params
        noise = p.noise

        def _jitter(key, shape=None):
            std = noise.get(key, 0.0)
            if std <= 0.0:
                return 0.0 if shape is None else np.zeros(shape)
            if shape is None:
                return float(self.rng.normal(0.0, std))
            return self.rng.normal(0.0, std, size=shape)

        hand_pos = self.hand_position + _jitter("hand_position", 3)
        hand_vel = self.hand_velocity + _jitter("hand_velocity", 3)
        if np.linalg.norm(hand_vel) < p.velocity_deadband:
            hand_vel = np.zeros(3)
        theta_t = torso_yaw + _jitter("torso_yaw")
        theta_h = target.hand_yaw + _jitter("hand_yaw")
        torso_pos = self.torso_position0 + (target.position - self.script.hand0)
        return HumanState(
            hand_pose=Pose(hand_pos, quat_from_yaw(theta_h)),
            hand_twist=Twist(hand_vel, np.zeros(3)),
            torso_pose=Pose(torso_pos, quat_from_yaw(theta_t)),
            theta_h_w=theta_h,
            theta_t_w=theta_t,
            theta_h_t=theta_h - theta_t,
            thetadot_t_w=self._torso_rate_filt,
        )


class ReplayHuman:
    """Replays a recorded measurement stream instead of simulating dynamics.

    The recorded schema carries no torso position, so a fixed torso location
    must be supplied for rotation geometry.
    """

    def __init__(self, samples, torso_position):
        if not samples:
            raise TraceError("cannot replay an empty trace")
        self.samples = samples
        self.torso_position = np.asarray(torso_position, dtype=float).reshape(3)
        self._i = 0

    def step(self, force_on_hand, dt: float) -> HumanState:
        row = self.samples[min(self._i, len(self.samples) - 1)]
        self._i += 1
        _, hand_pose, hand_vel, torso_yaw, torso_rate, hand_yaw = row
        return HumanState(
            hand_pose=hand_pose,
            hand_twist=Twist(hand_vel, np.zeros(3)),
            torso_pose=Pose(self.torso_position, quat_from_yaw(torso_yaw)),
            theta_h_w=hand_yaw,
            theta_t_w=torso_yaw,
            theta_h_t=hand_yaw - torso_yaw,
            thetadot_t_w=torso_rate,
        )


def save_trace(path, rows):
    """Write measurement rows as delimited text with a header.

    Each row is (t, hand Pose, hand velocity (3,), torso_yaw, torso_yaw_rate,
    hand_yaw), matching TRACE_COLUMNS.
    """
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for t, pose, vel, tyaw, trate, hyaw in rows:
            values = [t, *pose.position, *pose.orientation, *vel, tyaw, trate, hyaw]
            fh.write(",".join(format(v, ".17g") for v in values) + "\n")


def load_trace(path):
    """Parse a recorded measurement file back into replayable rows.

    Rejects malformed rows (with their line number) and non-monotonic
    timestamps; an empty file yields an empty list.
    """
    rows = []
    with open(path) as fh:
        lines = fh.read().splitlines()
    start = 0
    if lines and not _is_number(lines[0].split(",")[0]):
        start = 1  # header row
    prev_t = None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(TRACE_COLUMNS):
            raise TraceError(
                f"line {lineno}: expected {len(TRACE_COLUMNS)} fields, got {len(parts)}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise TraceError(f"line {lineno}: non-numeric field") from None
        t = vals[0]
        if prev_t is not None and t <= prev_t:
            raise TraceError(f"line {lineno}: non-monotonic timestamp {t}")
        prev_t = t
        pose = Pose(vals[1:4], vals[4:8])
        rows.append((t, pose, np.array(vals[8:11]), vals[11], vals[12], vals[13]))
    return rows


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False
