"""Fixed-timestep closed-loop simulation and its metrics.

One tick advances the world in a fixed order: the human moves under the
previous object reaction, the coupling wrench is evaluated once from the
fresh states, the collaborative interface turns force and human motion into
an EE reference, the whole-body controller resolves it to saturated joint
velocities, and the robot integrates.  Every tick appends one trace record.
The whole pipeline is deterministic: identical configuration and seed give
bitwise-identical traces.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import wbc as _wbc
from .aci import AciController
from .geometry import Pose, Twist, quat_from_yaw
from .human import SimulatedHuman
from .kinematics import chain_state
from .objects import object_wrench
from .scenario import ScenarioConfig


class SimulationError(RuntimeError):
    pass


@dataclass
class TraceRecord:
    """Snapshot after one tick; fields appear in file column order."""

    t: float
    q: np.ndarray
    ee_pose: Pose
    ee_twist: Twist
    force: np.ndarray
    v_adm: np.ndarray
    v_h: np.ndarray
    alpha: float
    zeta: int
    x_d: Pose
    hand_pose: Pose
    torso_yaw: float

    def row(self) -> list:
        return [
            self.t,
            *self.q,
            *self.ee_pose.as_vector(),
            *self.ee_twist.as_vector(),
            *self.force,
            *self.v_adm,
            *self.v_h,
            self.alpha,
            float(self.zeta),
            *self.x_d.as_vector(),
            *self.hand_pose.as_vector(),
            self.torso_yaw,
        ]


def trace_columns(n_joints: int) -> list:
    cols = ["t"]
    cols += [f"q{i}" for i in range(n_joints)]
    cols += ["ee_px", "ee_py", "ee_pz", "ee_qw", "ee_qx", "ee_qy", "ee_qz"]
    cols += ["ee_vx", "ee_vy", "ee_vz", "ee_wx", "ee_wy", "ee_wz"]
    cols += ["fx", "fy", "fz"]
    cols += ["vadm_x", "vadm_y", "vadm_z"]
    cols += ["vh_x", "vh_y", "vh_z"]
    cols += ["alpha", "zeta"]
    cols += ["xd_px", "xd_py", "xd_pz", "xd_qw", "xd_qx", "xd_qy", "xd_qz"]
    cols += ["hand_px", "hand_py", "hand_pz", "hand_qw", "hand_qx", "hand_qy", "hand_qz"]
    cols += ["torso_yaw"]
    return cols


def write_trace(path: str, records: list, n_joints: int):
    """Delimited text, one row per record, full float precision."""
    try:
        with open(path, "w") as fh:
            fh.write(",".join(trace_columns(n_joints)) + "\n")
            for rec in records:
                fh.write(",".join(format(v, ".17g") for v in rec.row()) + "\n")
    except OSError as exc:
        raise SimulationError(f"cannot write trace to {path}: {exc}") from exc


def read_trace(path: str) -> dict:
    """Load a trace file back into a dict of named numpy columns."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass
class Metrics:
    """Outcome summary of one run."""

    completed: bool
    t_c: float
    d_am: float
    mean_alpha: float
    waypoint_times: list = field(default_factory=list)
    interval_alpha: list = field(default_factory=list)
    interval_force: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "completed": self.completed,
            "t_c": self.t_c,
            "d_am": self.d_am,
            "mean_alpha": self.mean_alpha,
            "waypoint_times": list(self.waypoint_times),
            "interval_alpha": list(self.interval_alpha),
            "interval_force": list(self.interval_force),
        }


def write_metrics(path: str, metrics: Metrics):
    """Key-value text document, one key per line (YAML-compatible)."""

    def _fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return ".nan" if math.isnan(v) else format(v, ".17g")
        if isinstance(v, list):
            return "[" + ", ".join(_fmt(x) for x in v) + "]"
        return str(v)

    try:
        with open(path, "w") as fh:
            for key, val in metrics.as_dict().items():
                fh.write(f"{key}: {_fmt(val)}\n")
    except OSError as exc:
        raise SimulationError(f"cannot write metrics to {path}: {exc}") from exc


class Simulation:
    """Owns the world state and advances it tick by tick."""

    def __init__(self, config: ScenarioConfig):
        self.config = config
        self.model = config.model
        self.dt = config.dt
        self.t = 0.0
        self.q = np.array(config.q0, dtype=float)
        self.qdot = np.zeros_like(self.q)
        self.human = SimulatedHuman(
            config.human, config.script, config.torso0, seed=config.seed
        )
        self._chain = chain_state(self.model, self.q)
        ee0 = self._chain.pose
        self.ee0 = ee0
        rest_world = ee0.position - config.hand0
        self.object_model = config.object_model.with_rest(
            rest_world, ref_yaw=ee0.yaw()
        )
        torso0_pose = Pose(config.torso0, quat_from_yaw(config.torso_yaw0))
        self.aci = AciController(
            config.aci, config.admittance, config.mode, ee0, torso0_pose
        )
        self.wbc_params = config.wbc
        self.wrench_on_hand = np.zeros(3)
        self.records: list = []
        self.waypoint_times: list = []
        self._next_waypoint = 0

    # -- single tick ------------------------------------------------------

    def step(self) -> TraceRecord:
        """Advance one tick and append (and return) the resulting record."""
        dt = self.dt
        human_state = self.human.step(self.wrench_on_hand, dt)

        chain = self._chain  # evaluated when self.q was last updated
        ee_pose = chain.pose
        J = chain.jacobian
        ee_vel = Twist.from_vector(J @ self.qdot)
        on_ee, on_hand = object_wrench(
            self.object_model,
            human_state.hand_pose,
            human_state.hand_twist,
            ee_pose,
            ee_vel,
        )
        self.wrench_on_hand = on_hand.force

        t_new = self.t + dt
        out = self.aci.step(t_new, on_ee.force, human_state, dt)

        qdot_d = _wbc.compute(
            self.model, self.q, out.x_d, out.xdot_d, self.wbc_params, chain=chain
        )
        qdot_d = _wbc.clamp_velocities(qdot_d, self.wbc_params)
        ee_twist = Twist.from_vector(J @ qdot_d)
        self.q = self.q + qdot_d * dt
        self.qdot = qdot_d
        self.t = t_new
        self._chain = chain_state(self.model, self.q)

        record = TraceRecord(
            t=t_new,
            q=self.q.copy(),
            ee_pose=self._chain.pose,
            ee_twist=ee_twist,
            force=on_ee.force.copy(),
            v_adm=out.v_adm,
            v_h=human_state.hand_twist.linear.copy(),
            alpha=out.alpha,
            zeta=out.zeta,
            x_d=out.x_d,
            hand_pose=human_state.hand_pose,
            torso_yaw=human_state.theta_t_w,
        )
        self.records.append(record)
        self._check_waypoints(record)
        return record

    def _check_waypoints(self, record: TraceRecord):
        wps = self.config.waypoints
        if self._next_waypoint >= len(wps):
            return
        wp = wps[self._next_waypoint]
        target = self.ee0.position + wp.offset
        near = np.linalg.norm(record.ee_pose.position - target) <= wp.tolerance
        slow = np.linalg.norm(record.ee_twist.linear) < self.config.waypoint_speed
        if near and slow:
            self.waypoint_times.append(record.t)
            self._next_waypoint += 1

    # -- full run ---------------------------------------------------------

    def run(self) -> tuple[list, Metrics]:
        """Execute until the duration elapses or every waypoint is achieved."""
        n_steps = int(round(self.config.duration / self.dt))
        have_waypoints = bool(self.config.waypoints)
        for i in range(n_steps):
            try:
                self.step()
            except Exception as exc:
                raise SimulationError(f"aborted at step {i}: {exc}") from exc
            if have_waypoints and self._next_waypoint >= len(self.config.waypoints):
                break
        metrics = self._metrics()
        if self.config.trace_path:
            write_trace(self.config.trace_path, self.records, self.model.n_joints)
        if self.config.metrics_path:
            write_metrics(self.config.metrics_path, metrics)
        return self.records, metrics

    def _metrics(self) -> Metrics:
        completed = self._next_waypoint >= len(self.config.waypoints)
        if self.config.waypoints and completed:
            t_c = self.waypoint_times[-1] - self.config.script.first_motion_time()
        else:
            t_c = math.nan
        alphas = np.array([r.alpha for r in self.records]) if self.records else np.zeros(0)
        mean_alpha = float(alphas.mean()) if alphas.size else math.nan
        d_am = alignment_metric(self.records) if len(self.records) >= 2 else math.nan
        # Intervals the run never reached (early stop) degrade to nan instead
        # of aborting the metric pass.
        interval_alpha: list = []
        interval_force: list = []
        for iv in self.config.intervals:
            try:
                a, f = interval_stats(self.records, [iv])
            except ValueError:
                a, f = [math.nan], [math.nan]
            interval_alpha += a
            interval_force += f
        return Metrics(
            completed=completed,
            t_c=t_c,
            d_am=d_am,
            mean_alpha=mean_alpha,
            waypoint_times=list(self.waypoint_times),
            interval_alpha=interval_alpha,
            interval_force=interval_force,
        )


def run_scenario(config: ScenarioConfig) -> tuple[list, Metrics]:
    return Simulation(config).run()


def alignment_metric(
    records: list,
    attachment_offsets: tuple = None,
    reference: np.ndarray | None = None,
    t_start: float | None = None,
    t_end: float | None = None,
) -> float:
    """Time-averaged drift of the hand-to-EE arrangement from its reference.

    Integrates || (r_ee - r_hand) - reference || over the selected span with
    the trapezoid rule and divides by the span length.  The reference defaults
    to the arrangement at the first selected sample; attachment offsets (in
    the EE and hand body frames) let the comparison use marker-like points
    instead of the frame origins.  Fewer than two selected samples leave no
    span to average over and raise.
    """
    off_r = np.zeros(3) if attachment_offsets is None else np.asarray(
        attachment_offsets[0], dtype=float
    )
    off_h = np.zeros(3) if attachment_offsets is None else np.asarray(
        attachment_offsets[1], dtype=float
    )
    sel = [
        r
        for r in records
        if (t_start is None or r.t >= t_start) and (t_end is None or r.t <= t_end)
    ]
    if len(sel) < 2:
        raise ValueError("alignment metric needs at least two samples in the span")
    rel = np.array(
        [
            (r.ee_pose.transform_point(off_r) - r.hand_pose.transform_point(off_h))
            for r in sel
        ]
    )
    if reference is None:
        reference = rel[0]
    dev = np.linalg.norm(rel - reference, axis=1)
    t = np.array([r.t for r in sel])
    span = t[-1] - t[0]
    if span <= 0.0:
        return 0.0
    return float(np.trapezoid(dev, t) / span)


def interval_stats(records: list, intervals: list) -> tuple[list, list]:
    """Per-interval arithmetic means of alpha and of the force magnitude.

    Intervals are (start, end) pairs over half-open spans [start, end); an
    interval containing no samples raises.
    """
    if not intervals:
        return [], []
    t = np.array([r.t for r in records])
    alphas = np.array([r.alpha for r in records])
    forces = np.array([np.linalg.norm(r.force) for r in records])
    mean_a, mean_f = [], []
    for lo, hi in intervals:
        mask = (t >= lo) & (t < hi)
        if not mask.any():
            raise ValueError(f"interval [{lo}, {hi}) contains no samples")
        mean_a.append(float(alphas[mask].mean()))
        mean_f.append(float(forces[mask].mean()))
    return mean_a, mean_f
