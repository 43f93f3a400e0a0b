"""Kinematics of a mobile manipulator: planar base plus a serial revolute arm.

The base contributes three joints (x, y, yaw) and every arm joint is revolute
with a fixed parent offset and a unit rotation axis, both given in the parent
frame.  Chains are plain data so alternative arms can be loaded from config.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, quat_from_matrix, rotz

BASE_DOFS = 3


class KinematicsError(ValueError):
    pass


@dataclass
class ArmJoint:
    """Revolute joint: rotation `axis` (unit, local frame) after a fixed `offset`."""

    axis: np.ndarray
    offset: Pose = field(default_factory=Pose)

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float).reshape(3)
        n = np.linalg.norm(self.axis)
        if abs(n - 1.0) > 1e-6:
            raise KinematicsError(f"joint axis must be a unit vector, got norm {n:.6g}")


@dataclass
class KinematicModel:
    """Planar base + arm chain + tool offset, with the damping schedule limits."""

    arm: list
    ee_offset: Pose = field(default_factory=Pose)
    w_threshold: float = 0.05
    k_max: float = 0.1

    def __post_init__(self):
        if self.n_joints <= 6:
            raise KinematicsError(
                f"redundancy requires more than 6 joints, model has {self.n_joints}"
            )
        if self.w_threshold <= 0.0 or self.k_max < 0.0:
            raise KinematicsError("w_threshold must be positive and k_max non-negative")
        # Fixed per-joint quantities, cached so the chain walk stays cheap.
        # Identity offset rotations are stored as None and skipped outright.
        def _or_none(R):
            return None if np.array_equal(R, np.eye(3)) else R

        self._off_p = [j.offset.position for j in self.arm]
        self._off_R = [_or_none(j.offset.rotation_matrix()) for j in self.arm]
        self._axes = [j.axis for j in self.arm]
        self._ee_p = self.ee_offset.position
        self._ee_R = _or_none(self.ee_offset.rotation_matrix())

    @property
    def n_arm(self) -> int:
        return len(self.arm)

    @property
    def n_joints(self) -> int:
        return BASE_DOFS + len(self.arm)


@dataclass
class JointState:
    """Generalized position and last commanded velocity, base joints first."""

    q: np.ndarray
    qdot: np.ndarray | None = None

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).reshape(-1)
        if self.qdot is None:
            self.qdot = np.zeros_like(self.q)
        else:
            self.qdot = np.asarray(self.qdot, dtype=float).reshape(-1)
            if self.qdot.shape != self.q.shape:
                raise KinematicsError("q and qdot must have matching shapes")


def _check_q(model: KinematicModel, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != model.n_joints:
        raise KinematicsError(
            f"expected {model.n_joints} joint values, got {q.shape[0]}"
        )
    return q


def _chain(model: KinematicModel, q: np.ndarray):
    """World rotation/origin of every arm joint plus the EE frame.

    Returns (origins, axes, R_ee, p_ee) where origins[i]/axes[i] describe arm
    joint i in the world frame.
    """
    base_yaw = q[2]
    R = rotz(base_yaw)
    p = np.array([q[0], q[1], 0.0])
    origins = []
    axes = []
    for i in range(model.n_arm):
        p = p + R @ model._off_p[i]
        if model._off_R[i] is not None:
            R = R @ model._off_R[i]
        origins.append(p)
        ax = model._axes[i]
        axes.append(R @ ax)
        # Rodrigues rotation about the local joint axis, cos/sin folded in.
        x, y, z = ax
        c = np.cos(q[BASE_DOFS + i])
        s = np.sin(q[BASE_DOFS + i])
        C = 1.0 - c
        R = R @ np.array(
            [
                [c + x * x * C, x * y * C - z * s, x * z * C + y * s],
                [y * x * C + z * s, c + y * y * C, y * z * C - x * s],
                [z * x * C - y * s, z * y * C + x * s, c + z * z * C],
            ]
        )
    p_ee = p + R @ model._ee_p
    R_ee = R if model._ee_R is None else R @ model._ee_R
    return origins, axes, R_ee, p_ee


@dataclass
class ChainState:
    """One chain evaluation shared by everything that needs it in a tick."""

    pose: Pose
    jacobian: np.ndarray
    manipulability: float


def chain_state(model: KinematicModel, q: np.ndarray) -> ChainState:
    """Evaluate pose, whole-body Jacobian, and manipulability in one pass."""
    q = _check_q(model, q)
    origins, axes, R_ee, p_ee = _chain(model, q)
    m = model.n_joints
    J = np.zeros((6, m))
    # Base translation: unit linear motion along world x and y.
    J[0, 0] = 1.0
    J[1, 1] = 1.0
    # Base yaw rotates about the vertical axis through the base origin.
    J[0, 2] = q[1] - p_ee[1]
    J[1, 2] = p_ee[0] - q[0]
    J[5, 2] = 1.0
    ex, ey, ez = p_ee
    for i in range(model.n_arm):
        zx, zy, zz = axes[i]
        ox, oy, oz = origins[i]
        rx = ex - ox
        ry = ey - oy
        rz = ez - oz
        c = BASE_DOFS + i
        J[0, c] = zy * rz - zz * ry
        J[1, c] = zz * rx - zx * rz
        J[2, c] = zx * ry - zy * rx
        J[3, c] = zx
        J[4, c] = zy
        J[5, c] = zz
    Ja = J[:, BASE_DOFS:]
    det = np.linalg.det(Ja @ Ja.T)
    w = float(np.sqrt(max(det, 0.0)))
    return ChainState(Pose(p_ee, quat_from_matrix(R_ee)), J, w)


def forward_kinematics(model: KinematicModel, q: np.ndarray) -> Pose:
    """World pose of the end effector for joint vector q (base first)."""
    q = _check_q(model, q)
    _, _, R_ee, p_ee = _chain(model, q)
    return Pose(p_ee, quat_from_matrix(R_ee))


def whole_body_jacobian(model: KinematicModel, q: np.ndarray) -> np.ndarray:
    """6 x m geometric Jacobian mapping qdot to the world-frame EE twist."""
    return chain_state(model, q).jacobian


def arm_jacobian(model: KinematicModel, q: np.ndarray) -> np.ndarray:
    """Arm-only columns of the whole-body Jacobian (6 x n_arm)."""
    return whole_body_jacobian(model, q)[:, BASE_DOFS:]


def manipulability(model: KinematicModel, q: np.ndarray) -> float:
    """w = sqrt(det(Ja Ja^T)) of the arm-only Jacobian.

    Base columns are excluded so the measure depends only on the arm
    configuration, not on where the base happens to be.
    """
    return chain_state(model, q).manipulability


def damping_factor(w: float, model: KinematicModel) -> float:
    """Singularity-avoidance damping: zero above the manipulability threshold,
    rising quadratically to k_max as w falls to zero."""
    if w >= model.w_threshold:
        return 0.0
    ratio = 1.0 - w / model.w_threshold
    return model.k_max * ratio * ratio


def default_model(w_threshold: float = 0.05, k_max: float = 0.1) -> KinematicModel:
    """Six-axis arm with UR16e-like link offsets on a planar base."""
    arm = [
        ArmJoint(axis=[0.0, 0.0, 1.0], offset=Pose([0.20, 0.0, 0.681])),
        ArmJoint(axis=[0.0, 1.0, 0.0], offset=Pose([0.0, 0.176, 0.0])),
        ArmJoint(axis=[0.0, 1.0, 0.0], offset=Pose([0.478, 0.0, 0.0])),
        ArmJoint(axis=[0.0, 1.0, 0.0], offset=Pose([0.360, 0.0, 0.174])),
        ArmJoint(axis=[0.0, 0.0, 1.0], offset=Pose([0.0, 0.0, 0.120])),
        ArmJoint(axis=[0.0, 1.0, 0.0], offset=Pose([0.0, 0.117, 0.0])),
    ]
    return KinematicModel(
        arm=arm,
        ee_offset=Pose([0.0, 0.0, 0.0925]),
        w_threshold=w_threshold,
        k_max=k_max,
    )
