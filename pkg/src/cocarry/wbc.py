"""Hierarchical velocity-level whole-body control.

The primary task tracks a 6-D end-effector reference; a secondary posture task
keeps the arm near a default configuration and is projected through the damped
nullspace of the primary Jacobian so it cannot disturb tracking.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import Pose, Twist, pose_error
from .kinematics import (
    BASE_DOFS,
    ChainState,
    KinematicModel,
    chain_state,
    damping_factor,
    forward_kinematics,
)


class WbcError(RuntimeError):
    pass


@dataclass
class WbcParams:
    """Gains and weights; all weight matrices are diagonal and stored as vectors."""

    k_gain: np.ndarray
    w_task: np.ndarray
    w_damp: np.ndarray
    w_posture: np.ndarray
    q_def: np.ndarray
    posture_gain: float = 0.5
    qdot_limits: np.ndarray | None = None

    def __post_init__(self):
        self.k_gain = np.asarray(self.k_gain, dtype=float).reshape(6)
        self.w_task = np.asarray(self.w_task, dtype=float).reshape(6)
        self.w_damp = np.asarray(self.w_damp, dtype=float).reshape(-1)
        self.w_posture = np.asarray(self.w_posture, dtype=float).reshape(-1)
        self.q_def = np.asarray(self.q_def, dtype=float).reshape(-1)
        if self.qdot_limits is not None:
            self.qdot_limits = np.asarray(self.qdot_limits, dtype=float).reshape(-1)
        if np.any(self.w_task <= 0.0) or np.any(self.w_damp <= 0.0):
            raise WbcError("task and damping weights must be positive")
        if np.any(self.w_posture < 0.0):
            raise WbcError("posture weights must be non-negative")

    @classmethod
    def defaults(
        cls,
        model: KinematicModel,
        q_def: np.ndarray | None = None,
        base_lin_limit: float = 1.0,
        base_ang_limit: float = 1.0,
        arm_limit: float = 1.5,
    ) -> "WbcParams":
        m = model.n_joints
        if q_def is None:
            q_def = np.zeros(m)
        limits = np.concatenate([
            [base_lin_limit, base_lin_limit, base_ang_limit],
            np.full(model.n_arm, arm_limit),
        ])
        return cls(
            k_gain=np.array([1.0, 1.0, 1.0, 0.1, 0.1, 0.1]),
            w_task=100.0 * np.array([10.0, 10.0, 10.0, 5.0, 5.0, 5.0]),
            w_damp=np.full(m, 3.0),
            w_posture=np.concatenate([np.zeros(BASE_DOFS), np.ones(model.n_arm)]),
            q_def=np.asarray(q_def, dtype=float),
            posture_gain=0.5,
            qdot_limits=limits,
        )


def tracking_objective(
    model: KinematicModel,
    q: np.ndarray,
    x_d: Pose,
    xdot_d: Twist,
    params: WbcParams,
    pose: Pose | None = None,
) -> np.ndarray:
    """Reference twist b = xdot_d + K * (x_d minus current pose)."""
    x = forward_kinematics(model, q) if pose is None else pose
    return xdot_d.as_vector() + params.k_gain * pose_error(x_d, x)


def solve_tracking(
    J: np.ndarray, b: np.ndarray, k: float, w_task: np.ndarray, w_damp: np.ndarray
) -> np.ndarray:
    """Minimize ||b - J qdot||^2_W1 + k^2 ||qdot||^2_W2 for diagonal weights.

    With k > 0 the regularized normal equations have a unique solution.  With
    k = 0 the task is solved exactly through the row space, which requires J to
    have full row rank; the minimum-norm solution is returned.
    """
    if k > 0.0:
        A = (J.T * w_task) @ J + (k * k) * np.diag(w_damp)
        return np.linalg.solve(A, (J.T * w_task) @ b)
    G = J @ J.T
    try:
        y = np.linalg.solve(G, b)
    except np.linalg.LinAlgError as exc:
        raise WbcError(
            "primary task is singular with zero damping; use a nonzero damping factor"
        ) from exc
    if not np.all(np.isfinite(y)) or np.linalg.norm(G @ y - b) > 1e-6 * max(
        1.0, np.linalg.norm(b)
    ):
        raise WbcError(
            "primary task is singular with zero damping; use a nonzero damping factor"
        )
    return J.T @ y


def solve_primary(
    model: KinematicModel,
    q: np.ndarray,
    x_d: Pose,
    xdot_d: Twist,
    params: WbcParams,
    k: float | None = None,
    chain: ChainState | None = None,
) -> np.ndarray:
    """Primary-task joint velocities for tracking the EE reference.

    The damping factor is derived from the current arm manipulability unless
    an explicit k is supplied.  A precomputed chain evaluation may be passed
    to avoid redundant kinematics.
    """
    if chain is None:
        chain = chain_state(model, q)
    if k is None:
        k = damping_factor(chain.manipulability, model)
    b = tracking_objective(model, q, x_d, xdot_d, params, pose=chain.pose)
    return solve_tracking(chain.jacobian, b, k, params.w_task, params.w_damp)


def nullspace_projector(J: np.ndarray, k: float) -> np.ndarray:
    """N = I - J# J with the damped pseudoinverse J# = J^T (J J^T + k^2 I)^-1."""
    m = J.shape[1]
    G = J @ J.T + (k * k) * np.eye(J.shape[0])
    J_pinv = J.T @ np.linalg.inv(G)
    return np.eye(m) - J_pinv @ J


def solve_secondary(q: np.ndarray, params: WbcParams) -> np.ndarray:
    """Raw posture velocities pulling the configuration toward q_def."""
    return params.posture_gain * params.w_posture * (params.q_def - q)


def compute(
    model: KinematicModel,
    q: np.ndarray,
    x_d: Pose,
    xdot_d: Twist,
    params: WbcParams,
    chain: ChainState | None = None,
) -> np.ndarray:
    """Full hierarchical command: primary tracking plus projected posture task."""
    if chain is None:
        chain = chain_state(model, q)
    k = damping_factor(chain.manipulability, model)
    J = chain.jacobian
    b = tracking_objective(model, q, x_d, xdot_d, params, pose=chain.pose)
    qdot1 = solve_tracking(J, b, k, params.w_task, params.w_damp)
    N = nullspace_projector(J, k)
    return qdot1 + N @ solve_secondary(q, params)


def clamp_velocities(qdot: np.ndarray, params: WbcParams) -> np.ndarray:
    """Component-wise saturation to the per-joint velocity limits."""
    if params.qdot_limits is None:
        return qdot
    return np.clip(qdot, -params.qdot_limits, params.qdot_limits)
