"""Control laws: angular velocity tracking a reference attitude on SO(3) and
the distance-proportional surge speed.

The robot is nonholonomic: the commanded body velocity is always (v_x, 0, 0),
so following the reference heading is entirely the attitude loop's job.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .so3 import hat, log_so3


@dataclass(frozen=True, eq=False)
class ControlInput:
    """Body-frame angular velocity plus the surge speed along body x."""
    omega: np.ndarray
    v_x: float


@dataclass(frozen=True, eq=False)
class AttitudeError:
    """Tracking error R_ref^T R and its principal rotation vector."""
    R_e: np.ndarray
    log_R_e: np.ndarray


def attitude_error(R, R_ref):
    """Attitude error between the robot attitude and the reference."""
    R_e = R_ref.T @ R
    return AttitudeError(R_e, log_so3(R_e))


def angular_command(err, R, R_ref, R_ref_dot, k_w):
    """Angular velocity tracking the reference attitude exponentially.

    Combines the log-feedback term with the feedforward of the reference
    rotation rate; the result matrix is skew up to numerical error and is
    symmetrized before extracting the vector.
    """
    M = -k_w * hat(err.log_R_e) + R.T @ R_ref_dot @ R_ref.T @ R
    S = 0.5 * (M - M.T)
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def speed_command(p, p_goal, k_v):
    """Surge speed proportional to the remaining distance to the goal."""
    dx = float(p[0]) - float(p_goal[0])
    dy = float(p[1]) - float(p_goal[1])
    dz = float(p[2]) - float(p_goal[2])
    return k_v * math.sqrt(dx * dx + dy * dy + dz * dz)
