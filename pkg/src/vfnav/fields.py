"""Navigation vector field, its two orthogonal companion fields, goal-frame
transforms, and the field-frame (reference attitude) machinery.

The three fields evaluated at a point are mutually orthogonal and define the
body-frame axis references: the navigation field gives the heading (body x),
the plane-normal field the body y, and the circle-normal field the body z.
"""

import math
from dataclasses import dataclass

import numpy as np

from .so3 import is_rotation, rotation_between

SINGULAR_NORM = 1e-9   # frame axis norms at or below this count as degenerate
AXIS_BAND = 1e-9       # relative off-axis distance where the fallback triad kicks in
ORTHO_TOL = 1e-6       # relative orthogonality tolerance accepted by build_frame

_EX = np.array([1.0, 0.0, 0.0])


class DegenerateFrameError(ValueError):
    """A frame axis vanished where a reference attitude was required."""


def _cross3(a, b):
    """Cross product of two 3-vectors without the ufunc dispatch overhead."""
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def nav_field(p):
    """Navigation field: every integral curve off the positive x-axis reaches
    the origin tangent to +x."""
    x, y, z = p
    return np.array([x * x - y * y - z * z, 2.0 * x * y, 2.0 * x * z])


def circle_normal_field(p):
    """Outward normal of the circular integral curves (body z-axis reference).

    Vanishes on the whole x-axis, not just at the origin; build the frame with
    the fallback triad there (see nav_triad).
    """
    x, y, z = p
    rr = y * y + z * z
    w = rr - x * x
    return np.array([2.0 * x * rr, y * w, z * w])


def plane_normal_field(p):
    """Normal of the invariant plane through p and the x-axis (body y-axis
    reference); exactly circle_normal_field(p) x nav_field(p)."""
    x, y, z = p
    n4 = (x * x + y * y + z * z) ** 2
    return np.array([0.0, -z * n4, y * n4])


def nav_jacobians(p):
    """Exact polynomial Jacobians of the three fields, in field order
    (navigation, circle-normal, plane-normal)."""
    x, y, z = p
    rr = y * y + z * z
    n2 = x * x + rr
    w = rr - x * x
    jf = np.array([[2 * x, -2 * y, -2 * z],
                   [2 * y, 2 * x, 0.0],
                   [2 * z, 0.0, 2 * x]])
    jg = np.array([[2 * rr, 4 * x * y, 4 * x * z],
                   [-2 * x * y, w + 2 * y * y, 2 * y * z],
                   [-2 * x * z, 2 * y * z, w + 2 * z * z]])
    jh = np.array([[0.0, 0.0, 0.0],
                   [-4 * x * z * n2, -4 * y * z * n2, -n2 * n2 - 4 * z * z * n2],
                   [4 * x * y * n2, n2 * n2 + 4 * y * y * n2, 4 * y * z * n2]])
    return jf, jg, jh


@dataclass(frozen=True, eq=False)
class Goal:
    """Target position with a terminal heading and the rotation realizing it.

    rotation maps the canonical frame onto the goal frame: rotation @ e_x is
    the heading.
    """
    position: np.ndarray
    heading: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "heading", np.asarray(self.heading, dtype=float))
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        if abs(float(np.linalg.norm(self.heading)) - 1.0) > 1e-9:
            raise ValueError("goal heading must be unit norm")
        if not is_rotation(self.rotation):
            raise ValueError("goal rotation is not a valid rotation matrix")
        if float(np.linalg.norm(self.rotation @ _EX - self.heading)) > 1e-9:
            raise ValueError("goal rotation does not map e_x onto the heading")

    @classmethod
    def from_heading(cls, position, heading):
        """Goal with the minimal rotation taking e_x onto the heading."""
        heading = np.asarray(heading, dtype=float)
        return cls(position, heading, rotation_between(_EX, heading))


IDENTITY_GOAL = Goal(np.zeros(3), _EX.copy(), np.eye(3))


def goal_nav_field(p, goal):
    """Navigation field for an arbitrary goal: evaluate in goal coordinates
    q = R^T (p - p_d) and rotate the vector back to the world frame, so the
    arrival direction is the goal heading."""
    q = goal.rotation.T @ (np.asarray(p, dtype=float) - goal.position)
    return goal.rotation @ nav_field(q)


def on_axis(q, band=AXIS_BAND):
    """True when q (goal coordinates) is within the degenerate x-axis band."""
    rr = q[1] * q[1] + q[2] * q[2]
    eps = band * (1.0 + math.sqrt(float(q @ q)))
    return rr < eps * eps


def _fallback_axes(f):
    """Companion axes on the x-axis, where both companion fields vanish:
    z from the world vertical projected off the heading (world e_y if the
    heading is near-vertical), y closing the right-handed triad."""
    fn = float(np.linalg.norm(f))
    if fn <= SINGULAR_NORM:
        raise DegenerateFrameError("guidance field vanished (at the goal)")
    fhat = f / fn
    ez = np.array([0.0, 0.0, 1.0])
    if abs(float(fhat @ ez)) > 0.99:
        ez = np.array([0.0, 1.0, 0.0])
    az = ez - float(ez @ fhat) * fhat
    az /= float(np.linalg.norm(az))
    ay = _cross3(az, f)
    return ay, az


def companions_degenerate(q, g, h):
    """True where the companion fields cannot anchor a frame: inside the
    positional axis band or with either companion norm at the singular
    threshold (they scale like the off-axis distance, so both happen on
    approach to the goal axis)."""
    if on_axis(q):
        return True
    return (float(g @ g) <= SINGULAR_NORM ** 2
            or float(h @ h) <= SINGULAR_NORM ** 2)


def nav_triad(p, goal=IDENTITY_GOAL):
    """World-frame companion triad (f, g, h) at p for the given goal, with the
    fallback axes substituted on (and degenerately near) the goal x-axis."""
    q = goal.rotation.T @ (np.asarray(p, dtype=float) - goal.position)
    f = nav_field(q)
    g = circle_normal_field(q)
    h = plane_normal_field(q)
    if companions_degenerate(q, g, h):
        ay, az = _fallback_axes(f)
        return goal.rotation @ f, goal.rotation @ az, goal.rotation @ ay
    return goal.rotation @ f, goal.rotation @ g, goal.rotation @ h


@dataclass(frozen=True, eq=False)
class FrameTriad:
    """Three orthogonal (unnormalized) axis fields plus the attitude whose
    columns are their unit versions, in x/y/z order."""
    axis_x: np.ndarray
    axis_y: np.ndarray
    axis_z: np.ndarray
    R: np.ndarray


@dataclass(frozen=True, eq=False)
class FrameRate:
    """Time derivative of a frame attitude and the body angular rate it
    implies (hat(omega) == R^T R_dot up to skew projection)."""
    R_dot: np.ndarray
    omega: np.ndarray


def build_frame(axis_x, axis_y, axis_z):
    """Reference attitude whose columns are the normalized axes.

    Axes must be nonzero (norm above SINGULAR_NORM, else DegenerateFrameError),
    pairwise orthogonal within ORTHO_TOL relative, and right-handed.
    """
    nx = math.sqrt(float(axis_x @ axis_x))
    ny = math.sqrt(float(axis_y @ axis_y))
    nz = math.sqrt(float(axis_z @ axis_z))
    if nx <= SINGULAR_NORM or ny <= SINGULAR_NORM or nz <= SINGULAR_NORM:
        raise DegenerateFrameError("frame axis norm below singular threshold")
    if (abs(float(axis_x @ axis_y)) > ORTHO_TOL * nx * ny
            or abs(float(axis_x @ axis_z)) > ORTHO_TOL * nx * nz
            or abs(float(axis_y @ axis_z)) > ORTHO_TOL * ny * nz):
        raise ValueError("frame axes are not pairwise orthogonal")
    R = np.empty((3, 3))
    R[:, 0] = axis_x / nx
    R[:, 1] = axis_y / ny
    R[:, 2] = axis_z / nz
    triple = (R[0, 0] * (R[1, 1] * R[2, 2] - R[2, 1] * R[1, 2])
              - R[0, 1] * (R[1, 0] * R[2, 2] - R[2, 0] * R[1, 2])
              + R[0, 2] * (R[1, 0] * R[2, 1] - R[2, 0] * R[1, 1]))
    if triple < 0.0:
        raise ValueError("frame axes are not right-handed")
    return FrameTriad(axis_x, axis_y, axis_z, R)


def frame_rate(triad, axis_x_dot, axis_y_dot, axis_z_dot):
    """Rate of the reference attitude from the axis time derivatives.

    Each column follows the unit-vector quotient rule; omega is the vector of
    the skew part of R^T R_dot.
    """
    R_dot = np.empty((3, 3))
    for col, (axis, rate) in enumerate(((triad.axis_x, axis_x_dot),
                                        (triad.axis_y, axis_y_dot),
                                        (triad.axis_z, axis_z_dot))):
        n2 = float(axis @ axis)
        n = math.sqrt(n2)
        if n <= SINGULAR_NORM:
            raise DegenerateFrameError("frame axis norm below singular threshold")
        R_dot[:, col] = rate / n - (float(axis @ rate) / (n2 * n)) * axis
    A = triad.R.T @ R_dot
    S = 0.5 * (A - A.T)
    return FrameRate(R_dot, np.array([S[2, 1], S[0, 2], S[1, 0]]))
