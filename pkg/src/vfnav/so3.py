"""Rotation-group primitives: hat/vee maps, exp/log on SO(3), minimal rotations,
and nearest-rotation repair for drift after integration."""

import math

import numpy as np

SKEW_TOL = 1e-8        # largest ||S + S^T||_F accepted by vee
SMALL_ANGLE = 1e-6     # below this angle the series expansions take over
CUT_LOCUS_BAND = 1e-6  # angle band around pi where the symmetric log branch is used

_EX = np.array([1.0, 0.0, 0.0])


def hat(a):
    """Skew-symmetric matrix of a 3-vector, so that hat(a) @ b == cross(a, b).

    The result is exactly skew (mirrored entries carry an explicit sign flip).
    """
    ax, ay, az = a
    return np.array([[0.0, -az, ay],
                     [az, 0.0, -ax],
                     [-ay, ax, 0.0]])


def vee(S):
    """Extract the 3-vector from a skew-symmetric matrix (inverse of hat).

    Raises ValueError when ||S + S^T||_F exceeds SKEW_TOL.
    """
    resid = S + S.T
    if math.sqrt(float(np.sum(resid * resid))) > SKEW_TOL:
        raise ValueError("matrix is not skew-symmetric within tolerance")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def exp_so3(w):
    """Rotation matrix for a rotation vector (Rodrigues formula).

    Below SMALL_ANGLE the sin/cos coefficients use their 2-term Taylor series,
    which keeps the relative error under ~1e-12.
    """
    wx, wy, wz = float(w[0]), float(w[1]), float(w[2])
    t2 = wx * wx + wy * wy + wz * wz
    t = math.sqrt(t2)
    if t < SMALL_ANGLE:
        a = 1.0 - t2 / 6.0          # sin(t)/t
        b = 0.5 - t2 / 24.0         # (1 - cos(t))/t^2
    else:
        a = math.sin(t) / t
        b = (1.0 - math.cos(t)) / t2
    K = hat(w)
    return np.eye(3) + a * K + b * (K @ K)


def log_so3(R):
    """Principal rotation vector of R (norm in [0, pi]).

    Near the cut locus (angle within CUT_LOCUS_BAND of pi) the axis comes from
    the dominant diagonal of the symmetrized (R + I) form, which stays well
    conditioned where the antisymmetric part vanishes.  At exactly pi the axis
    sign is fixed by making its largest-magnitude component positive.
    """
    tr = float(R[0, 0] + R[1, 1] + R[2, 2])
    c = min(1.0, max(-1.0, 0.5 * (tr - 1.0)))
    theta = math.acos(c)
    w_raw = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if theta < SMALL_ANGLE:
        return (0.5 + theta * theta / 12.0) * w_raw
    if theta > math.pi - CUT_LOCUS_BAND:
        # (R + R^T)/2 + I = (1 + cos)I + (1 - cos) k k^T; read k off the
        # strongest column.
        M = 0.5 * (R + R.T) + np.eye(3) - (1.0 + c) * np.eye(3)
        j = int(np.argmax(np.diag(M)))
        k = M[:, j] / math.sqrt(max(float(M[j, j] * (1.0 - c)), 1e-300))
        k /= float(np.linalg.norm(k))
        s = float(k @ w_raw)
        if s < 0.0:
            k = -k
        elif s == 0.0 and k[int(np.argmax(np.abs(k)))] < 0.0:
            k = -k
        return theta * k
    return (0.5 * theta / math.sin(theta)) * w_raw


def rotation_between(v_from, v_to):
    """Minimal rotation taking unit vector v_from onto unit vector v_to.

    Both inputs must be unit norm within 1e-9.  Antiparallel inputs rotate by
    pi about a fixed perpendicular axis chosen by the largest-component-swap
    rule (for v_from = e_x this is e_z).
    """
    u = np.asarray(v_from, dtype=float)
    v = np.asarray(v_to, dtype=float)
    for name, vec in (("from", u), ("to", v)):
        if abs(float(np.linalg.norm(vec)) - 1.0) > 1e-9:
            raise ValueError(f"'{name}' vector is not unit norm")
    c = float(u @ v)
    if c < -1.0 + 1e-9:
        axis = _perpendicular_axis(u)
        K = hat(axis)
        return np.eye(3) + 2.0 * (K @ K)  # Rodrigues at angle pi
    w = np.cross(u, v)
    K = hat(w)
    return np.eye(3) + K + (K @ K) / (1.0 + c)


def _perpendicular_axis(u):
    """Fixed unit vector orthogonal to u: take the basis vector two slots after
    u's largest component, then project off u."""
    k = int(np.argmax(np.abs(u)))
    cand = np.zeros(3)
    cand[(k + 2) % 3] = 1.0
    axis = cand - float(cand @ u) * u
    return axis / float(np.linalg.norm(axis))


def _det3(M):
    return (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
            - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
            + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))


def _inv_transpose3(M, det):
    """Cofactor matrix over the determinant, i.e. (M^-1)^T."""
    C = np.empty((3, 3))
    C[0, 0] = M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    C[0, 1] = M[1, 2] * M[2, 0] - M[1, 0] * M[2, 2]
    C[0, 2] = M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]
    C[1, 0] = M[0, 2] * M[2, 1] - M[0, 1] * M[2, 2]
    C[1, 1] = M[0, 0] * M[2, 2] - M[0, 2] * M[2, 0]
    C[1, 2] = M[0, 1] * M[2, 0] - M[0, 0] * M[2, 1]
    C[2, 0] = M[0, 1] * M[1, 2] - M[0, 2] * M[1, 1]
    C[2, 1] = M[0, 2] * M[1, 0] - M[0, 0] * M[1, 2]
    C[2, 2] = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return C / det


def project_to_so3(M):
    """Nearest rotation to M in the Frobenius norm (polar decomposition).

    Raises ValueError when det(M) <= 0.  Inputs already close to orthogonal go
    through the quadratically convergent polar iteration; anything else falls
    back to the SVD route.
    """
    M = np.asarray(M, dtype=float)
    det = float(_det3(M))
    if det <= 0.0:
        raise ValueError("matrix has non-positive determinant")
    E = M.T @ M
    E[0, 0] -= 1.0
    E[1, 1] -= 1.0
    E[2, 2] -= 1.0
    if float(np.max(np.abs(E))) < 1e-8:
        X = 0.5 * (M + _inv_transpose3(M, det))
        X = 0.5 * (X + _inv_transpose3(X, float(_det3(X))))
        return X
    U, _, Vt = np.linalg.svd(M)
    D = np.eye(3)
    D[2, 2] = float(np.linalg.det(U @ Vt))
    return U @ D @ Vt


def is_rotation(R, tol=1e-9):
    """True when R^T R = I and det R = 1 within tol (Frobenius / absolute)."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    E = R.T @ R - np.eye(3)
    if math.sqrt(float(np.sum(E * E))) > tol:
        return False
    return abs(float(np.linalg.det(R)) - 1.0) <= tol


def euler_zyx_to_rot(roll, pitch, yaw):
    """Rotation matrix from Z-Y-X Euler angles (radians): R = Rz(yaw) Ry(pitch) Rx(roll)."""
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ])
