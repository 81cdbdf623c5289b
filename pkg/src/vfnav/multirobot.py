"""Priority-based collision avoidance between robots.

Robots are ranked by id (smaller id = higher priority).  Each robot treats the
higher-priority robots inside its detection range as moving spherical
obstacles; the lower-priority ones are ignored, which breaks the mutual
avoidance loop.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .fields import Goal
from .obstacles import SurfaceFrame, smoothstep, smoothstep_slope

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RobotSpec:
    """Static description of one robot: priority id, start pose, goal, safety
    radii (r_c dangerous, r_d detection) and control gains."""
    robot_id: int
    position0: np.ndarray
    attitude0: np.ndarray
    goal: Goal
    r_c: float = 1.0
    r_d: float = 5.0
    k_w: float = 2.0
    k_v: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "position0", np.asarray(self.position0, dtype=float))
        object.__setattr__(self, "attitude0", np.asarray(self.attitude0, dtype=float))
        if not 0.0 < self.r_c < self.r_d:
            raise ValueError("radii must satisfy 0 < r_c < r_d")
        if self.k_w <= 0.0 or self.k_v <= 0.0:
            raise ValueError("gains must be positive")


@dataclass(frozen=True)
class NeighborSets:
    """Robots whose reactive shell contains this one (detected) and the
    higher-priority subset it must actively avoid."""
    detected: frozenset
    higher_priority: frozenset


def separation(p, q):
    """Euclidean distance between two positions."""
    dx = float(p[0]) - float(q[0])
    dy = float(p[1]) - float(q[1])
    dz = float(p[2]) - float(q[2])
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def neighbor_sets(robot_id, positions, specs):
    """Neighbor sets for one robot given all current positions.

    positions and specs are aligned lists over the whole swarm; membership
    uses the other robot's reactive shell (r_c <= separation <= r_d).
    """
    idx = {s.robot_id: k for k, s in enumerate(specs)}
    p_i = positions[idx[robot_id]]
    detected = set()
    for s in specs:
        if s.robot_id == robot_id:
            continue
        d = separation(p_i, positions[idx[s.robot_id]])
        if s.r_c <= d <= s.r_d:
            detected.add(s.robot_id)
    higher = frozenset(j for j in detected if j < robot_id)
    return NeighborSets(frozenset(detected), higher)


def proximity_bump(dist, r_c, r_d):
    """Transition value over the reactive shell: 0 at the dangerous radius,
    1 at the detection radius."""
    return smoothstep((dist - r_c) / (r_d - r_c))


def proximity_bump_slope(dist, r_c, r_d):
    """d(proximity_bump)/d(dist)."""
    return smoothstep_slope((dist - r_c) / (r_d - r_c)) / (r_d - r_c)


@dataclass(frozen=True, eq=False)
class NeighborState:
    """Kinematic snapshot of one higher-priority robot to be avoided."""
    robot_id: int
    position: np.ndarray
    velocity: np.ndarray
    r_c: float
    r_d: float


def sphere_frame(p, p_other, f, aux_g, aux_h, parallel_tol=1e-6):
    """Surface frame of the separation sphere around another robot.

    The normal is the unit vector from the neighbor to p; the tangential
    companions follow the same two-branch rule as the obstacle frame, with the
    avoiding robot's own auxiliary field on the collinear branch.
    """
    d = np.asarray(p, dtype=float) - np.asarray(p_other, dtype=float)
    dist = float(np.linalg.norm(d))
    if dist <= 1e-12:
        raise ValueError("coincident robot positions have no separation normal")
    n = d / dist
    ta = np.cross(n, f)
    if float(np.linalg.norm(ta)) > parallel_tol * float(np.linalg.norm(f)):
        return SurfaceFrame(n, ta, np.cross(ta, n), False)
    return SurfaceFrame(n, aux_h, aux_g, True)


def collision_field(p, f, neighbors, aux_g, aux_h):
    """Blend of the guidance field with the sphere-tangential fields of the
    given higher-priority neighbors.

    With no neighbors the guidance field comes back unchanged.  A neighbor
    closer than its dangerous radius is a logged breach, not a hard stop; its
    transition value clamps to 0 so the tangential term stays fully engaged.
    """
    prod = 1.0
    tang = None
    for nb in neighbors:
        dist = separation(p, nb.position)
        if dist < nb.r_c:
            log.warning("dangerous-area breach: separation %.6g below r_c %.6g "
                        "(neighbor %d)", dist, nb.r_c, nb.robot_id)
        if dist >= nb.r_d:
            continue
        chi = proximity_bump(dist, nb.r_c, nb.r_d)
        sf = sphere_frame(p, nb.position, f, aux_g, aux_h)
        prod *= chi
        term = (1.0 - chi) * sf.tangent_b
        tang = term if tang is None else tang + term
    if tang is None:
        return prod * f
    return prod * f + tang
