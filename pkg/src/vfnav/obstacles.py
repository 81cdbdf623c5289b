"""Superquadric obstacle model and the blended avoidance field.

An obstacle is the unit level set of an implicit superquadric; the annulus
between level 1 and level c_bar is the reactive region where the guidance
field is blended with a field tangential to the level surfaces.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .fields import DegenerateFrameError, build_frame
from .so3 import hat

PARALLEL_TOL = 1e-6    # relative ||n x f|| below which normal and field count as collinear
NORMAL_MIN = 1e-12     # gradient norms at or below this are degenerate
BLEND_DENOM_REL = 1e-10


class DegenerateNormalError(ValueError):
    """The level-surface gradient vanished where a normal was required."""


class DegenerateBlendError(ArithmeticError):
    """The companion-frame blend coefficient is undefined at this point."""


@dataclass(frozen=True, eq=False)
class Obstacle:
    """Superquadric obstacle: sum_i ((p_i - c_i)/axis_i)^(2 e_i) with the
    surface at level 1 and the reactive region up to level c_bar."""
    center: np.ndarray
    semi_axes: tuple
    exponents: tuple
    c_bar: float = 2.0
    velocity: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        vel = np.zeros(3) if self.velocity is None else np.asarray(self.velocity, dtype=float)
        object.__setattr__(self, "velocity", vel)
        object.__setattr__(self, "semi_axes", tuple(float(a) for a in self.semi_axes))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        object.__setattr__(self, "c_bar", float(self.c_bar))
        if min(self.semi_axes) <= 0.0:
            raise ValueError("obstacle semi-axes must be positive")
        if min(self.exponents) < 1:
            raise ValueError("obstacle exponents must be >= 1")
        if self.c_bar <= 1.0:
            raise ValueError("reactive level c_bar must exceed 1")

    def level(self, p):
        """Implicit level value; 1 on the surface, < 1 inside, monotone along
        rays from the center."""
        out = 0.0
        for i in range(3):
            u = (float(p[i]) - self.center[i]) / self.semi_axes[i]
            out += u ** (2 * self.exponents[i])
        return out

    def gradient(self, p):
        """World-frame gradient of the level value (outward surface normal)."""
        g = np.empty(3)
        for i in range(3):
            e2 = 2 * self.exponents[i]
            u = (float(p[i]) - self.center[i]) / self.semi_axes[i]
            g[i] = e2 * u ** (e2 - 1) / self.semi_axes[i]
        return g

    def hessian_diag(self, p):
        """Diagonal of the level-value Hessian (the off-diagonal is zero for
        this axis-aligned family)."""
        h = np.empty(3)
        for i in range(3):
            e2 = 2 * self.exponents[i]
            u = (float(p[i]) - self.center[i]) / self.semi_axes[i]
            h[i] = e2 * (e2 - 1) * u ** (e2 - 2) / self.semi_axes[i] ** 2
        return h

    def inflated(self, margin):
        """Copy with every semi-axis grown by margin (robot-radius clearance)."""
        return replace(self, semi_axes=tuple(a + margin for a in self.semi_axes))

    def bounding_radius(self, level=None):
        """Radius of a center sphere containing the given level set."""
        lev = self.c_bar if level is None else level
        return math.sqrt(sum(
            (a * lev ** (1.0 / (2 * e))) ** 2
            for a, e in zip(self.semi_axes, self.exponents)))

    def surface_point(self, direction, level=1.0):
        """Point where the ray from the center along direction crosses the
        given level set (bisection; the level is monotone along rays)."""
        d = np.asarray(direction, dtype=float)
        d = d / float(np.linalg.norm(d))
        lo, hi = 0.0, min(self.semi_axes)
        while self.level(self.center + hi * d) < level:
            hi *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.level(self.center + mid * d) < level:
                lo = mid
            else:
                hi = mid
        return self.center + 0.5 * (lo + hi) * d


@dataclass(frozen=True, eq=False)
class SurfaceFrame:
    """Level-surface normal and the two tangential companions at a point.
    tangent_b never opposes the guidance field (their angle is <= pi/2)."""
    normal: np.ndarray
    tangent_a: np.ndarray
    tangent_b: np.ndarray
    collinear: bool


def smoothstep(s):
    """Monotone C1 ramp: 0 below 0, 1 above 1, 3s^2 - 2s^3 between."""
    if s <= 0.0:
        return 0.0
    if s >= 1.0:
        return 1.0
    return s * s * (3.0 - 2.0 * s)


def smoothstep_slope(s):
    """Derivative of smoothstep (zero at and beyond both junctions)."""
    if s <= 0.0 or s >= 1.0:
        return 0.0
    return 6.0 * s * (1.0 - s)


def bump(level, c_bar):
    """Transition value for a level reading: 0 on the surface (level <= 1),
    1 at or beyond the reactive boundary (level >= c_bar)."""
    return smoothstep((level - 1.0) / (c_bar - 1.0))


def bump_slope(level, c_bar):
    """d(bump)/d(level)."""
    return smoothstep_slope((level - 1.0) / (c_bar - 1.0)) / (c_bar - 1.0)


def tangent_frame(p, f, ob, aux_g, aux_h):
    """Surface frame at p for guidance field f.

    The generic branch builds tangent_a = n x f and tangent_b = tangent_a x n;
    when the normal and the field are collinear (relative cross product under
    PARALLEL_TOL) the companions fall back to the point's own auxiliary
    fields: tangent_a = aux_h, tangent_b = aux_g.
    """
    n = ob.gradient(p)
    nn = float(np.linalg.norm(n))
    if nn <= NORMAL_MIN:
        raise DegenerateNormalError("level-surface gradient vanished")
    ta = np.cross(n, f)
    if float(np.linalg.norm(ta)) > PARALLEL_TOL * nn * float(np.linalg.norm(f)):
        return SurfaceFrame(n, ta, np.cross(ta, n), False)
    return SurfaceFrame(n, aux_h, aux_g, True)


def avoidance_field(p, f, obstacles, aux_g, aux_h):
    """Blend of the guidance field with the tangential fields of every
    obstacle whose reactive region contains p.

    Away from all reactive regions this returns f exactly; on an obstacle
    surface it equals that obstacle's tangent_b.
    """
    prod = 1.0
    tang = None
    for ob in obstacles:
        lev = ob.level(p)
        if lev >= ob.c_bar:
            continue
        chi = bump(lev, ob.c_bar)
        sf = tangent_frame(p, f, ob, aux_g, aux_h)
        prod *= chi
        term = (1.0 - chi) * sf.tangent_b
        tang = term if tang is None else tang + term
    if tang is None:
        return prod * f
    return prod * f + tang


def normal_blend(chi, f, normal, tangent_b, aux_g):
    """Coefficient mixing the auxiliary field with the surface normal so the
    companion stays orthogonal to the blended field.

    Raises DegenerateBlendError when the denominator vanishes relative to its
    terms; callers then use the projection fallback frame.
    """
    num = chi * float(f @ normal)
    other = (chi - 1.0) * float(tangent_b @ aux_g)
    den = num + other
    if abs(den) < BLEND_DENOM_REL * (abs(num) + abs(other) + 1e-30):
        raise DegenerateBlendError("blend coefficient denominator vanished")
    return num / den


def projection_fallback_frame(f_blend, aux_g):
    """Orthonormal companion frame when the blend coefficient is undefined:
    project the auxiliary field off the blended direction (documented
    deviation from the blended companion construction)."""
    fn = float(np.linalg.norm(f_blend))
    if fn <= NORMAL_MIN:
        raise DegenerateFrameError("blended field vanished")
    fhat = f_blend / fn
    u = aux_g - float(aux_g @ fhat) * fhat
    un = float(np.linalg.norm(u))
    if un <= 1e-9 * max(float(np.linalg.norm(aux_g)), 1.0):
        # auxiliary field parallel to the blend: use the world axis least
        # aligned with it instead
        cand = np.zeros(3)
        cand[int(np.argmin(np.abs(fhat)))] = 1.0
        u = cand - float(cand @ fhat) * fhat
        un = float(np.linalg.norm(u))
    g_axis = u / un
    return build_frame(f_blend, np.cross(g_axis, f_blend), g_axis)


def avoidance_frame(chi, mu, f, aux_g, aux_h, sf):
    """Companion frame for a single active obstacle.

    Builds the blended field with its two orthogonal companions and checks the
    y-axis against the cross product of the others within 1e-7 relative.  Pass
    mu=None (undefined blend) to get the projection fallback; a failed check
    or a degenerate axis drops to the same fallback.
    """
    f_blend = chi * f + (1.0 - chi) * sf.tangent_b
    if mu is None:
        return projection_fallback_frame(f_blend, aux_g)
    g_blend = mu * aux_g + (1.0 - mu) * sf.normal
    h_cross = np.cross(g_blend, f_blend)
    # n x tangent_b stands in for ||n||^2 tangent_a, which it equals off the
    # collinear branch; on it, tangent_b is the auxiliary field and the raw
    # cross product is still the consistent term.
    h_expand = (chi * mu * aux_h
                + (1.0 - chi) * (1.0 - mu) * np.cross(sf.normal, sf.tangent_b)
                + mu * (1.0 - chi) * np.cross(aux_g, sf.tangent_b)
                + chi * (1.0 - mu) * np.cross(sf.normal, f))
    scale = float(np.linalg.norm(h_cross))
    if float(np.linalg.norm(h_expand - h_cross)) > 1e-7 * max(scale, 1e-30):
        return projection_fallback_frame(f_blend, aux_g)
    try:
        return build_frame(f_blend, h_cross, g_blend)
    except (DegenerateFrameError, ValueError):
        return projection_fallback_frame(f_blend, aux_g)


def composite_matrix(chi, normal):
    """Matrix mapping the guidance field to the blended field for one
    obstacle: chi*I + (chi - 1) hat(n)^2; its determinant stays positive for
    chi in (0, 1]."""
    K = hat(normal)
    return chi * np.eye(3) + (chi - 1.0) * (K @ K)
