"""Per-robot pipeline: compose the guidance field with obstacle and neighbor
avoidance, build the reference frame with its analytic rate, and derive the
control inputs.

Rates are exact along smooth branches: the guidance triad differentiates
through its polynomial Jacobians, obstacle terms through the level-surface
Hessian, and blend coefficients through quotient rules, so the reference
attitude rate entering the feedforward carries no finite-difference error.
"""

import math
from dataclasses import dataclass

import numpy as np

from .control import ControlInput, angular_command, attitude_error, speed_command
from .fields import (FrameRate, FrameTriad, build_frame, circle_normal_field,
                     companions_degenerate, frame_rate, nav_field,
                     nav_jacobians, plane_normal_field, _cross3,
                     _fallback_axes)
from .obstacles import (DegenerateBlendError, DegenerateNormalError,
                        PARALLEL_TOL, bump, bump_slope)
from . import obstacles as _ob
from .multirobot import proximity_bump, proximity_bump_slope

_ZERO3 = np.zeros(3)


@dataclass(frozen=True, eq=False)
class PlanResult:
    """Control plus the reference frame diagnostics for one robot at one tick.
    chi_min is the smallest active transition value (1.0 unobstructed);
    frozen robots carry a zero control and no frame."""
    control: ControlInput
    chi_min: float
    frame: FrameTriad = None
    rate: FrameRate = None


@dataclass(frozen=True, eq=False)
class _Influence:
    """One active avoidance term with the rates of all its pieces."""
    chi: float
    chi_dot: float
    normal: np.ndarray
    normal_dot: np.ndarray
    tangent_a: np.ndarray
    tangent_b: np.ndarray
    tangent_b_dot: np.ndarray
    collinear: bool


def _nav_axes_rates(p, p_dot, goal):
    """Guidance triad (f, g, h) and its time derivatives in the world frame,
    including the fallback branch on the goal x-axis (where the fixed fallback
    z-axis has zero rate because the field direction is constant there)."""
    Rd = goal.rotation
    q = Rd.T @ (p - goal.position)
    q_dot = Rd.T @ p_dot
    f = nav_field(q)
    g = circle_normal_field(q)
    h = plane_normal_field(q)
    jf, jg, jh = nav_jacobians(q)
    f_dot = jf @ q_dot
    if companions_degenerate(q, g, h):
        ay, az = _fallback_axes(f)
        ay_dot = _cross3(az, f_dot)
        axes = (f, az, ay)
        rates = (f_dot, _ZERO3, ay_dot)
    else:
        axes = (f, g, h)
        rates = (f_dot, jg @ q_dot, jh @ q_dot)
    world_axes = tuple(Rd @ a for a in axes)
    world_rates = tuple(Rd @ r for r in rates)
    return world_axes, world_rates


def _branch_tangents(n, n_dot, f, f_dot, g, g_dot, h, h_dot, cross_floor):
    """Tangential companions and rates for a surface normal, picking the
    collinear branch when ||n x f|| falls under cross_floor."""
    ta = _cross3(n, f)
    if float(np.linalg.norm(ta)) > cross_floor:
        ta_dot = _cross3(n_dot, f) + _cross3(n, f_dot)
        tb = _cross3(ta, n)
        tb_dot = _cross3(ta_dot, n) + _cross3(ta, n_dot)
        return ta, tb, tb_dot, False
    return h, g, g_dot, True


def _obstacle_influence(p, p_dot, ob, f, f_dot, g, g_dot, h, h_dot):
    lev = ob.level(p)
    if lev >= ob.c_bar:
        return None
    n = ob.gradient(p)
    nn = float(np.linalg.norm(n))
    if nn <= _ob.NORMAL_MIN:
        raise DegenerateNormalError("level-surface gradient vanished")
    rel = p_dot - ob.velocity
    lev_dot = float(n @ rel)
    chi = bump(lev, ob.c_bar)
    chi_dot = bump_slope(lev, ob.c_bar) * lev_dot
    n_dot = ob.hessian_diag(p) * rel
    floor = PARALLEL_TOL * nn * float(np.linalg.norm(f))
    ta, tb, tb_dot, coll = _branch_tangents(n, n_dot, f, f_dot, g, g_dot, h, h_dot, floor)
    return _Influence(chi, chi_dot, n, n_dot, ta, tb, tb_dot, coll)


def _neighbor_influence(p, p_dot, nb, f, f_dot, g, g_dot, h, h_dot):
    d = p - nb.position
    dist = float(np.linalg.norm(d))
    if dist >= nb.r_d or dist <= 1e-12:
        return None
    n = d / dist
    rel = p_dot - nb.velocity
    dist_dot = float(n @ rel)
    n_dot = (rel - dist_dot * n) / dist
    chi = proximity_bump(dist, nb.r_c, nb.r_d)
    chi_dot = proximity_bump_slope(dist, nb.r_c, nb.r_d) * dist_dot
    floor = PARALLEL_TOL * float(np.linalg.norm(f))
    ta, tb, tb_dot, coll = _branch_tangents(n, n_dot, f, f_dot, g, g_dot, h, h_dot, floor)
    return _Influence(chi, chi_dot, n, n_dot, ta, tb, tb_dot, coll)


def _projection_axes(F, F_dot, g, g_dot):
    """Fallback companion axes (projection of the auxiliary field off the
    blended direction) with rates."""
    fn = float(np.linalg.norm(F))
    fhat = F / fn
    fhat_dot = (F_dot - float(fhat @ F_dot) * fhat) / fn
    u = g - float(g @ fhat) * fhat
    u_dot = (g_dot - (float(g_dot @ fhat) + float(g @ fhat_dot)) * fhat
             - float(g @ fhat) * fhat_dot)
    if float(np.linalg.norm(u)) <= 1e-9 * max(float(np.linalg.norm(g)), 1.0):
        cand = np.zeros(3)
        cand[int(np.argmin(np.abs(fhat)))] = 1.0
        u = cand - float(cand @ fhat) * fhat
        u_dot = -float(cand @ fhat_dot) * fhat - float(cand @ fhat) * fhat_dot
    H = _cross3(u, F)
    H_dot = _cross3(u_dot, F) + _cross3(u, F_dot)
    return (F, H, u), (F_dot, H_dot, u_dot)


def _composite_axes(f, g, h, f_dot, g_dot, h_dot, influences):
    """Blend the guidance triad with the active influences; returns the frame
    axes in (x, y, z) column order, their rates, and the smallest transition.

    A single active influence keeps the blended companion construction; two or
    more (or an undefined blend coefficient) drop to the projection fallback,
    which is the only orthogonal completion available in the composite case.
    """
    if not influences:
        return (f, h, g), (f_dot, h_dot, g_dot), 1.0

    chis = [inf.chi for inf in influences]
    prod = 1.0
    for c in chis:
        prod *= c
    prod_dot = 0.0
    for k, inf in enumerate(influences):
        term = inf.chi_dot
        for m, c in enumerate(chis):
            if m != k:
                term *= c
        prod_dot += term
    F = prod * f
    F_dot = prod_dot * f + prod * f_dot
    for inf in influences:
        F = F + (1.0 - inf.chi) * inf.tangent_b
        F_dot = F_dot - inf.chi_dot * inf.tangent_b + (1.0 - inf.chi) * inf.tangent_b_dot

    if len(influences) == 1:
        inf = influences[0]
        try:
            num = inf.chi * float(f @ inf.normal)
            other = (inf.chi - 1.0) * float(inf.tangent_b @ g)
            den = num + other
            if abs(den) < _ob.BLEND_DENOM_REL * (abs(num) + abs(other) + 1e-30):
                raise DegenerateBlendError("blend coefficient denominator vanished")
            num_dot = (inf.chi_dot * float(f @ inf.normal)
                       + inf.chi * (float(f_dot @ inf.normal) + float(f @ inf.normal_dot)))
            other_dot = (inf.chi_dot * float(inf.tangent_b @ g)
                         + (inf.chi - 1.0) * (float(inf.tangent_b_dot @ g)
                                              + float(inf.tangent_b @ g_dot)))
            mu = num / den
            mu_dot = (num_dot * den - num * (num_dot + other_dot)) / (den * den)
            G = mu * g + (1.0 - mu) * inf.normal
            G_dot = (mu_dot * g + mu * g_dot
                     - mu_dot * inf.normal + (1.0 - mu) * inf.normal_dot)
            H = _cross3(G, F)
            H_dot = _cross3(G_dot, F) + _cross3(G, F_dot)
            return (F, H, G), (F_dot, H_dot, G_dot), chis[0]
        except DegenerateBlendError:
            pass
    axes, rates = _projection_axes(F, F_dot, g, g_dot)
    return axes, rates, min(chis)


def robot_plan(spec, p, R, reached, obstacles_now, neighbors):
    """Control inputs for one robot at its current pose.

    obstacles_now are the runtime (clearance-inflated, current-center)
    obstacles; neighbors are NeighborState records for every higher-priority
    robot.  A robot that has reached its goal holds a zero command.
    """
    if reached:
        return PlanResult(ControlInput(_ZERO3.copy(), 0.0), 1.0)
    v_x = speed_command(p, spec.goal.position, spec.k_v)
    p_dot = v_x * R[:, 0]
    (f, g, h), (f_dot, g_dot, h_dot) = _nav_axes_rates(p, p_dot, spec.goal)

    influences = []
    for ob in obstacles_now:
        inf = _obstacle_influence(p, p_dot, ob, f, f_dot, g, g_dot, h, h_dot)
        if inf is not None:
            influences.append(inf)
    for nb in neighbors:
        inf = _neighbor_influence(p, p_dot, nb, f, f_dot, g, g_dot, h, h_dot)
        if inf is not None:
            influences.append(inf)

    axes, rates, chi_min = _composite_axes(f, g, h, f_dot, g_dot, h_dot, influences)
    triad = build_frame(*axes)
    rate = frame_rate(triad, *rates)
    err = attitude_error(R, triad.R)
    omega = angular_command(err, R, triad.R, rate.R_dot, spec.k_w)
    return PlanResult(ControlInput(omega, v_x), chi_min, triad, rate)
