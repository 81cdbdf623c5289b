"""Time-stepping of the full multi-robot, multi-obstacle system.

Robots advance in strictly ascending priority within a tick so every robot
sees current-tick velocities of the robots it must avoid.  Translation uses a
classical 4-stage Runge-Kutta step with the attitude held at sub-step values
propagated on the rotation group; the attitude itself takes the group update
followed by a nearest-rotation repair.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .multirobot import NeighborState, separation
from .planner import PlanResult, robot_plan
from .so3 import exp_so3, project_to_so3

_EX = np.array([1.0, 0.0, 0.0])


class SimulationError(RuntimeError):
    """The integrator produced a non-finite state; carries a diagnostic."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


@dataclass(frozen=True, eq=False)
class Scenario:
    """Immutable description of one batch run."""
    robots: list
    obstacles: list
    dt: float = 0.01
    t_max: float = 200.0
    eps_goal: float = 1e-3
    output_stride: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_max <= self.dt:
            raise ValueError("t_max must exceed dt")
        if self.eps_goal <= 0.0:
            raise ValueError("eps_goal must be positive")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")


@dataclass(eq=False)
class SimState:
    """Mutable integration state: robot poses, reach latches, and the runtime
    obstacles (inflated copies whose centers advance)."""
    t: float
    step_index: int
    positions: list
    attitudes: list
    reached: list
    obstacles: list


@dataclass(frozen=True, eq=False)
class Margins:
    """Safety margins at one instant: per-robot minima of the obstacle level
    value and of the separation to other robots (inf when not applicable)."""
    ups_min: list
    psi_min: list
    min_upsilon: float
    min_psi: float
    obstacle_breach: bool
    robot_breach: bool


@dataclass(frozen=True, eq=False)
class RobotSample:
    robot_id: int
    p: np.ndarray
    R: np.ndarray
    v_x: float
    omega: np.ndarray
    chi_min: float
    psi_min: float
    ups_min: float
    goal_err: float
    heading_err: float


@dataclass(frozen=True, eq=False)
class Sample:
    t: float
    robots: list


@dataclass(frozen=True, eq=False)
class Report:
    """End-of-run summary with the three monitored objectives: every robot at
    its goal, no obstacle-level breach, no pairwise dangerous-area breach."""
    reached: list
    goal_errors: list
    heading_errors: list
    min_upsilon: float
    min_psi: float
    obstacle_breach: bool
    robot_breach: bool
    goals_converged: bool
    obstacles_avoided: bool
    robots_separated: bool
    steps: int
    t_final: float

    @property
    def all_objectives_hold(self):
        return self.goals_converged and self.obstacles_avoided and self.robots_separated


@dataclass(frozen=True, eq=False)
class SimResult:
    samples: list
    report: Report
    state: SimState


def runtime_obstacles(scenario):
    """Obstacles as the simulation sees them: semi-axes inflated by the
    largest robot clearance radius so the point-robot level checks carry the
    physical margin."""
    margin = max((r.r_c for r in scenario.robots), default=0.0)
    return [ob.inflated(margin) for ob in scenario.obstacles]


def initial_state(scenario):
    return SimState(
        t=0.0,
        step_index=0,
        positions=[r.position0.copy() for r in scenario.robots],
        attitudes=[project_to_so3(r.attitude0) for r in scenario.robots],
        reached=[False] * len(scenario.robots),
        obstacles=runtime_obstacles(scenario),
    )


def integrate_pose(p, R, v_x, omega, dt):
    """One kinematic step: Runge-Kutta translation along the body x-axis with
    the attitude held at group-propagated sub-step values, then the group
    update with nearest-rotation repair.  Zero inputs leave the pose
    bit-identical."""
    w2 = float(omega[0]) ** 2 + float(omega[1]) ** 2 + float(omega[2]) ** 2
    if v_x == 0.0 and w2 == 0.0:
        return p, R
    E_half = exp_so3(omega * (0.5 * dt))
    R_half = R @ E_half
    R_full = R_half @ E_half
    k1 = R[:, 0]
    k_mid = R_half[:, 0]
    k4 = R_full[:, 0]
    p_new = p + (v_x * dt / 6.0) * (k1 + 4.0 * k_mid + k4)
    return p_new, project_to_so3(R_full)


def safety_monitor(state, scenario):
    """Current margins: per-robot minimum obstacle level and minimum
    separation, with breach flags (level under 1, separation under the larger
    dangerous radius of the pair)."""
    n = len(scenario.robots)
    ups = [math.inf] * n
    psi = [math.inf] * n
    obstacle_breach = False
    robot_breach = False
    for i in range(n):
        p_i = state.positions[i]
        for ob in state.obstacles:
            ups[i] = min(ups[i], ob.level(p_i))
        if ups[i] < 1.0:
            obstacle_breach = True
    for i in range(n):
        for j in range(i + 1, n):
            d = separation(state.positions[i], state.positions[j])
            psi[i] = min(psi[i], d)
            psi[j] = min(psi[j], d)
            if d < max(scenario.robots[i].r_c, scenario.robots[j].r_c):
                robot_breach = True
    return Margins(ups, psi, min(ups), min(psi), obstacle_breach, robot_breach)


def _plan_all(state, scenario):
    """Plan every robot in ascending priority; the velocities of already
    planned (higher-priority) robots feed the avoidance feedforward."""
    plans = []
    velocities = []
    for i, spec in enumerate(scenario.robots):
        neighbors = []
        for j in range(i):
            other = scenario.robots[j]
            neighbors.append(NeighborState(
                other.robot_id, state.positions[j], velocities[j],
                other.r_c, other.r_d))
        plan = robot_plan(spec, state.positions[i], state.attitudes[i],
                          state.reached[i], state.obstacles, neighbors)
        plans.append(plan)
        velocities.append(plan.control.v_x * state.attitudes[i][:, 0])
    return plans


def step(state, scenario, plans=None):
    """Advance the state by one dt using the given plans (computed fresh when
    not supplied).  Raises SimulationError on a non-finite result."""
    if plans is None:
        plans = _plan_all(state, scenario)
    dt = scenario.dt
    for i in range(len(scenario.robots)):
        if state.reached[i]:
            continue
        c = plans[i].control
        p_new, R_new = integrate_pose(state.positions[i], state.attitudes[i],
                                      c.v_x, c.omega, dt)
        if not math.isfinite(float(p_new @ p_new) + float(np.sum(R_new))):
            raise SimulationError(
                f"non-finite state for robot {scenario.robots[i].robot_id} "
                f"at t={state.t:.6g}",
                diagnostic={"robot_id": scenario.robots[i].robot_id,
                            "t": state.t, "p": state.positions[i].copy(),
                            "control": c})
        state.positions[i] = p_new
        state.attitudes[i] = R_new
    state.obstacles = [replace(ob, center=ob.center + dt * ob.velocity)
                       if float(ob.velocity @ ob.velocity) > 0.0 else ob
                       for ob in state.obstacles]
    state.step_index += 1
    state.t = state.step_index * dt
    return state


def _record(state, scenario, plans, margins):
    rows = []
    for i, spec in enumerate(scenario.robots):
        p = state.positions[i]
        R = state.attitudes[i]
        c = plans[i].control
        rows.append(RobotSample(
            robot_id=spec.robot_id,
            p=p.copy(),
            R=R.copy(),
            v_x=c.v_x,
            omega=c.omega.copy(),
            chi_min=plans[i].chi_min,
            psi_min=margins.psi_min[i],
            ups_min=margins.ups_min[i],
            goal_err=separation(p, spec.goal.position),
            heading_err=float(np.linalg.norm(R @ _EX - spec.goal.heading)),
        ))
    return Sample(state.t, rows)


def run_scenario(scenario):
    """Integrate until every robot has reached its goal or t_max elapses.

    Samples are recorded every output_stride steps plus at the terminal state;
    the safety minima in the report come from every step, not just the
    sampled ones.
    """
    state = initial_state(scenario)
    n_steps = int(round(scenario.t_max / scenario.dt))
    min_ups = math.inf
    min_psi = math.inf
    obstacle_breach = False
    robot_breach = False
    samples = []

    k = 0
    while True:
        for i, spec in enumerate(scenario.robots):
            if not state.reached[i] and \
                    separation(state.positions[i], spec.goal.position) < scenario.eps_goal:
                state.reached[i] = True
        margins = safety_monitor(state, scenario)
        min_ups = min(min_ups, margins.min_upsilon)
        min_psi = min(min_psi, margins.min_psi)
        obstacle_breach = obstacle_breach or margins.obstacle_breach
        robot_breach = robot_breach or margins.robot_breach
        plans = _plan_all(state, scenario)
        done = all(state.reached) or k >= n_steps
        if k % scenario.output_stride == 0 or done:
            samples.append(_record(state, scenario, plans, margins))
        if done:
            break
        step(state, scenario, plans)
        k += 1

    goal_errors = [separation(state.positions[i], r.goal.position)
                   for i, r in enumerate(scenario.robots)]
    heading_errors = [float(np.linalg.norm(state.attitudes[i] @ _EX - r.goal.heading))
                      for i, r in enumerate(scenario.robots)]
    report = Report(
        reached=list(state.reached),
        goal_errors=goal_errors,
        heading_errors=heading_errors,
        min_upsilon=min_ups,
        min_psi=min_psi,
        obstacle_breach=obstacle_breach,
        robot_breach=robot_breach,
        goals_converged=all(state.reached),
        obstacles_avoided=not obstacle_breach,
        robots_separated=not robot_breach,
        steps=k,
        t_final=state.t,
    )
    return SimResult(samples, report, state)
