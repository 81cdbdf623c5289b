"""Scenario file parsing/serialization, trajectory CSV export, and the field
grid export for external plotting.

Scenario files are JSON with three top-level keys: sim (dt, t_max, eps_goal,
output_stride, seed), robots, and obstacles.  Validation reports every issue
with a stable diagnostic code and the JSON path of the offending value.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .fields import Goal, goal_nav_field, nav_triad
from .multirobot import RobotSpec, separation
from .obstacles import Obstacle, avoidance_field
from .sim import Sample, Scenario, runtime_obstacles
from .so3 import euler_zyx_to_rot, is_rotation

TRAJECTORY_HEADER = ("t,id,x,y,z,r11,r12,r13,r21,r22,r23,r31,r32,r33,"
                     "vx,wx,wy,wz,chi_min,psi_min,ups_min,goal_err,heading_err")

# Diagnostic codes used by validation
E_SCHEMA = "E_SCHEMA"                      # wrong structure, type, or unknown key
E_VALUE = "E_VALUE"                        # value out of its valid range
E_ROTATION = "E_ROTATION"                  # initial attitude is not a rotation
E_IDS = "E_IDS"                            # robot ids not unique and contiguous from 1
E_GOAL_COVERED = "E_GOAL_COVERED"          # a goal lies inside an obstacle's reactive region
E_OBSTACLE_OVERLAP = "E_OBSTACLE_OVERLAP"  # two reactive regions overlap
E_START_UNSAFE = "E_START_UNSAFE"          # a start pose inside a reactive region or dangerous sphere

_SIM_DEFAULTS = {"dt": 0.01, "t_max": 200.0, "eps_goal": 1e-3,
                 "output_stride": 10, "seed": 0}
_ROBOT_KEYS = {"id", "p0", "rpy0", "R0", "p_d", "e_d", "r_c", "r_d", "k_w", "k_v"}
_OBSTACLE_KEYS = {"center", "velocity", "semi_axes", "exponents", "c_bar"}


@dataclass(frozen=True)
class ScenarioIssue:
    code: str
    path: str
    message: str

    def __str__(self):
        return f"{self.code} at {self.path}: {self.message}"


class ScenarioError(ValueError):
    """Scenario file rejected; carries the full issue list."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


def _fail(code, path, message):
    raise ScenarioError([ScenarioIssue(code, path, message)])


def _vec3(raw, path):
    if (not isinstance(raw, (list, tuple)) or len(raw) != 3
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)):
        _fail(E_SCHEMA, path, "expected a list of 3 numbers")
    return np.array([float(v) for v in raw])


def _number(raw, path):
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        _fail(E_SCHEMA, path, "expected a number")
    return float(raw)


def _check_keys(d, allowed, path):
    for key in d:
        if key not in allowed:
            _fail(E_SCHEMA, f"{path}.{key}", "unknown key")


def _robot_from_dict(d, path):
    _check_keys(d, _ROBOT_KEYS, path)
    if "id" not in d or not isinstance(d["id"], int) or isinstance(d["id"], bool):
        _fail(E_SCHEMA, f"{path}.id", "robot id must be an integer")
    if "p0" not in d:
        _fail(E_SCHEMA, f"{path}.p0", "initial position is required")
    p0 = _vec3(d["p0"], f"{path}.p0")
    if "R0" in d and "rpy0" in d:
        _fail(E_SCHEMA, f"{path}.R0", "give either R0 or rpy0, not both")
    if "R0" in d:
        raw = d["R0"]
        if not isinstance(raw, (list, tuple)) or len(raw) != 9:
            _fail(E_SCHEMA, f"{path}.R0", "expected 9 numbers (row-major)")
        R0 = np.array([float(v) for v in raw]).reshape(3, 3)
        if not is_rotation(R0, tol=1e-9):
            _fail(E_ROTATION, f"{path}.R0", "matrix is not a rotation within 1e-9")
    else:
        rpy = _vec3(d.get("rpy0", [0.0, 0.0, 0.0]), f"{path}.rpy0")
        R0 = euler_zyx_to_rot(*np.deg2rad(rpy))
    p_d = _vec3(d.get("p_d", [0.0, 0.0, 0.0]), f"{path}.p_d")
    e_d = _vec3(d.get("e_d", [1.0, 0.0, 0.0]), f"{path}.e_d")
    n = float(np.linalg.norm(e_d))
    if abs(n - 1.0) > 1e-6:
        _fail(E_VALUE, f"{path}.e_d", "heading must be unit norm within 1e-6")
    e_d = e_d / n
    r_c = _number(d.get("r_c", 1.0), f"{path}.r_c")
    r_d = _number(d.get("r_d", 5.0), f"{path}.r_d")
    if not 0.0 < r_c < r_d:
        _fail(E_VALUE, f"{path}.r_c", "radii must satisfy 0 < r_c < r_d")
    k_w = _number(d.get("k_w", 2.0), f"{path}.k_w")
    k_v = _number(d.get("k_v", 0.1), f"{path}.k_v")
    if k_w <= 0.0 or k_v <= 0.0:
        _fail(E_VALUE, f"{path}.k_w", "gains must be positive")
    return RobotSpec(d["id"], p0, R0, Goal.from_heading(p_d, e_d),
                     r_c, r_d, k_w, k_v)


def _obstacle_from_dict(d, path):
    _check_keys(d, _OBSTACLE_KEYS, path)
    for key in ("center", "semi_axes", "exponents"):
        if key not in d:
            _fail(E_SCHEMA, f"{path}.{key}", "required obstacle key missing")
    center = _vec3(d["center"], f"{path}.center")
    velocity = _vec3(d.get("velocity", [0.0, 0.0, 0.0]), f"{path}.velocity")
    semi = _vec3(d["semi_axes"], f"{path}.semi_axes")
    if min(semi) <= 0.0:
        _fail(E_VALUE, f"{path}.semi_axes", "semi-axes must be positive")
    exps = d["exponents"]
    if (not isinstance(exps, (list, tuple)) or len(exps) != 3
            or not all(isinstance(e, int) and not isinstance(e, bool) for e in exps)):
        _fail(E_SCHEMA, f"{path}.exponents", "expected a list of 3 integers")
    if min(exps) < 1:
        _fail(E_VALUE, f"{path}.exponents", "exponents must be >= 1")
    c_bar = _number(d.get("c_bar", 2.0), f"{path}.c_bar")
    if c_bar <= 1.0:
        _fail(E_VALUE, f"{path}.c_bar", "c_bar must exceed 1")
    return Obstacle(center, tuple(semi), tuple(int(e) for e in exps), c_bar, velocity)


def parse_scenario_dict(doc):
    """Scenario from an already-decoded JSON document; raises ScenarioError
    with all collected issues on the first structural problem or on any
    failed semantic validation."""
    if not isinstance(doc, dict):
        _fail(E_SCHEMA, "$", "top level must be an object")
    _check_keys(doc, {"sim", "robots", "obstacles"}, "$")
    sim_raw = doc.get("sim", {})
    if not isinstance(sim_raw, dict):
        _fail(E_SCHEMA, "$.sim", "sim must be an object")
    _check_keys(sim_raw, set(_SIM_DEFAULTS), "$.sim")
    sim = dict(_SIM_DEFAULTS)
    for key, val in sim_raw.items():
        if key in ("output_stride", "seed"):
            if not isinstance(val, int) or isinstance(val, bool):
                _fail(E_SCHEMA, f"$.sim.{key}", "expected an integer")
            sim[key] = val
        else:
            sim[key] = _number(val, f"$.sim.{key}")
    if sim["dt"] <= 0.0:
        _fail(E_VALUE, "$.sim.dt", "dt must be positive")
    if sim["t_max"] <= sim["dt"]:
        _fail(E_VALUE, "$.sim.t_max", "t_max must exceed dt")
    if sim["eps_goal"] <= 0.0:
        _fail(E_VALUE, "$.sim.eps_goal", "eps_goal must be positive")
    if sim["output_stride"] < 1:
        _fail(E_VALUE, "$.sim.output_stride", "output_stride must be >= 1")

    robots_raw = doc.get("robots")
    if not isinstance(robots_raw, list) or not robots_raw:
        _fail(E_SCHEMA, "$.robots", "at least one robot is required")
    robots = [_robot_from_dict(r, f"$.robots[{i}]") if isinstance(r, dict)
              else _fail(E_SCHEMA, f"$.robots[{i}]", "robot must be an object")
              for i, r in enumerate(robots_raw)]
    obstacles_raw = doc.get("obstacles", [])
    if not isinstance(obstacles_raw, list):
        _fail(E_SCHEMA, "$.obstacles", "obstacles must be a list")
    obstacles = [_obstacle_from_dict(o, f"$.obstacles[{i}]") if isinstance(o, dict)
                 else _fail(E_SCHEMA, f"$.obstacles[{i}]", "obstacle must be an object")
                 for i, o in enumerate(obstacles_raw)]

    robots = sorted(robots, key=lambda r: r.robot_id)
    scenario = Scenario(robots, obstacles, sim["dt"], sim["t_max"],
                        sim["eps_goal"], sim["output_stride"], sim["seed"])
    issues = validate_scenario(scenario)
    if issues:
        raise ScenarioError(issues)
    return scenario


def parse_scenario(path):
    """Load and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError([ScenarioIssue(E_SCHEMA, "$", f"invalid JSON: {exc}")])
    return parse_scenario_dict(doc)


def _surface_directions(count=512):
    """Deterministic near-uniform directions (golden spiral)."""
    k = np.arange(count) + 0.5
    phi = math.pi * (1.0 + math.sqrt(5.0)) * k
    cos_t = 1.0 - 2.0 * k / count
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t ** 2))
    return np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=1)


def _reactive_regions_overlap(ob_a, ob_b):
    """Conservative-then-sampled check that two reactive regions stay apart.

    Disjoint bounding spheres settle it immediately; otherwise the outer
    boundary of each region is sampled and every sample must sit strictly
    outside the other's reactive level.
    """
    gap = separation(ob_a.center, ob_b.center)
    if gap > ob_a.bounding_radius() + ob_b.bounding_radius():
        return False
    for first, second in ((ob_a, ob_b), (ob_b, ob_a)):
        if second.level(first.center) <= second.c_bar:
            return True
        for d in _surface_directions():
            if second.level(first.surface_point(d, first.c_bar)) <= second.c_bar:
                return True
    return False


def validate_scenario(scenario):
    """Semantic checks on a built scenario; returns the list of issues.

    Geometry checks run against the runtime (clearance-inflated) obstacles,
    which is what the planner actually steers around.
    """
    issues = []
    ids = [r.robot_id for r in scenario.robots]
    if sorted(ids) != list(range(1, len(ids) + 1)):
        issues.append(ScenarioIssue(
            E_IDS, "$.robots", "robot ids must be unique and contiguous from 1"))
    inflated = runtime_obstacles(scenario)
    for oi, ob in enumerate(inflated):
        for i, r in enumerate(scenario.robots):
            if ob.level(r.goal.position) <= ob.c_bar:
                issues.append(ScenarioIssue(
                    E_GOAL_COVERED, f"$.robots[{i}].p_d",
                    f"goal lies inside reactive region of obstacle {oi}"))
            if ob.level(r.position0) <= ob.c_bar:
                issues.append(ScenarioIssue(
                    E_START_UNSAFE, f"$.robots[{i}].p0",
                    f"start lies inside reactive region of obstacle {oi}"))
    for i in range(len(scenario.robots)):
        for j in range(i + 1, len(scenario.robots)):
            d = separation(scenario.robots[i].position0, scenario.robots[j].position0)
            if d <= max(scenario.robots[i].r_c, scenario.robots[j].r_c):
                issues.append(ScenarioIssue(
                    E_START_UNSAFE, f"$.robots[{j}].p0",
                    f"start inside dangerous sphere of robot {scenario.robots[i].robot_id}"))
    for a in range(len(inflated)):
        for b in range(a + 1, len(inflated)):
            if _reactive_regions_overlap(inflated[a], inflated[b]):
                issues.append(ScenarioIssue(
                    E_OBSTACLE_OVERLAP, f"$.obstacles[{b}]",
                    f"reactive region overlaps obstacle {a}"))
    return issues


def scenario_to_dict(scenario):
    """Canonical JSON document for a scenario (attitudes as 9-number rows)."""
    return {
        "sim": {"dt": scenario.dt, "t_max": scenario.t_max,
                "eps_goal": scenario.eps_goal,
                "output_stride": scenario.output_stride, "seed": scenario.seed},
        "robots": [{
            "id": r.robot_id,
            "p0": list(r.position0),
            "R0": [float(v) for v in r.attitude0.reshape(-1)],
            "p_d": list(r.goal.position),
            "e_d": list(r.goal.heading),
            "r_c": r.r_c, "r_d": r.r_d, "k_w": r.k_w, "k_v": r.k_v,
        } for r in scenario.robots],
        "obstacles": [{
            "center": list(ob.center),
            "velocity": list(ob.velocity),
            "semi_axes": list(ob.semi_axes),
            "exponents": list(ob.exponents),
            "c_bar": ob.c_bar,
        } for ob in scenario.obstacles],
    }


def write_scenario(scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def write_trajectory(samples, path):
    """CSV with one row per robot per sample, 17 significant digits, fixed
    header; byte-identical output for identical samples."""
    lines = [TRAJECTORY_HEADER]
    for sample in samples:
        for row in sample.robots:
            R = row.R
            fields = [f"{sample.t:.17g}", str(row.robot_id)]
            fields += [f"{v:.17g}" for v in row.p]
            fields += [f"{R[i, j]:.17g}" for i in range(3) for j in range(3)]
            fields.append(f"{row.v_x:.17g}")
            fields += [f"{v:.17g}" for v in row.omega]
            fields += [f"{row.chi_min:.17g}", f"{row.psi_min:.17g}",
                       f"{row.ups_min:.17g}", f"{row.goal_err:.17g}",
                       f"{row.heading_err:.17g}"]
            lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def read_trajectory(path):
    """Rows of a trajectory CSV as dicts keyed by the header fields."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRAJECTORY_HEADER:
            raise ValueError("unexpected trajectory header")
        keys = header.split(",")
        rows = []
        for line in fh:
            vals = line.strip().split(",")
            row = {k: (int(v) if k == "id" else float(v)) for k, v in zip(keys, vals)}
            rows.append(row)
    return rows


def export_field_grid(goal, obstacles, region, resolution, path):
    """CSV of the guidance field (blended with avoidance when obstacles are
    given) over a rectilinear lattice; x varies slowest, z fastest.

    region is ((xmin, xmax), (ymin, ymax), (zmin, zmax)); resolution is the
    per-axis sample count, at least 2 each.
    """
    res = tuple(int(r) for r in resolution)
    if len(res) != 3 or min(res) < 2:
        raise ValueError("resolution must be >= 2 per axis")
    axes = []
    for k, (lo, hi) in enumerate(region):
        lo, hi = float(lo), float(hi)
        if not hi > lo:
            raise ValueError("degenerate region extent")
        axes.append(np.linspace(lo, hi, res[k]))
    lines = ["x,y,z,Fx,Fy,Fz"]
    for x in axes[0]:
        for y in axes[1]:
            for z in axes[2]:
                p = np.array([x, y, z])
                vec = goal_nav_field(p, goal)
                if obstacles and float(vec @ vec) > 0.0:
                    f, g, h = nav_triad(p, goal)
                    vec = avoidance_field(p, f, obstacles, g, h)
                lines.append(",".join(f"{v:.17g}" for v in (x, y, z, *vec)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
