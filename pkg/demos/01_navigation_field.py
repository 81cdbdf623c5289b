"""Free-space navigation: reach a target position with a terminal heading.

The guidance field's integral curves are circles through the goal, all
arriving tangent to the goal heading, so a robot that keeps its nose on the
field direction lands at the target pointing the right way.  This script
traces the field geometry, runs the closed loop from one start, and exports
a field grid you can plot with any tool.
"""

import os

import numpy as np

import vfnav as vf

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

# --- 1. the field geometry: circles through the origin -----------------
p = np.array([-6.0, 4.0, 0.0])
print("field at", p, "->", vf.nav_field(p))
print("companions are orthogonal:",
      abs(vf.nav_field(p) @ vf.circle_normal_field(p)) < 1e-9)

# the invariant-plane circle through p: x^2 + (r - C/2)^2 = (C/2)^2
r0 = np.hypot(p[1], p[2])
C = (p[0] ** 2 + r0 ** 2) / r0
print(f"integral curve through this point: circle of radius {C/2:.2f} "
      f"touching the origin")

# --- 2. closed-loop run ------------------------------------------------
start = vf.RobotSpec(1, np.array([-30.0, 18.0, -12.0]),
                     vf.exp_so3(np.array([0.2, 1.0, -0.4])),
                     vf.IDENTITY_GOAL, k_w=3.0, k_v=0.2)
scenario = vf.Scenario([start], [], dt=0.02, t_max=200.0, eps_goal=5e-3)
result = vf.run_scenario(scenario)
rep = result.report
print(f"reached the origin in {rep.t_final:.1f}s of flight: "
      f"position error {rep.goal_errors[0]:.1e}, "
      f"heading error {rep.heading_errors[0]:.1e}")

traj_path = os.path.join(OUT, "free_space_trajectory.csv")
vf.write_trajectory(result.samples, traj_path)
print("trajectory written to", traj_path)

# --- 3. field grid for external plotting -------------------------------
grid_path = os.path.join(OUT, "nav_field_grid.csv")
vf.export_field_grid(vf.IDENTITY_GOAL, [], ((-20, 20), (-20, 20), (-1, 1)),
                     (25, 25, 2), grid_path)
print("field grid written to", grid_path)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    pts = np.array([s.robots[0].p for s in result.samples])
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    ax.plot(*pts.T, lw=1.5)
    ax.scatter([0], [0], [0], c="r", marker="*", s=80)
    ax.quiver(*pts[0], *(3 * start.attitude0[:, 0]), color="g")
    ax.set_title("free-space trajectory into the goal heading")
    fig.savefig(os.path.join(OUT, "free_space_trajectory.png"), dpi=130)
    print("figure written to", os.path.join(OUT, "free_space_trajectory.png"))
except ImportError:
    print("matplotlib not available; skipping the figure")
