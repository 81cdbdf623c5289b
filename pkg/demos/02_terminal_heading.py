"""Arbitrary goals: any target position, any terminal heading.

The canonical field aims at the origin along +x; an arbitrary goal is just
the same field evaluated in the goal frame.  Here three robots fly to the
same point but must arrive from three different directions.
"""

import numpy as np

import vfnav as vf

target = np.array([40.0, 10.0, 5.0])
headings = {
    "east": np.array([1.0, 0.0, 0.0]),
    "north": np.array([0.0, 1.0, 0.0]),
    "climbing diagonal": np.array([0.6, 0.0, 0.8]),
}

for name, e_d in headings.items():
    goal = vf.Goal.from_heading(target, e_d)
    spec = vf.RobotSpec(1, np.array([-10.0, -15.0, 0.0]), np.eye(3), goal,
                        k_w=3.0, k_v=0.2)
    result = vf.run_scenario(vf.Scenario([spec], [], dt=0.02, t_max=300.0,
                                         eps_goal=5e-3))
    rep = result.report
    final_R = result.state.attitudes[0]
    arrival = final_R @ [1.0, 0.0, 0.0]
    print(f"{name:>18}: arrived with nose {np.round(arrival, 3)} "
          f"(wanted {np.round(e_d, 3)}), heading error {rep.heading_errors[0]:.1e}, "
          f"{rep.t_final:.0f}s")
