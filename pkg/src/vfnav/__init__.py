"""Vector-field motion planning for 3D nonholonomic rigid-body robots.

A library plus batch CLI: navigation to a target position with a terminal
heading, obstacle avoidance by tangential field blending, and priority-based
multi-robot collision avoidance, all on exact SO(3) kinematics.
"""

from .so3 import (exp_so3, hat, log_so3, project_to_so3, rotation_between,
                  vee)
from .fields import (DegenerateFrameError, FrameRate, FrameTriad, Goal,
                     IDENTITY_GOAL, build_frame, circle_normal_field,
                     frame_rate, goal_nav_field, nav_field, nav_jacobians,
                     nav_triad, plane_normal_field)
from .obstacles import (DegenerateBlendError, DegenerateNormalError, Obstacle,
                        SurfaceFrame, avoidance_field, avoidance_frame, bump,
                        composite_matrix, normal_blend, tangent_frame)
from .multirobot import (NeighborSets, NeighborState, RobotSpec,
                         collision_field, neighbor_sets, proximity_bump,
                         separation, sphere_frame)
from .control import (AttitudeError, ControlInput, angular_command,
                      attitude_error, speed_command)
from .planner import PlanResult, robot_plan
from .sim import (Margins, Report, Sample, Scenario, SimResult, SimState,
                  SimulationError, initial_state, integrate_pose,
                  run_scenario, safety_monitor, step)
from .scenario_io import (ScenarioError, ScenarioIssue, export_field_grid,
                          parse_scenario, parse_scenario_dict, read_trajectory,
                          scenario_to_dict, validate_scenario, write_scenario,
                          write_trajectory)

__version__ = "0.1.0"
