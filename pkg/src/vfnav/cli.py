"""Batch command-line surface: simulate, validate, field, corpus.

Exit status is 0 only when every monitored objective of the run holds
(goals reached, no obstacle breach, no robot-pair breach); validation
failures exit with 2.
"""

import argparse
import json
import os
import sys

import numpy as np

from .fields import Goal
from .scenario_io import (ScenarioError, export_field_grid, parse_scenario,
                          write_trajectory)
from .sim import run_scenario
from .scenarios import corpus_paths


def _parse_floats(text, count, name):
    parts = text.split(",")
    if len(parts) != count:
        raise SystemExit(f"--{name} expects {count} comma-separated numbers")
    try:
        return [float(v) for v in parts]
    except ValueError:
        raise SystemExit(f"--{name} expects numbers")


def _report_lines(name, report):
    yield (f"{name}: goals {'PASS' if report.goals_converged else 'FAIL'} "
           f"(max err {max(report.goal_errors):.3g}, "
           f"max heading err {max(report.heading_errors):.3g})")
    yield (f"{name}: obstacle margin {'PASS' if report.obstacles_avoided else 'FAIL'} "
           f"(min level {report.min_upsilon:.6g})")
    yield (f"{name}: separation {'PASS' if report.robots_separated else 'FAIL'} "
           f"(min distance {report.min_psi:.6g})")


def _report_dict(report):
    return {
        "reached": report.reached,
        "goal_errors": report.goal_errors,
        "heading_errors": report.heading_errors,
        "min_upsilon": report.min_upsilon,
        "min_psi": report.min_psi,
        "goals_converged": report.goals_converged,
        "obstacles_avoided": report.obstacles_avoided,
        "robots_separated": report.robots_separated,
        "steps": report.steps,
        "t_final": report.t_final,
    }


def _cmd_simulate(args):
    try:
        scenario = parse_scenario(args.scenario)
    except ScenarioError as exc:
        for issue in exc.issues:
            print(issue, file=sys.stderr)
        return 2
    result = run_scenario(scenario)
    os.makedirs(args.out, exist_ok=True)
    write_trajectory(result.samples, os.path.join(args.out, "trajectory.csv"))
    with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(_report_dict(result.report), fh, indent=2)
        fh.write("\n")
    for line in _report_lines(os.path.basename(args.scenario), result.report):
        print(line)
    return 0 if result.report.all_objectives_hold else 1


def _cmd_validate(args):
    try:
        parse_scenario(args.scenario)
    except ScenarioError as exc:
        for issue in exc.issues:
            print(issue)
        return 2
    print("OK")
    return 0


def _cmd_field(args):
    goal_pos = _parse_floats(args.goal, 3, "goal")
    heading = np.array(_parse_floats(args.heading, 3, "heading"))
    heading = heading / np.linalg.norm(heading)
    goal = Goal.from_heading(goal_pos, heading)
    obstacles = []
    if args.obstacles:
        try:
            scenario = parse_scenario(args.obstacles)
        except ScenarioError as exc:
            for issue in exc.issues:
                print(issue, file=sys.stderr)
            return 2
        obstacles = scenario.obstacles
    lims = _parse_floats(args.region, 6, "region")
    region = ((lims[0], lims[1]), (lims[2], lims[3]), (lims[4], lims[5]))
    res = [int(v) for v in _parse_floats(args.resolution, 3, "resolution")]
    export_field_grid(goal, obstacles, region, res, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_corpus(args):
    if not args.all:
        print("nothing to run (use --all)", file=sys.stderr)
        return 2
    ok = True
    for name, path in corpus_paths().items():
        scenario = parse_scenario(path)
        result = run_scenario(scenario)
        for line in _report_lines(name, result.report):
            print(line)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            write_trajectory(result.samples,
                             os.path.join(args.out, f"{name}_trajectory.csv"))
        ok = ok and result.report.all_objectives_hold
    print("corpus: ALL PASS" if ok else "corpus: FAIL")
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="vfnav",
        description="Vector-field motion planning batch simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario file")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_field = sub.add_parser("field", help="export the guidance field on a grid")
    p_field.add_argument("--goal", required=True, help="px,py,pz")
    p_field.add_argument("--heading", default="1,0,0", help="ex,ey,ez")
    p_field.add_argument("--obstacles", default=None,
                         help="scenario file whose obstacles blend the field")
    p_field.add_argument("--region", required=True,
                         help="xmin,xmax,ymin,ymax,zmin,zmax")
    p_field.add_argument("--resolution", default="20,20,20", help="nx,ny,nz")
    p_field.add_argument("--out", required=True)
    p_field.set_defaults(func=_cmd_field)

    p_corpus = sub.add_parser("corpus", help="run the shipped scenario corpus")
    p_corpus.add_argument("--all", action="store_true")
    p_corpus.add_argument("--out", default=None, help="directory for trajectories")
    p_corpus.set_defaults(func=_cmd_corpus)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
