"""Command line front end.

Commands: ``synth`` (full pipeline), ``factor`` (list all factorizations of a
motion polynomial), ``traj`` (sample trajectories to CSV), ``validate``
(pose-file checks only).  Exit codes: 0 ok, 2 parse/validation, 3 synthesis
infeasible, 4 order defect, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io as sio
from .dualquat import Tolerances, act_on_point, Pose, project_to_quadric
from .errors import OrderDefect, SixrError, SynthesisInfeasible
from .factorization import fac, verify_factorization
from .synthesis import SynthesisConfig, joint_angle_vector, synthesize

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_ORDER_DEFECT = 4
EXIT_NUMERICAL = 5


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_synth(args) -> int:
    try:
        data = sio.load_pose_file(args.poses)
    except sio.FileFormatError as exc:
        return _fail(EXIT_PARSE, exc)
    if len(data.poses) != 4:
        return _fail(EXIT_PARSE, f"{args.poses}: synthesis needs exactly 4 poses, "
                                 f"got {len(data.poses)}")
    tol = Tolerances(input=data.tolerance) if data.tolerance else Tolerances()
    cfg = SynthesisConfig(
        grid_size=args.grid,
        quartile=args.quartile,
        quad_tol=args.quad_tol,
        rank_by=args.rank_by,
        tolerances=tol,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    winner_path = os.path.join(args.out_dir, "winner.json")
    try:
        report = synthesize(data.poses, cfg)
    except SynthesisInfeasible as exc:
        with open(winner_path, "w", encoding="utf-8") as fh:
            json.dump({"format_version": sio.FORMAT_VERSION, "candidates": [],
                       "error": str(exc)}, fh, indent=2)
            fh.write("\n")
        return _fail(EXIT_INFEASIBLE, exc)
    except OrderDefect as exc:
        return _fail(EXIT_ORDER_DEFECT, exc)
    except SixrError as exc:
        return _fail(EXIT_NUMERICAL, exc)

    sio.write_report(os.path.join(args.out_dir, "report.txt"), report,
                     source=args.poses)
    t4 = report.chosen_family.family.t4
    angles = joint_angle_vector(report.motion, t4)
    sio.save_linkage(winner_path, report.winner, report.motion, angles, t4)
    for outcome in report.families:
        if outcome.sweep:
            name = f"sweep_{outcome.family.family_id.value}.csv"
            sio.write_sweep_csv(os.path.join(args.out_dir, name), outcome)
    w = report.winner
    print(f"wrote {args.out_dir}/report.txt, winner.json and sweep tables")
    print(f"winner: pair {w.pair_index} {w.linkage_type.value} "
          f"extent {w.extent:.3f}")
    return EXIT_OK


def cmd_factor(args) -> int:
    try:
        poly = sio.load_motion_file(args.motion)
    except SixrError as exc:
        return _fail(EXIT_PARSE, exc)
    try:
        factorizations = fac(poly)
    except SixrError as exc:
        return _fail(EXIT_NUMERICAL, exc)
    print(f"{len(factorizations)} factorization(s) of a degree-{poly.degree} motion")
    for idx, f in enumerate(factorizations, start=1):
        residual = verify_factorization(poly, f)
        print(f"R{idx}: signature {f.signature}  reconstruction residual {residual:.3e}")
        for lf in f.factors:
            coords = ", ".join(f"{v:.6g}" for v in lf.h.array)
            print(f"    tag {lf.tag_index} (t^2 + {lf.tag.r:.6g} t + {lf.tag.s:.6g})"
                  f"  h = [{coords}]")
    return EXIT_OK


def _parse_points(spec):
    points = []
    for chunk in spec.split(";"):
        parts = [p for p in chunk.strip().split(",") if p]
        if len(parts) != 3:
            raise ValueError(f"point {chunk!r} needs 3 comma-separated numbers")
        points.append(np.array([float(p) for p in parts]))
    return points


def cmd_traj(args) -> int:
    if args.samples <= 0:
        return _fail(EXIT_PARSE, "sample count must be positive")
    try:
        poly = sio.load_motion_file(args.motion)
        points = _parse_points(args.points)
    except (SixrError, ValueError) as exc:
        return _fail(EXIT_PARSE, exc)
    sgn = -1.0 if args.from_negative else 1.0
    rows = []
    try:
        for i in range(1, args.samples + 1):
            w = i / args.samples
            t = args.t4 + sgn * (1.0 - w) / w
            # rounded input coefficients leave values slightly off the
            # quadric; snap back before acting on points
            pose = Pose(project_to_quadric(poly.evaluate(t)))
            for label, p in enumerate(points):
                rows.append((label, t, act_on_point(pose, p)))
    except SixrError as exc:
        return _fail(EXIT_NUMERICAL, exc)
    sio.write_trajectory_csv(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        data = sio.load_pose_file(args.poses)
    except sio.FileFormatError as exc:
        return _fail(EXIT_PARSE, exc)
    print(f"{args.poses}: {len(data.poses)} valid pose(s)"
          + (f", tolerance {data.tolerance:g}" if data.tolerance else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sixr",
        description="6R linkage synthesis from four poses via motion "
                    "polynomial factorization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="run the full synthesis pipeline")
    p.add_argument("poses", help="pose file (JSON)")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.add_argument("--grid", type=int, default=721,
                   help="points in the free-parameter sweep")
    p.add_argument("--quartile", type=float, default=0.25,
                   help="fairness quantile kept as acceptable")
    p.add_argument("--quad-tol", type=float, default=1e-6,
                   help="absolute arc-length quadrature tolerance")
    p.add_argument("--rank-by", choices=["extent", "max_twist", "max_distance"],
                   default="extent", help="final candidate ranking rule")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("factor", help="print all factorizations of a motion polynomial")
    p.add_argument("motion", help="motion polynomial file (JSON)")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("traj", help="sample tracked-point trajectories to CSV")
    p.add_argument("motion", help="motion polynomial file (JSON)")
    p.add_argument("--samples", type=int, required=True, help="number of samples")
    p.add_argument("--t4", type=float, default=0.0,
                   help="end of the parameter segment (start is infinity)")
    p.add_argument("--from-negative", action="store_true",
                   help="approach t4 from -infinity instead of +infinity")
    p.add_argument("--points", default="0,0,0;1,0,0;0,1,0;0,0,1",
                   help="semicolon-separated x,y,z points to track")
    p.add_argument("--out", default="trajectory.csv", help="output CSV path")
    p.set_defaults(func=cmd_traj)

    p = sub.add_parser("validate", help="check a pose file")
    p.add_argument("poses", help="pose file (JSON)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
