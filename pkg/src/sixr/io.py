"""File formats: pose sets, motion polynomials, linkage output, CSV tables.

Structured data uses a single self-describing JSON layout versioned by a
``format_version`` field; floats serialize via ``repr`` and therefore
round-trip exactly.  Tabular output (parameter sweeps, sampled trajectories)
is plain CSV with a fixed header.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .dualquat import DualQuaternion, PlueckerLine, Pose, pose_from_matrix
from .errors import SixrError
from .motionpoly import DQPolynomial, MotionPolynomial
from .synthesis import DHRecord, Linkage6R, LinkageType, SynthesisReport

__all__ = [
    "FileFormatError",
    "PoseFileData",
    "load_pose_file",
    "save_pose_file",
    "load_motion_file",
    "save_motion_file",
    "save_linkage",
    "load_linkage",
    "write_sweep_csv",
    "write_trajectory_csv",
    "write_report",
    "SWEEP_HEADER",
    "TRAJECTORY_HEADER",
]

FORMAT_VERSION = 1
SWEEP_HEADER = ["lambda", "fairness", "max_angle_characteristic", "feasible"]
TRAJECTORY_HEADER = ["point", "t", "x", "y", "z"]


class FileFormatError(SixrError):
    """Malformed input file; the message points at the offending entry."""


@dataclass(frozen=True)
class PoseFileData:
    poses: list
    tolerance: float | None


def _require(cond, message):
    if not cond:
        raise FileFormatError(message)


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}")
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc}")


def _check_version(doc, path):
    _require(isinstance(doc, dict), f"{path}: top level must be an object")
    version = doc.get("format_version")
    _require(version == FORMAT_VERSION,
             f"{path}: unsupported format_version {version!r}")


def load_pose_file(path) -> PoseFileData:
    """Read a pose file.

    Each entry is either eight homogeneous displacement coordinates
    ``{"study": [w,x,y,z,ew,ex,ey,ez]}`` or a rotation matrix with translation
    ``{"rotation": [9 row-major], "translation": [3]}``.  An optional
    ``tolerance`` loosens the on-quadric validation for rounded data.
    """
    doc = _load_json(path)
    _check_version(doc, path)
    entries = doc.get("poses")
    _require(isinstance(entries, list) and entries,
             f"{path}: missing non-empty 'poses' list")
    tolerance = doc.get("tolerance")
    if tolerance is not None:
        _require(isinstance(tolerance, (int, float)) and tolerance > 0,
                 f"{path}: 'tolerance' must be a positive number")
    poses = []
    for i, entry in enumerate(entries):
        where = f"{path}: poses[{i}]"
        _require(isinstance(entry, dict), f"{where}: must be an object")
        try:
            if "study" in entry:
                coords = entry["study"]
                _require(isinstance(coords, list) and len(coords) == 8,
                         f"{where}: 'study' needs exactly 8 numbers, "
                         f"got {len(coords) if isinstance(coords, list) else type(coords).__name__}")
                pose = Pose.from_array([float(v) for v in coords],
                                       tol=tolerance or 1e-6)
            elif "rotation" in entry:
                rot = entry["rotation"]
                tr = entry.get("translation", [0.0, 0.0, 0.0])
                _require(isinstance(rot, list) and len(rot) == 9,
                         f"{where}: 'rotation' needs 9 row-major numbers")
                _require(isinstance(tr, list) and len(tr) == 3,
                         f"{where}: 'translation' needs 3 numbers")
                pose = pose_from_matrix(np.array(rot, dtype=float).reshape(3, 3),
                                        [float(v) for v in tr],
                                        tol=tolerance or 1e-6)
            else:
                raise FileFormatError(
                    f"{where}: needs either 'study' or 'rotation'")
        except FileFormatError:
            raise
        except (SixrError, ValueError, TypeError) as exc:
            raise FileFormatError(f"{where}: {exc}")
        poses.append(pose)
    return PoseFileData(poses=poses, tolerance=tolerance)


def save_pose_file(path, poses, tolerance=None):
    doc = {"format_version": FORMAT_VERSION}
    if tolerance is not None:
        doc["tolerance"] = tolerance
    doc["poses"] = [{"study": [float(v) for v in p.rep.array]} for p in poses]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_motion_file(path) -> MotionPolynomial:
    """Read a motion polynomial file: ascending rows of 8 coefficients."""
    doc = _load_json(path)
    _check_version(doc, path)
    rows = doc.get("coefficients")
    _require(isinstance(rows, list) and len(rows) >= 2,
             f"{path}: 'coefficients' needs at least 2 rows (positive degree)")
    for i, row in enumerate(rows):
        _require(isinstance(row, list) and len(row) == 8,
                 f"{path}: coefficients[{i}] needs exactly 8 numbers")
    arr = np.array(rows, dtype=float)
    try:
        return MotionPolynomial.from_coefficient_array(arr)
    except SixrError:
        raise
    except (ValueError, TypeError) as exc:
        raise FileFormatError(f"{path}: {exc}")


def save_motion_file(path, poly: DQPolynomial):
    doc = {
        "format_version": FORMAT_VERSION,
        "coefficients": [[float(v) for v in c.array] for c in poly.coeffs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _line_to_dict(line: PlueckerLine):
    return {
        "direction": [float(v) for v in line.direction],
        "moment": [float(v) for v in line.moment],
    }


def save_linkage(path, linkage: Linkage6R, coupler: MotionPolynomial,
                 joint_angles, t4: float):
    """Write one linkage with its coupler motion and joint angle vector.

    Axes and DH values are stored in the frame the linkage lives in (embedded
    by ``base_pose``); the coupler coefficients are the monic motion in the
    first-pose-at-identity frame.
    """
    doc = {
        "format_version": FORMAT_VERSION,
        "pair_index": list(linkage.pair_index),
        "linkage_type": linkage.linkage_type.value,
        "base_pose": [float(v) for v in linkage.base.rep.array],
        "extent": float(linkage.extent),
        "t4": float(t4),
        "joint_angles_at_t4": [float(v) for v in joint_angles],
        "axes": [_line_to_dict(line) for line in linkage.axes_cycle],
        "dh": [
            {"distance": rec.distance, "twist": rec.twist, "offset": rec.offset}
            for rec in linkage.dh
        ],
        "coupler_motion": [[float(v) for v in c.array] for c in coupler.coeffs],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_linkage(path) -> dict:
    """Read a linkage file back into plain arrays (axes, dh, coupler, base)."""
    doc = _load_json(path)
    _check_version(doc, path)
    for key in ("pair_index", "axes", "dh", "coupler_motion", "base_pose"):
        _require(key in doc, f"{path}: missing '{key}'")
    axes = [PlueckerLine(np.array(a["direction"]), np.array(a["moment"]))
            for a in doc["axes"]]
    dh = [DHRecord(distance=d["distance"], twist=d["twist"], offset=d["offset"])
          for d in doc["dh"]]
    return {
        "pair_index": tuple(doc["pair_index"]),
        "linkage_type": LinkageType(doc["linkage_type"]),
        "base_pose": DualQuaternion.from_array(doc["base_pose"]),
        "extent": doc["extent"],
        "t4": doc["t4"],
        "joint_angles_at_t4": list(doc["joint_angles_at_t4"]),
        "axes": axes,
        "dh": dh,
        "coupler_motion": np.array(doc["coupler_motion"], dtype=float),
    }


def write_sweep_csv(path, outcome):
    """One row per swept parameter value of a family."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_HEADER)
        for row in outcome.sweep:
            writer.writerow([
                repr(row.lam),
                repr(row.fairness) if row.feasible else "",
                repr(row.max_characteristic) if row.feasible else "",
                int(row.feasible),
            ])


def write_trajectory_csv(path, rows):
    """Rows of (point label, t, x, y, z)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_HEADER)
        for label, t, xyz in rows:
            writer.writerow([label, repr(float(t)),
                             repr(float(xyz[0])), repr(float(xyz[1])),
                             repr(float(xyz[2]))])


def _fmt(value, nd=3):
    return f"{value:.{nd}f}"


def write_report(path, report: SynthesisReport, source=None):
    """Human-readable synthesis summary; tables rounded to three decimals."""
    lines = []
    lines.append(f"sixr synthesis report (format_version {FORMAT_VERSION})")
    if source:
        lines.append(f"input: {source}")
    lines.append("")
    lines.append("half-turns (coefficient-of-identity normalization)")
    for outcome in report.families:
        k = outcome.family.halfturn.array
        lines.append(
            f"  {outcome.family.family_id.value:<14}"
            + "[" + ", ".join(_fmt(v) for v in k) + "]"
        )
    lines.append("")
    lines.append("families")
    lines.append("  id              t2      t3      t4      defect  "
                 "quartile_lo  quartile_hi  lambda    fairness  max_char")
    for outcome in report.families:
        t2, t3, t4 = outcome.family.params
        row = f"  {outcome.family.family_id.value:<14}"
        row += f"{_fmt(t2):>7} {_fmt(t3):>7} {_fmt(t4):>7}   "
        row += f"{'yes' if outcome.order_defect else 'no':<7}"
        if outcome.quartile_range is not None:
            row += f"{_fmt(outcome.quartile_range[0]):>11}  {_fmt(outcome.quartile_range[1]):>11}"
            row += f"  {_fmt(outcome.chosen_lambda):>8}  {_fmt(outcome.chosen_fairness):>8}"
            row += f"  {_fmt(outcome.chosen_characteristic):>8}"
        lines.append(row)
    lines.append("")
    chosen = report.chosen_family
    lines.append(
        f"chosen family: {chosen.family.family_id.value} "
        f"(lambda={_fmt(chosen.chosen_lambda)}, fairness={_fmt(chosen.chosen_fairness)}, "
        f"max characteristic={_fmt(chosen.chosen_characteristic)})"
    )
    lines.append("")
    lines.append("coupler motion (monic, ascending coefficients, first pose at identity)")
    for k, c in enumerate(report.motion.coeffs):
        lines.append(f"  t^{k}: [" + ", ".join(_fmt(v) for v in c.array) + "]")
    lines.append("")
    lines.append(f"candidates (ranked by {report.config.rank_by})")
    lines.append("  pair    type                   extent  max_twist  max_distance")
    key = {"extent": lambda lk: lk.extent,
           "max_twist": lambda lk: lk.max_twist,
           "max_distance": lambda lk: lk.max_distance}[report.config.rank_by]
    for lk in sorted(report.candidates, key=key):
        lines.append(
            f"  ({lk.pair_index[0]},{lk.pair_index[1]})   {lk.linkage_type.value:<22}"
            f"{_fmt(lk.extent):>7}  {_fmt(lk.max_twist):>9}  {_fmt(lk.max_distance):>12}"
        )
    w = report.winner
    lines.append("")
    lines.append(f"winner: pair ({w.pair_index[0]},{w.pair_index[1]}) "
                 f"{w.linkage_type.value}, extent {_fmt(w.extent)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
