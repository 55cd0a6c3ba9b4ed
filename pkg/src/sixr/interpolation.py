"""Cubic interpolation of four poses by a one-parameter family of motions.

Four poses spanning a projective three-space are normalized so the first is
the identity.  The intersection of their span with the displacement quadric
is a doubly ruled quadric surface; the two rulings through the identity are
spanned by the identity and one half-turn each.  Whenever both half-turns are
real, every interpolating cubic meets one ruling twice, and the second
intersection point lambda - k parametrizes the family of interpolants.

The half-turn representative is normalized so its coefficient on the identity
pose equals one; the interpolation parameter values below are coordinates in
the chart t |-> t - k on the ruling and depend on that scale choice.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .dualquat import (
    DEFAULT_TOLERANCES,
    DualQuaternion,
    Pose,
    project_to_quadric,
    study_bilinear,
    study_form,
)
from .errors import (
    DegenerateFamily,
    DegenerateSpan,
    InfiniteParameter,
    NearDoubleRootWarning,
    NonRealLeadingCoefficient,
    RankDefect,
    SpanMeetsExceptional,
)
from .motionpoly import DQPolynomial, MotionPolynomial, reverse_and_monicize

__all__ = [
    "PoseProblem",
    "InterpolationFamily",
    "FamilyId",
    "normalize_poses",
    "half_turns",
    "parameter_values",
    "has_order_defect",
    "cubic_through",
    "families",
]

_SPAN_RCOND = 1e-8
_DOUBLE_ROOT_TOL = 1e-10


@dataclass(frozen=True)
class PoseProblem:
    """Four poses with the first normalized to the identity."""

    poses: tuple[Pose, Pose, Pose, Pose]
    base_transform: Pose

    @property
    def pose_matrix(self) -> np.ndarray:
        """4x8 matrix of the pose representatives (rows)."""
        return np.array([p.rep.array for p in self.poses])


class FamilyId(enum.Enum):
    FIRST_RULING = "first_ruling"
    SECOND_RULING = "second_ruling"


@dataclass(frozen=True)
class InterpolationFamily:
    """One ruling's interpolant family: half-turn, parameter values, identity at infinity."""

    halfturn: DualQuaternion
    other_halfturn: DualQuaternion | None
    params: tuple[float, float, float]  # t2, t3, t4; t1 is infinity
    family_id: FamilyId

    @property
    def t4(self) -> float:
        return self.params[2]

    @property
    def toward_positive_infinity(self) -> bool:
        """True when the motion segment reaches t4 from +infinity."""
        t2, _, t4 = self.params[0], self.params[1], self.params[2]
        return t2 > t4


def normalize_poses(raw, tol: float = DEFAULT_TOLERANCES.input) -> PoseProblem:
    """Left-multiply all poses by the inverse of the first one.

    Each representative is validated against the tolerance, then projected
    exactly onto the displacement quadric: rounded input coordinates encode a
    nearby true displacement, and the exact-arithmetic contracts of the
    factorization stage need representatives that actually satisfy the
    quadric equation.  Also validates that the four representatives span a
    projective three-space avoiding the exceptional three-space (no
    combination with a vanishing primal part).
    """
    poses = [p if isinstance(p, Pose) else Pose.from_array(p, tol) for p in raw]
    if len(poses) != 4:
        raise DegenerateSpan(f"need exactly 4 poses, got {len(poses)}")
    poses = [Pose(project_to_quadric(p.rep), p.tol) for p in poses]
    rows = np.array([p.rep.array / p.rep.norm() for p in poses])
    sv = np.linalg.svd(rows, compute_uv=False)
    if sv[-1] <= _SPAN_RCOND * sv[0]:
        raise DegenerateSpan(
            f"pose span is not three-dimensional (sv ratio {sv[-1] / sv[0]:.3e})"
        )
    primal_sv = np.linalg.svd(rows[:, :4], compute_uv=False)
    if primal_sv[-1] <= _SPAN_RCOND * max(primal_sv[0], 1.0):
        raise SpanMeetsExceptional(
            "a combination of the poses has vanishing primal part"
        )
    base = poses[0]
    inv = base.rep.inverse()
    normalized = [Pose.identity()]
    for p in poses[1:]:
        normalized.append(Pose(project_to_quadric(inv * p.rep), tol))
    return PoseProblem(poses=tuple(normalized), base_transform=base)


def _nullspace_basis(mat: np.ndarray, dim: int) -> np.ndarray:
    _, _, vt = np.linalg.svd(mat)
    basis = vt[-dim:]
    # deterministic sign: largest-magnitude entry positive
    out = []
    for b in basis:
        i = int(np.argmax(np.abs(b)))
        out.append(b if b[i] >= 0 else -b)
    return np.array(out)


def half_turns(prob: PoseProblem) -> list[DualQuaternion]:
    """The up-to-two half-turns in the span of the four poses.

    A half-turn has vanishing scalar part in both the primal and the dual
    component (two linear conditions on the combination coefficients) and lies
    on the displacement quadric (one quadratic condition).  An empty result
    means the interpolation problem has no solution.

    Each solution k = x1*p1 + x2*p2 + x3*p3 + x4*p4 is returned scaled so that
    x1 = 1; the chart t - k on the ruling, and with it all parameter values,
    is pinned by this choice.
    """
    rows = prob.pose_matrix
    lin = np.array([rows[:, 0], rows[:, 4]])  # scalar parts of both components
    sv = np.linalg.svd(lin, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] / sv[0] < 1e-12:
        raise DegenerateSpan("scalar-part conditions are rank deficient")
    basis = _nullspace_basis(lin, 2)
    k1 = basis[0] @ rows
    k2 = basis[1] @ rows
    q11 = study_form(DualQuaternion.from_array(k1))
    q22 = study_form(DualQuaternion.from_array(k2))
    q12 = study_bilinear(DualQuaternion.from_array(k1), DualQuaternion.from_array(k2))
    scale = max(abs(q11), abs(q12), abs(q22))
    if scale < 1e-14:
        raise DegenerateSpan("the whole pencil lies on the quadric")
    disc = q12 * q12 - 4.0 * q11 * q22
    if disc < 0.0:
        return []
    if disc < _DOUBLE_ROOT_TOL * scale * scale:
        warnings.warn(
            "half-turn quadratic has a near-double root; family is unstable",
            NearDoubleRootWarning,
            stacklevel=2,
        )
    # roots (alpha : beta) of q11 a^2 + q12 ab + q22 b^2, ordered by a/b ascending
    sq = np.sqrt(max(disc, 0.0))
    if abs(q11) > 1e-14 * scale:
        ratios = sorted({(-q12 - sq) / (2 * q11), (-q12 + sq) / (2 * q11)})
        sols = [(r, 1.0) for r in ratios]
    else:
        # alpha/beta = infinity is one root
        sols = [(1.0, 0.0)] if abs(q12) <= 1e-14 * scale else [(-q22 / q12, 1.0), (1.0, 0.0)]
    out = []
    for alpha, beta in sols:
        x = alpha * basis[0] + beta * basis[1]
        if abs(x[0]) > 1e-8 * np.linalg.norm(x):
            x = x / x[0]
        else:
            x = x / np.linalg.norm(x)
            i = int(np.argmax(np.abs(x)))
            if x[i] < 0:
                x = -x
        out.append(DualQuaternion.from_array(x @ rows))
    # intrinsic order: independent of the nullspace basis and of the scale of
    # any input representative, so family labels are reproducible
    out.sort(key=lambda k: tuple(np.round(k.canonical().array, 9)))
    return out


def parameter_values(k: DualQuaternion, prob: PoseProblem,
                     family_id: FamilyId = FamilyId.FIRST_RULING,
                     other: DualQuaternion | None = None) -> InterpolationFamily:
    """Parameter values at which an interpolant must visit the poses.

    The point where the ruling through pose p meets the line of k solves the
    linear condition <t*1 - k, p> = 0 in the quadric's bilinear pairing, so
    t = <k, p> / <1, p>.  The identity pose sits at t = infinity.
    """
    one = DualQuaternion.identity()
    ts = []
    for p in prob.poses[1:]:
        denom = study_bilinear(one, p.rep)
        numer = study_bilinear(k, p.rep)
        if abs(denom) <= 1e-12 * max(1.0, p.rep.norm()):
            raise InfiniteParameter(
                "pose coincides with the identity in the ruling chart"
            )
        ts.append(numer / denom)
    return InterpolationFamily(
        halfturn=k,
        other_halfturn=other,
        params=(ts[0], ts[1], ts[2]),
        family_id=family_id,
    )


def families(prob: PoseProblem) -> list[InterpolationFamily]:
    """Both interpolation families, one per real half-turn."""
    ks = half_turns(prob)
    out = []
    ids = [FamilyId.FIRST_RULING, FamilyId.SECOND_RULING]
    for i, k in enumerate(ks):
        other = ks[1 - i] if len(ks) == 2 else None
        out.append(parameter_values(k, prob, family_id=ids[i], other=other))
    return out


def has_order_defect(fam: InterpolationFamily) -> bool:
    """True when the pose sequence is not monotone along the parameter line.

    The first pose sits at infinity, so the remaining three must be strictly
    monotone as reals for the motion to visit the poses in their given order.
    No choice of the free family parameter can repair a defect.
    """
    t2, t3, t4 = fam.params
    increasing = t2 < t3 < t4
    decreasing = t2 > t3 > t4
    return not (increasing or decreasing)


def _lagrange_basis(nodes):
    """Coefficient arrays (ascending) of the Lagrange basis for the nodes."""
    out = []
    for i, si in enumerate(nodes):
        c = np.array([1.0])
        for j, sj in enumerate(nodes):
            if j != i:
                c = np.convolve(c, np.array([-sj, 1.0])) / (si - sj)
        out.append(c)
    return out


def cubic_through(fam: InterpolationFamily, prob: PoseProblem, lam: float,
                  tol: float = DEFAULT_TOLERANCES.input) -> MotionPolynomial:
    """The interpolating cubic of the family at parameter value ``lam``.

    Reparametrizes by s = 1/t so the identity pose sits at s = 0, forms the
    cubic Lagrange interpolant through weighted poses, and determines the
    projective weights from the eight linear conditions that the value at
    s = 1/lam is the extra ruling point lam - k.  The weight system must have
    a one-dimensional nullspace; its solution is reversed back to the
    parameter u = 1/s and made monic.
    """
    t2, t3, t4 = fam.params
    if not np.isfinite(lam):
        raise RankDefect("lambda = infinity collapses the node set")
    if min(abs(lam - t2), abs(lam - t3), abs(lam - t4)) < 1e-8:
        raise RankDefect("lambda coincides with an interpolation node")
    # the ruling chart t - k fixes parameter values only up to scale; compute
    # in a rescaled chart with nodes of unit size (the half-turn coefficient
    # normalization can make the raw values arbitrarily large) and convert
    # the coefficients back at the end
    gauge = max(abs(t2), abs(t3), abs(t4))
    if gauge == 0.0 or min(abs(t2), abs(t3), abs(t4)) < 1e-12 * gauge:
        raise DegenerateFamily("a pose sits at the origin of the ruling chart")
    ts = np.array([t2, t3, t4]) / gauge
    lam_scaled = lam / gauge
    nodes = [0.0, 1.0 / ts[0], 1.0 / ts[1], 1.0 / ts[2]]
    basis = _lagrange_basis(nodes)
    pose_vecs = [p.rep.array for p in prob.poses]
    p5 = lam * np.eye(8)[0] - fam.halfturn.array
    if lam_scaled == 0.0:
        lvals = [b[-1] for b in basis]  # value at s = infinity: cubic coefficient
    else:
        s5 = 1.0 / lam_scaled
        lvals = [float(np.polyval(b[::-1], s5)) for b in basis]
    system = np.zeros((8, 5))
    for i in range(4):
        system[:, i] = pose_vecs[i] * lvals[i]
    system[:, 4] = -p5
    col_scale = np.linalg.norm(system, axis=0)
    if np.any(col_scale == 0.0):
        raise DegenerateFamily("interpolation system has a zero column")
    _, sv, vt = np.linalg.svd(system / col_scale)
    if sv[-2] - sv[-1] < 1e6 * np.finfo(float).eps * sv[0]:
        raise RankDefect(
            f"weight system nullspace is not one-dimensional (sv {sv[-2]:.2e}, {sv[-1]:.2e})"
        )
    z = vt[-1] / col_scale
    weights = z[:4]
    coeffs_s = np.zeros((4, 8))
    for i in range(4):
        for d, cd in enumerate(basis[i]):
            coeffs_s[d] += weights[i] * cd * pose_vecs[i]
    try:
        scaled = reverse_and_monicize(
            DQPolynomial.from_coefficient_array(coeffs_s, trim=False), degree=3
        )
    except NonRealLeadingCoefficient as exc:
        raise DegenerateFamily(f"interpolant does not anchor at the identity: {exc}")
    # undo the gauge: C(u) = gauge^3 * C'(u / gauge) stays monic and hits the
    # poses at the original parameter values
    powers = gauge ** np.arange(3, -1, -1, dtype=float)  # gauge^(3-k), k = 0..3
    arr = scaled.coefficient_array * powers[:, None]
    return MotionPolynomial.from_coefficient_array(arr, trim=False)
