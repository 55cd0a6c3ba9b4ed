"""From motion polynomial to linkage: quality measures, pairing, assembly.

The pipeline interpolates four poses by two one-parameter families of cubic
motions, sweeps the free parameter of each family, keeps the fairest quarter
of the sweep, picks the member minimizing the maximal angle characteristic of
its norm-polynomial factors, factors the winner six ways, combines the nine
valid factorization pairs into closed 6R loops, and ranks those by size.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dualquat import (
    DEFAULT_TOLERANCES,
    DualQuaternion,
    PlueckerLine,
    Pose,
    Tolerances,
    act_on_point,
    projective_distance,
)
from .errors import (
    ClosureViolation,
    CoincidentAxes,
    DegenerateFactor,
    InvalidPair,
    OrderDefect,
    QuadratureFailure,
    SegmentUndefined,
    SixrError,
    SynthesisInfeasible,
)
from .factorization import Factorization, OpenChain, fac, open_chain, verify_factorization
from .interpolation import (
    FamilyId,
    InterpolationFamily,
    PoseProblem,
    cubic_through,
    families,
    has_order_defect,
    normalize_poses,
)
from .motionpoly import (
    DQPolynomial,
    MotionPolynomial,
    _quat_conv,
    norm_polynomial,
    poly_multiply,
)
from .realpoly import QuadraticFactor, quadratic_factors

__all__ = [
    "LinkageType",
    "DHRecord",
    "Linkage6R",
    "SynthesisConfig",
    "FamilyOutcome",
    "SynthesisReport",
    "rotation_angle",
    "angle_characteristic",
    "fairness",
    "valid_pairs",
    "linkage_type",
    "assemble_linkage",
    "dh_parameters",
    "linkage_extent",
    "joint_angle_vector",
    "embed_linkage",
    "synthesize",
]

_DEGENERATE_DISC = 1e-10

# ---------------------------------------------------------------------------
# joint angle formulas


def rotation_angle(m: QuadraticFactor, t: float) -> float:
    """Rotation angle of the joint tagged by the quadratic t^2 + r*t + s.

    The displacement t - h of a rotation quaternion h with that minimal
    polynomial turns about a fixed axis; writing the primal part over the
    half-angle gives tan(phi/2) = sqrt(4s - r^2) / (2t + r), taken in (0, 2pi)
    so that phi decreases strictly from 2pi (t -> -infinity) to 0
    (t -> +infinity), the zero position.
    """
    disc = 4.0 * m.s - m.r * m.r
    if disc <= _DEGENERATE_DISC:
        raise DegenerateFactor(
            f"factor discriminant {disc:.3e} too small for angle formulas"
        )
    if math.isinf(t):
        return 0.0 if t > 0 else 2.0 * math.pi
    return 2.0 * math.atan2(math.sqrt(disc), 2.0 * t + m.r)


def angle_characteristic(m: QuadraticFactor) -> float:
    """|r| / sqrt(4s - r^2): proxy for the total joint rotation of a factor.

    Computable from the norm polynomial alone, without factoring the motion;
    invariant under the projective rescaling (r, s) -> (c*r, c^2*s).
    """
    disc = 4.0 * m.s - m.r * m.r
    if disc <= _DEGENERATE_DISC:
        raise DegenerateFactor(
            f"factor discriminant {disc:.3e} too small for angle formulas"
        )
    return abs(m.r) / math.sqrt(disc)


def joint_angle_vector(c: MotionPolynomial, t4: float) -> tuple[float, ...]:
    """Signed joint rotations between the zero position and parameter t4.

    One entry per sorted quadratic factor of the norm polynomial, each the
    principal value in (-pi, pi] of the angle reached at t4 starting from zero
    rotation at infinity.  Independent of the particular factorization.
    """
    factors = quadratic_factors(norm_polynomial(c))
    out = []
    for m in factors:
        phi = rotation_angle(m, t4)
        out.append(phi - 2.0 * math.pi if phi > math.pi else phi)
    return tuple(out)


# ---------------------------------------------------------------------------
# fairness (sum of trajectory arc lengths)

_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_GK_WEIGHTS = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_GAUSS_WEIGHTS = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])


def _adaptive_quadrature(f, a: float, b: float, abs_tol: float,
                         max_intervals: int = 2000) -> float:
    """Adaptive Gauss-Kronrod integration of a vectorized integrand."""

    def rule(lo, hi):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        vals = f(mid + half * _GK_NODES)
        kron = half * float(vals @ _GK_WEIGHTS)
        gauss = half * float(vals[1::2] @ _GAUSS_WEIGHTS)
        return kron, abs(kron - gauss)

    total_width = b - a
    stack = [(a, b, *rule(a, b))]
    result = 0.0
    used = 1
    while stack:
        lo, hi, val, err = stack.pop()
        if err <= abs_tol * (hi - lo) / total_width or hi - lo < 1e-14 * total_width:
            result += val
            continue
        if used >= max_intervals:
            raise QuadratureFailure(
                f"arc-length quadrature did not converge (error estimate {err:.3e})"
            )
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, *rule(lo, mid)))
        stack.append((mid, hi, *rule(mid, hi)))
        used += 2
    return result




class _TrajectorySpeeds:
    """Vectorized speed of tracked points under a polynomial motion.

    For the motion c(t) = r(t) + eps*s(t), the image of a point p is
    vec(r p r̄ + 2 s r̄) / (r r̄); numerator and denominator are polynomials in
    t, so speeds are rational functions.  All coefficient columns (norm, its
    derivative, and value/derivative components per tracked point) sit in one
    matrix so a single Horner pass evaluates everything on a whole array of
    parameter values.
    """

    _POINTS = (np.zeros(3), np.eye(3)[0], np.eye(3)[1], np.eye(3)[2])

    def __init__(self, c: DQPolynomial):
        arr = c.coefficient_array
        rp = arr[:, :4]
        sp = arr[:, 4:]
        rbar = rp * np.array([1.0, -1, -1, -1])
        norm = _quat_conv(rp, rbar)[:, 0]
        trans = _quat_conv(2.0 * sp, rbar)
        deg1 = len(norm)
        columns = np.zeros((deg1, 2 + 6 * len(self._POINTS)))
        columns[:, 0] = norm
        columns[: deg1 - 1, 1] = norm[1:] * np.arange(1, deg1)
        for idx, p in enumerate(self._POINTS):
            phat = np.concatenate([[0.0], p])[None, :]
            num = _quat_conv(_quat_conv(rp, phat), rbar)
            v = np.zeros((deg1, 3))
            v[: len(num)] += num[:, 1:]
            v[: len(trans)] += trans[:, 1:]
            base = 2 + 6 * idx
            columns[:, base:base + 3] = v
            columns[: deg1 - 1, base + 3:base + 6] = v[1:] * np.arange(1, deg1)[:, None]
        self._columns = columns

    def speed_sum(self, t: np.ndarray) -> np.ndarray:
        coeffs = self._columns
        vals = np.broadcast_to(coeffs[-1], (len(t), coeffs.shape[1])).copy()
        for row in coeffs[-2::-1]:
            vals *= t[:, None]
            vals += row
        n = vals[:, 0]
        nd = vals[:, 1]
        total = np.zeros_like(t)
        inv_n2 = 1.0 / (n * n)
        for idx in range(len(self._POINTS)):
            base = 2 + 6 * idx
            v = vals[:, base:base + 3]
            vd = vals[:, base + 3:base + 6]
            xd = (vd * n[:, None] - v * nd[:, None]) * inv_n2[:, None]
            total += np.sqrt(np.einsum("ij,ij->i", xd, xd))
        return total


def fairness(c: MotionPolynomial, fam: InterpolationFamily,
             cfg: "SynthesisConfig | None" = None) -> float:
    """Sum of arc lengths of the origin and unit-point trajectories.

    Integrated over the parameter segment running from the zero position at
    infinity through the second and third pose down to the fourth, i.e. the
    part of the motion that actually spans the prescribed poses.  The ray is
    mapped onto (0, 1] by a fractional-linear substitution before adaptive
    quadrature.
    """
    cfg = cfg or SynthesisConfig()
    if has_order_defect(fam):
        raise SegmentUndefined("order defect: no single segment spans the poses")
    t4 = fam.t4
    sgn = 1.0 if fam.toward_positive_infinity else -1.0
    speeds = _TrajectorySpeeds(c)

    def integrand(w):
        t = t4 + sgn * (1.0 - w) / w
        return speeds.speed_sum(t) / (w * w)

    return _adaptive_quadrature(integrand, 0.0, 1.0, cfg.quad_tol)


# ---------------------------------------------------------------------------
# valid factorization pairs

class LinkageType(enum.Enum):
    ANGLE_SYMMETRIC = "angle_symmetric"
    DOUBLE_BENNETT_HYBRID = "double_bennett_hybrid"


# With factorizations listed in the algorithm's fixed signature order, two
# factorizations combine into a working loop exactly when they share neither
# their leftmost nor their rightmost tag; pairs whose signatures are mutual
# reverses give angle-symmetric linkages.
_PAIR_TYPES = {
    (1, 4): LinkageType.DOUBLE_BENNETT_HYBRID,
    (1, 5): LinkageType.DOUBLE_BENNETT_HYBRID,
    (1, 6): LinkageType.ANGLE_SYMMETRIC,
    (2, 3): LinkageType.DOUBLE_BENNETT_HYBRID,
    (2, 4): LinkageType.ANGLE_SYMMETRIC,
    (2, 6): LinkageType.DOUBLE_BENNETT_HYBRID,
    (3, 5): LinkageType.ANGLE_SYMMETRIC,
    (3, 6): LinkageType.DOUBLE_BENNETT_HYBRID,
    (4, 5): LinkageType.DOUBLE_BENNETT_HYBRID,
}


def valid_pairs() -> frozenset[tuple[int, int]]:
    """The nine 1-based index pairs of combinable factorizations."""
    return frozenset(_PAIR_TYPES)


def linkage_type(pair: tuple[int, int]) -> LinkageType:
    key = tuple(sorted(pair))
    if key not in _PAIR_TYPES:
        raise InvalidPair(f"pair {pair} shares a boundary factor")
    return _PAIR_TYPES[key]


# ---------------------------------------------------------------------------
# Denavit-Hartenberg extraction

_PARALLEL_TOL = 1e-8


@dataclass(frozen=True)
class DHRecord:
    """Relative layout of one consecutive axis pair in the loop.

    ``distance`` and ``twist`` describe the common perpendicular between the
    pair; ``offset`` is the signed distance along the first axis between the
    feet of the perpendiculars arriving from the previous pair and leaving to
    this one.
    """

    distance: float
    twist: float
    offset: float


def _perpendicular_feet(l1: PlueckerLine, l2: PlueckerLine):
    """Feet of the common perpendicular, with the distance and twist."""
    d1, d2 = l1.direction, l2.direction
    a1, a2 = l1.anchor, l2.anchor
    cross = np.cross(d1, d2)
    nc = np.linalg.norm(cross)
    cosang = float(d1 @ d2)
    if nc <= _PARALLEL_TOL:
        delta = a2 - a1
        perp = delta - (delta @ d1) * d1
        foot1 = a1
        foot2 = a2 + ((a1 - a2) @ d2) * d2
        twist = 0.0 if cosang > 0 else math.pi
        return foot1, foot2, float(np.linalg.norm(perp)), twist
    rhs = np.array([(a2 - a1) @ d1, (a2 - a1) @ d2])
    mat = np.array([[1.0, -cosang], [cosang, -1.0]])
    u = np.linalg.solve(mat, rhs)
    foot1 = a1 + u[0] * d1
    foot2 = a2 + u[1] * d2
    distance = float(np.linalg.norm(foot2 - foot1))
    twist = math.atan2(nc, cosang)
    return foot1, foot2, distance, twist


def dh_parameters(axes_cycle) -> list[DHRecord]:
    """Denavit-Hartenberg records of a cyclic list of joint axes."""
    axes = list(axes_cycle)
    n = len(axes)
    feet_out = []
    feet_in = []
    dists = []
    twists = []
    for i in range(n):
        l1, l2 = axes[i], axes[(i + 1) % n]
        if l1.same_line(l2, tol=_PARALLEL_TOL):
            raise CoincidentAxes(f"axes {i} and {(i + 1) % n} coincide")
        f1, f2, dist, twist = _perpendicular_feet(l1, l2)
        feet_out.append(f1)   # on axis i
        feet_in.append(f2)    # on axis i+1
        dists.append(dist)
        twists.append(twist)
    records = []
    for i in range(n):
        arriving = feet_in[(i - 1) % n]   # foot on axis i from pair (i-1, i)
        leaving = feet_out[i]             # foot on axis i toward pair (i, i+1)
        offset = float((leaving - arriving) @ axes[i].direction)
        records.append(DHRecord(distance=dists[i], twist=twists[i], offset=offset))
    return records


def linkage_extent(dh, include_offsets: bool = True) -> float:
    """Sum of link lengths, optionally including the joint offsets."""
    total = sum(rec.distance for rec in dh)
    if include_offsets:
        total += sum(abs(rec.offset) for rec in dh)
    return float(total)


# ---------------------------------------------------------------------------
# linkage assembly

@dataclass(frozen=True)
class Linkage6R:
    """A closed loop of six revolute joints following the coupler motion."""

    pair_index: tuple[int, int]
    linkage_type: LinkageType
    chain_a: OpenChain
    chain_b: OpenChain
    axes_cycle: tuple[PlueckerLine, ...]
    dh: tuple[DHRecord, ...]
    extent: float
    motion: DQPolynomial
    base: Pose

    @property
    def max_twist(self) -> float:
        return max(rec.twist for rec in self.dh)

    @property
    def max_distance(self) -> float:
        return max(rec.distance for rec in self.dh)


def _closure_samples(count: int) -> np.ndarray:
    theta = np.linspace(-np.pi / 2, np.pi / 2, count + 2)[1:-1]
    return np.tan(theta)


def assemble_linkage(fa: Factorization, fb: Factorization, pair: tuple[int, int],
                     base: Pose | None = None,
                     closure_samples: int = 50,
                     tol: float = DEFAULT_TOLERANCES.projective) -> Linkage6R:
    """Combine two factorizations of the same motion into a closed 6R loop.

    The loop runs through the first chain base-to-coupler and back through the
    second one, so the cycle order is (a1, a2, a3, b3, b2, b1).  Sharing the
    leftmost or rightmost factor would leave a frozen joint dangling at base
    or coupler; such pairs are rejected.
    """
    kind = linkage_type(pair)
    if fa.signature[0] == fb.signature[0] or fa.signature[-1] == fb.signature[-1]:
        raise InvalidPair(
            f"factorizations share a boundary tag: {fa.signature} / {fb.signature}"
        )
    prod_a = fa.product()
    prod_b = fb.product()
    for t in _closure_samples(closure_samples):
        residual = projective_distance(prod_a.evaluate(t), prod_b.evaluate(t))
        if residual > 100 * tol:
            raise ClosureViolation(
                f"chains disagree at t={t:.4g} (projective residual {residual:.3e})"
            )
    chain_a = open_chain(fa)
    chain_b = open_chain(fb)
    axes_cycle = tuple(chain_a.axes) + tuple(reversed(chain_b.axes))
    dh = tuple(dh_parameters(axes_cycle))
    return Linkage6R(
        pair_index=tuple(pair),
        linkage_type=kind,
        chain_a=chain_a,
        chain_b=chain_b,
        axes_cycle=axes_cycle,
        dh=dh,
        extent=linkage_extent(dh),
        motion=prod_a,
        base=base or Pose.identity(),
    )


def _transform_line(line: PlueckerLine, g: Pose) -> PlueckerLine:
    p = act_on_point(g, line.anchor)
    q = act_on_point(g, line.anchor + line.direction)
    return PlueckerLine.through_point(p, q - p)


def embed_linkage(linkage: Linkage6R, base: Pose) -> Linkage6R:
    """Displace a linkage, its chains and its coupler motion rigidly by ``base``.

    Joint quaternions conjugate, axes move with the displacement, and the
    motion polynomial is left-multiplied; the DH table is recomputed and is
    invariant because the displacement is rigid.
    """
    g = base.rep
    ginv = g.inverse()

    def move_chain(chain: OpenChain) -> OpenChain:
        joints = tuple(g * h * ginv for h in chain.joints)
        axes = tuple(_transform_line(line, base) for line in chain.axes)
        return OpenChain(axes=axes, joints=joints)

    chain_a = move_chain(linkage.chain_a)
    chain_b = move_chain(linkage.chain_b)
    axes_cycle = tuple(chain_a.axes) + tuple(reversed(chain_b.axes))
    dh = tuple(dh_parameters(axes_cycle))
    motion = DQPolynomial([g * c for c in linkage.motion.coeffs])
    return Linkage6R(
        pair_index=linkage.pair_index,
        linkage_type=linkage.linkage_type,
        chain_a=chain_a,
        chain_b=chain_b,
        axes_cycle=axes_cycle,
        dh=dh,
        extent=linkage_extent(dh),
        motion=motion,
        base=base.compose(linkage.base),
    )


# ---------------------------------------------------------------------------
# end-to-end pipeline

_RANK_KEYS = {
    "extent": lambda lk: lk.extent,
    "max_twist": lambda lk: lk.max_twist,
    "max_distance": lambda lk: lk.max_distance,
}


@dataclass(frozen=True)
class SynthesisConfig:
    """Knobs of the synthesis pipeline."""

    grid_size: int = 721
    quartile: float = 0.25
    quad_tol: float = 1e-6
    rank_by: str = "extent"
    closure_samples: int = 50
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.grid_size < 3:
            raise ValueError("grid size must be at least 3")
        if not 0.0 < self.quartile <= 1.0:
            raise ValueError("quartile fraction must lie in (0, 1]")
        if self.rank_by not in _RANK_KEYS:
            raise ValueError(f"unknown ranking rule {self.rank_by!r}")

    def lambda_grid(self) -> np.ndarray:
        """tan of a uniform open angular grid: projectively dense over the reals."""
        theta = np.linspace(-np.pi / 2, np.pi / 2, self.grid_size + 2)[1:-1]
        return np.tan(theta)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    fairness: float
    max_characteristic: float
    feasible: bool


@dataclass(frozen=True)
class FamilyOutcome:
    """Sweep results and the per-family optimum."""

    family: InterpolationFamily
    order_defect: bool
    sweep: tuple[SweepRow, ...] = ()
    quartile_range: tuple[float, float] | None = None
    chosen_lambda: float | None = None
    chosen_fairness: float | None = None
    chosen_characteristic: float | None = None


@dataclass(frozen=True)
class SynthesisReport:
    problem: PoseProblem
    config: SynthesisConfig
    families: tuple[FamilyOutcome, ...]
    chosen_family_index: int
    motion: MotionPolynomial
    factorizations: tuple[Factorization, ...]
    candidates: tuple[Linkage6R, ...]
    winner: Linkage6R

    @property
    def chosen_family(self) -> FamilyOutcome:
        return self.families[self.chosen_family_index]


def _sweep_family(fam: InterpolationFamily, prob: PoseProblem,
                  cfg: SynthesisConfig) -> FamilyOutcome:
    rows = []
    nodes = fam.params
    for lam in cfg.lambda_grid():
        if min(abs(lam - t) for t in nodes) < 1e-6:
            continue
        try:
            c = cubic_through(fam, prob, lam, tol=cfg.tolerances.input)
            factors = quadratic_factors(norm_polynomial(c))
            mmax = max(angle_characteristic(m) for m in factors)
            f = fairness(c, fam, cfg)
            rows.append(SweepRow(lam, f, mmax, True))
        except SixrError:
            rows.append(SweepRow(lam, math.nan, math.nan, False))
    feasible = [r for r in rows if r.feasible]
    if not feasible:
        return FamilyOutcome(family=fam, order_defect=False, sweep=tuple(rows))
    threshold = float(np.quantile([r.fairness for r in feasible], cfg.quartile))
    accepted = [r for r in feasible if r.fairness <= threshold]
    best = min(accepted, key=lambda r: r.max_characteristic)
    return FamilyOutcome(
        family=fam,
        order_defect=False,
        sweep=tuple(rows),
        quartile_range=(
            min(r.fairness for r in accepted),
            max(r.fairness for r in accepted),
        ),
        chosen_lambda=best.lam,
        chosen_fairness=best.fairness,
        chosen_characteristic=best.max_characteristic,
    )


def synthesize(raw_poses, cfg: SynthesisConfig | None = None) -> SynthesisReport:
    """Run the full pipeline on four raw poses.

    Normalize so the first pose is the identity, compute the half-turns in the
    pose span (none means the problem is infeasible), derive both families'
    parameter values and check their visiting order, sweep the free parameter,
    keep the fairest quarter, take each family's minimizer of the maximal
    angle characteristic, prefer the family better in both measures (falling
    back to the smaller characteristic), factor the winning motion, assemble
    the nine valid linkages, rank them, and place everything back at the
    original first pose.
    """
    cfg = cfg or SynthesisConfig()
    prob = normalize_poses(raw_poses, tol=cfg.tolerances.input)
    fams = families(prob)
    if not fams:
        raise SynthesisInfeasible(
            "no real half-turns in the pose span; no cubic interpolant exists"
        )
    outcomes = []
    for fam in fams:
        if has_order_defect(fam):
            outcomes.append(FamilyOutcome(family=fam, order_defect=True))
        else:
            outcomes.append(_sweep_family(fam, prob, cfg))
    usable = [i for i, o in enumerate(outcomes) if not o.order_defect
              and o.chosen_lambda is not None]
    if not usable:
        defects = [o.family.family_id.value for o in outcomes if o.order_defect]
        if defects:
            raise OrderDefect(
                "every family visits the poses out of order "
                f"({', '.join(defects)}); only different input poses can fix this"
            )
        raise SynthesisInfeasible("no feasible member found in any family sweep")
    if len(usable) == 1:
        chosen = usable[0]
    else:
        a, b = outcomes[usable[0]], outcomes[usable[1]]
        if (a.chosen_fairness <= b.chosen_fairness
                and a.chosen_characteristic <= b.chosen_characteristic):
            chosen = usable[0]
        elif (b.chosen_fairness <= a.chosen_fairness
                and b.chosen_characteristic <= a.chosen_characteristic):
            chosen = usable[1]
        else:
            chosen = usable[0] if a.chosen_characteristic <= b.chosen_characteristic \
                else usable[1]
    outcome = outcomes[chosen]
    motion = cubic_through(outcome.family, prob, outcome.chosen_lambda,
                           tol=cfg.tolerances.input)
    factorizations = fac(motion)
    candidates = []
    for pair in sorted(valid_pairs()):
        fa = factorizations[pair[0] - 1]
        fb = factorizations[pair[1] - 1]
        candidates.append(
            assemble_linkage(fa, fb, pair, closure_samples=cfg.closure_samples,
                             tol=cfg.tolerances.projective)
        )
    base = prob.base_transform
    candidates = [embed_linkage(lk, base) for lk in candidates]
    key = _RANK_KEYS[cfg.rank_by]
    winner = min(candidates, key=key)
    return SynthesisReport(
        problem=prob,
        config=cfg,
        families=tuple(outcomes),
        chosen_family_index=chosen,
        motion=motion,
        factorizations=tuple(factorizations),
        candidates=tuple(candidates),
        winner=winner,
    )
