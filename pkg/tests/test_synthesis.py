import math

import numpy as np
import pytest

from sixr import (
    DualQuaternion,
    FamilyId,
    InterpolationFamily,
    MotionPolynomial,
    PlueckerLine,
    Pose,
    QuadraticFactor,
    SynthesisConfig,
    Tolerances,
    angle_characteristic,
    assemble_linkage,
    dh_parameters,
    embed_linkage,
    fac,
    fairness,
    joint_angle_vector,
    linkage_extent,
    linkage_type,
    minimal_polynomial,
    norm_polynomial,
    projective_distance,
    quadratic_factors,
    rotation_about_line,
    rotation_angle,
    synthesize,
    valid_pairs,
)
from sixr.errors import (
    CoincidentAxes,
    DegenerateFactor,
    InvalidPair,
    OrderDefect,
    SegmentUndefined,
    SynthesisInfeasible,
)
from sixr.synthesis import LinkageType, _adaptive_quadrature, _TrajectorySpeeds

from helpers import (
    DEMO_POSES,
    DEMO_TOL,
    INFEASIBLE_POSES,
    ORDER_DEFECT_POSES,
    random_line,
    random_motion_cubic,
    random_pose,
    random_rotation_dq,
)

EXPECTED_SIGNATURES = [(3, 2, 1), (2, 3, 1), (3, 1, 2), (1, 3, 2), (2, 1, 3), (1, 2, 3)]


def quaternion_oracle_angle(h: DualQuaternion, t: float) -> float:
    """Rotation angle of the displacement t - h read off the primal part."""
    arr = h.array
    a = arr[0]
    v = np.linalg.norm(arr[1:4])
    return 2.0 * math.atan2(v, t - a)


class TestRotationAngle:
    def test_zero_position(self):
        m = QuadraticFactor(r=-1.2, s=3.0)
        assert rotation_angle(m, math.inf) == 0.0
        assert rotation_angle(m, -math.inf) == pytest.approx(2 * math.pi)

    def test_half_turn_at_zero(self):
        assert rotation_angle(QuadraticFactor(0.0, 1.0), 0.0) == pytest.approx(math.pi)

    def test_matches_quaternion_extraction(self, rng):
        for _ in range(200):
            h = random_rotation_dq(rng, scale=True)
            m = minimal_polynomial(h)
            t = float(rng.uniform(-8, 8))
            assert rotation_angle(m, t) == pytest.approx(
                quaternion_oracle_angle(h, t), abs=1e-9)

    def test_strictly_decreasing_with_limits(self, rng):
        m = QuadraticFactor(r=float(rng.uniform(-2, 2)), s=float(rng.uniform(1.5, 4)))
        grid = np.linspace(-1e3, 1e3, 400)
        values = [rotation_angle(m, float(t)) for t in grid]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(0 < v < 2 * math.pi for v in values)
        assert values[0] > 2 * math.pi - 1e-2
        assert values[-1] < 1e-2

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateFactor):
            rotation_angle(QuadraticFactor(2.0, 1.0), 0.5)


class TestAngleCharacteristic:
    def test_symmetric_factor(self):
        assert angle_characteristic(QuadraticFactor(0.0, 1.0)) == 0.0

    def test_direct_formula(self):
        assert angle_characteristic(QuadraticFactor(2.0, 2.0)) == pytest.approx(1.0)

    def test_scale_invariance(self, rng):
        r, s = float(rng.uniform(-2, 2)), float(rng.uniform(1.5, 3))
        m0 = angle_characteristic(QuadraticFactor(r, s))
        for c in (0.3, 2.0, 11.0):
            assert angle_characteristic(QuadraticFactor(c * r, c * c * s)) == \
                pytest.approx(m0)

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateFactor):
            angle_characteristic(QuadraticFactor(2.0, 1.0 + 1e-11))


class TestFairness:
    def test_pure_rotation_arc_lengths(self):
        # rotating about the z-axis: origin and the z unit point stand still,
        # the x and y unit points sweep circular arcs of the full joint angle
        axis = PlueckerLine.through_point([0, 0, 0], [0, 0, 1])
        k = rotation_about_line(axis, math.pi)  # half-turn, also a factor
        c = MotionPolynomial.from_linear_factors([k])
        fam = InterpolationFamily(halfturn=k, other_halfturn=None,
                                  params=(2.0, 1.0, 0.5),
                                  family_id=FamilyId.FIRST_RULING)
        theta = rotation_angle(minimal_polynomial(k), 0.5)
        value = fairness(c, fam)
        assert value == pytest.approx(2 * theta, abs=1e-5)

    def test_constant_motion_zero_speed(self):
        c = MotionPolynomial.from_coefficient_array(
            [[-0.5, 0, 0, 0, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0, 0, 0]])
        speeds = _TrajectorySpeeds(c)
        assert np.max(speeds.speed_sum(np.linspace(-3, 3, 50))) < 1e-14

    def test_additivity_over_subsegments(self, rng):
        c, _ = random_motion_cubic(rng)
        speeds = _TrajectorySpeeds(c)

        def integrand(w):
            t = 0.25 + (1.0 - w) / w
            return speeds.speed_sum(t) / (w * w)

        whole = _adaptive_quadrature(integrand, 0.0, 1.0, 1e-8)
        parts = (_adaptive_quadrature(integrand, 0.0, 0.37, 1e-8)
                 + _adaptive_quadrature(integrand, 0.37, 1.0, 1e-8))
        assert whole == pytest.approx(parts, abs=1e-6)

    def test_order_defect_rejected(self, rng):
        c, _ = random_motion_cubic(rng)
        fam = InterpolationFamily(halfturn=random_rotation_dq(rng),
                                  other_halfturn=None, params=(1.0, 3.0, 2.0),
                                  family_id=FamilyId.FIRST_RULING)
        with pytest.raises(SegmentUndefined):
            fairness(c, fam)


class TestValidPairs:
    def test_cardinality(self):
        pairs = valid_pairs()
        assert len(pairs) == 9
        all_pairs = {(i, j) for i in range(1, 7) for j in range(i + 1, 7)}
        assert len(all_pairs - pairs) == 6

    def test_types(self):
        symmetric = {p for p in valid_pairs()
                     if linkage_type(p) is LinkageType.ANGLE_SYMMETRIC}
        assert symmetric == {(1, 6), (2, 4), (3, 5)}

    def test_boundary_tag_criterion(self):
        # valid pairs differ in both leftmost and rightmost tags
        for i in range(1, 7):
            for j in range(i + 1, 7):
                si, sj = EXPECTED_SIGNATURES[i - 1], EXPECTED_SIGNATURES[j - 1]
                shares = si[0] == sj[0] or si[-1] == sj[-1]
                assert ((i, j) in valid_pairs()) == (not shares)

    def test_invalid_raises(self):
        with pytest.raises(InvalidPair):
            linkage_type((1, 2))


class TestAssembly:
    def test_valid_pairs_close(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        for pair in sorted(valid_pairs()):
            lk = assemble_linkage(fs[pair[0] - 1], fs[pair[1] - 1], pair)
            assert len(lk.axes_cycle) == 6
            assert len(lk.dh) == 6
            for t in np.linspace(-2, 2, 50):
                va = lk.chain_product(t) if hasattr(lk, "chain_product") else None
            prod_a = fs[pair[0] - 1].product()
            prod_b = fs[pair[1] - 1].product()
            for t in np.linspace(-2, 2, 50):
                assert projective_distance(prod_a.evaluate(float(t)),
                                           prod_b.evaluate(float(t))) < 1e-8

    def test_invalid_pair_rejected(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        with pytest.raises(InvalidPair):
            assemble_linkage(fs[0], fs[1], (1, 2))

    def test_axes_cycle_order(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        lk = assemble_linkage(fs[0], fs[3], (1, 4))
        assert lk.axes_cycle[:3] == lk.chain_a.axes
        assert lk.axes_cycle[3:] == tuple(reversed(lk.chain_b.axes))

    def test_joint_pairing_shared_tags(self, rng):
        # both chains carry the same three tags, so the paired joints traverse
        # identical angle functions
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        lk = assemble_linkage(fs[0], fs[3], (1, 4))
        tags_a = sorted((lf.tag.r, lf.tag.s) for lf in fs[0].factors)
        tags_b = sorted((lf.tag.r, lf.tag.s) for lf in fs[3].factors)
        assert np.allclose(np.array(tags_a), np.array(tags_b), atol=1e-9)
        for (ra, sa), (rb, sb) in zip(tags_a, tags_b):
            for t in np.linspace(-2, 2, 20):
                assert rotation_angle(QuadraticFactor(ra, sa), float(t)) == \
                    pytest.approx(rotation_angle(QuadraticFactor(rb, sb), float(t)),
                                  abs=1e-7)


class TestDHParameters:
    def test_orthogonal_skew_lines(self):
        a = PlueckerLine.through_point([0, 0, 0], [1, 0, 0])
        b = PlueckerLine.through_point([0, 0, 1], [0, 1, 0])
        feet_dh = dh_parameters([a, b])
        assert feet_dh[0].distance == pytest.approx(1.0)
        assert feet_dh[0].twist == pytest.approx(math.pi / 2)

    def test_parallel_lines(self):
        a = PlueckerLine.through_point([0, 0, 0], [1, 0, 0])
        b = PlueckerLine.through_point([0, 2, 0], [1, 0, 0])
        recs = dh_parameters([a, b])
        assert recs[0].distance == pytest.approx(2.0)
        assert recs[0].twist == pytest.approx(0.0)

    def test_distance_against_sampling(self, rng):
        for _ in range(10):
            a, b = random_line(rng), random_line(rng)
            recs = dh_parameters([a, b])
            us = np.linspace(-60, 60, 4001)
            pa = a.anchor[None, :] + us[:, None] * a.direction[None, :]
            pb = b.anchor[None, :] + us[:, None] * b.direction[None, :]
            sampled = min(
                np.min(np.linalg.norm(pa - q, axis=1)) for q in pb[::40]
            )
            assert recs[0].distance <= sampled + 1e-6

    def test_recomputation_invariant(self, rng):
        axes = [random_line(rng) for _ in range(6)]
        recs = dh_parameters(axes)
        again = dh_parameters(axes)
        for r1, r2 in zip(recs, again):
            assert r1 == r2

    def test_coincident_rejected(self):
        a = PlueckerLine.through_point([0, 0, 0], [1, 0, 0])
        with pytest.raises(CoincidentAxes):
            dh_parameters([a, a])


class TestExtent:
    def test_zero(self):
        from sixr import DHRecord
        recs = [DHRecord(0.0, 0.5, 0.0)] * 6
        assert linkage_extent(recs) == 0.0

    def test_unit_distances(self):
        from sixr import DHRecord
        recs = [DHRecord(1.0, 0.5, 0.0)] * 6
        assert linkage_extent(recs) == pytest.approx(6.0)

    def test_offsets_and_distances_only_mode(self):
        from sixr import DHRecord
        recs = [DHRecord(1.0, 0.5, -2.0)] * 6
        assert linkage_extent(recs) == pytest.approx(18.0)
        assert linkage_extent(recs, include_offsets=False) == pytest.approx(6.0)


class TestJointAngleVector:
    def test_zero_at_infinity(self, rng):
        c, _ = random_motion_cubic(rng)
        assert joint_angle_vector(c, math.inf) == (0.0, 0.0, 0.0)

    def test_half_turn_factor(self):
        i = DualQuaternion.from_array([0, 1, 0, 0, 0, 0, 0, 0])
        c = MotionPolynomial.from_linear_factors([i])
        assert joint_angle_vector(c, 0.0) == pytest.approx((math.pi,))

    def test_matches_forward_kinematics(self, rng):
        c, _ = random_motion_cubic(rng)
        t4 = float(rng.uniform(-2, 2))
        omegas = joint_angle_vector(c, t4)
        factors = quadratic_factors(norm_polynomial(c))
        f = fac(c)[0]
        for lf in f.factors:
            # the joint angle of this factor at t4, via its displacement
            phi = quaternion_oracle_angle(lf.h, t4)
            omega_fk = phi - 2 * math.pi if phi > math.pi else phi
            idx = int(np.argmin([abs(m.r - lf.tag.r) + abs(m.s - lf.tag.s)
                                 for m in factors]))
            assert omegas[idx] == pytest.approx(omega_fk, abs=1e-9)


class TestEmbed:
    def test_identity_no_change(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        lk = assemble_linkage(fs[0], fs[3], (1, 4))
        moved = embed_linkage(lk, Pose.identity())
        assert moved.extent == pytest.approx(lk.extent, abs=1e-12)
        for a, b in zip(moved.axes_cycle, lk.axes_cycle):
            assert a.same_line(b, tol=1e-10)

    def test_translation_moves_axes(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        lk = assemble_linkage(fs[0], fs[3], (1, 4))
        shift = Pose(DualQuaternion.from_array([1, 0, 0, 0, 0, 0.5, 0, 0]))
        moved = embed_linkage(lk, shift)
        for a, b in zip(moved.axes_cycle, lk.axes_cycle):
            assert np.allclose(a.direction, b.direction, atol=1e-10)
            assert np.allclose(a.anchor - (a.anchor @ a.direction) * a.direction,
                               _shifted_anchor(b, [1, 0, 0]), atol=1e-10)

    def test_dh_invariant_under_rigid_motion(self, rng):
        c, _ = random_motion_cubic(rng)
        fs = fac(c)
        lk = assemble_linkage(fs[0], fs[3], (1, 4))
        base = random_pose(rng)
        moved = embed_linkage(lk, base)
        for r1, r2 in zip(moved.dh, lk.dh):
            assert r1.distance == pytest.approx(r2.distance, abs=1e-10)
            assert r1.twist == pytest.approx(r2.twist, abs=1e-10)
            assert r1.offset == pytest.approx(r2.offset, abs=1e-10)
        assert moved.extent == pytest.approx(lk.extent, abs=1e-9)


def _shifted_anchor(line, shift):
    p = line.anchor + np.asarray(shift, dtype=float)
    d = line.direction
    return p - (p @ d) * d


class TestSynthesize:
    def test_infeasible(self):
        with pytest.raises(SynthesisInfeasible):
            synthesize(INFEASIBLE_POSES, SynthesisConfig(grid_size=11))

    def test_order_defect_both_families(self):
        with pytest.raises(OrderDefect):
            synthesize(ORDER_DEFECT_POSES, SynthesisConfig(grid_size=11))

    def test_demo_report_structure(self, demo_run):
        report = demo_run["report"]
        assert len(report.families) == 2
        assert not any(o.order_defect for o in report.families)
        assert len(report.factorizations) == 6
        assert len(report.candidates) == 9
        assert report.winner in report.candidates
        key = report.winner.extent
        assert all(key <= lk.extent for lk in report.candidates)
        assert {lk.pair_index for lk in report.candidates} == valid_pairs()
        for lk in report.candidates:
            assert len(lk.axes_cycle) == 6
            for line in lk.axes_cycle:
                assert np.all(np.isfinite(line.direction))
                assert np.all(np.isfinite(line.moment))

    def test_demo_determinism(self, demo_run):
        cfg = SynthesisConfig(grid_size=61, tolerances=Tolerances(input=DEMO_TOL))
        a = synthesize(DEMO_POSES, cfg)
        b = synthesize(DEMO_POSES, cfg)
        assert a.chosen_family_index == b.chosen_family_index
        oa, ob = a.chosen_family, b.chosen_family
        assert oa.chosen_lambda == ob.chosen_lambda
        assert oa.chosen_fairness == ob.chosen_fairness
        assert a.winner.pair_index == b.winner.pair_index
        assert a.winner.extent == b.winner.extent

    def test_candidates_share_coupler(self, demo_run):
        report = demo_run["report"]
        samples = np.linspace(-1.5, 1.5, 7)
        for lk in report.candidates:
            for t in samples:
                assert projective_distance(
                    lk.motion.evaluate(float(t)),
                    report.candidates[0].motion.evaluate(float(t))) < 1e-8
