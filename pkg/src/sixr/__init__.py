"""Synthesis of overconstrained spatial 6R linkages from four prescribed poses.

The toolkit interpolates four poses by rational cubic motions over the dual
quaternions, factors the resulting motion polynomials into linear rotation
factors, and combines pairs of factorizations into closed loops of six
revolute joints whose coupler visits the given poses.
"""

from .dualquat import (
    DEFAULT_TOLERANCES,
    DisplacementType,
    DualQuaternion,
    PlueckerLine,
    Pose,
    Quaternion,
    Tolerances,
    act_on_point,
    axis_of,
    classify,
    pose_from_matrix,
    pose_to_matrix,
    project_to_quadric,
    projective_distance,
    rotation_about_line,
    study_bilinear,
    study_form,
)
from .errors import SixrError, SynthesisInfeasible, OrderDefect
from .factorization import (
    Factorization,
    LinearFactor,
    OpenChain,
    fac,
    open_chain,
    verify_factorization,
)
from .interpolation import (
    FamilyId,
    InterpolationFamily,
    PoseProblem,
    cubic_through,
    families,
    half_turns,
    has_order_defect,
    normalize_poses,
    parameter_values,
)
from .motionpoly import (
    DQPolynomial,
    MotionPolynomial,
    minimal_polynomial,
    norm_polynomial,
    poly_multiply,
    qr_divide,
    reverse_and_monicize,
)
from .realpoly import QuadraticFactor, RealPolynomial, quadratic_factors, roots
from .synthesis import (
    DHRecord,
    FamilyOutcome,
    Linkage6R,
    LinkageType,
    SynthesisConfig,
    SynthesisReport,
    angle_characteristic,
    assemble_linkage,
    dh_parameters,
    embed_linkage,
    fairness,
    joint_angle_vector,
    linkage_extent,
    linkage_type,
    rotation_angle,
    synthesize,
    valid_pairs,
)

__version__ = "0.1.0"
