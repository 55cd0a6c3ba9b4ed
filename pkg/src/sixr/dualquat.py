"""Quaternion and dual quaternion arithmetic for rigid displacements.

Conventions used throughout the package:

* Quaternion coordinates are ordered ``[w, x, y, z]`` (scalar first).
* A dual quaternion is stored as an 8-vector ``[w, x, y, z, ew, ex, ey, ez]``:
  primal part followed by dual part, with the dual unit satisfying eps^2 = 0.
* A unit dual quaternion ``q = r + eps*s`` acts on a point ``p`` by
  ``p -> vec(r p r̄ + 2 s r̄)``; composition of displacements corresponds to
  multiplication, the right factor acting first.
* Displacements are projective: ``q`` and ``c*q`` (real ``c != 0``) represent
  the same displacement.  Elements with vanishing primal part represent no
  displacement at all (the exceptional three-space).

All values are immutable and all functions are pure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    NotARotation,
    NotARotationMatrix,
    OnExceptional,
    ZeroInput,
)

__all__ = [
    "Quaternion",
    "DualQuaternion",
    "Pose",
    "PlueckerLine",
    "DisplacementType",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "study_bilinear",
    "study_form",
    "project_to_quadric",
    "classify",
    "axis_of",
    "act_on_point",
    "pose_from_matrix",
    "pose_to_matrix",
    "projective_distance",
    "rotation_about_line",
]


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle.

    ``exact`` guards checks on internally constructed data, ``input`` the same
    checks on rounded external data, ``projective`` the angular threshold for
    projective comparisons of 8-vectors.
    """

    exact: float = 1e-9
    input: float = 1e-6
    projective: float = 1e-8


DEFAULT_TOLERANCES = Tolerances()


def _as_float_array(values, size, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size != size:
        raise ValueError(f"{name} needs {size} components, got {arr.size}")
    arr.flags.writeable = False
    return arr


class Quaternion:
    """Real quaternion w + x*i + y*j + z*k."""

    __slots__ = ("_q",)

    def __init__(self, w=0.0, x=0.0, y=0.0, z=0.0):
        self._q = _as_float_array([w, x, y, z], 4, "Quaternion")

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        q = cls.__new__(cls)
        q._q = _as_float_array(arr, 4, "Quaternion")
        return q

    @property
    def array(self) -> np.ndarray:
        return self._q

    @property
    def w(self):
        return self._q[0]

    @property
    def x(self):
        return self._q[1]

    @property
    def y(self):
        return self._q[2]

    @property
    def z(self):
        return self._q[3]

    @property
    def vector(self) -> np.ndarray:
        """The (x, y, z) part."""
        return self._q[1:]

    def conjugate(self) -> "Quaternion":
        return Quaternion(self._q[0], -self._q[1], -self._q[2], -self._q[3])

    def norm(self) -> float:
        return float(np.linalg.norm(self._q))

    def squared_norm(self) -> float:
        return float(self._q @ self._q)

    def dot(self, other: "Quaternion") -> float:
        return float(self._q @ other._q)

    def inverse(self) -> "Quaternion":
        n2 = self.squared_norm()
        if n2 == 0.0:
            raise ZeroInput("cannot invert the zero quaternion")
        return Quaternion.from_array(self.conjugate().array / n2)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b = self._q, other._q
            return Quaternion(
                a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
            )
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self._q * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion.from_array(self._q * other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(self._q + other._q)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(self._q - other._q)
        return NotImplemented

    def __neg__(self):
        return Quaternion.from_array(-self._q)

    def __repr__(self):
        return "Quaternion({:g}, {:g}, {:g}, {:g})".format(*self._q)


class DualQuaternion:
    """Dual quaternion ``primal + eps * dual`` stored as an 8-vector."""

    __slots__ = ("_c",)

    def __init__(self, primal: Quaternion, dual: Quaternion):
        arr = np.concatenate([primal.array, dual.array])
        arr.flags.writeable = False
        self._c = arr

    @classmethod
    def from_array(cls, arr) -> "DualQuaternion":
        dq = cls.__new__(cls)
        dq._c = _as_float_array(arr, 8, "DualQuaternion")
        return dq

    @classmethod
    def from_scalar(cls, value: float) -> "DualQuaternion":
        arr = np.zeros(8)
        arr[0] = value
        return cls.from_array(arr)

    @classmethod
    def identity(cls) -> "DualQuaternion":
        return cls.from_scalar(1.0)

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def primal(self) -> Quaternion:
        return Quaternion.from_array(self._c[:4])

    @property
    def dual(self) -> Quaternion:
        return Quaternion.from_array(self._c[4:])

    def conjugate(self) -> "DualQuaternion":
        """Quaternion conjugation of both parts (the bar involution)."""
        out = self._c * np.array([1.0, -1, -1, -1, 1, -1, -1, -1])
        return DualQuaternion.from_array(out)

    def norm(self) -> float:
        """Euclidean norm of the 8-vector (not the dual-number norm)."""
        return float(np.linalg.norm(self._c))

    def inverse(self) -> "DualQuaternion":
        """Multiplicative inverse; requires an invertible primal part."""
        p = self.primal
        n2 = p.squared_norm()
        if n2 == 0.0:
            raise OnExceptional("primal part vanishes; no inverse exists")
        pinv = Quaternion.from_array(p.conjugate().array / n2)
        d = Quaternion.from_array(self._c[4:])
        return DualQuaternion(pinv, -1.0 * (pinv * d * pinv))

    def canonical(self) -> "DualQuaternion":
        """Unit-norm representative with the standard sign choice.

        Primal scalar part nonnegative where it does not vanish, otherwise the
        first coordinate above tolerance is made positive.
        """
        n = self.norm()
        if n == 0.0:
            raise ZeroInput("zero dual quaternion has no representative")
        arr = self._c / n
        if abs(arr[0]) > 1e-12:
            sign = 1.0 if arr[0] > 0 else -1.0
        else:
            nz = np.flatnonzero(np.abs(arr) > 1e-12)
            sign = 1.0 if arr[nz[0]] > 0 else -1.0
        return DualQuaternion.from_array(sign * arr)

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            ap, ad = self.primal, self.dual
            bp, bd = other.primal, other.dual
            return DualQuaternion(ap * bp, ap * bd + ad * bp)
        if isinstance(other, (int, float)):
            return DualQuaternion.from_array(self._c * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return DualQuaternion.from_array(self._c * other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c + other._c)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c - other._c)
        return NotImplemented

    def __neg__(self):
        return DualQuaternion.from_array(-self._c)

    def __repr__(self):
        p = "({:g}, {:g}, {:g}, {:g})".format(*self._c[:4])
        d = "({:g}, {:g}, {:g}, {:g})".format(*self._c[4:])
        return f"DualQuaternion(primal={p}, dual={d})"


def study_bilinear(a: DualQuaternion, b: DualQuaternion) -> float:
    """Bilinear pairing of primal and dual parts.

    ``study_bilinear(a, a) == 2 * study_form(a)``; vanishing of this pairing
    against a fixed element is the linear condition cutting out the quadric of
    displacements.
    """
    ca, cb = a.array, b.array
    return float(ca[:4] @ cb[4:] + ca[4:] @ cb[:4])


def study_form(a: DualQuaternion) -> float:
    """Quadratic form whose zero set is the quadric of displacements."""
    c = a.array
    return float(c[:4] @ c[4:])


def project_to_quadric(a: DualQuaternion) -> DualQuaternion:
    """Nearest-representative step onto the displacement quadric.

    Moves (primal, dual) along the form's gradient (dual, primal) by the step
    mu that solves (p - mu*d).(d - mu*p) = 0 exactly, so rounded coordinates
    become an exact displacement.  Uses the cancellation-free root of the
    step quadratic.
    """
    arr = a.array
    p = arr[:4]
    d = arr[4:]
    s = float(p @ d)
    if s == 0.0:
        return a
    n = float(p @ p + d @ d)
    disc = n * n - 4.0 * s * s
    if disc <= 0.0:
        raise OnExceptional("representative cannot be projected onto the quadric")
    mu = 2.0 * s / (n + np.sqrt(disc))
    return DualQuaternion.from_array(np.concatenate([p - mu * d, d - mu * p]))


class DisplacementType(enum.Enum):
    ROTATION = "rotation"
    TRANSLATION = "translation"
    HALF_TURN = "half_turn"
    GENERIC = "generic"
    ON_EXCEPTIONAL = "on_exceptional"


def classify(a: DualQuaternion, tol: float = DEFAULT_TOLERANCES.exact) -> DisplacementType:
    """Classify a dual quaternion projectively.

    The predicate is invariant under nonzero real scaling: the element is
    normalized to unit 8-vector norm before any comparison.  Real scalars
    (identity-like elements) report GENERIC rather than TRANSLATION.
    """
    n = a.norm()
    if n == 0.0:
        raise ZeroInput("cannot classify the zero dual quaternion")
    c = a.array / n
    primal_norm = np.linalg.norm(c[:4])
    if primal_norm <= tol:
        return DisplacementType.ON_EXCEPTIONAL
    s = c[:4] @ c[4:]
    dual_scalar = c[4]
    primal_vec = np.linalg.norm(c[1:4])
    primal_scalar = c[0]
    dual_vec = np.linalg.norm(c[5:])
    if abs(s) > tol or abs(dual_scalar) > tol:
        return DisplacementType.GENERIC
    if primal_vec > tol:
        if abs(primal_scalar) <= tol:
            return DisplacementType.HALF_TURN
        return DisplacementType.ROTATION
    if dual_vec > tol:
        return DisplacementType.TRANSLATION
    return DisplacementType.GENERIC


@dataclass(frozen=True)
class PlueckerLine:
    """Oriented line given by a unit direction and its moment about the origin."""

    direction: np.ndarray
    moment: np.ndarray

    def __post_init__(self):
        d = _as_float_array(self.direction, 3, "direction")
        m = _as_float_array(self.moment, 3, "moment")
        nd = np.linalg.norm(d)
        if nd == 0.0:
            raise ValueError("line direction must be nonzero")
        d = d / nd
        m = m / nd
        # small along-direction components are measurement noise and get
        # projected away; anything larger is not a line at all
        if abs(d @ m) > 1e-2 * max(1.0, np.linalg.norm(m)):
            raise ValueError("moment must be orthogonal to direction")
        m = m - (d @ m) * d
        d.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "moment", m)

    @classmethod
    def through_point(cls, point, direction) -> "PlueckerLine":
        point = np.asarray(point, dtype=float)
        direction = np.asarray(direction, dtype=float)
        return cls(direction, np.cross(point, direction) / np.linalg.norm(direction))

    @property
    def anchor(self) -> np.ndarray:
        """The point of the line closest to the origin."""
        return np.cross(self.direction, self.moment)

    def point_at(self, u: float) -> np.ndarray:
        return self.anchor + u * self.direction

    def distance_to_point(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return float(np.linalg.norm(np.cross(self.direction, p) - self.moment))

    def same_line(self, other: "PlueckerLine", tol: float = 1e-8) -> bool:
        """Equality as unoriented lines."""
        d1 = np.concatenate([self.direction, self.moment])
        d2 = np.concatenate([other.direction, other.moment])
        return bool(np.linalg.norm(d1 - d2) < tol or np.linalg.norm(d1 + d2) < tol)


def axis_of(h: DualQuaternion, tol: float = DEFAULT_TOLERANCES.exact) -> PlueckerLine:
    """Rotation axis of a rotation (or half-turn) quaternion.

    For every real t the displacement ``t - h`` is a rotation about the
    returned line, so the axis depends only on the pencil spanned by 1 and h.
    """
    kind = classify(h, tol)
    if kind not in (DisplacementType.ROTATION, DisplacementType.HALF_TURN):
        raise NotARotation(f"axis extraction needs a rotation, got {kind.value}")
    c = h.array
    v = c[1:4]
    w = c[5:]
    nv = np.linalg.norm(v)
    return PlueckerLine(v / nv, w / nv)


def rotation_about_line(line: PlueckerLine, angle: float) -> DualQuaternion:
    """Unit dual quaternion rotating by ``angle`` about the oriented line."""
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    arr = np.concatenate([[c], s * line.direction, [0.0], s * line.moment])
    return DualQuaternion.from_array(arr)


class Pose(object):
    """A projective representative of a rigid displacement.

    Validates that the representative lies on the displacement quadric and off
    the exceptional three-space.  The stored representative keeps the caller's
    scale; use :meth:`canonical` for a normalized one.
    """

    __slots__ = ("rep", "tol")

    def __init__(self, rep: DualQuaternion, tol: float = DEFAULT_TOLERANCES.input):
        n = rep.norm()
        if n == 0.0:
            raise ZeroInput("zero vector is not a pose")
        unit = rep.array / n
        if np.linalg.norm(unit[:4]) <= tol:
            raise OnExceptional("primal part vanishes; not a displacement")
        s = unit[:4] @ unit[4:]
        if abs(s) > tol:
            raise ValueError(
                f"representative is off the displacement quadric (form residual {s:.3e})"
            )
        self.rep = rep
        self.tol = tol

    @classmethod
    def identity(cls) -> "Pose":
        return cls(DualQuaternion.identity())

    @classmethod
    def from_array(cls, arr, tol: float = DEFAULT_TOLERANCES.input) -> "Pose":
        return cls(DualQuaternion.from_array(arr), tol)

    def canonical(self) -> DualQuaternion:
        return self.rep.canonical()

    def inverse(self) -> "Pose":
        return Pose(self.rep.inverse(), self.tol)

    def compose(self, other: "Pose") -> "Pose":
        return Pose(self.rep * other.rep, max(self.tol, other.tol))

    def __repr__(self):
        return f"Pose({self.rep!r})"


def act_on_point(g: Pose, p) -> np.ndarray:
    """Apply the rigid displacement of ``g`` to a 3-vector."""
    c = g.rep.array
    r = Quaternion.from_array(c[:4])
    s = Quaternion.from_array(c[4:])
    n2 = r.squared_norm()
    if n2 == 0.0:
        raise OnExceptional("primal part vanishes")
    p = np.asarray(p, dtype=float)
    phat = Quaternion.from_array(np.concatenate([[0.0], p]))
    rbar = r.conjugate()
    out = r * phat * rbar + 2.0 * (s * rbar)
    return out.vector / n2


def pose_from_matrix(rotation, translation, tol: float = DEFAULT_TOLERANCES.input) -> Pose:
    """Pose from a 3x3 rotation matrix and a translation 3-vector.

    The representative is chosen with nonnegative primal scalar part.
    """
    R = np.asarray(rotation, dtype=float).reshape(3, 3)
    t = np.asarray(translation, dtype=float).reshape(3)
    if np.linalg.norm(R @ R.T - np.eye(3)) > 1e3 * tol or np.linalg.det(R) < 0:
        raise NotARotationMatrix("matrix is not orthogonal with determinant one")
    # Shepperd-style branch on the largest diagonal combination
    tr = np.trace(R)
    candidates = [tr, R[0, 0], R[1, 1], R[2, 2]]
    case = int(np.argmax(candidates))
    if case == 0:
        w = 0.5 * np.sqrt(1.0 + tr)
        f = 0.25 / w
        q = np.array([w, f * (R[2, 1] - R[1, 2]), f * (R[0, 2] - R[2, 0]),
                      f * (R[1, 0] - R[0, 1])])
    else:
        i = case - 1
        j, k = (i + 1) % 3, (i + 2) % 3
        v = 0.5 * np.sqrt(1.0 + R[i, i] - R[j, j] - R[k, k])
        f = 0.25 / v
        q = np.zeros(4)
        q[0] = f * (R[k, j] - R[j, k])
        q[1 + i] = v
        q[1 + j] = f * (R[j, i] + R[i, j])
        q[1 + k] = f * (R[k, i] + R[i, k])
    if q[0] < 0:
        q = -q
    r = Quaternion.from_array(q)
    that = Quaternion.from_array(np.concatenate([[0.0], t]))
    dual = 0.5 * (that * r)
    return Pose(DualQuaternion(r, dual), tol)


def pose_to_matrix(g: Pose):
    """Rotation matrix and translation vector of a pose."""
    c = g.rep.array
    r = c[:4]
    n2 = float(r @ r)
    if n2 == 0.0:
        raise OnExceptional("primal part vanishes")
    w, x, y, z = r
    R = np.array([
        [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
    ]) / n2
    rq = Quaternion.from_array(r)
    sq = Quaternion.from_array(c[4:])
    t = 2.0 * (sq * rq.conjugate()).vector / n2
    return R, t


def projective_distance(a: DualQuaternion, b: DualQuaternion) -> float:
    """Sine of the angle between the two 8-vectors, i.e. 0 iff projectively equal.

    Computed as the norm of the rejection of one unit vector from the other,
    which stays accurate down to machine precision for nearly equal (or nearly
    opposite) representatives.
    """
    ca = a.array
    cb = b.array
    na = np.linalg.norm(ca)
    nb = np.linalg.norm(cb)
    if na == 0.0 or nb == 0.0:
        raise ZeroInput("projective distance to the zero vector is undefined")
    ua = ca / na
    ub = cb / nb
    return float(np.linalg.norm(ua - (ua @ ub) * ub))
