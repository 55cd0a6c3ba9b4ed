"""Left polynomials with dual quaternion coefficients.

Coefficients are written to the left of the indeterminate, which commutes
with them; the product order of coefficients therefore matters and is always
"left factor's coefficient times right factor's coefficient".  A motion
polynomial is a monic polynomial of positive degree whose norm polynomial
(the product with its conjugate) is real; it parametrizes a rational rigid
motion with zero position at the parameter value infinity.
"""

from __future__ import annotations

import numpy as np

from .dualquat import DualQuaternion, classify, DisplacementType, DEFAULT_TOLERANCES
from .errors import (
    NonMonicDivisor,
    NonRealCoefficients,
    NonRealLeadingCoefficient,
    NotAMotionPolynomial,
    NotARotation,
)
from .realpoly import QuadraticFactor, RealPolynomial

__all__ = [
    "DQPolynomial",
    "MotionPolynomial",
    "poly_multiply",
    "qr_divide",
    "norm_polynomial",
    "reverse_and_monicize",
    "minimal_polynomial",
]

# trailing coefficients below this fraction of the largest are degree noise
_DEGREE_TRIM = 1e-12


def _quat_mul_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Quaternion product on trailing-axis-4 arrays (broadcasting)."""
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def _quat_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Convolution of quaternion coefficient arrays, (n,4) x (m,4) -> (n+m-1,4)."""
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m - 1, 4))
    for k in range(m):
        out[k:k + n] += _quat_mul_arrays(a, b[k])
    return out


def _dq_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Convolution of dual-quaternion coefficient arrays, (n,8) x (m,8)."""
    primal = _quat_conv(a[:, :4], b[:, :4])
    dual = _quat_conv(a[:, :4], b[:, 4:]) + _quat_conv(a[:, 4:], b[:, :4])
    return np.concatenate([primal, dual], axis=1)


class DQPolynomial:
    """Dense left polynomial; ``coeffs[k]`` multiplies t^k."""

    __slots__ = ("coeffs", "_arr", "_norm")

    def __init__(self, coeffs, trim: bool = True):
        coeffs = [
            c if isinstance(c, DualQuaternion) else DualQuaternion.from_array(c)
            for c in coeffs
        ]
        if not coeffs:
            coeffs = [DualQuaternion.from_scalar(0.0)]
        if trim:
            norms = [c.norm() for c in coeffs]
            scale = max(norms)
            if scale == 0.0:
                coeffs = coeffs[:1]
            else:
                last = max(i for i, n in enumerate(norms) if n > _DEGREE_TRIM * scale)
                coeffs = coeffs[: last + 1]
        self.coeffs = tuple(coeffs)
        self._arr = None
        self._norm = None

    @classmethod
    def from_coefficient_array(cls, arr, trim: bool = True) -> "DQPolynomial":
        arr = np.asarray(arr, dtype=float)
        return cls([DualQuaternion.from_array(row) for row in arr], trim=trim)

    @classmethod
    def constant(cls, value) -> "DQPolynomial":
        if isinstance(value, (int, float)):
            value = DualQuaternion.from_scalar(value)
        return cls([value])

    @classmethod
    def linear_factor(cls, h: DualQuaternion) -> "DQPolynomial":
        """The polynomial t - h."""
        return cls([-h, DualQuaternion.from_scalar(1.0)], trim=False)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> DualQuaternion:
        return self.coeffs[-1]

    @property
    def coefficient_array(self) -> np.ndarray:
        """(degree + 1, 8) array of coefficients, ascending."""
        if self._arr is None:
            self._arr = np.array([c.array for c in self.coeffs])
        return self._arr

    def is_zero(self, tol: float = _DEGREE_TRIM) -> bool:
        return self.degree == 0 and self.coeffs[0].norm() <= tol

    def coefficient_scale(self) -> float:
        return max(c.norm() for c in self.coeffs)

    def conjugate(self) -> "DQPolynomial":
        return DQPolynomial([c.conjugate() for c in self.coeffs], trim=False)

    def derivative(self) -> "DQPolynomial":
        if self.degree == 0:
            return DQPolynomial.constant(0.0)
        return DQPolynomial(
            [float(k) * c for k, c in enumerate(self.coeffs) if k >= 1], trim=False
        )

    def evaluate(self, t: float) -> DualQuaternion:
        """Value at t, the leading coefficient for infinite t (projective limit)."""
        if np.isinf(t):
            return self.leading
        acc = np.zeros(8)
        for c in reversed(self.coeffs):
            acc = acc * t + c.array
        return DualQuaternion.from_array(acc)

    def __mul__(self, other):
        if isinstance(other, DQPolynomial):
            return poly_multiply(self, other)
        if isinstance(other, (int, float)):
            return DQPolynomial([c * other for c in self.coeffs], trim=False)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return DQPolynomial([c * other for c in self.coeffs], trim=False)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, DQPolynomial):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        zero = DualQuaternion.from_scalar(0.0)
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else zero
            b = other.coeffs[k] if k < len(other.coeffs) else zero
            out.append(a + b)
        return DQPolynomial(out)

    def __sub__(self, other):
        if not isinstance(other, DQPolynomial):
            return NotImplemented
        return self + DQPolynomial([-c for c in other.coeffs], trim=False)

    def __repr__(self):
        return f"DQPolynomial(degree={self.degree})"


def poly_multiply(p: DQPolynomial, q: DQPolynomial) -> DQPolynomial:
    """Cauchy product; coefficient products taken left-factor times right-factor."""
    out = _dq_conv(p.coefficient_array, q.coefficient_array)
    return DQPolynomial.from_coefficient_array(out)


class MotionPolynomial(DQPolynomial):
    """Monic polynomial of positive degree with a real norm polynomial."""

    def __init__(self, coeffs, tol: float = DEFAULT_TOLERANCES.exact, trim: bool = True):
        super().__init__(coeffs, trim=trim)
        if self.degree < 1:
            raise NotAMotionPolynomial("degree must be positive")
        lead = self.leading.array
        if abs(lead[0] - 1.0) > tol or np.max(np.abs(lead[1:])) > tol:
            raise NotAMotionPolynomial("leading coefficient must be 1")
        _, residual = _norm_polynomial_with_residual(self)
        if residual > max(tol, 1e-2 * self.coefficient_scale() ** 2):
            raise NotAMotionPolynomial(
                f"norm polynomial is not real (residual {residual:.3e})",
                residual=residual,
            )

    @classmethod
    def from_linear_factors(cls, hs) -> "MotionPolynomial":
        """Product (t - h_1)(t - h_2)...(t - h_n), leftmost first."""
        acc = DQPolynomial.constant(1.0)
        for h in hs:
            acc = acc * DQPolynomial.linear_factor(h)
        return cls(acc.coeffs)


def _norm_polynomial_with_residual(c: DQPolynomial):
    if c._norm is None:
        arr = c.coefficient_array
        conj = arr * np.array([1.0, -1, -1, -1, 1, -1, -1, -1])
        prod = _dq_conv(arr, conj)
        residual = float(np.max(np.abs(prod[:, 1:])))
        c._norm = (RealPolynomial(prod[:, 0]), residual)
    return c._norm


def norm_polynomial(c: DQPolynomial, tol: float | None = None) -> RealPolynomial:
    """The real polynomial c * conj(c).

    The returned coefficients are the primal scalar parts of the product; all
    other parts must stay below tolerance (relative to the squared coefficient
    scale), otherwise the input is not a motion polynomial.
    """
    poly, residual = _norm_polynomial_with_residual(c)
    scale = c.coefficient_scale() ** 2
    limit = scale * 1e-2 if tol is None else tol
    if residual > limit:
        raise NotAMotionPolynomial(
            f"norm polynomial has non-real parts up to {residual:.3e}",
            residual=residual,
        )
    return poly


def qr_divide(a: DQPolynomial, b: DQPolynomial) -> tuple[DQPolynomial, DQPolynomial]:
    """Quotient and remainder of right division: a = q*b + r with deg r < deg b.

    The divisor must be monic.  Each step cancels the current leading
    coefficient l by subtracting l*b shifted appropriately, which keeps the
    invariant a = q*b + r exact at every iteration.
    """
    lead = b.leading.array
    if abs(lead[0] - 1.0) > 1e-12 or np.max(np.abs(lead[1:])) > 1e-12:
        raise NonMonicDivisor("right division requires a monic divisor")
    db = b.degree
    rem = [c.array.copy() for c in a.coeffs]
    dr = len(rem) - 1
    quo = [np.zeros(8) for _ in range(max(0, dr - db) + 1)]
    bar = [c for c in b.coeffs]
    while dr >= db:
        l = DualQuaternion.from_array(rem[dr])
        k = dr - db
        quo[k] = quo[k] + l.array
        for j, bj in enumerate(bar[:-1]):
            rem[k + j] = rem[k + j] - (l * bj).array
        rem = rem[:dr]  # leading term cancels exactly
        if not rem:
            rem = [np.zeros(8)]
        dr = len(rem) - 1
        scale = max(np.max(np.abs(c)) for c in rem)
        while dr > 0 and np.max(np.abs(rem[dr])) <= _DEGREE_TRIM * max(scale, 1e-300):
            dr -= 1
        rem = rem[: dr + 1]
    q = DQPolynomial([DualQuaternion.from_array(c) for c in quo])
    r = DQPolynomial([DualQuaternion.from_array(c) for c in rem])
    return q, r


def reverse_and_monicize(c: DQPolynomial, degree: int | None = None,
                         tol: float = 1e-6) -> MotionPolynomial:
    """Turn a polynomial in s into a monic one in u = 1/s.

    Multiplies c(1/u) by u^degree, which reverses the coefficient list, then
    divides by the leading coefficient.  That coefficient must be a real
    multiple of 1 (it is the value at s = 0, which equals the identity pose
    for interpolants anchored there).
    """
    n = c.degree if degree is None else degree
    coeffs = list(c.coeffs) + [DualQuaternion.from_scalar(0.0)] * (n - c.degree)
    rev = coeffs[::-1]
    lead = rev[-1].array
    scale = max(cc.norm() for cc in rev)
    if np.max(np.abs(lead[1:])) > tol * max(scale, 1e-300) or abs(lead[0]) <= tol * scale:
        raise NonRealLeadingCoefficient(
            "constant coefficient is not a nonzero real multiple of the identity"
        )
    inv = 1.0 / lead[0]
    return MotionPolynomial([cc * inv for cc in rev])


def minimal_polynomial(h: DualQuaternion, tol: float = DEFAULT_TOLERANCES.exact) -> QuadraticFactor:
    """The unique monic real quadratic vanishing on a rotation quaternion.

    For a rotation quaternion the product h*conj(h) and the sum h + conj(h)
    are both real, giving t^2 + r*t + s with r = -(h + conj(h)) and
    s = h*conj(h).
    """
    kind = classify(h, tol)
    if kind not in (DisplacementType.ROTATION, DisplacementType.HALF_TURN):
        raise NotARotation(f"minimal polynomial needs a rotation, got {kind.value}")
    hh = (h * h.conjugate()).array
    ss = (h + h.conjugate()).array
    scale = max(h.norm() ** 2, 1e-300)
    if max(np.max(np.abs(hh[1:])), np.max(np.abs(ss[1:]))) > 1e3 * tol * scale:
        raise NonRealCoefficients("h + conj(h) or h*conj(h) is not real")
    return QuadraticFactor(r=float(-ss[0]), s=float(hh[0]))
