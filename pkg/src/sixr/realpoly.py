"""Real polynomial utilities: root finding and quadratic factorization.

A nonnegative real polynomial of degree 2n splits into n monic quadratics,
each with at most one real root.  The list is unique up to order; sorting it
lexicographically by (linear coefficient, constant coefficient) makes the
ordering a contract that downstream factorization indexing relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NearCoincidentFactorsWarning,
    NegativePolynomial,
    OddDegree,
    ZeroPolynomial,
)

__all__ = ["QuadraticFactor", "RealPolynomial", "roots", "quadratic_factors"]

# roots this close to the real axis (relative to root magnitude) snap to real
_REAL_SNAP = 1e-8
# factors closer than this in (r, s) are flagged as nearly coincident
_COINCIDENCE_TOL = 1e-6
# sort keys are quantized so floating noise cannot flip ties on r
_SORT_QUANTUM = 1e-9


@dataclass(frozen=True, order=True)
class QuadraticFactor:
    """Monic real quadratic t^2 + r*t + s with nonpositive discriminant."""

    r: float
    s: float
    near_coincident: bool = field(default=False, compare=False)

    @property
    def discriminant(self) -> float:
        return self.r * self.r - 4.0 * self.s

    @property
    def coefficients(self) -> np.ndarray:
        """Ascending coefficients [s, r, 1]."""
        return np.array([self.s, self.r, 1.0])

    def __call__(self, t: float) -> float:
        return (t + self.r) * t + self.s


class RealPolynomial:
    """Dense real polynomial, coefficients ascending in the variable."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=float))
        # trim trailing numerically-zero coefficients
        scale = np.max(np.abs(arr))
        if scale > 0.0:
            nz = np.flatnonzero(np.abs(arr) > 1e-14 * scale)
            arr = arr[: nz[-1] + 1] if nz.size else arr[:1] * 0.0
        else:
            arr = np.zeros(1)
        arr.flags.writeable = False
        self.coeffs = arr

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        return np.polyval(self.coeffs[::-1], t)

    def derivative(self) -> "RealPolynomial":
        n = self.degree
        if n == 0:
            return RealPolynomial([0.0])
        return RealPolynomial(self.coeffs[1:] * np.arange(1, n + 1))

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            return RealPolynomial(np.convolve(self.coeffs, other.coeffs))
        if isinstance(other, (int, float)):
            return RealPolynomial(self.coeffs * other)
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"RealPolynomial({list(self.coeffs)})"


def roots(p: RealPolynomial) -> list[complex]:
    """All complex roots with multiplicity, conjugate pairs exactly conjugate.

    Eigenvalues of the companion matrix, then roots near the real axis are
    snapped onto it and near-conjugate pairs are averaged into exact mirror
    pairs.  Residuals ``|p(root)|`` stay below 1e-8 relative to the
    coefficient scale for the well-conditioned inputs this package produces.
    """
    coeffs = p.coeffs
    if p.degree < 1:
        if np.all(coeffs == 0.0):
            raise ZeroPolynomial("the zero polynomial has no defined roots")
        return []
    raw = np.roots(coeffs[::-1])
    out = []
    for z in raw:
        if abs(z.imag) <= _REAL_SNAP * max(1.0, abs(z)):
            out.append(complex(z.real, 0.0))
        else:
            out.append(complex(z))
    # pair strictly complex roots with their nearest mirror and average
    upper = [z for z in out if z.imag > 0]
    lower = [z for z in out if z.imag < 0]
    reals = [z for z in out if z.imag == 0]
    upper.sort(key=lambda z: (z.real, z.imag))
    paired = []
    remaining = list(lower)
    for z in upper:
        if not remaining:
            paired.append(z)
            continue
        j = int(np.argmin([abs(w - z.conjugate()) for w in remaining]))
        w = remaining.pop(j)
        avg = 0.5 * (z + w.conjugate())
        paired.extend([avg, avg.conjugate()])
    for w in remaining:
        paired.append(w)
    result = reals + paired
    result.sort(key=lambda z: (z.real, z.imag))
    return result


def quadratic_factors(p: RealPolynomial, tol: float = 1e-9) -> list[QuadraticFactor]:
    """Sorted quadratic factorization of a nonnegative real polynomial.

    Raises NegativePolynomial when a real root of odd multiplicity is found
    (the polynomial changes sign) and OddDegree for odd-degree input.  Factors
    closer than 1e-6 in (r, s) are flagged ``near_coincident``; downstream
    treats that as a warning, not an error.
    """
    if p.degree % 2 != 0 or p.degree == 0:
        raise OddDegree(f"need a positive even degree, got {p.degree}")
    lead = p.coeffs[-1]
    if lead < 0:
        raise NegativePolynomial("negative leading coefficient")
    monic = RealPolynomial(p.coeffs / lead)
    rts = roots(monic)
    complex_roots = [z for z in rts if z.imag > 0]
    real_roots = sorted(z.real for z in rts if z.imag == 0)

    factors = []
    for z in complex_roots:
        factors.append((-2.0 * z.real, abs(z) ** 2))
    if len(real_roots) % 2 != 0:
        raise NegativePolynomial("odd number of real roots; polynomial changes sign")
    scale = np.max(np.abs(monic.coeffs))
    for a, b in zip(real_roots[0::2], real_roots[1::2]):
        mid = 0.5 * (a + b)
        # a genuinely negative dip between two distinct simple roots
        if monic(mid) < -1e-7 * scale - 1e-12:
            raise NegativePolynomial(
                f"polynomial is negative at t={mid:.6g}; real roots have odd multiplicity"
            )
        factors.append((-(a + b), a * b))

    factors.sort(key=lambda rs: (round(rs[0] / _SORT_QUANTUM),
                                 round(rs[1] / _SORT_QUANTUM)))
    flagged = [False] * len(factors)
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            dr = factors[j][0] - factors[i][0]
            ds = factors[j][1] - factors[i][1]
            if np.hypot(dr, ds) < _COINCIDENCE_TOL:
                flagged[i] = flagged[j] = True
    if any(flagged):
        warnings.warn(
            "nearly coincident quadratic factors; factorization count may drop",
            NearCoincidentFactorsWarning,
            stacklevel=2,
        )
    return [
        QuadraticFactor(r, s, near_coincident=f)
        for (r, s), f in zip(factors, flagged)
    ]
