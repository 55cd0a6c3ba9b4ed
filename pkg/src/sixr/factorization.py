"""All factorizations of a motion polynomial into linear rotation factors.

A generic motion polynomial of degree n splits as (t-h_1)...(t-h_n) in n!
ways, one per ordering of the quadratic factors of its norm polynomial.  Each
linear factor is tagged with the quadratic it annihilates, and the leftmost-
to-rightmost sequence of tag indices (the signature) identifies the
factorization: with the sorted factor list, the recursion below emits the six
degree-three signatures in the fixed order (3,2,1), (2,3,1), (3,1,2),
(1,3,2), (2,1,3), (1,2,3).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dualquat import (
    DualQuaternion,
    PlueckerLine,
    axis_of,
    classify,
    DisplacementType,
)
from .errors import FactorizationFails, NonZeroRemainder, NotARotation
from .motionpoly import (
    DQPolynomial,
    MotionPolynomial,
    norm_polynomial,
    poly_multiply,
    qr_divide,
)
from .realpoly import QuadraticFactor, quadratic_factors

__all__ = ["LinearFactor", "Factorization", "OpenChain", "fac",
           "verify_factorization", "open_chain"]

# |primal(lcoeff(L))| below this fraction of the remainder scale fails
_INVERTIBILITY_TOL = 1e-10
# relative residual allowed for the exact quotient step
_REMAINDER_TOL = 1e-8


@dataclass(frozen=True)
class LinearFactor:
    """A factor t - h together with the norm-polynomial quadratic it kills."""

    h: DualQuaternion
    tag: QuadraticFactor
    tag_index: int  # 1-based position of the tag in the sorted factor list

    def polynomial(self) -> DQPolynomial:
        return DQPolynomial.linear_factor(self.h)


@dataclass(frozen=True)
class Factorization:
    """Ordered linear factors, leftmost (base-proximal) first."""

    factors: tuple[LinearFactor, ...]

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(f.tag_index for f in self.factors)

    def product(self) -> DQPolynomial:
        acc = DQPolynomial.constant(1.0)
        for f in self.factors:
            acc = poly_multiply(acc, f.polynomial())
        return acc

    def __len__(self):
        return len(self.factors)


@dataclass(frozen=True)
class OpenChain:
    """Serial revolute chain realizing one factorization, base-proximal first."""

    axes: tuple[PlueckerLine, ...]
    joints: tuple[DualQuaternion, ...]


def _match_tags(recomputed, inherited):
    """Pair recomputed quadratic factors with inherited tags by nearest (r, s).

    Recursion levels recompute the factor list from the quotient's norm
    polynomial; matching against the parent's remaining tags keeps tag
    identity (and hence signatures) stable across levels.
    """
    n = len(recomputed)
    best_perm, best_cost = None, None
    for perm in itertools.permutations(range(n)):
        cost = 0.0
        for i, p in enumerate(perm):
            cost += abs(recomputed[i].r - inherited[p][1].r)
            cost += abs(recomputed[i].s - inherited[p][1].s)
        if best_cost is None or cost < best_cost:
            best_cost, best_perm = cost, perm
    return [(inherited[p][0], recomputed[i]) for i, p in enumerate(best_perm)]


def _fac_recursive(c: DQPolynomial, inherited) -> list[list[LinearFactor]]:
    n = c.degree
    if n == 0:
        return [[]]
    norm = norm_polynomial(c)
    recomputed = quadratic_factors(norm)
    if inherited is None:
        tagged = [(i + 1, m) for i, m in enumerate(recomputed)]
    else:
        tagged = _match_tags(recomputed, inherited)
    scale = c.coefficient_scale()
    results = []
    for pos, (index, m) in enumerate(tagged):
        divisor = DQPolynomial.from_coefficient_array(
            np.outer(m.coefficients, np.eye(8)[0]), trim=False
        )
        _, lin = qr_divide(c, divisor)
        coeffs = list(lin.coeffs) + [DualQuaternion.from_scalar(0.0)] * (1 - lin.degree)
        l0, l1 = coeffs[0], coeffs[1]
        lin_scale = max(l0.norm(), l1.norm(), 1e-300)
        if np.linalg.norm(l1.array[:4]) <= _INVERTIBILITY_TOL * lin_scale:
            raise FactorizationFails(
                "linear remainder has a non-invertible leading coefficient"
            )
        h = -1.0 * (l1.inverse() * l0)
        quotient, residue = qr_divide(c, DQPolynomial.linear_factor(h))
        if residue.coefficient_scale() > _REMAINDER_TOL * scale:
            raise NonZeroRemainder(
                f"division by t - h left residual {residue.coefficient_scale():.3e}"
            )
        rest = tagged[:pos] + tagged[pos + 1:]
        factor = LinearFactor(h=h, tag=m, tag_index=index)
        for sub in _fac_recursive(quotient, rest):
            results.append(sub + [factor])
    return results


def fac(c: MotionPolynomial) -> list[Factorization]:
    """All factorizations of a monic motion polynomial into linear factors.

    For each sorted quadratic factor M of the norm polynomial, the remainder
    of c under division by M is a linear polynomial whose unique zero h gives
    the rightmost factor t - h; the quotient by t - h recurses.  Output order
    is determined by the sorted factor list, so indices are reproducible.
    """
    raw = _fac_recursive(c, None)
    return [Factorization(factors=tuple(fs)) for fs in raw]


def verify_factorization(c: DQPolynomial, f: Factorization) -> float:
    """Max coefficient deviation between c and the product of f's factors,
    relative to c's coefficient scale."""
    prod = f.product()
    ca, pa = c.coefficient_array, prod.coefficient_array
    n = max(len(ca), len(pa))
    ca = np.vstack([ca, np.zeros((n - len(ca), 8))])
    pa = np.vstack([pa, np.zeros((n - len(pa), 8))])
    return float(np.max(np.abs(ca - pa)) / max(c.coefficient_scale(), 1e-300))


def open_chain(f: Factorization) -> OpenChain:
    """Joint axes of the serial chain encoded by a factorization.

    The leftmost factor is the base-proximal joint, whose axis stays fixed in
    space over the whole motion.  A factor that is not a rotation (a
    translation quaternion, which numeric input produces with negligible
    probability) is reported, never silently skipped.
    """
    axes = []
    for lf in f.factors:
        kind = classify(lf.h)
        if kind not in (DisplacementType.ROTATION, DisplacementType.HALF_TURN):
            raise NotARotation(
                f"chain factor is a {kind.value}, not a rotation; "
                "no revolute joint axis exists"
            )
        axes.append(axis_of(lf.h))
    return OpenChain(axes=tuple(axes), joints=tuple(lf.h for lf in f.factors))
