"""Exception hierarchy for the sixr package.

Every error raised by the library derives from :class:`SixrError` so callers
can catch library failures with a single except clause.  The CLI maps the
leaf classes onto distinct exit codes.
"""


class SixrError(Exception):
    """Base class for all library errors."""


# --- dual quaternion layer ---------------------------------------------------

class ZeroInput(SixrError):
    """An operation received a (numerically) zero dual quaternion."""


class NotARotation(SixrError):
    """Axis or angle extraction attempted on a non-rotation element."""


class OnExceptional(SixrError):
    """The primal part vanishes; the element is no rigid displacement."""


class NotARotationMatrix(SixrError):
    """3x3 matrix is not a proper rotation within tolerance."""


# --- polynomial layer --------------------------------------------------------

class NotAMotionPolynomial(SixrError):
    """The norm polynomial has a non-real part above tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NonMonicDivisor(SixrError):
    """Polynomial division requires a monic divisor."""


class NonRealLeadingCoefficient(SixrError):
    """Monicization requires a leading coefficient proportional to 1."""


class NonRealCoefficients(SixrError):
    """A computed quadratic has coefficients with non-real parts."""


class ZeroPolynomial(SixrError):
    """Root finding on the zero polynomial."""


class NegativePolynomial(SixrError):
    """A real polynomial required to be nonnegative takes negative values."""


class OddDegree(SixrError):
    """Quadratic factorization needs an even-degree polynomial."""


# --- factorization layer -----------------------------------------------------

class FactorizationFails(SixrError):
    """Linear remainder has a non-invertible leading coefficient."""


class NonZeroRemainder(SixrError):
    """A division expected to be exact left a remainder above tolerance."""


# --- interpolation layer -----------------------------------------------------

class DegenerateSpan(SixrError):
    """The four poses do not span a projective three-space."""


class SpanMeetsExceptional(SixrError):
    """The pose span intersects the exceptional three-space."""


class InfiniteParameter(SixrError):
    """A parameter value escaped to infinity (input violates genericity)."""


class RankDefect(SixrError):
    """Interpolation system nullspace is not one-dimensional."""


class DegenerateFamily(SixrError):
    """The interpolation family is unusable (bad half-turn or parameters)."""


# --- synthesis layer ---------------------------------------------------------

class DegenerateFactor(SixrError):
    """Quadratic factor with vanishing discriminant; angle formulas break."""


class QuadratureFailure(SixrError):
    """Adaptive quadrature did not reach the requested tolerance."""


class SegmentUndefined(SixrError):
    """No well-defined parameter segment (order defect present)."""


class InvalidPair(SixrError):
    """Factorization pair shares a boundary factor; linkage would degenerate."""


class ClosureViolation(SixrError):
    """Assembled loop fails the projective closure check."""


class CoincidentAxes(SixrError):
    """Consecutive joint axes coincide; DH parameters are not defined."""


class SynthesisInfeasible(SixrError):
    """No real half-turns exist; the interpolation problem has no solution."""


class OrderDefect(SixrError):
    """Poses are visited out of sequence in every family."""


# --- warnings ----------------------------------------------------------------

class NearDoubleRootWarning(UserWarning):
    """The half-turn quadratic is near a double root; results may be unstable."""


class NearCoincidentFactorsWarning(UserWarning):
    """Two quadratic factors nearly coincide; factorizations may merge."""
