"""Exception hierarchy shared by all modules."""


class ArtifactError(Exception):
    """Base class for all library errors."""


class NonSelfAdjoint(ArtifactError):
    """Matrix fails its symmetry/hermiticity check."""


class NotPositiveDefinite(ArtifactError):
    """Positive definiteness required but a nonpositive pivot/eigenvalue found."""


class NotTotallyPositive(ArtifactError):
    """Some archimedean embedding of T is not positive definite."""


class SingularT(ArtifactError):
    """T is singular where a nondegenerate matrix is required."""


class PoleHit(ArtifactError):
    """A Gamma factor was evaluated at a nonpositive-integer pole."""


class DomainError(ArtifactError):
    """Scalar argument outside the supported domain."""


class OutOfConvergenceRegion(ArtifactError):
    """Parameters outside the absolutely convergent region of the cone integral."""


class QuadratureNotConverged(ArtifactError):
    """Quadrature error estimate exceeds the requested tolerance."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class StepUnderflow(ArtifactError):
    """Finite-difference step extrapolation failed to stabilize."""


class OscillatoryNotConverged(ArtifactError):
    """Oscillatory quadrature failed; carries the achieved tail bound."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved


class DegenerateFrame(ArtifactError):
    """A domain point frame violates its defining invariants."""


class OnDivisor(ArtifactError):
    """Evaluation point lies on (or too close to) the divisor D_v."""


class ZeroVector(ArtifactError):
    """The zero vector is not allowed here."""


class WrongCenter(ArtifactError):
    """d(s) machinery requires the special point s0(r) = 0."""


class MissingDoublePrimeDatum(ArtifactError):
    """s0 = 0 degenerate reduction needs the second finite Whittaker datum."""


class NonRationalInput(ArtifactError):
    """Exact reduction requires rational (or Gaussian rational) entries."""


class UnsupportedParameters(ArtifactError):
    """Parameter combination outside what the numerics support."""
