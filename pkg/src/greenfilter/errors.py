"""Exception hierarchy shared by all greenfilter modules."""


class GreenFilterError(Exception):
    """Base class for all errors raised by greenfilter."""


class NotSymmetric(GreenFilterError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class IndefiniteMatrix(GreenFilterError):
    """Matrix expected to be positive semidefinite has a negative eigenvalue."""


class NonFiniteState(GreenFilterError):
    """An ODE integration produced a non-finite state entry."""


class GridMismatch(GreenFilterError):
    """Operands live on different time grids or have inconsistent lengths."""


class OutOfHorizon(GreenFilterError):
    """A time outside [t0, T] was requested."""


class OffGridTime(GreenFilterError):
    """A time does not coincide with a grid point (no interpolation here)."""


class ParseError(GreenFilterError):
    """A model config could not be parsed."""


class ValidationError(GreenFilterError):
    """A model violates its invariants; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid model: {lines}")


class SingularFundamental(GreenFilterError):
    """A stored fundamental matrix is too ill-conditioned to invert."""


class SingularRecovery(GreenFilterError):
    """The boundary-value recovery solve is too ill-conditioned."""


class PreconditionViolation(GreenFilterError):
    """An operation was called outside its stated precondition."""


class IllConditionedBlock(GreenFilterError):
    """A Hamiltonian transition block is too ill-conditioned to invert."""


class ProjectionFailure(GreenFilterError):
    """The per-time weighted projection onto Im H could not be computed."""


class InsufficientPaths(GreenFilterError):
    """A Monte Carlo estimator needs more paths than were provided."""


class MissingRepresentative(GreenFilterError):
    """An RKHS element lacks the representative needed for inner products."""
