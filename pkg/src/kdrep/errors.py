"""Exception hierarchy."""


class KDError(Exception):
    """Base class for all errors raised by kdrep."""


class ValidationError(KDError, ValueError):
    """An object violates the invariants of its quantum type."""


class DimensionMismatchError(ValidationError):
    """Operands have incompatible dimensions."""


class OrthogonalPairError(KDError, ValueError):
    """A basis pair has a cross overlap below the admissible floor."""


class OverlapFloorViolation(OrthogonalPairError):
    """A decoded parameter vector gives an inadmissible basis pair."""


class OrthogonalPrePostError(KDError, ValueError):
    """Pre- and post-selected vectors are (numerically) orthogonal."""


class FrameChainError(KDError, ValueError):
    """Consecutive representations were computed in different frames."""


class ConsistencyError(KDError, RuntimeError):
    """A nonnegative verdict failed one of its necessary consequences.

    Raised only on an internal bug: a real nonnegative representation must
    give probability vectors, response functions and substochastic maps.
    """
