"""Exception hierarchy shared by every module."""


class IsoperimError(Exception):
    """Base class for all toolkit errors."""


class InvalidParams(IsoperimError, ValueError):
    pass


class TruncationInsufficient(IsoperimError):
    pass


class MissingNeighbors(IsoperimError):
    pass


class UnsupportedKind(IsoperimError):
    pass


class OutOfDomain(IsoperimError, ValueError):
    pass


class TargetOutOfBracket(IsoperimError, ValueError):
    pass


class InfiniteMeasureSpace(IsoperimError):
    pass


class NonpositiveWeight(IsoperimError, ValueError):
    pass


class UnsupportedNorm(IsoperimError, ValueError):
    pass


class ConditionViolated(IsoperimError):
    """A constructor hypothesis (e.g. ``sup g*Phi < inf``) failed."""


class ProfilesNotOrdered(IsoperimError):
    pass


class NumericFailure(IsoperimError):
    """Degenerate numerics (extrapolation, empty curves) that invalidate a run."""
