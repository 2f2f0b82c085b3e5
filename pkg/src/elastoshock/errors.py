"""Exception types shared across modules."""


class ParameterError(ValueError):
    """Invalid argument (bad shape, out-of-range parameter, degenerate jump)."""


class AdmissibilityError(ValueError):
    """Input violates a physical precondition (Lax conditions, det F > 0, ...)."""


class NoPhysicalShockError(AdmissibilityError):
    """The jump relations admit no real downstream velocity."""


class InternalConsistencyError(RuntimeError):
    """A result contradicts a proven property; signals a bug, not bad data."""


class DegenerateFrequencyError(ArithmeticError):
    """The boundary symbol loses rank at the requested frequency."""
