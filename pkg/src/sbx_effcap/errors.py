"""Exception types shared across the package."""


class SbxError(Exception):
    """Base class for all package errors."""


class DomainError(SbxError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ParameterDomainError(DomainError):
    """A channel or delay parameter violates one of its invariants.

    ``invariant`` carries a short human-readable statement of the violated
    constraint (e.g. ``"m_x >= 0.5"``).
    """

    def __init__(self, message, invariant=None):
        super().__init__(message)
        self.invariant = invariant


class NonConvergenceError(SbxError, ArithmeticError):
    """A series or quadrature failed to reach its tolerance within budget."""


class InapplicableBoundError(SbxError):
    """The closed-form truncation bound does not apply (its series diverges)."""


class DegenerateError(SbxError, ArithmeticError):
    """A derived quantity is undefined for the given (degenerate) inputs."""
