"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of the requested quantity."""


class BasisOverflowError(DomainError):
    """A basis number exceeds the double-precision range.

    Raised instead of returning inf so callers can tell a genuine overflow
    apart from a divergent formula.
    """


class SingularDecompositionError(DomainError):
    """Partial-fraction coefficients are individually singular at gamma = 0."""


class NonConvergenceError(RuntimeError):
    """A series truncation failed to reach the requested tolerance.

    The partial estimate accumulated when the term budget ran out is attached
    as ``estimate``.
    """

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate
