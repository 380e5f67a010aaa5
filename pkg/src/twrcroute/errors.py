"""Exception types shared across the package."""


class TwrcError(Exception):
    """Base class for all package-specific errors."""


class DomainError(TwrcError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class UnsupportedKError(TwrcError, ValueError):
    """Relay count outside the supported range 0..6."""

    def __init__(self, k):
        super().__init__(f"unsupported relay count k={k}, must be in 0..6")
        self.k = k


class ZeroRateError(TwrcError, ValueError):
    """Rate R = 0 makes the requested quantity degenerate."""


class InfeasibleRateError(TwrcError, ValueError):
    """The requested rate lies above the feasible region for this topology.

    ``condition`` names the positivity condition that was violated.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class RateVerificationError(TwrcError):
    """A link budget failed to reproduce the target rate."""

    def __init__(self, message, link=None):
        super().__init__(message)
        self.link = link
