"""Exception types shared across the package."""


class LoopSoupError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(LoopSoupError, ValueError):
    """Matrix entries are malformed (non-finite, wrong shape, ...)."""


class NotAcceptable(LoopSoupError, ValueError):
    """The entrywise absolute matrix has spectral radius >= 1 - tolerance."""


class NotPositive(LoopSoupError, ValueError):
    """Operation requires a matrix with nonnegative real entries."""


class NotPositiveDefinite(LoopSoupError, ValueError):
    """Operation requires a (Hermitian) positive definite matrix."""


class NumericallySingular(LoopSoupError, ArithmeticError):
    """An LU pivot fell below the singularity tolerance."""


class NumericalFailure(LoopSoupError, ArithmeticError):
    """A computed quantity failed its numerical sanity check."""


class UnknownSite(LoopSoupError, KeyError):
    """A site label is not part of the state space."""


class InvalidPath(LoopSoupError, ValueError):
    """A path violates the constraints of the operation (self-avoidance, endpoint, ...)."""


class InvalidGraph(LoopSoupError, ValueError):
    """Graph document is malformed (bad indices, self-loop, duplicate edge)."""


class Disconnected(LoopSoupError, ValueError):
    """The graph is not connected."""


class TooLarge(LoopSoupError, ValueError):
    """An enumeration would exceed its size budget."""


class InvalidShape(LoopSoupError, ValueError):
    """A gamma shape parameter is negative."""


class OutOfDomain(LoopSoupError, ValueError):
    """Inputs left the domain where the closed form is defined."""


class BranchError(LoopSoupError, ArithmeticError):
    """A complex power is ambiguous because the principal branch cut was crossed."""


class AcceptabilityWarning(UserWarning):
    """A derived matrix is not acceptable; series-based checks will not converge."""
