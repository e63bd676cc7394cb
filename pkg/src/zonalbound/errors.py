"""Exception hierarchy shared by every module."""


class ZonalBoundError(Exception):
    """Base class for all library errors."""


class DegreeOutOfRange(ZonalBoundError, ValueError):
    pass


class NormalizationError(ZonalBoundError, ZeroDivisionError):
    pass


class DegenerateInput(ZonalBoundError, ValueError):
    pass


class OutOfDomain(ZonalBoundError, ValueError):
    pass


class ShapeError(ZonalBoundError, ValueError):
    pass


class PreconditionViolation(ZonalBoundError, ValueError):
    pass


class UnsupportedPattern(ZonalBoundError, ValueError):
    pass


class InvalidCode(ZonalBoundError, ValueError):
    pass


class InfeasibleCap(ZonalBoundError):
    """The Delsarte LP has no feasible point at the requested degree cap."""


class BudgetExceeded(ZonalBoundError):
    """A search or stabilization loop ran past its configured limit.

    ``best`` carries the best partial result available when the limit hit.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
