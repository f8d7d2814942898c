"""Exception types shared across the toolkit."""


class P5Error(Exception):
    """Base class for all toolkit errors."""


class DivisionByZero(P5Error):
    pass


class UnknownSymbol(P5Error):
    pass


class ShapeError(P5Error):
    pass


class SingularSystem(P5Error):
    pass


class Inconsistent(P5Error):
    """Overdetermined linear system with no solution.

    Carries the first nonzero residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InsufficientOrder(P5Error):
    pass


class BadLeadingTerm(P5Error):
    pass


class InvalidParameter(P5Error):
    pass


class NotOnModuli(P5Error):
    pass


class OutsideOverlap(P5Error):
    pass


class OutsideChart(P5Error):
    pass


class NoSuchReduciblePoint(P5Error):
    pass


class UnexpectedParabolicData(P5Error):
    pass


class DerivationFailure(P5Error):
    """A symbolic derivation step did not close.

    This signals an implementation bug, never expected behaviour; the
    offending expression (when available) is kept in ``detail``.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class InvalidParams(P5Error):
    pass


class InvalidLoop(P5Error):
    pass


class IntegrationFailure(P5Error):
    pass


class PathBlocked(P5Error):
    """A movable pole could not be avoided; ``pole`` holds the estimate."""

    def __init__(self, message, pole=None):
        super().__init__(message)
        self.pole = pole
