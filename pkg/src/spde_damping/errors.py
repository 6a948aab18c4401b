"""Exception types raised by the package.

Every error derives from :class:`SpdeError`, which is a ``ValueError`` so
callers that only care about "bad input" can catch the builtin.
"""


class SpdeError(ValueError):
    pass


class InvalidParameters(SpdeError):
    pass


class InvalidDesign(SpdeError):
    pass


class ShapeMismatch(SpdeError):
    pass


class CoordinateOutOfRange(SpdeError):
    pass


class DegenerateVariation(SpdeError):
    """A quadratic variation is zero, so the log-ratio is undefined."""


class ToleranceNotAchieved(ArithmeticError):
    """Quadrature could not certify the requested accuracy.

    ``bound`` carries the achieved error bound.
    """

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


class FormatError(SpdeError):
    pass
