"""Exception hierarchy shared by every module of the package."""


class AAMError(Exception):
    """Base class for all errors raised by :mod:`aamodels`.

    ``step`` is filled in by the fitting loop with the algorithm step
    (``"A"``, ``"P"``, ``"R"`` or ``"U"``) during which the error occurred.
    """

    step = None


class ParseError(AAMError):
    def __init__(self, message, row=None, col=None):
        super().__init__(message)
        self.row = row
        self.col = col


class EmptyInput(AAMError):
    pass


class DomainError(AAMError, ValueError):
    pass


class ShapeError(AAMError, ValueError):
    pass


class SpecError(AAMError, ValueError):
    pass


class SingularDesign(AAMError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DegenerateDirection(AAMError):
    pass


class DegenerateNeighborhood(AAMError):
    pass


class DegenerateProjection(AAMError):
    pass


class NothingToFit(AAMError):
    pass


class ZeroProjectedVariance(AAMError):
    pass


class InvariantViolation(AAMError):
    pass


class FormatError(AAMError):
    pass


class Unsupported(AAMError):
    pass
