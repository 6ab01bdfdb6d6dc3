"""Exception hierarchy.

Every failure raised by the library derives from :class:`CarlemanError`,
so callers can catch the whole family at once. Argument-shaped failures
also derive from :class:`ValueError`.
"""


class CarlemanError(Exception):
    """Base class for all library errors."""


class InvalidArgument(CarlemanError, ValueError):
    pass


class IncompatibleGrids(CarlemanError, ValueError):
    pass


class NonFiniteKernel(CarlemanError, ValueError):
    pass


class PreconditionViolation(CarlemanError, ValueError):
    pass


class NoConvergence(CarlemanError, RuntimeError):
    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class NotNormal(CarlemanError, ValueError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SectorTooWide(CarlemanError, ValueError):
    pass


class ZeroOperator(CarlemanError, ValueError):
    pass


class SectorRequired(CarlemanError, ValueError):
    pass


class InvalidFamily(CarlemanError, ValueError):
    pass


class NotPositive(CarlemanError, ValueError):
    pass


class SymbolError(CarlemanError, ValueError):
    pass


class UnknownSymbol(CarlemanError, KeyError):
    pass


class InvalidSequence(CarlemanError, ValueError):
    pass


class GridTooCoarse(CarlemanError, ValueError):
    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class UnknownCheck(CarlemanError, KeyError):
    pass
