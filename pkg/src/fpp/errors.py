"""Exception hierarchy shared by every module of the package."""


class FppError(Exception):
    """Base class for all errors raised by :mod:`fpp`."""


class MissingCriticalProbability(FppError):
    pass


class EdgeOutOfBox(FppError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class IndexOutOfRange(FppError, IndexError):
    pass


class Disconnected(FppError):
    pass


class NoCertificate(FppError):
    pass


class ZeroWeightPresent(FppError):
    pass


class CapExceeded(FppError):
    """Search hit its exploration cap.

    ``best`` carries the best value found so far; it is only an upper bound.
    """

    def __init__(self, message, best=None, optimizers=()):
        super().__init__(message)
        self.best = best
        self.optimizers = list(optimizers)


class SaturatedEnumeration(FppError):
    pass


class InfeasibleGeometry(FppError):
    pass


class AlphaNotAtom(FppError):
    pass


class NoHit(FppError):
    pass


class UncertifiedFPT(FppError):
    pass


class WrongKind(FppError):
    pass


class ParseError(FppError, ValueError):
    pass


class ValidationError(FppError, ValueError):
    pass
