"""Exception types raised across the package."""


class NcRestError(Exception):
    """Base class for every error raised by ncrest."""


class ZeroInverse(NcRestError, ZeroDivisionError):
    pass


class EmptyWindow(NcRestError, ValueError):
    pass


class NonContiguousIds(NcRestError, ValueError):
    pass


class CoefficientCountMismatch(NcRestError, ValueError):
    pass


class ZeroNewestCoefficient(NcRestError, ValueError):
    pass


class LengthExceedsPayload(NcRestError, ValueError):
    pass


class MalformedHeader(NcRestError, ValueError):
    """Wire bytes (or a header object) violate the coded-message layout."""


class WindowFull(NcRestError):
    """The subset coding window is full; the REST layer has to retry later."""


class InvalidResponse(NcRestError, ValueError):
    pass


class NonConvergence(NcRestError, RuntimeError):
    """A simulation hit its round cap before every message was delivered."""


class DomainError(NcRestError, ValueError):
    pass
