"""Exception hierarchy shared by every module."""


class DensityLabError(Exception):
    """Base class for all library errors."""


class DomainError(DensityLabError, ValueError):
    """A numeric parameter lies outside its supported range."""


class HorizonExceeded(DensityLabError):
    """A search or scan would have to go past the configured cap."""


class InsufficientHorizon(DensityLabError):
    """The horizon is too small to produce the required checkpoints."""


class InsufficientElements(DensityLabError):
    """Too few elements below the horizon for the requested statistic."""


class PreconditionFailed(DensityLabError):
    """An operation's numerical precondition was not met."""


class OutOfRange(DensityLabError):
    """A requested target value lies outside the attainable interval."""


class NonConvergent(DensityLabError):
    """A filter-limit surrogate did not settle on a single cluster point."""

    def __init__(self, message, spread=float("nan"), atom=None):
        super().__init__(message)
        self.spread = spread
        self.atom = atom


class NotDisjoint(DensityLabError):
    def __init__(self, message, element):
        super().__init__(message)
        self.element = element


class ParseError(DensityLabError, ValueError):
    """Set-expression text could not be parsed."""

    def __init__(self, message, offset, expected=()):
        super().__init__(f"{message} at offset {offset}" + (f" (expected one of: {', '.join(sorted(expected))})" if expected else ""))
        self.offset = offset
        self.expected = frozenset(expected)
