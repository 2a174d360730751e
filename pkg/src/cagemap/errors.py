"""Exception hierarchy shared by all cagemap modules."""


class CagemapError(Exception):
    """Base class for every error raised by this package."""


class InputError(CagemapError, ValueError):
    """Malformed geometry, scene or configuration input."""


class PreconditionError(CagemapError):
    """A query was issued outside the domain where it is defined."""


class EmptyApproximation(InputError):
    """No ball of the requested radius fits inside a polygon."""

    def __init__(self, message, polygon=None):
        super().__init__(message)
        self.polygon = polygon


class DegenerateInput(CagemapError):
    """Fewer than three distinct sites, or all sites collinear."""


class EpsilonTooLarge(InputError):
    """The core margin must be strictly smaller than the object ball radius."""


class CellNotFree(PreconditionError):
    """An oracle endpoint falls in an occupied grid cell."""


class NoFiniteWidth(CagemapError):
    """Two configurations stay connected at every filtration value."""
