"""Exception types shared across the package."""


class WeylPriorError(Exception):
    """Base class for all package errors."""


class UnknownModelError(WeylPriorError):
    pass


class InvalidConfigError(WeylPriorError):
    pass


class DomainError(WeylPriorError):
    """Parameter point (or an FD stencil around it) leaves the chart domain."""


class NotSPDError(WeylPriorError):
    """A matrix expected to be symmetric positive-definite is not."""


class ClosednessError(WeylPriorError):
    """The Weyl 1-form is not closed, so its potential is undefined."""


class GridError(WeylPriorError):
    pass


class DataError(WeylPriorError):
    pass
