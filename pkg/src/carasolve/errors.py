"""Exception types raised by carasolve."""


class CarasolveError(Exception):
    """Base class for all library errors."""


class ConfigurationError(CarasolveError, ValueError):
    """Bad builtin name, parameters, or sampler/grid setup."""


class DomainError(CarasolveError, ValueError):
    """A point lies outside the region an object was built for."""


class PreconditionError(CarasolveError, ValueError):
    """An operation was called with inputs violating its contract."""


class ShapeError(CarasolveError, ValueError):
    """Grid functions live on different partitions."""


class NotCertifiedError(CarasolveError):
    """The solver has no certified algorithm for this right-hand side."""
