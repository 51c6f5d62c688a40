"""Exception types shared across the package."""


class DCSetsError(Exception):
    """Base class for all errors raised by :mod:`dcsets`."""


class DomainError(DCSetsError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class PreconditionError(DCSetsError, ValueError):
    """An operation was called with inputs violating its stated precondition."""
