"""Exception types shared across the package."""


class CvsatError(Exception):
    """Base class for all package errors."""


class DomainError(CvsatError, ValueError):
    """An argument lies outside the physically meaningful domain."""


class NumericalError(CvsatError, ArithmeticError):
    """A computation produced an inconsistent or non-finite result."""


class ConfigError(CvsatError, ValueError):
    """A scenario file or option set failed validation."""
