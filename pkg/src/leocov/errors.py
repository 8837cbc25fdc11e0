"""Exception hierarchy shared by all leocov modules."""


class LeocovError(Exception):
    """Base class for every error raised by leocov."""


class DomainError(LeocovError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(LeocovError, ValueError):
    """A constellation, grid or scenario definition violates an invariant."""


class ExportError(LeocovError):
    """A value cannot be represented in the requested output format."""


class OutOfTableError(DomainError):
    """A table lookup was requested outside the tabulated hull."""
