"""Exception types raised across the package."""


class QwreError(Exception):
    """Base class for package errors."""


class InvalidArgumentError(QwreError, ValueError):
    """An argument is outside the operation's domain."""


class ConfigurationError(QwreError, ValueError):
    """A measure, environment spec or run configuration is malformed."""


class ResourceLimitError(QwreError):
    """A request exceeds an enumeration or precision cap."""


class InternalConsistencyError(QwreError, ArithmeticError):
    """A result violates a guarantee that holds mathematically; signals a bug."""
