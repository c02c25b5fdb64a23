"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration: bad sizes, unknown names, mismatched dimensions."""


class DomainError(ValueError):
    """A point lies outside the reference domain of a closed-form field."""


class InsufficientDataError(ValueError):
    """Too few usable samples for a rate fit."""


class NumericalFailure(RuntimeError):
    """A numerical procedure failed to produce a usable result."""


class ConfigParseError(ConfigurationError):
    """Syntax or content error in a study configuration file."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
