"""Exception taxonomy shared across the package.

The CLI maps these onto distinct exit codes (see igblab.cli).
"""


class IgbLabError(Exception):
    """Base class for all igblab errors."""


class ConfigurationError(IgbLabError):
    """Invalid configuration or mismatched shapes/dimensions."""


class DomainError(IgbLabError):
    """An argument is outside its valid domain."""


class FormatError(IgbLabError):
    """A binary or text input does not match its documented format."""


class NumericFailure(IgbLabError):
    """A computation produced non-finite values."""
