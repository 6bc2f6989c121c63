"""Exception hierarchy shared by all pipeline stages."""


class RoutineError(Exception):
    """Base class for every error raised by this package."""


class LogParseError(RoutineError):
    """A row of the input CSV could not be interpreted."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class SchemaError(RoutineError):
    """The CSV header lacks a mandatory column."""


class ConfigError(RoutineError):
    """Invalid configuration, e.g. a ui_type with no context schema entry."""


class ParameterError(RoutineError, ValueError):
    """A numeric or enumerated parameter is out of range."""
