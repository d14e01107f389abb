"""Exception types raised across the package."""


class AptemperError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(AptemperError, ValueError):
    pass


class NotPositiveDefinite(AptemperError, ValueError):
    pass


class SingularDesign(AptemperError, ValueError):
    pass


class ParseError(AptemperError, ValueError):
    """Malformed regression CSV; carries the offending row and column."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class ConstantColumn(AptemperError, ValueError):
    pass


class DegenerateSupport(AptemperError):
    """No level pair carries positive swap-proposal weight."""


class TargetEvaluationError(AptemperError, RuntimeError):
    pass


class ConfigError(AptemperError, ValueError):
    """Invalid run/bench/target configuration; ``field`` names the key."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
