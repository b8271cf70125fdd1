"""Exception types shared across the package."""


class CoopKitchenError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CoopKitchenError):
    """Raised when textual input cannot be parsed.

    Carries an optional position so callers can point at the offending
    character or element.
    """

    def __init__(self, message: str, *, line: int | None = None, col: int | None = None,
                 index: int | None = None):
        self.line = line
        self.col = col
        self.index = index
        where = ""
        if line is not None:
            where = f" (line {line}, col {col})"
        elif index is not None:
            where = f" (element {index})"
        super().__init__(message + where)


class ValidationError(CoopKitchenError):
    """Raised when parsed input violates a domain constraint."""

    def __init__(self, message: str, *, index: int | None = None):
        self.index = index
        where = f" (element {index})" if index is not None else ""
        super().__init__(message + where)


class SecurityError(CoopKitchenError):
    """Raised when an expression uses constructs outside the safe grammar."""


class EvalError(CoopKitchenError):
    """Raised when a parsed condition cannot be evaluated against a document."""


class NoPath(CoopKitchenError):
    """Raised when every requested path goal is unreachable."""


class NotReady(CoopKitchenError):
    """Raised when a macro cannot be compiled because inputs are missing.

    ``missing`` names the blocking ingredient or resource when known.
    """

    def __init__(self, message: str, *, missing: str | None = None):
        self.missing = missing
        super().__init__(message)


class ConfigError(CoopKitchenError):
    """Raised for invalid experiment or agent configuration."""


class ReplayError(CoopKitchenError):
    """Raised when an episode log cannot be replayed."""


class BackendError(CoopKitchenError):
    """Raised by text-completion backends on unrecoverable failures."""


class FixtureExhausted(BackendError):
    """Raised when a scripted backend has no response left for a request."""
