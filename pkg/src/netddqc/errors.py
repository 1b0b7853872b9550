"""Exception hierarchy shared by all modules."""


class NetDDQCError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NetDDQCError, ValueError):
    """Input outside the domain of an operation (empty graph, length mismatch, ...)."""


class GraphFormatError(NetDDQCError, ValueError):
    """Malformed edge-list input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        if path is not None and line is not None:
            where = f"{path}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        else:
            where = f"{path}: " if path is not None else ""
        super().__init__(where + message)


class FitError(NetDDQCError, ArithmeticError):
    """A numerical fit could not be performed (e.g. degenerate support)."""


class UndefinedFeatureError(NetDDQCError, ArithmeticError):
    """A structural feature is mathematically undefined for the given graph."""


class ConfigError(NetDDQCError, ValueError):
    """Invalid generator parameters or experiment configuration."""
