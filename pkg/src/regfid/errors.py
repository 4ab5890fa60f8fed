"""Exception types raised by regfid."""


class RegfidError(ValueError):
    """Base class for all library errors."""


class DimensionMismatch(RegfidError):
    pass


class NotTracePreserving(RegfidError):
    pass


class BudgetExceeded(RegfidError):
    """Requested object would exceed the configured memory budget."""


class NotHermitian(RegfidError):
    pass


class NonFiniteObjective(RegfidError):
    pass


class LinearlyDependentPair(RegfidError):
    pass


class InvalidProbabilities(RegfidError):
    pass


class EpsilonOutOfRange(RegfidError):
    pass


class ChannelFileError(RegfidError):
    """Malformed channel description file.

    ``field`` names the offending key (when known) and ``line`` the 1-based
    source line (when the parser reported one).
    """

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ConfigError(RegfidError):
    """Invalid experiment configuration; ``field`` names the offending option."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
