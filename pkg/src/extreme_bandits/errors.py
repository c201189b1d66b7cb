"""Exception types raised across the package."""


class ExtremeBanditsError(Exception):
    """Base class for all package errors."""


class UnsupportedTail(ExtremeBanditsError, ValueError):
    """The expected maximum is undefined for this reward law (e.g. Pareto with lambda <= 1)."""


class OutOfOrderIndex(ExtremeBanditsError, ValueError):
    """A query index was not strictly larger than the last stored index."""


class EmptySuffix(ExtremeBanditsError, ValueError):
    """No stored sample has a query index beyond the requested cutoff."""


class EmptyRecord(ExtremeBanditsError, ValueError):
    """The record holds no samples."""


class EmptyInput(ExtremeBanditsError, ValueError):
    pass


class InvalidQuantile(ExtremeBanditsError, ValueError):
    pass


class EmptyHistory(ExtremeBanditsError, ValueError):
    """The arm has no batches yet."""


class SubsampleTooLarge(ExtremeBanditsError, ValueError):
    """The requested subsample exceeds the leader's history."""


class HorizonTooSmall(ExtremeBanditsError, ValueError):
    """The exploration phase does not fit in the horizon."""


class UnknownPreset(ExtremeBanditsError, KeyError):
    pass


class ConfigError(ExtremeBanditsError, ValueError):
    """Invalid experiment configuration. ``field`` names the offending key path."""

    def __init__(self, message, field=None, line=None):
        self.message = message
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
