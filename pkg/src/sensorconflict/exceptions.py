"""Exception types raised across the package."""


class ConflictFusionError(ValueError):
    """Base class for all package errors."""


class NonFiniteInputError(ConflictFusionError):
    pass


class WindowOutOfRangeError(ConflictFusionError):
    pass


class UnequalLengthsError(ConflictFusionError):
    pass


class UnknownSourceError(ConflictFusionError):
    pass


class TooManySourcesError(ConflictFusionError):
    pass


class DegenerateSpanError(ConflictFusionError):
    pass


class IncompleteLatticeError(ConflictFusionError):
    pass


class DimensionMismatchError(ConflictFusionError):
    pass


class NoiseSpecError(ConflictFusionError):
    pass


class IngestionError(ConflictFusionError):
    """Malformed input file. ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
