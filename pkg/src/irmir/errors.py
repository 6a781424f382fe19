"""Exception hierarchy.

`UsageError` subclasses describe bad parameters (the CLI exits with 1);
everything else under `IRMIRError` is a data problem (exit code 2).
"""


class IRMIRError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(IRMIRError, ValueError):
    pass


class DataError(IRMIRError):
    pass


class InvalidChannel(DataError, ValueError):
    pass


class DimensionMismatch(DataError, ValueError):
    pass


class IndexOutOfRange(UsageError, IndexError):
    pass


class DegenerateSize(DataError, ValueError):
    pass


class InvalidDistance(UsageError):
    pass


class InvalidCoefficient(UsageError):
    pass


class InvalidGrid(UsageError):
    pass


class EmptyGrid(InvalidGrid):
    pass


class InvalidProbability(UsageError):
    pass


class ZeroMeanChannel(DataError, ValueError):
    pass


class UnsupportedFormat(DataError):
    pass


class CorruptFile(DataError):
    pass


class IoError(DataError, OSError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class MissingField(DataError, KeyError):
    def __init__(self, field, index=None):
        self.field = field
        self.index = index
        where = f" in entry {index}" if index is not None else ""
        super().__init__(f"missing required field '{field}'{where}")

    def __str__(self):
        return self.args[0]
