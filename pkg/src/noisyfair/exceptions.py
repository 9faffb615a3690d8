"""Exception hierarchy.

Data-shaped problems derive from :class:`DataError`, configuration problems
from :class:`ConfigError`; the CLI maps them to distinct exit codes.
"""


class NoisyFairError(Exception):
    pass


class ConfigError(NoisyFairError, ValueError):
    pass


class DataError(NoisyFairError, ValueError):
    pass


# noise model
class ShapeError(ConfigError):
    pass


class RowSumError(ConfigError):
    pass


class DominanceError(ConfigError):
    pass


class BinaryOnlyError(NoisyFairError, ValueError):
    pass


class NonPositiveDenominator(NoisyFairError, ArithmeticError):
    pass


# data
class GroupRangeError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, row, column, message=""):
        self.row = row
        self.column = column
        super().__init__(f"row {row}, column {column!r}: {message}")


class UnknownCategory(DataError):
    def __init__(self, row, column, value):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}: unknown category {value!r} in column {column!r}")


class MissingColumn(DataError):
    pass


class EmptySplit(DataError):
    pass


class BadProportions(ConfigError):
    pass


# metrics / constraints
class LengthMismatch(DataError):
    pass


class DimensionMismatch(NoisyFairError, ValueError):
    pass


class AllUndefined(NoisyFairError, ValueError):
    pass


# solver / training
class NonFiniteObjective(NoisyFairError, FloatingPointError):
    pass


class InfeasibleProgram(NoisyFairError, RuntimeError):
    def __init__(self, message, result=None, classifier=None):
        super().__init__(message)
        self.result = result
        self.classifier = classifier
