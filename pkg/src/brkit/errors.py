"""Exception types raised across the package."""


class BrkitError(Exception):
    """Base class for all errors raised by brkit."""


class UnsupportedCardinality(BrkitError):
    pass


class DivisionByZero(BrkitError, ZeroDivisionError):
    pass


class SingularBlock(BrkitError):
    pass


class IndexOutOfRange(BrkitError, IndexError):
    pass


class KindMismatch(BrkitError):
    pass


class BudgetExceeded(BrkitError):
    pass


class NoAdaptedHyperplane(BrkitError):
    pass


class InvalidModel(BrkitError):
    pass


class InvalidParams(BrkitError):
    pass


class ThresholdNotMet(BrkitError):
    pass


class RankBoundViolated(BrkitError):
    pass


class UnsupportedField(BrkitError):
    pass


class DimensionTooSmall(BrkitError):
    pass


class AnnihilatorDegenerate(BrkitError):
    pass


class ConfigError(BrkitError):
    pass


class FormatError(BrkitError):
    """Malformed matrix-space or certificate file."""
