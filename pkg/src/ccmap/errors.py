"""Exception hierarchy.

The CLI maps each family to an exit code: configuration problems exit 2,
data problems exit 3, numeric failures exit 4.
"""


class CcmapError(Exception):
    exit_code = 1


class ConfigError(CcmapError):
    exit_code = 2


class CapacityError(ConfigError):
    """A requested size exceeds a dense-simulation or combinatorial limit."""


class BudgetError(ConfigError):
    pass


class DataError(CcmapError):
    exit_code = 3


class FormatError(DataError):
    pass


class ParseError(DataError):
    pass


class ShapeError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class UndefinedSpectrumError(DataError):
    pass


class NumericError(CcmapError):
    """Non-finite loss or parameters during optimisation."""

    exit_code = 4

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state or {}
