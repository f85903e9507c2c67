"""Exception hierarchy.

Every error carries a stable ``code`` (the class name) and an ``exit_code`` used
by the command-line front end.
"""


class ShapeletAnomalyError(Exception):
    """Base class for all package errors."""

    exit_code = 4

    @property
    def code(self) -> str:
        return type(self).__name__


class InvalidArgs(ShapeletAnomalyError, ValueError):
    exit_code = 2


class ParseError(ShapeletAnomalyError, ValueError):
    """Malformed input file. ``row`` is 1-based (header is row 1) when known."""

    exit_code = 3

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class IoError(ShapeletAnomalyError, OSError):
    exit_code = 5


# -- dataset validation -------------------------------------------------------

class DatasetError(ShapeletAnomalyError, ValueError):
    pass


class EmptyDataset(DatasetError):
    pass


class MixedSampleRate(DatasetError):
    pass


class SeriesTooShort(DatasetError):
    pass


class NonFiniteSample(DatasetError):
    pass


# -- preprocessing ------------------------------------------------------------

class WindowTooLarge(ShapeletAnomalyError, ValueError):
    pass


# -- discovery / transform ----------------------------------------------------

class MinLenExceedsSeries(ShapeletAnomalyError, ValueError):
    pass


class ShapeletLongerThanSeries(ShapeletAnomalyError, ValueError):
    pass


class EmptyPartition(ShapeletAnomalyError, ValueError):
    pass


class NoShapeletsFound(ShapeletAnomalyError):
    pass


class EmptyShapeletSet(ShapeletAnomalyError, ValueError):
    pass


# -- forest / metrics ---------------------------------------------------------

class EmptyMatrix(ShapeletAnomalyError, ValueError):
    pass


class SingleClassTrainingSet(ShapeletAnomalyError, ValueError):
    pass


class FeatureLengthMismatch(ShapeletAnomalyError, ValueError):
    pass


class LengthMismatch(ShapeletAnomalyError, ValueError):
    pass
